#pragma once

#include "phdyn/maps/da_map.hpp"
#include "phdyn/maps/denjoy.hpp"
#include "phdyn/maps/horseshoe_map.hpp"
#include "phdyn/maps/map.hpp"

#include <json.hpp>

#include <string>

namespace phdyn::maps {

// Field readers shared by the map and run-config parsers.  Errors are
// InputError with a JSON-pointer prefix.
namespace spec {
using json = nlohmann::json;
double real(const json& j, const std::string& ptr);
long long integer(const json& j, const std::string& ptr);
Vec real_vector(const json& j, const std::string& ptr, int expected = -1);
linear::IntegerMatrix int_matrix(const json& j, const std::string& ptr);
void allow_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys);
const json& require(const json& obj, const std::string& ptr, const char* key);
}  // namespace spec

MapPtr make_map(const nlohmann::json& j, const std::string& ptr = "/map");

DenjoyParams denjoy_params(const nlohmann::json& j, const std::string& ptr);
HorseshoeSpec horseshoe_spec(const nlohmann::json& j, const std::string& ptr);

}  // namespace phdyn::maps
