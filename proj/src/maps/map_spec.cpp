#include "phdyn/maps/map_spec.hpp"

#include <charconv>
#include <cmath>
#include <set>

namespace phdyn::maps {

namespace spec {

namespace {
[[noreturn]] void bad(const std::string& ptr, const std::string& what) { throw InputError(ptr + ": " + what); }
}  // namespace

double real(const json& j, const std::string& ptr) {
  double v = 0.0;
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad(ptr, "expected a decimal string, got \"" + s + "\"");
  } else if (j.is_number()) {
    v = j.get<double>();
  } else {
    bad(ptr, "expected a real (decimal string or number)");
  }
  if (!std::isfinite(v)) bad(ptr, "value must be finite");
  return v;
}

long long integer(const json& j, const std::string& ptr) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
  }
  bad(ptr, "expected an integer");
}

Vec real_vector(const json& j, const std::string& ptr, int expected) {
  if (!j.is_array()) bad(ptr, "expected an array");
  const int n = static_cast<int>(j.size());
  if (expected >= 0 && n != expected) bad(ptr, "expected " + std::to_string(expected) + " entries");
  if (n < 1 || n > kMaxDim) bad(ptr, "vector length must be 1..3");
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = real(j[i], ptr + "/" + std::to_string(i));
  return v;
}

linear::IntegerMatrix int_matrix(const json& j, const std::string& ptr) {
  if (!j.is_array() || j.empty()) bad(ptr, "expected an array of integer rows");
  std::vector<std::vector<long long>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = ptr + "/" + std::to_string(i);
    if (!j[i].is_array()) bad(p, "expected an array of integers");
    std::vector<long long> row;
    for (std::size_t k = 0; k < j[i].size(); ++k) {
      if (!j[i][k].is_number_integer()) bad(p + "/" + std::to_string(k), "expected an integer");
      row.push_back(j[i][k].get<long long>());
    }
    rows.push_back(row);
  }
  try {
    return linear::IntegerMatrix(rows);
  } catch (const InputError& e) {
    bad(ptr, e.what());
  }
}

void allow_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad(ptr, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) bad(ptr + "/" + it.key(), "unknown field");
}

const json& require(const json& obj, const std::string& ptr, const char* key) {
  if (!obj.is_object()) bad(ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(ptr + "/" + key, "missing required field");
  return *it;
}

}  // namespace spec

using spec::json;

DenjoyParams denjoy_params(const json& j, const std::string& ptr) {
  spec::allow_keys(j, ptr, {"kind", "rotation_number", "ratio", "inserted_mass", "tail_tol"});
  DenjoyParams p;
  p.rotation_number = spec::real(spec::require(j, ptr, "rotation_number"), ptr + "/rotation_number");
  if (j.contains("ratio")) p.ratio = spec::real(j["ratio"], ptr + "/ratio");
  if (j.contains("inserted_mass")) p.inserted_mass = spec::real(j["inserted_mass"], ptr + "/inserted_mass");
  if (j.contains("tail_tol")) p.tail_tol = spec::real(j["tail_tol"], ptr + "/tail_tol");
  return p;
}

HorseshoeSpec horseshoe_spec(const json& j, const std::string& ptr) {
  spec::allow_keys(j, ptr, {"kind", "offsets", "eta", "normalizer"});
  HorseshoeSpec s;
  if (j.contains("offsets")) {
    Vec v(4);
    const auto& a = j["offsets"];
    if (!a.is_array() || a.size() != 4) throw InputError(ptr + "/offsets: expected 4 entries");
    for (int i = 0; i < 4; ++i) s.offsets[i] = spec::real(a[i], ptr + "/offsets/" + std::to_string(i));
  }
  if (j.contains("eta")) {
    const auto& a = j["eta"];
    if (!a.is_array() || a.size() != 4) throw InputError(ptr + "/eta: expected 4 entries");
    for (int i = 0; i < 4; ++i) s.eta[i] = spec::real(a[i], ptr + "/eta/" + std::to_string(i));
  }
  if (j.contains("normalizer")) s.normalizer = spec::real(j["normalizer"], ptr + "/normalizer");
  return s;
}

MapPtr make_map(const json& j, const std::string& ptr) {
  const auto& kind_j = spec::require(j, ptr, "kind");
  if (!kind_j.is_string()) throw InputError(ptr + "/kind: expected a string");
  const std::string kind = kind_j.get<std::string>();

  if (kind == "linear") {
    spec::allow_keys(j, ptr, {"kind", "matrix"});
    return std::make_shared<LinearMap>(spec::int_matrix(spec::require(j, ptr, "matrix"), ptr + "/matrix"));
  }
  if (kind == "translation") {
    spec::allow_keys(j, ptr, {"kind", "vector"});
    return std::make_shared<TranslationMap>(spec::real_vector(spec::require(j, ptr, "vector"), ptr + "/vector"));
  }
  if (kind == "circle_product") {
    spec::allow_keys(j, ptr, {"kind", "factors"});
    const auto& fs = spec::require(j, ptr, "factors");
    if (!fs.is_array() || fs.empty() || fs.size() > 3) throw InputError(ptr + "/factors: expected 1..3 factors");
    std::vector<CircleProductMap::Factor> factors;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string p = ptr + "/factors/" + std::to_string(i);
      spec::allow_keys(fs[i], p, {"shift", "amplitude", "frequency"});
      CircleProductMap::Factor f;
      if (fs[i].contains("shift")) f.shift = spec::real(fs[i]["shift"], p + "/shift");
      if (fs[i].contains("amplitude")) f.amplitude = spec::real(fs[i]["amplitude"], p + "/amplitude");
      if (fs[i].contains("frequency")) {
        f.frequency = static_cast<int>(spec::integer(fs[i]["frequency"], p + "/frequency"));
        if (f.frequency < 1 || f.frequency > 64) throw InputError(p + "/frequency: must lie in 1..64");
      }
      factors.push_back(f);
    }
    return std::make_shared<CircleProductMap>(factors);
  }
  if (kind == "da") {
    spec::allow_keys(j, ptr, {"kind", "matrix", "fixed_point", "delta", "stable_eigenvalues", "eigen_angle",
                              "core_radius", "unstable_halfwidth", "log_span"});
    auto A = spec::int_matrix(spec::require(j, ptr, "matrix"), ptr + "/matrix");
    DAParams p;
    if (j.contains("fixed_point")) p.fixed_point = spec::real_vector(j["fixed_point"], ptr + "/fixed_point", 3);
    if (j.contains("delta")) p.delta = spec::real(j["delta"], ptr + "/delta");
    if (j.contains("stable_eigenvalues")) {
      Vec ev = spec::real_vector(j["stable_eigenvalues"], ptr + "/stable_eigenvalues", 2);
      p.lambda_weak = ev(0);
      p.lambda_strong = ev(1);
    }
    if (j.contains("eigen_angle")) p.eigen_angle = spec::real(j["eigen_angle"], ptr + "/eigen_angle");
    if (j.contains("core_radius")) p.core_radius = spec::real(j["core_radius"], ptr + "/core_radius");
    if (j.contains("unstable_halfwidth"))
      p.unstable_halfwidth = spec::real(j["unstable_halfwidth"], ptr + "/unstable_halfwidth");
    if (j.contains("log_span")) p.log_span = spec::real(j["log_span"], ptr + "/log_span");
    return std::make_shared<DAMap>(A, p);
  }
  if (kind == "denjoy") return std::make_shared<DenjoyCircleMap>(denjoy_params(j, ptr));
  if (kind == "pseudo_rotation") {
    spec::allow_keys(j, ptr, {"kind", "base", "fiber", "twist"});
    auto base = denjoy_params(spec::require(j, ptr, "base"), ptr + "/base");
    auto fiber = denjoy_params(spec::require(j, ptr, "fiber"), ptr + "/fiber");
    TwistParams tw;
    if (j.contains("twist")) {
      const auto& t = j["twist"];
      spec::allow_keys(t, ptr + "/twist", {"interval", "amplitude", "margin"});
      if (t.contains("interval")) tw.interval = static_cast<int>(spec::integer(t["interval"], ptr + "/twist/interval"));
      if (t.contains("amplitude")) tw.amplitude = spec::real(t["amplitude"], ptr + "/twist/amplitude");
      if (t.contains("margin")) tw.margin = spec::real(t["margin"], ptr + "/twist/margin");
    }
    return std::make_shared<PseudoRotationMap>(base, fiber, tw);
  }
  if (kind == "horseshoe") return std::make_shared<HorseshoeMap>(horseshoe_spec(j, ptr));
  throw InputError(ptr + "/kind: unknown map kind \"" + kind + "\"");
}

}  // namespace phdyn::maps
