#include "phdyn/runner.hpp"

#include "phdyn/cocycles.hpp"
#include "phdyn/cones.hpp"
#include "phdyn/conley.hpp"
#include "phdyn/horseshoe.hpp"
#include "phdyn/linear_models.hpp"
#include "phdyn/maps/map_spec.hpp"
#include "phdyn/rotation.hpp"
#include "phdyn/shadowing.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#ifndef PHDYN_VERSION
#define PHDYN_VERSION "0.1.0"
#endif

namespace phdyn::runner {

using json = nlohmann::json;
namespace fs = std::filesystem;
using Artifacts = std::vector<std::pair<std::string, std::string>>;

namespace {

json jr(double x) { return std::isfinite(x) ? json(round_sig12(x)) : json(format_real(x)); }

json jvec(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(jr(v(i)));
  return a;
}

json jmat(const Mat& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(jr(m(i, j)));
    a.push_back(row);
  }
  return a;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Typed access to an analysis' "params" object with defaults.
class Params {
 public:
  Params(const json& root, std::initializer_list<const char*> keys) : ptr_("/params") {
    if (root.contains("params")) {
      j_ = root["params"];
      if (!j_.is_object()) throw InputError("/params: expected an object");
    } else {
      j_ = json::object();
    }
    maps::spec::allow_keys(j_, ptr_, keys);
  }
  bool has(const char* k) const { return j_.contains(k); }
  const json& raw(const char* k) const { return j_[k]; }
  std::string at(const char* k) const { return ptr_ + "/" + k; }
  double real(const char* k, double def) const { return has(k) ? maps::spec::real(j_[k], at(k)) : def; }
  long long integer(const char* k, long long def) const { return has(k) ? maps::spec::integer(j_[k], at(k)) : def; }
  long long positive(const char* k, long long def) const {
    const long long v = integer(k, def);
    if (v < 1) throw InputError(at(k) + ": must be >= 1");
    return v;
  }
  bool boolean(const char* k, bool def) const {
    if (!has(k)) return def;
    if (!j_[k].is_boolean()) throw InputError(at(k) + ": expected true or false");
    return j_[k].get<bool>();
  }
  std::string string(const char* k, const std::string& def) const {
    if (!has(k)) return def;
    if (!j_[k].is_string()) throw InputError(at(k) + ": expected a string");
    return j_[k].get<std::string>();
  }

 private:
  json j_;
  std::string ptr_;
};

std::uint64_t seed_of(const json& c) {
  if (!c.contains("seed")) throw InputError("/seed: required for this analysis");
  const long long s = maps::spec::integer(c["seed"], "/seed");
  if (s < 0) throw InputError("/seed: must be non-negative");
  return static_cast<std::uint64_t>(s);
}

maps::MapPtr map_of(const json& c) {
  if (!c.contains("map")) throw InputError("/map: required for this analysis");
  return maps::make_map(c["map"], "/map");
}

maps::TorusMapPtr torus_map_of(const json& c) {
  auto m = std::dynamic_pointer_cast<const maps::TorusLiftMap>(map_of(c));
  if (!m) throw InputError("/map: this analysis needs a torus map");
  return m;
}

json report_json(const cones::Report& r) {
  json j;
  j["mode"] = r.mode;
  j["iterates"] = r.iterates;
  j["samples"] = r.samples;
  j["skipped"] = r.skipped;
  j["seed"] = r.seed;
  j["pass"] = r.pass;
  j["worst_margin"] = jr(r.worst_margin);
  j["witness"] = r.witness ? jvec(*r.witness) : json(nullptr);
  return j;
}

// ---------------------------------------------------------------- classify

Artifacts classify(const json& c) {
  Params p(c, {});
  const auto map = torus_map_of(c);
  const auto& A = map->linear_part();
  const auto sd = linear::spectral_classify(A);
  json j;
  j["matrix"] = A.rows();
  j["char_poly"] = sd.char_poly;
  json ev = json::array();
  for (const auto& z : sd.eigenvalues) ev.push_back({{"re", jr(z.real())}, {"im", jr(z.imag())}, {"modulus", jr(std::abs(z))}});
  j["eigenvalues"] = ev;
  j["classification"] = linear::to_string(sd.classification);
  j["irreducible_over_rationals"] = sd.irreducible_over_rationals;
  if (sd.classification != linear::SpectralClass::non_partially_hyperbolic) {
    const auto sp = linear::invariant_splitting(sd, A);
    json s = json::object();
    for (const auto& [label, sub] : sp.subspaces)
      s[linear::to_string(label)] = {{"dim", sub.basis.cols()}, {"basis", jmat(sub.basis)}};
    j["splitting"] = s;
    j["basis_condition"] = jr(sp.basis_condition);
  } else {
    j["splitting"] = nullptr;
  }
  return {{"spectrum.json", dump(j)}};
}

// ----------------------------------------------------------- semiconjugacy

Artifacts semiconjugacy(const json& c, int workers) {
  Params p(c, {"tol", "samples"});
  const auto map = torus_map_of(c);
  const std::uint64_t seed = seed_of(c);
  const auto s = shadowing::build_semiconjugacy(map, p.real("tol", 1e-8));
  const auto rep = shadowing::verify_equivariance(s, static_cast<int>(p.positive("samples", 1000)), seed, workers, true);
  json j;
  j["depth"] = s.depth;
  j["requested_tol"] = jr(s.requested_tol);
  j["tail_bound"] = jr(s.tail_bound);
  j["shadow_bound"] = jr(s.shadow_bound);
  j["mu"] = jr(s.mu);
  j["mu_s"] = jr(s.mu_s);
  j["mu_u"] = jr(s.mu_u);
  j["c0_bound"] = jr(map->c0_bound());
  j["samples"] = rep.n_samples;
  j["seed"] = rep.seed;
  j["max_residual"] = jr(rep.max_residual);
  j["residual_bound"] = jr(rep.bound);
  j["max_shift"] = jr(rep.max_shift);
  j["pass"] = rep.max_residual <= rep.bound && rep.max_shift <= s.shadow_bound;
  std::ostringstream csv;
  const int d = map->dim();
  csv << "sample";
  for (int k = 0; k < d; ++k) csv << ",x" << k;
  for (int k = 0; k < d; ++k) csv << ",h" << k;
  csv << ",residual\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    csv << i;
    for (int k = 0; k < d; ++k) csv << ',' << format_real(r.x(k));
    for (int k = 0; k < d; ++k) csv << ',' << format_real(r.hx(k));
    csv << ',' << format_real(r.residual) << '\n';
  }
  return {{"semiconjugacy.json", dump(j)}, {"semiconjugacy.csv", csv.str()}};
}

// ------------------------------------------------------------------ conley

struct ConleyRun {
  maps::MapPtr map;
  std::optional<conley::BoxGrid> grid;
  std::optional<conley::TransitionGraph> graph;
  conley::ChainDecomposition dec;
  std::vector<conley::QuasiAttractor> qa;
  json stats;
};

ConleyRun conley_pipeline(const json& c, const Params& p, int workers) {
  ConleyRun r;
  r.map = map_of(c);
  const int d = r.map->dim();
  const long long n = p.positive("resolution", d == 3 ? 32 : 64);
  const auto grid = conley::BoxGrid::for_map(*r.map, static_cast<int>(n));
  conley::GraphOptions opt;
  opt.epsilon = p.real("epsilon", 1.0 / static_cast<double>(n));
  opt.lipschitz = p.real("lipschitz", 0.0);
  const std::string enc = p.string("enclosure", "ball");
  if (enc == "ball") opt.enclosure = conley::Enclosure::ball;
  else if (enc == "axis_box") opt.enclosure = conley::Enclosure::axis_box;
  else throw InputError(p.at("enclosure") + ": expected \"ball\" or \"axis_box\"");
  opt.edge_budget = static_cast<std::size_t>(p.positive("edge_budget", 100'000'000));
  opt.workers = workers;
  r.grid = grid;
  r.graph = conley::build_graph(*r.map, grid, opt);
  r.dec = conley::chain_classes(*r.graph);
  r.qa = conley::quasi_attractors(r.dec, *r.graph, *r.map, static_cast<int>(p.integer("max_rounds", 20)));

  std::size_t rec_boxes = 0, rec_classes = 0;
  for (std::size_t v = 0; v < grid.size(); ++v) rec_boxes += r.dec.recurrent[v];
  for (std::size_t k = 0; k < r.dec.n_classes; ++k)
    if (r.dec.class_recurrent[k] && !(r.dec.exterior_class && *r.dec.exterior_class == k)) ++rec_classes;
  json terminal = json::array();
  for (const auto& q : r.qa) terminal.push_back(q.class_id);
  r.stats = {{"map", r.map->kind()},
             {"dim", d},
             {"resolution", n},
             {"n_boxes", grid.size()},
             {"n_nodes", r.graph->n_nodes()},
             {"n_edges", r.graph->n_edges()},
             {"epsilon", jr(r.graph->epsilon)},
             {"lipschitz", jr(r.graph->lipschitz)},
             {"lipschitz_heuristic", r.graph->lipschitz_heuristic},
             {"enclosure", enc},
             {"exterior_node", r.graph->has_exterior ? json(r.graph->exterior()) : json(nullptr)},
             {"n_classes", r.dec.n_classes},
             {"n_recurrent_classes", rec_classes},
             {"n_recurrent_boxes", rec_boxes},
             {"terminal_recurrent_classes", terminal}};
  return r;
}

Artifacts conley_analysis(const json& c, int workers) {
  Params p(c, {"resolution", "epsilon", "lipschitz", "enclosure", "edge_budget", "max_rounds"});
  auto r = conley_pipeline(c, p, workers);
  std::ostringstream csv;
  csv << "box_index,class_id,recurrent,lyapunov\n";
  for (std::size_t v = 0; v < r.grid->size(); ++v)
    csv << v << ',' << r.dec.class_of[v] << ',' << int(r.dec.recurrent[v]) << ',' << format_real(r.dec.lyapunov[v]) << '\n';
  json t = json::array();
  for (const auto& q : r.qa) {
    const auto& cert = q.certificate;
    t.push_back({{"class_id", q.class_id},
                 {"class_size", q.boxes.size()},
                 {"certified_size", cert.boxes.size()},
                 {"pass", cert.pass},
                 {"inconclusive", cert.inconclusive},
                 {"rounds", cert.rounds},
                 {"margin", jr(cert.margin)},
                 {"witness", cert.witness ? json(*cert.witness) : json(nullptr)}});
  }
  json trap = {{"quasi_attractors", t}, {"max_rounds", p.integer("max_rounds", 20)}};
  return {{"classes.csv", csv.str()}, {"graph_stats.json", dump(r.stats)}, {"trapping.json", dump(trap)}};
}

Artifacts basin_analysis(const json& c, int workers) {
  Params p(c, {"resolution", "epsilon", "lipschitz", "enclosure", "edge_budget", "max_rounds", "samples", "horizon",
               "settle", "target_class"});
  const std::uint64_t seed = seed_of(c);
  auto r = conley_pipeline(c, p, workers);
  std::vector<std::uint8_t> mask(r.grid->size(), 0);
  json classes = json::array();
  if (p.has("target_class")) {
    const long long k = p.integer("target_class", 0);
    if (k < 0 || static_cast<std::size_t>(k) >= r.dec.n_classes) throw InputError(p.at("target_class") + ": no such class");
    classes.push_back(k);
    for (std::size_t v = 0; v < r.grid->size(); ++v) mask[v] = r.dec.class_of[v] == static_cast<conley::Node>(k);
  } else {
    for (const auto& q : r.qa) {
      classes.push_back(q.class_id);
      for (auto v : q.boxes) mask[v] = 1;
    }
  }
  std::size_t target_boxes = 0;
  for (auto m : mask) target_boxes += m;
  const auto est = conley::basin_fraction(*r.map, *r.grid, mask, static_cast<std::size_t>(p.positive("samples", 10000)),
                                          static_cast<int>(p.positive("horizon", 400)),
                                          static_cast<int>(p.positive("settle", 50)), seed, workers);
  json b = {{"target_classes", classes}, {"target_boxes", target_boxes}, {"fraction", jr(est.fraction)},
            {"hits", est.hits},          {"samples", est.n_samples},     {"horizon", est.horizon},
            {"settle", est.settle},      {"seed", est.seed}};
  return {{"basin.json", dump(b)}, {"graph_stats.json", dump(r.stats)}};
}

// ------------------------------------------------------------------- cones

Artifacts cones_analysis(const json& c, int workers) {
  Params p(c, {"aperture", "ell", "N", "samples", "exponent_steps", "exponent_warmup"});
  const auto map = torus_map_of(c);
  const std::uint64_t seed = seed_of(c);
  const auto& A = map->linear_part();
  const auto sd = linear::spectral_classify(A);
  if (sd.classification == linear::SpectralClass::non_partially_hyperbolic)
    throw InputError("/map: cones analysis needs a partially hyperbolic linear part");
  const auto sp = linear::invariant_splitting(sd, A);
  std::vector<Mat> bases;
  std::vector<std::string> labels;
  for (auto l : {linear::Label::stable, linear::Label::center, linear::Label::unstable})
    if (sp.has(l)) bases.push_back(sp.at(l).basis), labels.push_back(linear::to_string(l));
  const int k = static_cast<int>(bases.size());
  const int d = map->dim();
  auto span = [&](int a, int b) {
    int cols = 0;
    for (int i = a; i <= b; ++i) cols += static_cast<int>(bases[i].cols());
    Mat m(d, cols);
    int at = 0;
    for (int i = a; i <= b; ++i) {
      m.middleCols(at, bases[i].cols()) = bases[i];
      at += static_cast<int>(bases[i].cols());
    }
    return m;
  };
  cones::Sampling s;
  s.n_samples = static_cast<int>(p.positive("samples", 1000));
  s.seed = seed;
  s.workers = workers;
  const int ell = static_cast<int>(p.positive("ell", 1));
  const int N = static_cast<int>(p.positive("N", 1));

  json out;
  out["bundles"] = labels;
  const auto cone = cones::constant_cone(bases.back(), p.real("aperture", 0.3));
  out["cone_invariance"] = report_json(cones::verify_cone_invariance(*map, cone, s));

  cones::PHReports ph;
  ph.dim = d;
  json doms = json::array();
  for (int i = 0; i < k; ++i) ph.bundle_dims.push_back(static_cast<int>(bases[i].cols()));
  for (int i = 0; i + 1 < k; ++i) {
    auto r = cones::verify_domination(*map, cones::constant_bundle(bases[i]), cones::constant_bundle(bases[i + 1]), ell, s);
    ph.dominations.push_back(r);
    json jj = report_json(r);
    jj["E"] = labels[i];
    jj["F"] = labels[i + 1];
    doms.push_back(jj);
  }
  out["dominations"] = doms;
  json unis = json::array();
  auto claim = [&](int a, int b, cones::Uniformity mode) {
    auto r = cones::verify_uniformity(*map, cones::constant_bundle(span(a, b)), N, mode, s);
    ph.uniformity.push_back({a, b, mode, r});
    json jj = report_json(r);
    json names = json::array();
    for (int i = a; i <= b; ++i) names.push_back(labels[i]);
    jj["bundles"] = names;
    unis.push_back(jj);
  };
  for (int j = 0; j < k; ++j) {
    claim(0, j, cones::Uniformity::contract);
    claim(0, j, cones::Uniformity::vol_contract);
  }
  for (int j = 0; j < k; ++j) {
    claim(j, k - 1, cones::Uniformity::expand);
    claim(j, k - 1, cones::Uniformity::vol_expand);
  }
  out["uniformity"] = unis;
  out["label"] = cones::to_string(cones::ph_classify(ph));

  Rng rng(derive_seed(seed, std::numeric_limits<std::uint32_t>::max()));
  Vec x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.uniform();
  const long long warmup = p.integer("exponent_warmup", 32);
  if (warmup < 0 || warmup > 1'000'000) throw InputError("/params/exponent_warmup: must lie in 0..1000000");
  const auto ex = cones::finite_time_exponents(*map, x, static_cast<int>(p.positive("exponent_steps", 100)),
                                               static_cast<int>(warmup));
  json e;
  e["start"] = jvec(x);
  e["n"] = ex.n;
  e["warmup"] = ex.warmup;
  e["truncated"] = ex.truncated;
  json xs = json::array();
  for (double v : ex.exponents) xs.push_back(jr(v));
  e["exponents"] = xs;
  e["orthogonality_residual"] = jr(ex.orthogonality_residual);
  e["mean_log_det"] = jr(ex.mean_log_det);
  out["exponents"] = e;
  return {{"cones.json", dump(out)}};
}

// ----------------------------------------------------------------- cocycle

Artifacts cocycle_analysis(const json& c) {
  Params p(c, {"matrices", "step_cap", "equalize"});
  if (!p.has("matrices") || !p.raw("matrices").is_array() || p.raw("matrices").empty())
    throw InputError(p.at("matrices") + ": expected a nonempty array of matrices");
  std::vector<cocycles::Matrix> mats;
  const auto& jm = p.raw("matrices");
  for (std::size_t i = 0; i < jm.size(); ++i) {
    const std::string ptr = p.at("matrices") + "/" + std::to_string(i);
    if (!jm[i].is_array() || jm[i].empty()) throw InputError(ptr + ": expected an array of rows");
    const auto n = jm[i].size();
    cocycles::Matrix M(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      const Vec row = maps::spec::real_vector(jm[i][r], ptr + "/" + std::to_string(r));
      if (static_cast<std::size_t>(row.size()) != n) throw InputError(ptr + ": matrix must be square");
      for (std::size_t q = 0; q < n; ++q) M(r, q) = row(q);
    }
    mats.push_back(M);
  }
  const cocycles::PeriodicCocycle cc(mats);
  const auto ex = cocycles::exponents(cc);
  json out;
  out["period"] = cc.period();
  out["dim"] = cc.dim();
  out["bound"] = jr(cc.bound());
  json xs = json::array();
  for (double v : ex.sigma) xs.push_back(jr(v));
  out["exponents"] = xs;
  out["defective_cluster"] = ex.defective_cluster;
  out["log_abs_det_over_period"] = jr(cc.log_abs_det() / cc.period());
  if (p.boolean("equalize", cc.dim() == 2)) {
    const auto path = cocycles::equalize_2d(cc, p.real("step_cap", 0.05));
    json e;
    e["theta_star"] = jr(path.theta_star);
    e["diameter"] = jr(path.diameter);
    e["steps"] = path.steps.size();
    json th = json::array();
    for (double t : path.thetas) th.push_back(jr(t));
    e["thetas"] = th;
    e["sink_preserved"] = path.sink_preserved;
    json em = json::array();
    for (double m : path.endpoint_moduli) em.push_back(jr(m));
    e["endpoint_moduli"] = em;
    const auto end = cocycles::exponents(path.steps.back());
    json es = json::array();
    for (double v : end.sigma) es.push_back(jr(v));
    e["endpoint_exponents"] = es;
    out["equalize"] = e;
  }
  return {{"cocycle.json", dump(out)}};
}

// ---------------------------------------------------------------- rotation

Artifacts rotation_analysis(const json& c, int workers) {
  Params p(c, {"n", "starts", "lift_shift", "Q", "tol", "spread_threshold", "transitivity_resolution",
               "transitivity_epsilon"});
  const auto map = torus_map_of(c);
  const std::uint64_t seed = seed_of(c);
  const int d = map->dim();
  const int n = static_cast<int>(p.positive("n", 10000));
  const int ns = static_cast<int>(p.positive("starts", 20));
  std::vector<Vec> starts;
  for (int i = 0; i < ns; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Vec x(d);
    for (int k = 0; k < d; ++k) x(k) = rng.uniform();
    starts.push_back(x);
  }
  Vec shift = Vec::Zero(d);
  if (p.has("lift_shift")) shift = maps::spec::real_vector(p.raw("lift_shift"), p.at("lift_shift"), d);
  const auto est = rotation::rotation_vector(*map, starts, n, shift);
  json out;
  out["n"] = est.n;
  out["seed"] = seed;
  json st = json::array(), ps = json::array();
  for (const auto& s : est.starts) st.push_back(jvec(s));
  for (const auto& s : est.per_start) ps.push_back(jvec(s));
  out["starts"] = st;
  out["per_start"] = ps;
  out["pooled"] = jvec(est.pooled);
  out["spread"] = jr(est.spread);
  const double thr = p.real("spread_threshold", 5.0 / n);
  out["spread_threshold"] = jr(thr);
  out["spread_pass"] = est.spread <= thr;
  out["displacement_bound"] = jr(est.displacement_bound);
  out["lift_id"] = jvec(est.lift_shift);
  out["first_coordinate_only"] = est.first_coordinate_only;
  const auto res = rotation::nonresonance_check(est.pooled, static_cast<int>(p.positive("Q", 50)), p.real("tol", 1e-9));
  out["nonresonance"] = {{"pass", res.pass}, {"relation", res.relation}, {"residual", jr(res.residual)}};
  if (p.has("transitivity_resolution")) {
    const long long r = p.positive("transitivity_resolution", 64);
    const auto t = rotation::transitivity_probe(*map, static_cast<int>(r), p.real("transitivity_epsilon", 2.0 / r), 0.0, workers);
    out["transitivity"] = {{"single_class", t.single_class},     {"n_classes", t.n_classes},
                           {"n_recurrent_classes", t.n_recurrent_classes},
                           {"recurrent_fraction", jr(t.recurrent_fraction)},
                           {"resolution", r},                    {"n_edges", t.n_edges},
                           {"epsilon", jr(t.epsilon)},           {"lipschitz", jr(t.lipschitz)},
                           {"lipschitz_heuristic", t.lipschitz_heuristic}};
  }
  return {{"rotation.json", dump(out)}};
}

// --------------------------------------------------------------- horseshoe

Artifacts horseshoe_analysis(const json& c, int workers) {
  Params p(c, {"eta_lo", "eta_hi", "max_length", "tol", "nodes", "family", "resolutions", "radius", "event_index"});
  if (!c.contains("map")) throw InputError("/map: required for this analysis");
  const auto& jm = c["map"];
  if (!jm.is_object() || !jm.contains("kind") || jm["kind"] != "horseshoe")
    throw InputError("/map/kind: horseshoe analysis needs a horseshoe map");
  const auto spec = maps::horseshoe_spec(jm, "/map");
  const maps::HorseshoeMap map(spec);  // validates the fiber constraints

  horseshoe::ScanOptions so;
  so.lo = p.real("eta_lo", 0.004);
  so.hi = p.real("eta_hi", 0.016);
  so.max_length = static_cast<int>(p.positive("max_length", 12));
  so.tol = p.real("tol", 1e-10);
  so.nodes = static_cast<int>(p.positive("nodes", 64));
  const std::string fam = p.string("family", "eta2");
  horseshoe::Family family;
  if (fam == "eta2") {
    family = horseshoe::eta2_family(spec);
  } else if (fam == "g4_shift") {
    family = [spec](double e) {
      auto s = spec;
      s.fiber_shift[3] = e;
      return s;
    };
    so.validate = false;
  } else {
    throw InputError(p.at("family") + ": expected \"eta2\" or \"g4_shift\"");
  }
  const auto events = horseshoe::heteroclinic_scan(family, so);

  json ev = json::array();
  for (const auto& e : events)
    ev.push_back({{"word", e.word},
                  {"parameter", jr(e.parameter)},
                  {"point", {jr(e.point(0)), jr(e.point(1)), jr(e.point(2))}},
                  {"residual", jr(e.residual)},
                  {"bracket", {jr(e.bracket_lo), jr(e.bracket_hi)}}});
  json events_json = {{"family", fam},           {"eta_lo", jr(so.lo)}, {"eta_hi", jr(so.hi)},
                      {"max_length", so.max_length}, {"tol", jr(so.tol)},  {"nodes", so.nodes},
                      {"events", ev}};

  json hs;
  const auto chk = maps::verify_horseshoe(spec);
  hs["verifier"] = {{"ok", chk.ok}, {"violations", chk.violations}, {"min_slope", jr(chk.min_slope)},
                    {"max_slope", jr(chk.max_slope)}};
  json pts = json::array();
  for (int b = 1; b <= 4; ++b) {
    const auto orb = horseshoe::periodic_point(spec, {b});
    json fib = json::array();
    for (const auto& f : orb.fiber)
      fib.push_back({{"t", jr(f.t)}, {"multiplier", jr(f.multiplier)}, {"stable_dimension", f.stable_dimension},
                     {"closure_error", jr(f.closure_error)}});
    pts.push_back({{"word", {b}}, {"base", {jr(orb.base(0)), jr(orb.base(1))}}, {"fiber", fib}});
  }
  hs["periodic_points"] = pts;

  std::ostringstream iso;
  iso << "resolution,count_near_x,count_near_control\n";
  const long long idx = p.integer("event_index", 0);
  if (events.empty()) {
    hs["isolation"] = {{"status", "refused"}, {"reason", "no connection event in the scanned range"}};
  } else {
    if (idx < 0 || static_cast<std::size_t>(idx) >= events.size()) throw InputError(p.at("event_index") + ": no such event");
    std::vector<int> res{16, 32, 64};
    if (p.has("resolutions")) {
      res.clear();
      const auto& jr_ = p.raw("resolutions");
      if (!jr_.is_array() || jr_.size() < 2) throw InputError(p.at("resolutions") + ": expected at least two integers");
      for (std::size_t i = 0; i < jr_.size(); ++i)
        res.push_back(static_cast<int>(maps::spec::integer(jr_[i], p.at("resolutions") + "/" + std::to_string(i))));
    }
    const auto& e = events[static_cast<std::size_t>(idx)];
    const auto ps = family(e.parameter);
    const auto p1 = horseshoe::periodic_point(ps, {1});
    const Eigen::Vector3d control(p1.base(0), p1.base(1), 0.0);
    const auto rep = horseshoe::isolation_probe(ps, e, control, res, p.real("radius", 0.2), workers);
    for (const auto& r : rep.rows) iso << r.resolution << ',' << r.near_x << ',' << r.near_control << '\n';
    hs["isolation"] = {{"status", "ran"},
                       {"event_index", idx},
                       {"growth_near_x", jr(rep.growth_x)},
                       {"growth_near_control", jr(rep.growth_control)},
                       {"signature", rep.signature}};
  }
  return {{"events.json", dump(events_json)}, {"isolation.csv", iso.str()}, {"horseshoe.json", dump(hs)}};
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << data;
}

}  // namespace

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InputError("--set expects key=value, got \"" + assignment + "\"");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  if (value.is_structured()) throw InputError("--set " + key + ": only scalar values can be overridden");
  json* node = &config;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw InputError("--set " + key + ": empty path component");
    if (!node->is_object()) throw InputError("--set " + key + ": \"" + part + "\" is not inside an object");
    if (dot == std::string::npos) {
      if (node->contains(part) && (*node)[part].is_structured())
        throw InputError("--set " + key + ": only scalar fields can be overridden");
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

Artifacts run_analysis(const json& config, int workers) {
  if (!config.is_object()) throw InputError("/: config must be a JSON object");
  maps::spec::allow_keys(config, "", {"analysis", "map", "seed", "params", "output"});
  const auto& a = maps::spec::require(config, "", "analysis");
  if (!a.is_string()) throw InputError("/analysis: expected a string");
  const std::string name = a.get<std::string>();
  if (name == "classify") return classify(config);
  if (name == "semiconjugacy") return semiconjugacy(config, workers);
  if (name == "conley") return conley_analysis(config, workers);
  if (name == "basin") return basin_analysis(config, workers);
  if (name == "cones") return cones_analysis(config, workers);
  if (name == "cocycle") return cocycle_analysis(config);
  if (name == "rotation") return rotation_analysis(config, workers);
  if (name == "horseshoe") return horseshoe_analysis(config, workers);
  throw InputError("/analysis: unknown analysis \"" + name + "\"");
}

int run(const RunOptions& opt, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  json config;
  try {
    std::ifstream f(opt.config_path, std::ios::binary);
    if (!f) throw InputError("cannot read config " + opt.config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    config = json::parse(ss.str(), nullptr, false);
    if (config.is_discarded()) throw InputError(opt.config_path + ": malformed JSON");
    for (const auto& o : opt.overrides) apply_override(config, o);
    if (config.is_object() && config.contains("output") && !config["output"].is_string())
      throw InputError("/output: expected a string");
  } catch (const InputError& e) {
    err << "phdyn: " << e.what() << '\n';
    return 2;
  }

  Artifacts arts;
  std::string status = "ok";
  int code = 0;
  try {
    arts = run_analysis(config, opt.workers);
  } catch (const InputError& e) {
    err << "phdyn: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "phdyn: " << e.what() << '\n';
    status = std::string("error: ") + e.what();
    code = 1;
  }

  try {
    const fs::path out(!opt.out_dir.empty() ? opt.out_dir : config.value("output", std::string("out")));
    fs::create_directories(out);
    json names = json::array();
    for (const auto& [name, data] : arts) {
      write_file(out / name, data);
      names.push_back(name);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest = {{"tool", "phdyn"},
                     {"version", PHDYN_VERSION},
                     {"analysis", config.value("analysis", json(nullptr))},
                     {"seed", config.contains("seed") ? config["seed"] : json(nullptr)},
                     {"workers", opt.workers},
                     {"config", config},
                     {"overrides", opt.overrides},
                     {"artifacts", names},
                     {"status", status},
                     {"wall_time_s", jr(wall)}};
    write_file(out / "manifest.json", dump(manifest));
  } catch (const std::exception& e) {
    err << "phdyn: " << e.what() << '\n';
    return 1;
  }
  return code;
}

}  // namespace phdyn::runner
