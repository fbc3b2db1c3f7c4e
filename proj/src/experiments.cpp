#include "experiments.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "decomp.hpp"
#include "fefferman.hpp"
#include "field_io.hpp"
#include "gauge.hpp"
#include "riesz.hpp"
#include "solutions.hpp"

namespace mslab {

namespace fs = std::filesystem;

namespace {

// Collects the files written by one experiment, relative to the run directory.
class Output {
 public:
  Output(std::string root, std::vector<std::string>* written) : root_(std::move(root)), written_(written) {}

  void text(const std::string& rel, const std::string& content) {
    const fs::path path = fs::path(root_) / rel;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    out << content;
    if (written_) written_->push_back(rel);
  }
  template <class F>
  void field(const std::string& rel, const F& f) {
    text(rel, encode_field(f));
  }

 private:
  std::string root_;
  std::vector<std::string>* written_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// JSON cannot carry infinities; they are written as the string "inf".
json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

double exponent(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    require(s == "inf", "exponent must be a number or \"inf\"");
    return std::numeric_limits<double>::infinity();
  }
  return j.get<double>();
}

std::vector<double> exponents(const json& params, const char* key, std::vector<double> fallback) {
  if (!params.contains(key)) return fallback;
  std::vector<double> out;
  for (const json& v : params.at(key)) out.push_back(exponent(v));
  return out;
}

json cube_json(const Cube& Q, int n) {
  return {{"center", std::vector<double>(Q.center.begin(), Q.center.begin() + n)}, {"R", Q.R}};
}

Cube cube_from_json(const json& j, const GridSpec& g) {
  Cube Q;
  const auto c = j.at("center").get<std::vector<double>>();
  require(static_cast<int>(c.size()) == g.n, "cube centre needs one coordinate per axis");
  for (int a = 0; a < g.n; ++a) Q.center[a] = c[a];
  Q.R = j.at("R").get<double>();
  require(Q.R > 0.0, "cube side must be positive");
  return Q;
}

Cube centered_cube(const GridSpec& g, double R) {
  Cube Q;
  for (int a = 0; a < g.n; ++a) Q.center[a] = 0.5 * g.L;
  Q.R = R;
  return Q;
}

std::string cube_id(const Cube& Q, int n) {
  std::string s;
  for (int a = 0; a < n; ++a) s += fmt(Q.center[a]) + ":";
  return s + fmt(Q.R);
}

RealField select_weight(const std::string& which, const ScenarioData& sd) {
  if (which == "abs_b") return sd.B.abs_b;
  if (which == "V") return sd.V;
  if (which == "abs_b+V") {
    RealField w = sd.B.abs_b;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += sd.V[i];
    return w;
  }
  const Expr e = Expr::parse(which, sd.grid.n);
  return sample(sd.grid, [&](const Point& x) { return e.eval(x); });
}

json base_document(const ExperimentConfig& e) {
  return {{"experiment", e.type}, {"name", e.name}, {"grid", grid_to_json(e.grid)},
          {"scenario", scenario_to_json(e.scenario)}, {"seed", e.seed}, {"tool_version", kToolVersion},
          {"rows", json::array()}, {"constants", json::object()}};
}

// ---------------------------------------------------------------------------

void build_operator(const ExperimentConfig& e, const ScenarioData& sd, json& doc, Output& out) {
  const int count = e.params.value("fields", 8);
  double worst_energy = 0.0, worst_herm = 0.0, min_form = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    const ComplexField u = random_complex_field(e.grid, e.seed * 1000 + i);
    const ComplexField v = random_complex_field(e.grid, e.seed * 1000 + i + 500);
    const EnergyParts E = sd.H.energy(u);
    const double energy_res = std::abs(E.form - E.kinetic - E.potential - E.shift) / E.form;
    const complex a = inner_product(sd.H.apply(u), v), b = inner_product(u, sd.H.apply(v));
    const double herm = std::abs(a - b) / (std::sqrt(inner_product_re(u, u) * inner_product_re(v, v)));
    worst_energy = std::max(worst_energy, energy_res);
    worst_herm = std::max(worst_herm, herm);
    min_form = std::min(min_form, E.form);
    doc["rows"].push_back({{"index", i}, {"form", E.form}, {"kinetic", E.kinetic},
                           {"potential", E.potential}, {"energy_residual", energy_res},
                           {"hermiticity", herm}});
  }
  doc["constants"] = {{"dim", sd.H.dim()},
                      {"link_modulus_defect", sd.H.links().max_modulus_defect()},
                      {"max_energy_residual", worst_energy},
                      {"max_hermiticity_defect", worst_herm},
                      {"min_form", number(min_form)}};
  out.field(e.name + "/abs_b.mslf", sd.B.abs_b);
  out.field(e.name + "/V.mslf", sd.V);
}

void weights_rh(const ExperimentConfig& e, const ScenarioData& sd, json& doc) {
  const Weight w(select_weight(e.params.value("weight", "abs_b"), sd));
  const auto strategy = e.params.value("strategy", "half-shifted") == "dyadic"
                            ? CubeStrategy::kDyadic
                            : CubeStrategy::kDyadicHalfShifted;
  const auto cubes = cube_family(e.grid, strategy);
  for (double q : exponents(e.params, "q", {2.0, 4.0, std::numeric_limits<double>::infinity()})) {
    const RHReport r = rh_constant(w, q, cubes);
    doc["rows"].push_back({{"q", number(q)}, {"constant", r.constant},
                           {"worst_cube", cube_json(r.worst_cube, e.grid.n)}});
  }
  doc["constants"] = {{"doubling", doubling_constant(w, cubes)}, {"family_size", cubes.size()}};
}

void weights_m(const ExperimentConfig& e, const ScenarioData& sd, json& doc, Output& out) {
  const Weight w(select_weight(e.params.value("weight", "abs_b"), sd));
  const AuxField m = aux_field(w);
  std::size_t large = 0, sub = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    lo = std::min(lo, m.values[i]);
    hi = std::max(hi, m.values[i]);
    large += m.flags[i] == AuxFlag::kClampedLarge;
    sub += m.flags[i] == AuxFlag::kSubCell;
  }
  const auto pairs = sample_pairs(w, e.params.value("pairs", 200), e.seed);
  const MPropertiesReport props = check_m_properties(w, pairs);
  doc["constants"] = {{"m_min", lo}, {"m_max", hi}, {"clamped_large", large}, {"sub_cell", sub},
                      {"comparability", props.comparability}, {"k0", props.k0},
                      {"upper_constant", props.upper_constant}, {"lower_constant", props.lower_constant},
                      {"pairs", props.pairs}, {"near_pairs", props.near_pairs}};
  out.field(e.name + "/m.mslf", m.values);
}

void riesz_norms(const ExperimentConfig& e, const ScenarioData& sd, json& doc, Output& out) {
  std::vector<std::string> ops;
  if (e.params.contains("operators")) {
    ops = e.params.at("operators").get<std::vector<std::string>>();
  } else {
    ops = {"LH^-1/2", "L1H^-1/2", "VH^-1", "H0H^-1", "L1L2H^-1", "V1/2H^-1/2"};
    if (sd.aux) {
      ops.push_back("mH^-1/2");
      ops.push_back("m2H^-1");
    }
  }
  const auto ps = exponents(e.params, "p", {2.0, 3.0, 4.0, 6.0});
  const ProbeFamily probes = make_probes(e.grid, e.seed, e.params.value("probes", 64));
  const SpectralDecomposition dec = eig(sd.H);
  const RieszEngine engine(sd.H, dec, sd.aux);
  std::string csv = "operator,p,N,lower_bound,probe_id,seed\n";
  for (const std::string& op : ops) {
    for (const NormEstimate& est : norm_curve(OperatorSpec::parse(op), ps, probes, engine)) {
      csv += est.op + "," + fmt(est.p) + "," + std::to_string(est.N) + "," + fmt(est.lower_bound) + "," +
             est.probe_id + "," + std::to_string(est.seed) + "\n";
      doc["rows"].push_back({{"operator", est.op}, {"p", number(est.p)}, {"N", est.N},
                             {"lower_bound", est.lower_bound}, {"probe_id", est.probe_id}});
    }
  }
  doc["constants"] = {{"lambda_min", dec.eigenvalues.front()}, {"lambda_max", dec.eigenvalues.back()},
                      {"probes", probes.members.size()}};
  out.text(e.name + ".csv", csv);
}

void riesz_reverse(const ExperimentConfig& e, const ScenarioData& sd, json& doc) {
  const ProbeFamily probes = make_probes(e.grid, e.seed, e.params.value("probes", 64));
  const SpectralDecomposition dec = eig(sd.H);
  const RieszEngine engine(sd.H, dec, sd.aux);
  for (double p : exponents(e.params, "p", {2.0, 4.0})) {
    const ReverseReport r = reverse_constant(p, probes, engine, sd.B.abs_b);
    json row{{"p", number(p)}, {"constant", r.constant}, {"probe_id", r.probe_id}, {"skipped", r.skipped}};
    if (r.aux_constant) {
      row["aux_constant"] = *r.aux_constant;
      row["aux_probe_id"] = r.aux_probe_id;
    }
    doc["rows"].push_back(row);
  }
}

json cz_constants_json(const CZConstants& c) {
  return {{"czb", c.czb}, {"czc", c.czc}, {"czd", c.czd}, {"overlap", c.overlap}, {"weak", c.weak},
          {"identity_residual", c.identity_residual}, {"f_energy", c.f_energy},
          {"g_energy", c.g_energy}, {"omega_measure", c.omega_measure}, {"type1", c.type1},
          {"type2", c.type2}, {"fallbacks", c.fallbacks}};
}

void cz_run(const ExperimentConfig& e, const ScenarioData& sd, json& doc, Output& out) {
  const double p = e.params.value("p", 1.5);
  const std::size_t index = e.params.value("probe", std::size_t{0});
  const ProbeFamily probes = make_probes(e.grid, e.seed, index + 1);
  const ComplexField& f = probes.members[index].field;
  const double median = median_alpha(f, p, sd.H, sd.B.abs_b);
  const auto factors = e.params.value("alpha_factors", std::vector<double>{0.5, 1.0, 2.0});
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const double alpha = factors[i] * median;
    const CZResult r = cz_decompose(f, p, alpha, sd.H, sd.B, e.params.value("quad_order", 8));
    const WhitneyAudit audit = audit_whitney(r.omega, [&] {
      std::vector<WhitneyCube> w;
      for (const CZCube& c : r.cubes) w.push_back(c.whitney);
      return w;
    }());
    json row = cz_constants_json(r.constants);
    row["alpha"] = alpha;
    row["alpha_factor"] = factors[i];
    row["cubes"] = r.cubes.size();
    row["whitney"] = {{"disjoint", audit.disjoint}, {"covers", audit.covers},
                      {"min_ratio", audit.min_ratio}, {"max_ratio", audit.max_ratio},
                      {"reach_hits", audit.reach_hits}, {"fourfold_hits", audit.fourfold_hits},
                      {"max_reach", audit.max_reach}};
    doc["rows"].push_back(row);

    const std::string dir = e.name + "/alpha-" + std::to_string(i);
    json cubes = json::array();
    for (const CZCube& c : r.cubes)
      cubes.push_back({{"cube", cube_json(c.whitney.cube, e.grid.n)}, {"level", c.whitney.level},
                       {"ratio", c.whitney.ratio}, {"type", static_cast<int>(c.type)},
                       {"gauge_fallback", c.gauge_fallback}});
    out.text(dir + "/cubes.json", json{{"alpha", alpha}, {"p", p}, {"cubes", cubes}}.dump(2) + "\n");
    out.field(dir + "/f.mslf", r.f);
    out.field(dir + "/g.mslf", r.g);
    out.field(dir + "/maximal.mslf", r.maximal);
  }
  doc["constants"] = {{"median_alpha", median}, {"p", p}, {"probe_id", probes.members[index].id}};
}

void gauge_check(const ExperimentConfig& e, const ScenarioData& sd, json& doc, Output& out) {
  std::vector<Cube> cubes;
  if (e.params.contains("cubes")) {
    for (const json& c : e.params.at("cubes")) cubes.push_back(cube_from_json(c, e.grid));
  } else {
    for (double frac : {0.125, 0.25, 0.5}) cubes.push_back(centered_cube(e.grid, frac * e.grid.L));
  }
  const int quad = e.params.value("quad_order", 8);
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const GaugePair pair = iwatsuka(sd.B, cubes[i], quad);
    const GaugeBound bound = gauge_bound(pair, sd.B);
    doc["rows"].push_back({{"cube", cube_json(cubes[i], e.grid.n)}, {"curl_residual", pair.curl_residual},
                           {"potential_residual", pair.potential_residual},
                           {"ratio", bound.ratio ? json(*bound.ratio) : json(nullptr)},
                           {"h_norm", bound.h_norm}, {"field_norm", bound.field_norm}});
    out.field(e.name + "/phi-" + std::to_string(i) + ".mslf", pair.phi);
  }
  doc["constants"] = {{"quad_order", quad}};
}

void fp_check(const ExperimentConfig& e, const ScenarioData& sd, json& doc, Output& out) {
  const RealField w = select_weight(e.params.value("weight", "abs_b+V"), sd);
  const ProbeFamily probes = make_probes(e.grid, e.seed, e.params.value("probes", 64));
  const auto pairs = fp_pairs(e.grid, probes.members.size(), e.params.value("pairs", 1000), e.seed);
  const double p = e.params.value("p", 2.0);
  std::string csv = "form,p,beta,C,cube_id,probe_id\n";
  auto emit = [&](const FPReport& r) {
    csv += std::string(fp_form_name(r.form)) + "," + fmt(r.p) + "," + fmt(r.beta) + "," + fmt(r.constant) +
           "," + cube_id(r.worst_cube, e.grid.n) + "," + r.worst_probe + "\n";
    doc["rows"].push_back({{"form", fp_form_name(r.form)}, {"p", r.p}, {"beta", r.beta},
                           {"C", number(r.constant)}, {"cube", cube_json(r.worst_cube, e.grid.n)},
                           {"probe_id", r.worst_probe}, {"evaluated", r.evaluated},
                           {"vacuous", r.vacuous}});
  };
  emit(fp_batch(FPForm::kClassical, p, 0.0, w, probes, pairs, sd.H));
  for (double beta : e.params.value("betas", std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}))
    emit(fp_batch(FPForm::kImproved, 2.0, beta, w, probes, pairs, sd.H));
  out.text(e.name + ".csv", csv);
}

void solutions_check(const ExperimentConfig& e, const ScenarioData& sd, json& doc) {
  const Cube Q = e.params.contains("cube") ? cube_from_json(e.params.at("cube"), e.grid)
                                           : centered_cube(e.grid, e.grid.L / 8.0);
  const double q = e.params.value("q", 4.0);
  const double L = e.grid.L;
  const BoundaryFn boundary = [L](const Point& x) {
    const double two_pi = 2.0 * 3.141592653589793;
    return complex(1.0 + 0.5 * x[0] / L, 0.25 * x[1] / L) * std::polar(1.0, two_pi * (x[0] + 2.0 * x[1]) / L);
  };
  const InteriorSolution sol = solve_interior(Q, boundary, sd.H, "wave");
  json rows = json::array();
  for (RHSolutionKind kind : {RHSolutionKind::kAux, RHSolutionKind::kGradient, RHSolutionKind::kPotential,
                              RHSolutionKind::kGradientV}) {
    const RHSolutionValue v = check_rh_solution(sol, q, kind, sd.H, sd.aux);
    rows.push_back({{"estimate", rh_solution_name(kind)}, {"exponent", number(v.exponent)},
                    {"constant", number(v.constant)}, {"vacuous", v.vacuous}});
  }
  doc["rows"] = rows;
  const SubharmonicReport sub = check_subharmonic(sol, sd.H);
  json constants{{"residual", sol.residual},
                 {"subharmonic_centered", sub.centered_residual},
                 {"subharmonic_forward", sub.forward_residual},
                 {"subharmonic_min_laplacian", sub.min_laplacian},
                 {"caccioppoli", caccioppoli_check(sol.u, ComplexField(e.grid), Q, sd.H)}};
  if (sd.aux) {
    const DecayReport d = check_decay(sol, *sd.aux);
    constants["decay"] = {{"C1", d.C[0]}, {"C2", d.C[1]}, {"C3", d.C[2]}, {"fitted_k", d.fitted_k}, {"m0", d.m0}};
  }
  doc["constants"] = constants;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::kInternal, "SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

json run_experiment(const ExperimentConfig& e, const std::string& output_dir,
                    std::vector<std::string>* written) {
  Output out(output_dir, written);
  json doc = base_document(e);
  if (e.type == "report") {
    doc["constants"] = report_directory(output_dir, false);
  } else {
    const ScenarioData sd = build_scenario(e.scenario, e.grid);
    if (e.type == "build-operator") build_operator(e, sd, doc, out);
    else if (e.type == "weights-rh") weights_rh(e, sd, doc);
    else if (e.type == "weights-m") weights_m(e, sd, doc, out);
    else if (e.type == "riesz-norms") riesz_norms(e, sd, doc, out);
    else if (e.type == "riesz-reverse") riesz_reverse(e, sd, doc);
    else if (e.type == "cz-run") cz_run(e, sd, doc, out);
    else if (e.type == "gauge-check") gauge_check(e, sd, doc, out);
    else if (e.type == "fp-check") fp_check(e, sd, doc, out);
    else if (e.type == "solutions-check") solutions_check(e, sd, doc);
    else throw Error(ErrorCode::kInvalidArgument, "unknown experiment type '" + e.type + "'");
  }
  out.text(e.name + ".json", doc.dump(2) + "\n");
  return doc;
}

RunResult run(const Config& config, const std::string& output_dir, const LogFn& log) {
  fs::create_directories(output_dir);
  RunResult result;
  json experiments = json::array();
  std::vector<std::string> written;
  auto write_manifest = [&] {
    json files = json::array();
    for (const std::string& rel : written) {
      const std::string bytes = read_file(fs::path(output_dir) / rel);
      files.push_back({{"path", rel}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
    }
    result.manifest = {{"tool_version", kToolVersion}, {"generated_at", utc_timestamp()},
                       {"status", result.exit_code == 0 ? "ok" : "failed"},
                       {"experiments", experiments}, {"files", files}};
    std::ofstream(fs::path(output_dir) / "manifest.json", std::ios::binary) << result.manifest.dump(2) << "\n";
  };
  // Report experiments read the manifest, so it is refreshed before each of them.
  for (const ExperimentConfig& e : config.experiments) {
    if (log) log("running " + e.name);
    if (e.type == "report") write_manifest();
    json entry{{"name", e.name}, {"type", e.type}};
    try {
      run_experiment(e, output_dir, &written);
      entry["status"] = "ok";
    } catch (const std::exception& ex) {
      entry["status"] = "error";
      entry["error"] = ex.what();
      if (result.error.empty()) result.error = e.name + ": " + ex.what();
      result.exit_code = 1;
      if (log) log("error in " + e.name + ": " + ex.what());
    }
    experiments.push_back(entry);
  }
  write_manifest();
  return result;
}

json report_directory(const std::string& dir, bool strict) {
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  const json manifest = json::parse(read_file(manifest_path));
  json files_ok = json::array(), mismatched = json::array();
  for (const json& f : manifest.value("files", json::array())) {
    const std::string rel = f.at("path").get<std::string>();
    const fs::path path = fs::path(dir) / rel;
    const bool ok = fs::exists(path) && sha256_hex(read_file(path)) == f.at("sha256").get<std::string>();
    (ok ? files_ok : mismatched).push_back(rel);
  }
  if (strict && !mismatched.empty())
    throw Error(ErrorCode::kIo, "manifest hash mismatch for " + mismatched.front().get<std::string>());
  json summary = json::array();
  for (const json& e : manifest.value("experiments", json::array())) {
    json item{{"name", e.at("name")}, {"type", e.at("type")}, {"status", e.at("status")}};
    const fs::path results = fs::path(dir) / (e.at("name").get<std::string>() + ".json");
    if (e.at("status") == "ok" && fs::exists(results)) {
      const json doc = json::parse(read_file(results));
      item["constants"] = doc.value("constants", json::object());
      item["rows"] = doc.value("rows", json::array()).size();
    }
    if (e.contains("error")) item["error"] = e.at("error");
    summary.push_back(item);
  }
  return {{"experiments", summary}, {"verified_files", files_ok.size()}, {"mismatched_files", mismatched},
          {"status", manifest.value("status", "unknown")}};
}

}  // namespace mslab
