#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "truncpoly/io.hpp"
#include "truncpoly/mle.hpp"
#include "truncpoly/sampler.hpp"
#include "truncpoly/verify.hpp"

namespace fs = std::filesystem;
using namespace truncpoly;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitExampleAssertion = 4;

// Named targets: sin10, uniform, exp_scaled(a), polynomial(c1,...,ck) with
// coefficients in canonical order (d = 1), or expr:<expression>.
LogDensity make_target(const std::string& name, int d) {
  if (name == "sin10") return sin10_target();
  if (name == "uniform" || name == "zero") return zero_target(d);
  auto call_arg = [&name](const std::string& prefix) -> std::optional<std::string> {
    if (name.rfind(prefix, 0) == 0 && name.back() == ')')
      return name.substr(prefix.size(), name.size() - prefix.size() - 1);
    return std::nullopt;
  };
  if (auto arg = call_arg("exp_scaled(")) return exp_scaled_target(std::stod(*arg));
  if (auto arg = call_arg("polynomial(")) {
    if (d != 1) throw std::invalid_argument("polynomial targets are d = 1 only");
    std::vector<double> coeffs;
    std::stringstream stream(*arg);
    std::string piece;
    while (std::getline(stream, piece, ',')) coeffs.push_back(std::stod(piece));
    if (coeffs.empty()) throw std::invalid_argument("polynomial target needs coefficients");
    Vec v(static_cast<int>(coeffs.size()));
    for (size_t i = 0; i < coeffs.size(); ++i) v[static_cast<int>(i)] = coeffs[i];
    return poly_target(PolyCoeffs(make_basis(1, static_cast<int>(coeffs.size())), v));
  }
  if (name.rfind("expr:", 0) == 0) return expression_target(name.substr(5), d);
  throw std::invalid_argument(
      "unknown target '" + name +
      "'; expected sin10, uniform, exp_scaled(a), polynomial(...), or expr:<text>");
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument("bad JSON in '" + path + "': " + e.what());
  }
}

void write_sidecar(const std::string& dir) {
  auto now = std::chrono::system_clock::now();
  std::ostringstream body;
  body << "generated_unix_time="
       << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
       << "\n";
  write_text_file((fs::path(dir) / "run_meta.txt").string(), body.str());
}

// density curve over [0,1]: pdf and logpdf normalized on K and on S
// (zero / -inf outside S)
const std::vector<std::string> kCurveColumns{"x", "pdf_on_K", "logpdf_on_K", "pdf_on_S",
                                             "logpdf_on_S"};

Mat density_curve(const TruncatedDensity& onK, const TruncatedDensity& onS, int resolution) {
  Mat rows(resolution + 1, 5);
  Vec x(1);
  for (int i = 0; i <= resolution; ++i) {
    x[0] = static_cast<double>(i) / resolution;
    double pk = onK.pdf(x), ps = onS.pdf(x);
    rows(i, 0) = x[0];
    rows(i, 1) = pk;
    rows(i, 2) = pk > 0.0 ? std::log(pk) : -std::numeric_limits<double>::infinity();
    rows(i, 3) = ps;
    rows(i, 4) = ps > 0.0 ? std::log(ps) : -std::numeric_limits<double>::infinity();
  }
  return rows;
}

struct FitOptions {
  std::string config_path;
  std::string out_dir = ".";
  // command-line overrides; command line wins over the config file
  std::optional<std::string> target, set, mode, averaging, quad_mode;
  std::optional<int> degree, quad_resolution, curve_resolution;
  std::optional<double> bound_C, step_size;
  std::optional<long> steps;
  std::optional<std::uint64_t> seed;
};

int cmd_fit(const FitOptions& opt) {
  Json config = load_json_file(opt.config_path);
  std::string target_name = "sin10";
  std::string set_spec = "[0,0.5]";
  std::string mode = "population";
  int curve_resolution = 256;
  int dimension = 1;
  FitConfig cfg;
  for (const auto& [key, value] : config.items()) {
    if (key == "target")
      target_name = value.get<std::string>();
    else if (key == "set")
      set_spec = value.get<std::string>();
    else if (key == "mode")
      mode = value.get<std::string>();
    else if (key == "curve_resolution")
      curve_resolution = value.get<int>();
    else if (key == "dimension")
      dimension = value.get<int>();
    else if (key == "fit")
      cfg = fit_config_from_json(value);
    else
      throw std::invalid_argument("unknown config key '" + key + "'");
  }
  if (opt.target) target_name = *opt.target;
  if (opt.set) set_spec = *opt.set;
  if (opt.mode) mode = *opt.mode;
  if (opt.curve_resolution) curve_resolution = *opt.curve_resolution;
  if (opt.degree) cfg.degree = *opt.degree;
  if (opt.bound_C) cfg.bound_C = *opt.bound_C;
  if (opt.steps) cfg.steps = *opt.steps;
  if (opt.step_size) cfg.step_size = *opt.step_size;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.averaging) {
    Json j;
    j["averaging"] = *opt.averaging;
    FitConfig tmp = fit_config_from_json(j);
    cfg.averaging = tmp.averaging;
  }
  if (opt.quad_mode) cfg.quad.mode = quad_mode_from_name(*opt.quad_mode);
  if (opt.quad_resolution) cfg.quad.resolution = *opt.quad_resolution;
  if (curve_resolution < 64) throw std::invalid_argument("curve_resolution must be >= 64");
  if (mode != "population" && mode != "psgd")
    throw std::invalid_argument("mode must be 'population' or 'psgd'");
  if (!fs::is_directory(opt.out_dir))
    throw std::invalid_argument("output directory '" + opt.out_dir + "' does not exist");

  LogDensity target = make_target(target_name, dimension);
  SurvivalSet S = parse_set_spec(set_spec, target.d);
  if (S.dimension() != target.d)
    throw std::invalid_argument("target / set dimension mismatch");

  FitReport report;
  if (mode == "population") {
    if (target.d != 1)
      throw std::invalid_argument("population mode is d = 1 only");
    report.coeffs = population_mle_1d(target, S, cfg.degree, cfg.quad, 1e-8);
    report.final_kl_on_S = kl_objective(report.coeffs, target, S, cfg.quad);
    SurvivalSet K = SurvivalSet::cube(1);
    QuadratureSpec kq = QuadratureSpec::for_dimension(1);
    report.tv_on_K = tv_distance(TruncatedDensity(report.coeffs, K, kq),
                                 TruncatedDensity(target, K, kq), kq);
  } else {
    Samples data =
        sample_target(target, S, static_cast<int>(cfg.steps), cfg.seed ^ 0xda7a5eedull);
    report = psgd_fit(data.points, S, cfg, &target);
  }

  fs::path out(opt.out_dir);
  write_text_file((out / "fit_report.json").string(), fit_report_to_json(report).dump(2) + "\n");
  Json metrics;
  metrics["schema_version"] = kSchemaVersion;
  metrics["kl_on_S"] = report.final_kl_on_S.value();
  metrics["tv_on_K"] = report.tv_on_K.value();
  write_text_file((out / "metrics.json").string(), metrics.dump(2) + "\n");
  if (target.d == 1) {
    SurvivalSet K = SurvivalSet::cube(1);
    QuadratureSpec kq = QuadratureSpec::for_dimension(1);
    
    write_table_csv((out / "density_truth.csv").string(), kCurveColumns,
                    density_curve(TruncatedDensity(target, K, kq),
                                  TruncatedDensity(target, S, cfg.quad), curve_resolution));
    write_table_csv((out / "density_fit.csv").string(), kCurveColumns,
                    density_curve(TruncatedDensity(report.coeffs, K, kq),
                                  TruncatedDensity(report.coeffs, S, cfg.quad),
                                  curve_resolution));
  }
  write_sidecar(opt.out_dir);
  std::cout << "fit complete: kl_on_S = " << *report.final_kl_on_S
            << ", tv_on_K = " << *report.tv_on_K << "\n";
  return 0;
}

int cmd_example_1d(const std::string& out_dir, const std::string& fixture_path) {
  Json fixture = load_json_file(fixture_path);
  const Json& thresholds = fixture.at("thresholds");
  const double tv_K_high_max = thresholds.at("tv_on_K_high_degree").get<double>();
  std::vector<int> high_degrees = thresholds.at("high_degrees").get<std::vector<int>>();

  fs::create_directories(out_dir);
  fs::path out(out_dir);
  LogDensity f = sin10_target();
  SurvivalSet S = SurvivalSet::intervals({{0.0, 0.5}});
  SurvivalSet K = SurvivalSet::cube(1);
  QuadratureSpec spec = QuadratureSpec::gl(128);
  const std::vector<int> degrees{4, 6, 8, 10, 12, 14, 16, 20};
  const int resolution = 512;
  
  write_table_csv((out / "truth.csv").string(), kCurveColumns,
                  density_curve(TruncatedDensity(f, K, spec), TruncatedDensity(f, S, spec),
                                resolution));

  std::map<int, double> tv_S, tv_K;
  Mat summary(static_cast<Eigen::Index>(degrees.size()), 3);
  TruncatedDensity truthS(f, S, spec), truthK(f, K, spec);
  for (size_t i = 0; i < degrees.size(); ++i) {
    int k = degrees[i];
    PolyCoeffs v = population_mle_1d(f, S, k, spec, 1e-8);
    TruncatedDensity fitS(v, S, spec), fitK(v, K, spec);
    tv_S[k] = tv_distance(truthS, fitS, spec);
    tv_K[k] = tv_distance(truthK, fitK, spec);
    summary(static_cast<Eigen::Index>(i), 0) = k;
    summary(static_cast<Eigen::Index>(i), 1) = tv_S[k];
    summary(static_cast<Eigen::Index>(i), 2) = tv_K[k];
    write_table_csv((out / ("fit_k" + std::to_string(k) + ".csv")).string(), kCurveColumns,
                    density_curve(fitK, fitS, resolution));
    std::cout << "k=" << k << "  tv_on_S=" << tv_S[k] << "  tv_on_K=" << tv_K[k] << "\n";
  }
  write_table_csv((out / "summary.csv").string(), {"degree", "tv_on_S", "tv_on_K"}, summary);
  write_sidecar(out_dir);

  auto fail = [](const std::string& claim) {
    std::cerr << "example-1d assertion failed: " << claim << "\n";
    return kExitExampleAssertion;
  };
  for (int k : degrees) {
    double limit = thresholds.at("tv_on_S_max").at(std::to_string(k)).get<double>();
    if (!(tv_S[k] <= limit))
      return fail("TV on S at degree " + std::to_string(k) + " is " +
                  format_double(tv_S[k]) + ", above the fixture threshold " +
                  format_double(limit));
    if (!(tv_S[k] <= tv_S[4] + 1e-3))
      return fail("TV on S at degree " + std::to_string(k) +
                  " is worse than the degree-4 fit by more than 1e-3");
  }
  if (!(tv_K[12] > tv_K[10]))
    return fail("extrapolation error at degree 12 does not exceed the degree-10 value");
  for (int k : high_degrees) {
    if (!tv_K.count(k)) continue;
    if (!(tv_K[k] <= tv_K_high_max))
      return fail("TV on the full cube at degree " + std::to_string(k) + " is " +
                  format_double(tv_K[k]) + ", above " + format_double(tv_K_high_max));
  }
  std::cout << "all example assertions hold\n";
  return 0;
}

int cmd_verify(const std::string& suite, bool as_json) {
  std::vector<CheckReport> reports;
  try {
    reports = run_suite(suite);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  bool all_passed = true;
  std::cout << std::left;
  for (const CheckReport& r : reports) {
    all_passed = all_passed && r.passed;
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  observed=" << r.observed
              << "  bound=" << r.bound << "  margin=" << r.margin;
    if (!r.note.empty()) std::cout << "  (" << r.note << ")";
    std::cout << "\n";
  }
  if (as_json) {
    Json arr = Json::array();
    for (const CheckReport& r : reports) arr.push_back(check_report_to_json(r));
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["checks"] = arr;
    std::cout << doc.dump(2) << "\n";
  }
  return all_passed ? 0 : 1;
}

int cmd_sample(const std::string& target_name, const std::string& set_spec, int n,
               std::uint64_t seed, const std::string& out_path, int dimension) {
  LogDensity target = make_target(target_name, dimension);
  SurvivalSet S = parse_set_spec(set_spec, target.d);
  Samples result = sample_target(target, S, n, seed);
  write_samples_csv(out_path, result.points);
  std::cout << "wrote " << n << " samples to " << out_path
            << " (acceptance rate " << result.stats.acceptance_rate() << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("TOOL_THREADS")) {
    int cap = std::atoi(threads);
    if (cap > 0) Eigen::setNbThreads(cap);
  }

  CLI::App app{"truncated polynomial log-density estimation"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  auto* fit = app.add_subcommand("fit", "fit a model from a config file");
  fit->add_option("--config", fit_opt.config_path, "config file (JSON)")->required();
  fit->add_option("--out", fit_opt.out_dir, "output directory (must exist)");
  fit->add_option("--target", fit_opt.target, "target override");
  fit->add_option("--set", fit_opt.set, "survival set override");
  fit->add_option("--mode", fit_opt.mode, "population | psgd");
  fit->add_option("--degree", fit_opt.degree, "polynomial degree");
  fit->add_option("--bound-C", fit_opt.bound_C, "sup-norm projection bound");
  fit->add_option("--steps", fit_opt.steps, "PSGD iterations");
  fit->add_option("--step-size", fit_opt.step_size, "PSGD step size (0 = default)");
  fit->add_option("--seed", fit_opt.seed, "random seed");
  fit->add_option("--averaging", fit_opt.averaging, "final | uniform_average");
  fit->add_option("--quadrature-mode", fit_opt.quad_mode, "quadrature mode");
  fit->add_option("--quadrature-resolution", fit_opt.quad_resolution, "quadrature resolution");
  fit->add_option("--curve-resolution", fit_opt.curve_resolution, "points in emitted curves");

  std::string example_out = "example1d_out";
  std::string fixture_path = "tests/fixtures/example1d.json";
  auto* example = app.add_subcommand("example-1d", "reproduce the 1-D extrapolation example");
  example->add_option("--out", example_out, "output directory");
  example->add_option("--fixtures", fixture_path, "fixture file with thresholds");

  std::string suite;
  bool as_json = false;
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--suite", suite, "suite name filter (default: all)");
  verify->add_flag("--json", as_json, "also emit JSON");

  std::string sample_target_name, sample_set = "cube", sample_out;
  int sample_n = 0, sample_dim = 1;
  std::uint64_t sample_seed = 0;
  auto* sample = app.add_subcommand("sample", "draw samples from a truncated target");
  sample->add_option("--target", sample_target_name, "target name")->required();
  sample->add_option("--set", sample_set, "survival set spec");
  sample->add_option("-n", sample_n, "number of samples")->required();
  sample->add_option("--seed", sample_seed, "random seed");
  sample->add_option("--out", sample_out, "output CSV path")->required();
  sample->add_option("--dimension", sample_dim, "ambient dimension for generic targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_opt);
    if (example->parsed()) return cmd_example_1d(example_out, fixture_path);
    if (verify->parsed()) return cmd_verify(suite, as_json);
    if (sample->parsed())
      return cmd_sample(sample_target_name, sample_set, sample_n, sample_seed, sample_out,
                        sample_dim);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
