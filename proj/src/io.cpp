#include "truncpoly/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace truncpoly {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

Json poly_to_json(const PolyCoeffs& p) {
  Json j;
  j["d"] = p.dimension();
  j["k"] = p.degree();
  j["coeffs"] = std::vector<double>(p.v.begin(), p.v.end());
  return j;
}

PolyCoeffs poly_from_json(const Json& j) {
  if (!j.contains("d") || !j.contains("k") || !j.contains("coeffs"))
    throw std::invalid_argument("polynomial JSON needs keys d, k, coeffs");
  int d = j.at("d").get<int>();
  int k = j.at("k").get<int>();
  auto coeffs = j.at("coeffs").get<std::vector<double>>();
  BasisPtr basis = make_basis(d, k);
  if (static_cast<int>(coeffs.size()) != basis->size())
    throw std::invalid_argument("polynomial JSON: coefficient count does not match (d, k)");
  Vec v(basis->size());
  for (int i = 0; i < basis->size(); ++i) v[i] = coeffs[i];
  return PolyCoeffs(basis, v);
}

Json set_to_json(const SurvivalSet& S) {
  if (!S.exact_1d())
    throw std::invalid_argument("only d = 1 interval unions have a JSON form");
  Json j;
  j["d"] = 1;
  Json parts = Json::array();
  for (const Interval& iv : *S.exact_1d()) parts.push_back({iv.a, iv.b});
  j["intervals"] = parts;
  return j;
}

SurvivalSet set_from_json(const Json& j) {
  if (!j.contains("d") || j.at("d").get<int>() != 1 || !j.contains("intervals"))
    throw std::invalid_argument("survival set JSON needs d = 1 and an intervals list");
  std::vector<Interval> parts;
  for (const auto& pair : j.at("intervals")) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("survival set JSON: each interval is a [a, b] pair");
    parts.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  return SurvivalSet::intervals(parts);
}

SurvivalSet parse_set_spec(const std::string& spec, int d) {
  if (spec == "cube") return SurvivalSet::cube(d);
  if (d != 1)
    throw std::invalid_argument("interval set specs are d = 1 only; use \"cube\" otherwise");
  std::vector<Interval> parts;
  size_t pos = 0;
  while (pos < spec.size()) {
    size_t open = spec.find('[', pos);
    if (open == std::string::npos) break;
    size_t comma = spec.find(',', open);
    size_t close = spec.find(']', open);
    if (comma == std::string::npos || close == std::string::npos || comma > close)
      throw std::invalid_argument("bad set spec '" + spec + "'; expected [a,b] or [a,b]U[c,d]");
    try {
      double a = std::stod(spec.substr(open + 1, comma - open - 1));
      double b = std::stod(spec.substr(comma + 1, close - comma - 1));
      parts.push_back({a, b});
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number in set spec '" + spec + "'");
    }
    pos = close + 1;
  }
  if (parts.empty())
    throw std::invalid_argument("bad set spec '" + spec + "'; expected [a,b] or [a,b]U[c,d]");
  return SurvivalSet::intervals(parts);
}

std::string quad_mode_name(QuadMode mode) {
  switch (mode) {
    case QuadMode::gauss_legendre_1d: return "gauss_legendre_1d";
    case QuadMode::tensor_grid: return "tensor_grid";
    case QuadMode::monte_carlo: return "monte_carlo";
  }
  throw std::logic_error("unreachable");
}

QuadMode quad_mode_from_name(const std::string& name) {
  if (name == "gauss_legendre_1d") return QuadMode::gauss_legendre_1d;
  if (name == "tensor_grid") return QuadMode::tensor_grid;
  if (name == "monte_carlo") return QuadMode::monte_carlo;
  throw std::invalid_argument("unknown quadrature mode '" + name +
                              "'; expected gauss_legendre_1d, tensor_grid, or monte_carlo");
}

Json quad_to_json(const QuadratureSpec& spec) {
  Json j;
  j["mode"] = quad_mode_name(spec.mode);
  j["resolution"] = spec.resolution;
  return j;
}

QuadratureSpec quad_from_json(const Json& j) {
  QuadratureSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "mode")
      spec.mode = quad_mode_from_name(value.get<std::string>());
    else if (key == "resolution")
      spec.resolution = value.get<int>();
    else if (key == "seed")
      spec.seed = value.get<std::uint64_t>();
    else
      throw std::invalid_argument("unknown quadrature key '" + key + "'");
  }
  if (spec.resolution < 2) throw std::invalid_argument("quadrature resolution must be >= 2");
  return spec;
}

FitConfig fit_config_from_json(const Json& j) {
  FitConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "degree")
      cfg.degree = value.get<int>();
    else if (key == "bound_C")
      cfg.bound_C = value.get<double>();
    else if (key == "steps")
      cfg.steps = value.get<long>();
    else if (key == "step_size")
      cfg.step_size = value.get<double>();
    else if (key == "seed")
      cfg.seed = value.get<std::uint64_t>();
    else if (key == "averaging") {
      std::string name = value.get<std::string>();
      if (name == "final")
        cfg.averaging = Averaging::final_iterate;
      else if (name == "uniform_average")
        cfg.averaging = Averaging::uniform_average;
      else
        throw std::invalid_argument("averaging must be 'final' or 'uniform_average'");
    } else if (key == "quadrature")
      cfg.quad = quad_from_json(value);
    else
      throw std::invalid_argument("unknown fit config key '" + key + "'");
  }
  if (cfg.degree < 1) throw std::invalid_argument("degree must be >= 1");
  if (cfg.bound_C <= 0.0) throw std::invalid_argument("bound_C must be positive");
  if (cfg.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (cfg.step_size < 0.0) throw std::invalid_argument("step_size must be nonnegative");
  return cfg;
}

Json fit_config_to_json(const FitConfig& cfg) {
  Json j;
  j["degree"] = cfg.degree;
  j["bound_C"] = cfg.bound_C;
  j["steps"] = cfg.steps;
  j["step_size"] = cfg.step_size;
  j["seed"] = cfg.seed;
  j["averaging"] =
      cfg.averaging == Averaging::uniform_average ? "uniform_average" : "final";
  j["quadrature"] = quad_to_json(cfg.quad);
  return j;
}

Json fit_report_to_json(const FitReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["coeffs"] = poly_to_json(report.coeffs);
  Json traj = Json::array();
  for (const TrajectoryPoint& p : report.trajectory)
    traj.push_back({{"step", p.step}, {"objective", p.objective}});
  j["trajectory"] = traj;
  j["sampler_stats"] = {{"proposals", report.sampler_stats.proposals},
                        {"accepts", report.sampler_stats.accepts},
                        {"acceptance_rate", report.sampler_stats.acceptance_rate()}};
  j["projection_count"] = report.projection_count;
  if (report.final_kl_on_S) j["final_kl_on_S"] = *report.final_kl_on_S;
  if (report.tv_on_K) j["tv_on_K"] = *report.tv_on_K;
  return j;
}

Json check_report_to_json(const CheckReport& report) {
  Json j;
  j["name"] = report.name;
  j["passed"] = report.passed;
  j["observed"] = report.observed;
  j["bound"] = report.bound;
  j["margin"] = report.margin;
  j["config_digest"] = report.config_digest;
  if (!report.note.empty()) j["note"] = report.note;
  return j;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << body;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_samples_csv(const std::string& path, const Mat& points) {
  std::ostringstream body;
  for (Eigen::Index j = 0; j < points.cols(); ++j)
    body << (j ? "," : "") << "x" << (j + 1);
  body << "\n";
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j)
      body << (j ? "," : "") << format_double(points(i, j));
    body << "\n";
  }
  write_text_file(path, body.str());
}

void write_table_csv(const std::string& path, const std::vector<std::string>& columns,
                     const Mat& rows) {
  if (rows.cols() != static_cast<Eigen::Index>(columns.size()))
    throw std::invalid_argument("CSV table: column count mismatch");
  std::ostringstream body;
  for (size_t j = 0; j < columns.size(); ++j) body << (j ? "," : "") << columns[j];
  body << "\n";
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j)
      body << (j ? "," : "") << format_double(rows(i, j));
    body << "\n";
  }
  write_text_file(path, body.str());
}

}  // namespace truncpoly
