#include "truncpoly/integrate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "truncpoly/rng.hpp"

namespace truncpoly {

QuadratureSpec QuadratureSpec::for_dimension(int d) {
  if (d == 1) return gl(64);
  if (d <= 3) return tensor(d == 2 ? 48 : 32);
  return mc(1 << 20, 7777);
}

void gauss_legendre_nodes(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

namespace {

constexpr int kGlNodesPerPanel = 32;
constexpr double kBracketStep = 1.0 / 16384;  // 2^-14 scan for 1-D membership sets

// Composite GL rule on a union of 1-D intervals; panel count scales with
// interval length so short intervals are not over-resolved.
QuadRule interval_rule(const std::vector<Interval>& parts, int panels_per_unit) {
  std::vector<double> gn, gw;
  gauss_legendre_nodes(kGlNodesPerPanel, gn, gw);
  std::vector<double> xs, ws;
  for (const Interval& iv : parts) {
    double len = iv.b - iv.a;
    if (len <= 0) continue;
    int panels = std::max(1, static_cast<int>(std::ceil(panels_per_unit * len)));
    double h = len / panels;
    for (int p = 0; p < panels; ++p) {
      double a = iv.a + p * h;
      for (int j = 0; j < kGlNodesPerPanel; ++j) {
        xs.push_back(a + 0.5 * h * (gn[j] + 1.0));
        ws.push_back(0.5 * h * gw[j]);
      }
    }
  }
  QuadRule rule;
  rule.points = Mat(xs.size(), 1);
  rule.weights = Vec(ws.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    rule.points(i, 0) = xs[i];
    rule.weights[i] = ws[i];
  }
  return rule;
}

QuadRule tensor_rule(int d, int nodes_per_axis) {
  const int per_panel = 16;
  int panels = std::max(1, (nodes_per_axis + per_panel - 1) / per_panel);
  std::vector<double> gn, gw;
  gauss_legendre_nodes(per_panel, gn, gw);
  std::vector<double> xs, ws;
  double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    for (int j = 0; j < per_panel; ++j) {
      xs.push_back(p * h + 0.5 * h * (gn[j] + 1.0));
      ws.push_back(0.5 * h * gw[j]);
    }
  }
  int n1 = static_cast<int>(xs.size());
  long total = 1;
  for (int i = 0; i < d; ++i) total *= n1;
  QuadRule rule;
  rule.points = Mat(total, d);
  rule.weights = Vec(total);
  std::vector<int> idx(d, 0);
  for (long r = 0; r < total; ++r) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      rule.points(r, i) = xs[idx[i]];
      w *= ws[idx[i]];
    }
    rule.weights[r] = w;
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < n1) break;
      idx[i] = 0;
    }
  }
  return rule;
}

QuadRule mc_box_rule(int d, int n, std::uint64_t seed) {
  Rng rng(seed, Rng::hash_tag("quad_mc"));
  QuadRule rule;
  rule.points = Mat(n, d);
  rule.weights = Vec::Constant(n, 1.0 / n);
  rule.stochastic = true;
  for (int r = 0; r < n; ++r)
    for (int i = 0; i < d; ++i) rule.points(r, i) = rng.uniform();
  return rule;
}

double apply_rule(const QuadRule& rule, const RealFn& g) {
  double sum = 0.0;
  Vec x(rule.points.cols());
  for (Eigen::Index r = 0; r < rule.points.rows(); ++r) {
    x = rule.points.row(r);
    double v = g(x);
    if (!std::isfinite(v)) throw std::runtime_error("integrand is not finite at a quadrature node");
    sum += rule.weights[r] * v;
  }
  return sum;
}

// value and sample stderr of sum w_i g_i for an MC rule
IntegralResult apply_mc_rule(const QuadRule& rule, const RealFn& g, long denominator) {
  double sum = 0.0, sumsq = 0.0;
  Vec x(rule.points.cols());
  for (Eigen::Index r = 0; r < rule.points.rows(); ++r) {
    x = rule.points.row(r);
    double v = g(x);
    if (!std::isfinite(v)) throw std::runtime_error("integrand is not finite at a quadrature node");
    sum += v;
    sumsq += v * v;
  }
  double n = static_cast<double>(denominator);
  double mean = sum / n;
  double var = std::max(0.0, sumsq / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

// Bracket a 1-D membership set into an interval union: scan at kBracketStep,
// then bisect each boundary.
std::vector<Interval> bracket_1d(const std::function<bool(const Vec&)>& member) {
  auto at = [&](double x) {
    Vec v(1);
    v[0] = x;
    return member(v);
  };
  std::vector<Interval> parts;
  double open = -1.0;
  bool inside = false;
  long n = std::lround(1.0 / kBracketStep);
  auto bisect = [&](double lo, double hi, bool lo_in) {
    for (int it = 0; it < 50; ++it) {
      double mid = 0.5 * (lo + hi);
      if (at(mid) == lo_in)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  for (long i = 0; i <= n; ++i) {
    double x = static_cast<double>(i) / n;
    bool in = at(x);
    if (in && !inside) {
      open = i == 0 ? 0.0 : bisect(x - kBracketStep, x, false);
      inside = true;
    } else if (!in && inside) {
      parts.push_back({open, bisect(x - kBracketStep, x, true)});
      inside = false;
    }
  }
  if (inside) parts.push_back({open, 1.0});
  return parts;
}

}  // namespace

SurvivalSet SurvivalSet::intervals(std::vector<Interval> parts) {
  double vol = 0.0;
  double prev = -1.0;
  for (const Interval& iv : parts) {
    if (!(iv.a >= 0.0 && iv.b <= 1.0 && iv.a < iv.b))
      throw std::invalid_argument("survival intervals must be nonempty subsets of [0,1]");
    if (iv.a < prev) throw std::invalid_argument("survival intervals must be ordered and disjoint");
    prev = iv.b;
    vol += iv.b - iv.a;
  }
  if (vol <= 0.0) throw std::invalid_argument("empty or negligible survival set");
  SurvivalSet s;
  s.d_ = 1;
  s.cube_ = parts.size() == 1 && parts[0].a == 0.0 && parts[0].b == 1.0;
  s.exact_1d_ = std::move(parts);
  s.volume_ = vol;
  s.volume_stderr_ = 0.0;
  auto kept = *s.exact_1d_;
  s.member_ = [kept](const Vec& x) {
    for (const Interval& iv : kept)
      if (x[0] >= iv.a && x[0] <= iv.b) return true;
    return false;
  };
  return s;
}

SurvivalSet SurvivalSet::cube(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (d == 1) {
    SurvivalSet s = intervals({{0.0, 1.0}});
    return s;
  }
  SurvivalSet s;
  s.d_ = d;
  s.cube_ = true;
  s.member_ = [](const Vec&) { return true; };
  s.volume_ = 1.0;
  s.volume_stderr_ = 0.0;
  return s;
}

SurvivalSet SurvivalSet::halfspace(int d, Vec direction, double offset) {
  if (direction.size() != d) throw std::invalid_argument("halfspace direction dimension mismatch");
  return from_membership(
      d, [direction, offset](const Vec& x) { return direction.dot(x) <= offset; }, 1 << 16,
      20240601);
}

SurvivalSet SurvivalSet::ball(int d, Vec center, double radius) {
  if (center.size() != d) throw std::invalid_argument("ball center dimension mismatch");
  return from_membership(
      d, [center, radius](const Vec& x) { return (x - center).norm() <= radius; }, 1 << 16,
      20240602);
}

SurvivalSet SurvivalSet::from_membership(int d, std::function<bool(const Vec&)> member,
                                         int volume_draws, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (d == 1) {
    auto parts = bracket_1d(member);
    if (parts.empty()) throw std::runtime_error("empty or negligible survival set");
    return intervals(std::move(parts));
  }
  SurvivalSet s;
  s.d_ = d;
  s.member_ = std::move(member);
  Rng rng(seed, Rng::hash_tag("set_volume"));
  long hits = 0;
  Vec x(d);
  for (int i = 0; i < volume_draws; ++i) {
    for (int j = 0; j < d; ++j) x[j] = rng.uniform();
    if (s.member_(x)) ++hits;
  }
  if (hits == 0) throw std::runtime_error("empty or negligible survival set");
  double p = static_cast<double>(hits) / volume_draws;
  s.volume_ = p;
  s.volume_stderr_ = std::sqrt(p * (1.0 - p) / volume_draws);
  return s;
}

bool SurvivalSet::contains(const Vec& x) const {
  if (x.size() != d_) throw std::invalid_argument("membership query dimension mismatch");
  if (cube_ && d_ > 1) return true;
  return member_(x);
}

QuadRule box_rule(int d, const QuadratureSpec& spec) {
  switch (spec.mode) {
    case QuadMode::gauss_legendre_1d:
      if (d != 1) throw std::invalid_argument("gauss_legendre_1d requires d = 1");
      return interval_rule({{0.0, 1.0}}, spec.resolution);
    case QuadMode::tensor_grid:
      if (d > 3) throw std::invalid_argument("tensor_grid supports d <= 3");
      return tensor_rule(d, spec.resolution);
    case QuadMode::monte_carlo:
      return mc_box_rule(d, spec.resolution, spec.seed);
  }
  throw std::logic_error("unreachable");
}

QuadRule set_rule(const SurvivalSet& S, const QuadratureSpec& spec) {
  if (S.exact_1d()) {
    int panels = spec.mode == QuadMode::gauss_legendre_1d ? spec.resolution : 64;
    return interval_rule(*S.exact_1d(), panels);
  }
  if (S.is_cube() && spec.mode != QuadMode::monte_carlo)
    return box_rule(S.dimension(), spec);
  int draws = spec.mode == QuadMode::monte_carlo ? spec.resolution : 1 << 18;
  QuadRule box = mc_box_rule(S.dimension(), draws, spec.seed);
  // keep members only; weights stay 1/N so sum w approximates vol(S)
  std::vector<long> keep;
  Vec x(S.dimension());
  for (Eigen::Index r = 0; r < box.points.rows(); ++r) {
    x = box.points.row(r);
    if (S.contains(x)) keep.push_back(r);
  }
  QuadRule rule;
  rule.stochastic = true;
  rule.points = Mat(keep.size(), S.dimension());
  rule.weights = Vec::Constant(keep.size(), 1.0 / draws);
  for (size_t i = 0; i < keep.size(); ++i) rule.points.row(i) = box.points.row(keep[i]);
  return rule;
}

IntegralResult integrate_box(const RealFn& g, int d, const QuadratureSpec& spec) {
  if (spec.resolution < 2) throw std::invalid_argument("quadrature resolution must be >= 2");
  if (spec.mode == QuadMode::monte_carlo)
    return apply_mc_rule(box_rule(d, spec), g, spec.resolution);
  double value = apply_rule(box_rule(d, spec), g);
  QuadratureSpec finer = spec;
  finer.resolution *= 2;
  double refined = apply_rule(box_rule(d, finer), g);
  return {value, std::abs(refined - value)};
}

IntegralResult integrate_set(const RealFn& g, const SurvivalSet& S, const QuadratureSpec& spec) {
  if (S.volume_estimate() <= 0) throw std::invalid_argument("survival set has no volume");
  QuadRule rule = set_rule(S, spec);
  if (rule.stochastic) {
    long draws = spec.mode == QuadMode::monte_carlo ? spec.resolution : 1 << 18;
    // stderr over all box draws, members and non-members alike
    double sum = 0.0, sumsq = 0.0;
    Vec x(S.dimension());
    for (Eigen::Index r = 0; r < rule.points.rows(); ++r) {
      x = rule.points.row(r);
      double v = g(x);
      if (!std::isfinite(v)) throw std::runtime_error("integrand is not finite at a quadrature node");
      sum += v;
      sumsq += v * v;
    }
    double n = static_cast<double>(draws);
    double mean = sum / n;
    double var = std::max(0.0, sumsq / n - mean * mean);
    return {mean, std::sqrt(var / n)};
  }
  double value = apply_rule(rule, g);
  QuadratureSpec finer = spec;
  finer.resolution = std::max(2 * finer.resolution, 128);
  double refined = apply_rule(set_rule(S, finer), g);
  return {value, std::abs(refined - value)};
}

VolumeEstimate estimate_volume(const SurvivalSet& S, int n, std::uint64_t seed) {
  if (n < 100) throw std::invalid_argument("volume estimation needs n >= 100");
  if (S.exact_1d()) {
    double vol = 0.0;
    for (const Interval& iv : *S.exact_1d()) vol += iv.b - iv.a;
    return {vol, 0.0};
  }
  Rng rng(seed, Rng::hash_tag("estimate_volume"));
  long hits = 0;
  Vec x(S.dimension());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < S.dimension(); ++j) x[j] = rng.uniform();
    if (S.contains(x)) ++hits;
  }
  if (hits == 0) throw std::runtime_error("empty or negligible survival set");
  double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace truncpoly
