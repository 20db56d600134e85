#include "truncpoly/density.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>

#include "truncpoly/rng.hpp"

namespace truncpoly {

namespace {

double factorial_ld(unsigned __int128 v) { return static_cast<double>(v); }

void check_bound(const LogDensity& f) {
  Rng rng(421, Rng::hash_tag("logdensity_bound_check"));
  Vec x(f.d);
  double slack = 1e-9 * std::max(1.0, f.B);
  for (int i = 0; i < 1000; ++i) {
    for (int j = 0; j < f.d; ++j) x[j] = rng.uniform();
    if (std::abs(f.f(x)) > f.B + slack)
      throw std::invalid_argument("log-density exceeds its stated bound B");
  }
}

}  // namespace

LogDensity sin10_target() {
  LogDensity t;
  t.d = 1;
  t.f = [](const Vec& x) { return std::sin(10.0 * x[0]); };
  t.B = 1.0;
  t.M = 10.0;
  t.derivative_oracle = [](const MultiIndex& a, const Vec& x) {
    int r = a.order();
    return std::pow(10.0, r) * std::sin(10.0 * x[0] + r * M_PI_2);
  };
  t.hd = [](long double x) { return sinl(10.0L * x); };
  return t;
}

LogDensity poly_target(const PolyCoeffs& p) {
  LogDensity t;
  t.d = p.dimension();
  t.f = [p](const Vec& x) { return p(x); };
  t.B = poly_sup_norm(p, 1e-8).value;
  t.M = 0.0;  // smoothness scale not used for polynomial targets
  t.derivative_oracle = [p](const MultiIndex& a, const Vec& x) {
    const auto& idx = p.basis->indices();
    double sum = 0.0;
    for (int j = 0; j < p.basis->size(); ++j) {
      const auto& g = idx[j].exponents;
      double term = p.v[j];
      bool ok = true;
      for (int i = 0; i < p.dimension() && ok; ++i) {
        int gi = g[i], ai = a.exponents[i];
        if (gi < ai) {
          ok = false;
          break;
        }
        for (int m = 0; m < ai; ++m) term *= (gi - m);
        term *= std::pow(x[i], gi - ai);
      }
      if (ok) sum += term;
    }
    return sum;
  };
  if (p.dimension() == 1) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < p.basis->size(); ++j)
      terms.emplace_back(p.basis->indices()[j].exponents[0], p.v[j]);
    t.hd = [terms](long double x) {
      long double sum = 0.0L;
      for (const auto& [e, c] : terms) sum += static_cast<long double>(c) * powl(x, e);
      return sum;
    };
  }
  return t;
}

LogDensity exp_scaled_target(double a) {
  LogDensity t;
  t.d = 1;
  t.f = [a](const Vec& x) { return std::exp(a * x[0]); };
  t.B = std::exp(std::abs(a));
  t.M = std::max(1.0, std::abs(a)) * std::exp(std::abs(a));
  t.derivative_oracle = [a](const MultiIndex& al, const Vec& x) {
    return std::pow(a, al.order()) * std::exp(a * x[0]);
  };
  t.hd = [a](long double x) { return expl(static_cast<long double>(a) * x); };
  return t;
}

LogDensity zero_target(int d) {
  LogDensity t;
  t.d = d;
  t.f = [](const Vec&) { return 0.0; };
  t.B = 0.0;
  t.M = 1.0;
  t.derivative_oracle = [](const MultiIndex&, const Vec&) { return 0.0; };
  t.hd = [](long double) { return 0.0L; };
  return t;
}

// ---------------------------------------------------------------------------
// tiny expression parser for CLI custom targets:
//   numbers, x or x1..xd, + - * / ^, parentheses, sin cos exp log sqrt abs, pi
namespace expr {

using Fn = std::function<double(const Vec&)>;

struct Parser {
  const std::string& s;
  size_t pos = 0;
  int d;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  Fn parse() {
    Fn e = expr();
    skip();
    if (pos != s.size()) throw std::invalid_argument("trailing input in expression");
    return e;
  }

  Fn expr() {
    Fn lhs = term();
    while (true) {
      if (eat('+')) {
        Fn rhs = term();
        lhs = [lhs, rhs](const Vec& x) { return lhs(x) + rhs(x); };
      } else if (eat('-')) {
        Fn rhs = term();
        lhs = [lhs, rhs](const Vec& x) { return lhs(x) - rhs(x); };
      } else {
        return lhs;
      }
    }
  }

  Fn term() {
    Fn lhs = factor();
    while (true) {
      if (eat('*')) {
        Fn rhs = factor();
        lhs = [lhs, rhs](const Vec& x) { return lhs(x) * rhs(x); };
      } else if (eat('/')) {
        Fn rhs = factor();
        lhs = [lhs, rhs](const Vec& x) { return lhs(x) / rhs(x); };
      } else {
        return lhs;
      }
    }
  }

  Fn factor() {
    Fn base = unary();
    if (eat('^')) {
      Fn e = factor();  // right associative
      return [base, e](const Vec& x) { return std::pow(base(x), e(x)); };
    }
    return base;
  }

  Fn unary() {
    if (eat('-')) {
      Fn e = unary();
      return [e](const Vec& x) { return -e(x); };
    }
    eat('+');
    return primary();
  }

  Fn primary() {
    skip();
    if (pos >= s.size()) throw std::invalid_argument("unexpected end of expression");
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t end;
      double val = std::stod(s.substr(pos), &end);
      pos += end;
      return [val](const Vec&) { return val; };
    }
    if (c == '(') {
      ++pos;
      Fn e = expr();
      if (!eat(')')) throw std::invalid_argument("missing ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      std::string name = s.substr(start, pos - start);
      if (name == "pi") return [](const Vec&) { return M_PI; };
      if (name == "x") {
        if (d != 1) throw std::invalid_argument("use x1..xd in multivariate expressions");
        return [](const Vec& x) { return x[0]; };
      }
      if (name.size() >= 2 && name[0] == 'x' &&
          std::isdigit(static_cast<unsigned char>(name[1]))) {
        int i = std::stoi(name.substr(1)) - 1;
        if (i < 0 || i >= d) throw std::invalid_argument("variable index out of range: " + name);
        return [i](const Vec& x) { return x[i]; };
      }
      if (!eat('(')) throw std::invalid_argument("expected '(' after function " + name);
      Fn arg = expr();
      if (!eat(')')) throw std::invalid_argument("missing ')'");
      if (name == "sin") return [arg](const Vec& x) { return std::sin(arg(x)); };
      if (name == "cos") return [arg](const Vec& x) { return std::cos(arg(x)); };
      if (name == "exp") return [arg](const Vec& x) { return std::exp(arg(x)); };
      if (name == "log") return [arg](const Vec& x) { return std::log(arg(x)); };
      if (name == "sqrt") return [arg](const Vec& x) { return std::sqrt(arg(x)); };
      if (name == "abs") return [arg](const Vec& x) { return std::abs(arg(x)); };
      throw std::invalid_argument("unknown function: " + name);
    }
    throw std::invalid_argument(std::string("unexpected character '") + c + "' in expression");
  }
};

}  // namespace expr

LogDensity expression_target(const std::string& text, int d) {
  expr::Parser parser{text, 0, d};
  auto fn = parser.parse();
  LogDensity t;
  t.d = d;
  t.f = fn;
  // bound from a scan; M unknown for opaque expressions
  double maxabs = 0.0;
  Rng rng(97, Rng::hash_tag("expression_bound_scan"));
  Vec x(d);
  int n = d == 1 ? 8192 : 100000;
  for (int i = 0; i < n; ++i) {
    if (d == 1)
      x[0] = static_cast<double>(i) / (n - 1);
    else
      for (int j = 0; j < d; ++j) x[j] = rng.uniform();
    maxabs = std::max(maxabs, std::abs(fn(x)));
  }
  t.B = maxabs * (1.0 + 1e-6) + 1e-12;
  t.M = 0.0;
  return t;
}

// ---------------------------------------------------------------------------

double log_partition(const RealFn& f, const SurvivalSet& S, const QuadratureSpec& spec) {
  if (S.volume_estimate() <= 0) throw std::invalid_argument("survival set has no volume");
  QuadRule rule = set_rule(S, spec);
  if (rule.points.rows() == 0) throw std::runtime_error("log_partition: empty quadrature rule");
  Vec x(rule.points.cols());
  Vec vals(rule.points.rows());
  for (Eigen::Index r = 0; r < rule.points.rows(); ++r) {
    x = rule.points.row(r);
    vals[r] = f(x);
    if (!std::isfinite(vals[r]))
      throw std::runtime_error("log-density is not finite at a quadrature node");
  }
  double m = vals.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index r = 0; r < rule.points.rows(); ++r)
    sum += rule.weights[r] * std::exp(vals[r] - m);
  if (!(sum > 0.0)) throw std::runtime_error("log_partition: integral underflowed to zero");
  return std::log(sum) + m;
}

TruncatedDensity::TruncatedDensity(LogDensity f, SurvivalSet set, QuadratureSpec spec)
    : logf_(f.f), set_(std::move(set)), spec_(spec) {
  if (f.d != set_.dimension())
    throw std::invalid_argument("log-density / survival set dimension mismatch");
  check_bound(f);
  psi_ = log_partition(logf_, set_, spec_);
}

TruncatedDensity::TruncatedDensity(PolyCoeffs p, SurvivalSet set, QuadratureSpec spec)
    : set_(std::move(set)), spec_(spec) {
  if (p.dimension() != set_.dimension())
    throw std::invalid_argument("polynomial / survival set dimension mismatch");
  logf_ = [p](const Vec& x) { return p(x); };
  psi_ = log_partition(logf_, set_, spec_);
}

double TruncatedDensity::pdf(const Vec& x) const {
  if (!set_.contains(x)) return 0.0;
  return std::exp(logf_(x) - psi_);
}

double kl_divergence(const TruncatedDensity& P, const TruncatedDensity& Q,
                     const QuadratureSpec& spec) {
  if (P.dimension() != Q.dimension())
    throw std::invalid_argument("KL divergence: dimension mismatch");
  QuadRule rule = set_rule(P.set(), spec);
  Vec x(rule.points.cols());
  double sum = 0.0;
  for (Eigen::Index r = 0; r < rule.points.rows(); ++r) {
    x = rule.points.row(r);
    double p = P.pdf(x);
    if (p <= 0.0) continue;  // 0 log(0/q) = 0
    double q = Q.pdf(x);
    if (q <= 0.0)
      throw std::runtime_error("KL divergence: support mismatch (q = 0 where p > 0)");
    sum += rule.weights[r] * p * (std::log(p) - std::log(q));
  }
  return std::max(sum, 0.0);
}

namespace {

// 1-D TV: split [0,1] at set endpoints and at sign changes of p - q so every
// GL panel sees a smooth integrand.
IntegralResult tv_1d(const TruncatedDensity& P, const TruncatedDensity& Q,
                     const QuadratureSpec& spec) {
  std::vector<double> cuts{0.0, 1.0};
  for (const auto* D : {&P, &Q}) {
    if (D->set().exact_1d())
      for (const Interval& iv : *D->set().exact_1d()) {
        cuts.push_back(iv.a);
        cuts.push_back(iv.b);
      }
  }
  auto diff = [&](double t) {
    Vec x(1);
    x[0] = t;
    return P.pdf(x) - Q.pdf(x);
  };
  const int scan = 4096;
  double prev = diff(0.0);
  for (int i = 1; i <= scan; ++i) {
    double t = static_cast<double>(i) / scan;
    double cur = diff(t);
    if ((prev < 0.0) != (cur < 0.0)) {
      double lo = t - 1.0 / scan, hi = t;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if ((diff(mid) < 0.0) == (prev < 0.0))
          lo = mid;
        else
          hi = mid;
      }
      cuts.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Interval> segs;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] - cuts[i] > 1e-13) segs.push_back({cuts[i], cuts[i + 1]});
  SurvivalSet full = SurvivalSet::intervals(segs);
  auto integrand = [&](const Vec& x) { return std::abs(P.pdf(x) - Q.pdf(x)); };
  IntegralResult r = integrate_set(integrand, full, spec);
  return {0.5 * r.value, 0.5 * r.error_estimate};
}

}  // namespace

IntegralResult tv_distance_est(const TruncatedDensity& P, const TruncatedDensity& Q,
                               const QuadratureSpec& spec) {
  if (P.dimension() != Q.dimension())
    throw std::invalid_argument("TV distance: dimension mismatch");
  const int d = P.dimension();
  if (d == 1) return tv_1d(P, Q, spec);
  auto integrand = [&](const Vec& x) { return std::abs(P.pdf(x) - Q.pdf(x)); };
  QuadratureSpec use = spec;
  if (use.mode != QuadMode::monte_carlo) {
    bool smooth = P.set().is_cube() && Q.set().is_cube();
    if (!smooth || d > 3) use = QuadratureSpec::mc(1 << 19, spec.seed + 11);
  }
  IntegralResult r = integrate_box(integrand, d, use);
  return {0.5 * r.value, 0.5 * r.error_estimate};
}

double tv_distance(const TruncatedDensity& P, const TruncatedDensity& Q,
                   const QuadratureSpec& spec) {
  return tv_distance_est(P, Q, spec).value;
}

PolyCoeffs taylor_log_density(const LogDensity& f, int k, const Vec& center) {
  if (!f.derivative_oracle)
    throw std::invalid_argument("taylor_log_density requires a derivative oracle");
  if (center.size() != f.d) throw std::invalid_argument("taylor center dimension mismatch");
  auto basis = make_basis(f.d, k);
  std::map<std::vector<int>, int> position;
  for (int j = 0; j < basis->size(); ++j)
    position[basis->indices()[j].exponents] = j;
  Vec out = Vec::Zero(basis->size());

  bool at_origin = center.isZero(0.0);
  for (int j = 0; j < basis->size(); ++j) {
    const MultiIndex& alpha = basis->indices()[j];
    double c = f.derivative_oracle(alpha, center) / factorial_ld(multi_index_factorial(alpha));
    if (at_origin) {
      out[j] += c;
      continue;
    }
    // expand prod_i (y_i - c_i)^{alpha_i} into monomials
    std::vector<int> beta(f.d, 0);
    bool done = false;
    while (!done) {
      int order = 0;
      double coef = c;
      for (int i = 0; i < f.d; ++i) {
        int ai = alpha.exponents[i], bi = beta[i];
        order += bi;
        double binom = 1.0;
        for (int m = 0; m < bi; ++m) binom = binom * (ai - m) / (m + 1);
        coef *= binom * std::pow(-center[i], ai - bi);
      }
      if (order > 0) out[position.at(beta)] += coef;
      int i = f.d - 1;
      for (; i >= 0; --i) {
        if (++beta[i] <= alpha.exponents[i]) break;
        beta[i] = 0;
      }
      done = i < 0;
    }
  }
  return PolyCoeffs(basis, out);
}

}  // namespace truncpoly
