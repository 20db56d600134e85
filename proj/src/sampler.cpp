#include "truncpoly/sampler.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "truncpoly/rng.hpp"

namespace truncpoly {

namespace {

std::uint64_t proposal_cap(int n, double rate_estimate) {
  double cap = (static_cast<double>(n) / rate_estimate) * std::log(n * 1e3);
  return static_cast<std::uint64_t>(std::ceil(cap)) + 16;
}

// One uniform-on-S draw from a shared stream, charging proposals to `stats`.
bool draw_uniform_member(const SurvivalSet& S, Rng& rng, std::uint64_t cap,
                         SamplerStats& stats, Vec& out) {
  const int d = S.dimension();
  while (stats.proposals < cap) {
    ++stats.proposals;
    for (int j = 0; j < d; ++j) out[j] = rng.uniform();
    if (S.contains(out)) {
      ++stats.accepts;
      return true;
    }
  }
  return false;
}

}  // namespace

Samples sample_uniform_set(const SurvivalSet& S, int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample count must be nonnegative");
  if (S.volume_estimate() <= 0.0) throw std::invalid_argument("survival set has no volume");
  Samples result;
  result.points = Mat(n, S.dimension());
  if (n == 0) return result;
  Rng rng(seed, Rng::hash_tag("sample_uniform_set"));
  const std::uint64_t cap = proposal_cap(n, S.volume_estimate());
  Vec x(S.dimension());
  for (int i = 0; i < n; ++i) {
    if (!draw_uniform_member(S, rng, cap, result.stats, x))
      throw std::runtime_error("survival set volume too small for requested sample size");
    result.points.row(i) = x;
  }
  return result;
}

Samples sample_exp_family(const PolyCoeffs& v, const SurvivalSet& S, double C, int n,
                          std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample count must be nonnegative");
  if (v.dimension() != S.dimension())
    throw std::invalid_argument("coefficient / survival set dimension mismatch");
  if (C < 0.0) throw std::invalid_argument("sup-norm bound C must be nonnegative");
  double sup = poly_sup_norm(v, 1e-7).value;
  if (sup > C * (1.0 + 1e-9) + 1e-6) {
    std::ostringstream msg;
    msg << "coefficients lie outside the feasible set: sup |q_v| = " << sup
        << " exceeds C = " << C;
    throw std::invalid_argument(msg.str());
  }

  Samples result;
  result.points = Mat(n, S.dimension());
  if (n == 0) return result;
  Rng rng(seed, Rng::hash_tag("sample_exp_family"));
  // inner uniform-on-S stage keeps its own books; the returned stats cover
  // the exponential-tilt stage so acceptance_rate reflects exp(q_v - C)
  SamplerStats uniform_stats;
  const std::uint64_t uniform_cap =
      proposal_cap(n, S.volume_estimate() * std::exp(-2.0 * std::min(C, 30.0)));
  const std::uint64_t tilt_cap = proposal_cap(n, std::exp(-2.0 * std::min(C, 30.0)));
  Vec x(S.dimension());
  for (int i = 0; i < n; ++i) {
    while (true) {
      if (result.stats.proposals >= tilt_cap ||
          !draw_uniform_member(S, rng, uniform_cap, uniform_stats, x))
        throw std::runtime_error("survival set volume too small for requested sample size");
      ++result.stats.proposals;
      if (rng.uniform() < std::exp(v(x) - C)) {
        ++result.stats.accepts;
        break;
      }
    }
    result.points.row(i) = x;
  }
  return result;
}

Samples sample_target(const LogDensity& f, const SurvivalSet& S, int n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("sample count must be nonnegative");
  if (f.d != S.dimension())
    throw std::invalid_argument("log-density / survival set dimension mismatch");

  Samples result;
  result.points = Mat(n, S.dimension());
  if (n == 0) return result;
  Rng rng(seed, Rng::hash_tag("sample_target"));
  SamplerStats uniform_stats;
  const double env = std::exp(-2.0 * std::min(f.B, 30.0));
  const std::uint64_t uniform_cap = proposal_cap(n, S.volume_estimate() * env);
  const std::uint64_t env_cap = proposal_cap(n, env);
  const double slack = 1e-9 * std::max(1.0, f.B);
  Vec x(S.dimension());
  for (int i = 0; i < n; ++i) {
    while (true) {
      if (result.stats.proposals >= env_cap ||
          !draw_uniform_member(S, rng, uniform_cap, uniform_stats, x))
        throw std::runtime_error("survival set volume too small for requested sample size");
      ++result.stats.proposals;
      double val = f.f(x);
      if (val > f.B + slack) {
        std::ostringstream msg;
        msg << "log-density envelope violated: f(" << x.transpose() << ") = " << val
            << " exceeds B = " << f.B;
        throw std::runtime_error(msg.str());
      }
      if (rng.uniform() < std::exp(val - f.B)) {
        ++result.stats.accepts;
        break;
      }
    }
    result.points.row(i) = x;
  }
  return result;
}

}  // namespace truncpoly
