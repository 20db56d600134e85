#pragma once

#include <functional>
#include <memory>
#include <string>

#include "truncpoly/basis.hpp"
#include "truncpoly/integrate.hpp"

namespace truncpoly {

// A log-density f on [0,1]^d with its smoothness metadata: sup |f| <= B and
// ||D^k f||_inf <= M^k for k >= k0. The derivative oracle, when present,
// returns D_alpha f(x) and enables Taylor construction.
struct LogDensity {
  int d = 1;
  std::function<double(const Vec&)> f;
  double B = 0.0;
  double M = 1.0;
  int k0 = 1;
  std::function<double(const MultiIndex&, const Vec&)> derivative_oracle;  // may be empty
  // optional extended-precision evaluator for d = 1; the deterministic
  // population-MLE path needs it because extrapolation to the full cube
  // amplifies data-side rounding at high degree
  std::function<long double(long double)> hd;
};

LogDensity sin10_target();
LogDensity poly_target(const PolyCoeffs& p);
LogDensity exp_scaled_target(double a);
LogDensity zero_target(int d);
// log-density from an expression in x (d=1) or x1..xd; no derivative oracle
LogDensity expression_target(const std::string& expr, int d);

// psi(f, S) = log int_S e^f, evaluated with the node maximum factored out.
double log_partition(const RealFn& f, const SurvivalSet& S, const QuadratureSpec& spec);

// P(f, S): density 1_S(x) exp(f(x) - psi). psi is computed eagerly at
// construction with the given quadrature spec.
class TruncatedDensity {
 public:
  TruncatedDensity(LogDensity f, SurvivalSet set, QuadratureSpec spec);
  TruncatedDensity(PolyCoeffs p, SurvivalSet set, QuadratureSpec spec);

  double pdf(const Vec& x) const;
  double log_unnormalized(const Vec& x) const { return logf_(x); }
  double psi() const { return psi_; }
  const SurvivalSet& set() const { return set_; }
  const QuadratureSpec& quad() const { return spec_; }
  int dimension() const { return set_.dimension(); }

 private:
  RealFn logf_;
  SurvivalSet set_;
  QuadratureSpec spec_;
  double psi_;
};

// KL(P || Q) for densities on the same conditioning set.
double kl_divergence(const TruncatedDensity& P, const TruncatedDensity& Q,
                     const QuadratureSpec& spec);

// (1/2) int |p - q| over the ambient cube; the sets may differ.
double tv_distance(const TruncatedDensity& P, const TruncatedDensity& Q,
                   const QuadratureSpec& spec);
IntegralResult tv_distance_est(const TruncatedDensity& P, const TruncatedDensity& Q,
                               const QuadratureSpec& spec);

// Degree-k Taylor polynomial of f around `center`, re-expanded in the
// canonical monomial basis with the constant term dropped.
PolyCoeffs taylor_log_density(const LogDensity& f, int k, const Vec& center);

}  // namespace truncpoly
