#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "truncpoly/density.hpp"
#include "truncpoly/sampler.hpp"

namespace truncpoly {

enum class Averaging { final_iterate, uniform_average };

struct FitConfig {
  int degree = 3;
  double bound_C = 3.0;     // sup-norm radius of the feasible set D
  long steps = 1000;        // T
  double step_size = 0.0;   // eta; 0 selects sqrt(R^2 / (rho^2 T))
  std::uint64_t seed = 0;
  QuadratureSpec quad = QuadratureSpec::gl(64);
  Averaging averaging = Averaging::uniform_average;
};

// eta = sqrt(R^2 / (rho^2 T)) with R the guaranteed coefficient l1 bound and
// rho^2 = 2 C(d+k, k), the worst-case squared norm of a stochastic gradient.
double default_step_size(int d, int k, double C, long T);

struct TrajectoryPoint {
  long step;
  double objective;
};

struct FitReport {
  PolyCoeffs coeffs;
  std::vector<TrajectoryPoint> trajectory;  // filled when the target is known
  SamplerStats sampler_stats;               // model-draw acceptance accounting
  long projection_count = 0;
  std::optional<double> final_kl_on_S;
  std::optional<double> tv_on_K;
};

// L(v) = KL(P(f,S) || P(v,S)) = E_{P(f,S)}[f - q_v] - psi(f,S) + psi(v,S).
double kl_objective(const PolyCoeffs& v, const LogDensity& f, const SurvivalSet& S,
                    const QuadratureSpec& spec);

// grad L = E_{P(v,S)}[m_k] - E_{P(f,S)}[m_k]
Vec population_gradient(const PolyCoeffs& v, const LogDensity& f, const SurvivalSet& S,
                        const QuadratureSpec& spec);

// Hessian of L = Cov(m_k) under P(v,S); positive semidefinite.
Mat population_hessian(const PolyCoeffs& v, const SurvivalSet& S, const QuadratureSpec& spec);

// one-sample gradient m_k(x_model) - m_k(y_data)
Vec stochastic_gradient(const MonomialBasis& basis, const Vec& x_model, const Vec& y_data);

// Euclidean projection onto D = { v : sup |q_v| <= C } by cutting planes:
// each round adds the halfspace cut from the sup-norm maximizer and re-solves
// the least-distance problem over the accumulated cuts with Dykstra's
// alternating projections. Identity when v is already feasible.
PolyCoeffs project_onto_D(const PolyCoeffs& v, double C, double tol);

// Algorithm: v0 = 0; per step draw one model point from P(v,S), consume one
// fresh data row, step along the stochastic gradient, project onto D. The
// target, when supplied, is only used for reporting (trajectory, final KL,
// TV on the cube).
FitReport psgd_fit(const Mat& data, const SurvivalSet& S, const FitConfig& cfg,
                   const LogDensity* target = nullptr);

// Deterministic minimizer of KL(P(f,S) || P(q,S)) over degree-k polynomials
// for d = 1 interval-union sets: Newton in a basis orthonormalized on S,
// extended-precision quadrature. Postcondition: the monomial-basis gradient
// norm is at most opt_tol.
PolyCoeffs population_mle_1d(const LogDensity& f, const SurvivalSet& S, int k,
                             const QuadratureSpec& spec, double opt_tol);

}  // namespace truncpoly
