#pragma once

#include <cstdint>

#include "truncpoly/density.hpp"
#include "truncpoly/integrate.hpp"

namespace truncpoly {

struct SamplerStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepts = 0;

  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepts) / proposals;
  }
};

struct Samples {
  Mat points;  // one row per draw
  SamplerStats stats;
};

// Uniform on S by rejection from the cube. Proposals are capped at
// ceil((n / vol_estimate) * ln(1000 n)); exceeding the cap raises an error.
Samples sample_uniform_set(const SurvivalSet& S, int n, std::uint64_t seed);

// P(v, S) by accepting a uniform-on-S proposal with probability
// exp(q_v(x) - C). Requires sup |q_v| <= C, which also guarantees an
// acceptance rate of at least exp(-2C). Stats count the exponential-tilt
// stage only.
Samples sample_exp_family(const PolyCoeffs& v, const SurvivalSet& S, double C, int n,
                          std::uint64_t seed);

// P(f, S) with envelope exp(f(x) - B); an observed f(x) > B is an error.
Samples sample_target(const LogDensity& f, const SurvivalSet& S, int n, std::uint64_t seed);

}  // namespace truncpoly
