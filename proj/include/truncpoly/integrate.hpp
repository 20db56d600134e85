#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "truncpoly/basis.hpp"

namespace truncpoly {

enum class QuadMode { gauss_legendre_1d, tensor_grid, monte_carlo };

struct QuadratureSpec {
  QuadMode mode = QuadMode::gauss_legendre_1d;
  int resolution = 64;  // GL: panels; tensor: nodes per axis; MC: total draws
  std::uint64_t seed = 0;

  static QuadratureSpec gl(int panels = 64) {
    return {QuadMode::gauss_legendre_1d, panels, 0};
  }
  static QuadratureSpec tensor(int nodes_per_axis = 48) {
    return {QuadMode::tensor_grid, nodes_per_axis, 0};
  }
  static QuadratureSpec mc(int draws, std::uint64_t seed) {
    return {QuadMode::monte_carlo, draws, seed};
  }
  // a sensible deterministic default per dimension
  static QuadratureSpec for_dimension(int d);

  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

struct Interval {
  double a;
  double b;
};

// Survival set S in [0,1]^d, known through a membership oracle. For d = 1
// interval unions the representation is exact and all integration paths
// avoid indicator discontinuities.
class SurvivalSet {
 public:
  static SurvivalSet intervals(std::vector<Interval> parts);
  static SurvivalSet cube(int d);
  // { x : direction . x <= offset }
  static SurvivalSet halfspace(int d, Vec direction, double offset);
  static SurvivalSet ball(int d, Vec center, double radius);
  static SurvivalSet from_membership(int d, std::function<bool(const Vec&)> member,
                                     int volume_draws, std::uint64_t seed);

  int dimension() const { return d_; }
  bool contains(const Vec& x) const;
  bool is_cube() const { return cube_; }
  const std::optional<std::vector<Interval>>& exact_1d() const { return exact_1d_; }
  double volume_estimate() const { return volume_; }
  double volume_stderr() const { return volume_stderr_; }

 private:
  SurvivalSet() = default;
  int d_ = 1;
  bool cube_ = false;
  std::function<bool(const Vec&)> member_;
  std::optional<std::vector<Interval>> exact_1d_;
  double volume_ = 1.0;
  double volume_stderr_ = 0.0;
};

struct IntegralResult {
  double value;
  double error_estimate;
};

// Explicit node/weight form of a rule; sum_i w_i g(x_i) approximates the
// integral. Exposed so the density module can do log-sum-exp style shifted
// evaluation over the same nodes.
struct QuadRule {
  Mat points;   // one row per node
  Vec weights;
  bool stochastic = false;
};

QuadRule box_rule(int d, const QuadratureSpec& spec);
// Rule for integration over S: GL per interval when exact 1-D structure is
// available (membership-only 1-D sets are bracketed first), otherwise MC
// restricted to members.
QuadRule set_rule(const SurvivalSet& S, const QuadratureSpec& spec);

using RealFn = std::function<double(const Vec&)>;

IntegralResult integrate_box(const RealFn& g, int d, const QuadratureSpec& spec);
IntegralResult integrate_set(const RealFn& g, const SurvivalSet& S, const QuadratureSpec& spec);

struct VolumeEstimate {
  double value;
  double std_error;
};

VolumeEstimate estimate_volume(const SurvivalSet& S, int n, std::uint64_t seed);

// n-point Gauss-Legendre nodes/weights on [-1, 1]
void gauss_legendre_nodes(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace truncpoly
