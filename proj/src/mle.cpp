#include "truncpoly/mle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "truncpoly/rng.hpp"

namespace truncpoly {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r *= static_cast<double>(n - k + j) / j;
  return r;
}

// normalized node weights w_i e^{v_i - psi} of the density prop. to e^v on
// the rule's support, plus psi itself
struct NodeDensity {
  Vec values;
  Vec probs;
  double psi;
};

NodeDensity node_density(const QuadRule& rule, const RealFn& fn) {
  const Eigen::Index n = rule.points.rows();
  NodeDensity out;
  out.values = Vec(n);
  Vec x(rule.points.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    x = rule.points.row(i);
    out.values[i] = fn(x);
    if (!std::isfinite(out.values[i]))
      throw std::runtime_error("log-density is not finite at a quadrature node");
  }
  double m = out.values.maxCoeff();
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) z += rule.weights[i] * std::exp(out.values[i] - m);
  if (!(z > 0.0)) throw std::runtime_error("log-partition underflowed to zero");
  out.psi = std::log(z) + m;
  out.probs = Vec(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.probs[i] = rule.weights[i] * std::exp(out.values[i] - out.psi);
  return out;
}

}  // namespace

double default_step_size(int d, int k, double C, long T) {
  double R = coeff_l1_bound(C, d, k);
  double rho2 = 2.0 * binomial(d + k, k);
  return std::sqrt(R * R / (rho2 * static_cast<double>(T)));
}

double kl_objective(const PolyCoeffs& v, const LogDensity& f, const SurvivalSet& S,
                    const QuadratureSpec& spec) {
  if (v.dimension() != f.d || f.d != S.dimension())
    throw std::invalid_argument("kl_objective: dimension mismatch");
  QuadRule rule = set_rule(S, spec);
  NodeDensity pf = node_density(rule, f.f);
  NodeDensity pq = node_density(rule, [&v](const Vec& x) { return v(x); });
  double mean_diff = 0.0;
  for (Eigen::Index i = 0; i < rule.points.rows(); ++i)
    mean_diff += pf.probs[i] * (pf.values[i] - pq.values[i]);
  return mean_diff - pf.psi + pq.psi;
}

Vec population_gradient(const PolyCoeffs& v, const LogDensity& f, const SurvivalSet& S,
                        const QuadratureSpec& spec) {
  if (v.dimension() != f.d || f.d != S.dimension())
    throw std::invalid_argument("population_gradient: dimension mismatch");
  QuadRule rule = set_rule(S, spec);
  NodeDensity pf = node_density(rule, f.f);
  NodeDensity pq = node_density(rule, [&v](const Vec& x) { return v(x); });
  Vec g = Vec::Zero(v.basis->size());
  Vec x(rule.points.cols());
  for (Eigen::Index i = 0; i < rule.points.rows(); ++i) {
    x = rule.points.row(i);
    g += (pq.probs[i] - pf.probs[i]) * v.basis->profile(x);
  }
  return g;
}

Mat population_hessian(const PolyCoeffs& v, const SurvivalSet& S, const QuadratureSpec& spec) {
  if (v.dimension() != S.dimension())
    throw std::invalid_argument("population_hessian: dimension mismatch");
  QuadRule rule = set_rule(S, spec);
  NodeDensity pq = node_density(rule, [&v](const Vec& x) { return v(x); });
  const int m = v.basis->size();
  Vec mean = Vec::Zero(m);
  Mat second = Mat::Zero(m, m);
  Vec x(rule.points.cols());
  for (Eigen::Index i = 0; i < rule.points.rows(); ++i) {
    x = rule.points.row(i);
    Vec prof = v.basis->profile(x);
    mean += pq.probs[i] * prof;
    second += pq.probs[i] * (prof * prof.transpose());
  }
  return second - mean * mean.transpose();
}

Vec stochastic_gradient(const MonomialBasis& basis, const Vec& x_model, const Vec& y_data) {
  return basis.profile(x_model) - basis.profile(y_data);
}

PolyCoeffs project_onto_D(const PolyCoeffs& v, double C, double tol) {
  if (C <= 0.0) throw std::invalid_argument("projection bound C must be positive");
  if (tol <= 0.0) throw std::invalid_argument("projection tolerance must be positive");
  const double suptol = std::min(tol * 0.1, 1e-8);
  struct Cut {
    Vec a;      // monomial profile at the violating point
    double s;   // sign of q at that point
  };
  std::vector<Cut> cuts;
  Vec u = v.v;
  for (int round = 0; round < 200; ++round) {
    PolyCoeffs cur(v.basis, u);
    SupNormResult sup = poly_sup_norm(cur, suptol);
    if (sup.value <= C + tol) return cur;
    double s = cur(sup.argmax) >= 0.0 ? 1.0 : -1.0;
    cuts.push_back({v.basis->profile(sup.argmax), s});

    // least-distance point over the accumulated halfspace cuts (Dykstra)
    u = v.v;
    Mat incr = Mat::Zero(static_cast<Eigen::Index>(cuts.size()), u.size());
    for (int pass = 0; pass < 5000; ++pass) {
      for (size_t i = 0; i < cuts.size(); ++i) {
        Vec y = u + incr.row(static_cast<Eigen::Index>(i)).transpose();
        double viol = cuts[i].s * cuts[i].a.dot(y) - C;
        Vec next = y;
        if (viol > 0.0) next -= (viol / cuts[i].a.squaredNorm()) * (cuts[i].s * cuts[i].a);
        incr.row(static_cast<Eigen::Index>(i)) = (y - next).transpose();
        u = next;
      }
      double worst = 0.0;
      for (const Cut& c : cuts) worst = std::max(worst, c.s * c.a.dot(u) - C);
      if (worst <= 0.25 * tol) break;
    }
  }
  std::ostringstream msg;
  msg << "projection onto the sup-norm ball did not converge: " << cuts.size()
      << " cuts, sup |q| = " << poly_sup_norm(PolyCoeffs(v.basis, u), suptol).value
      << ", C = " << C;
  throw std::runtime_error(msg.str());
}

FitReport psgd_fit(const Mat& data, const SurvivalSet& S, const FitConfig& cfg,
                   const LogDensity* target) {
  const int d = S.dimension();
  if (cfg.steps < 1) throw std::invalid_argument("psgd_fit: steps must be >= 1");
  if (cfg.bound_C <= 0.0) throw std::invalid_argument("psgd_fit: bound C must be positive");
  if (data.cols() != d) throw std::invalid_argument("psgd_fit: data dimension mismatch");
  if (data.rows() < cfg.steps)
    throw std::invalid_argument("psgd_fit: needs one fresh data point per step");
  const double eta =
      cfg.step_size > 0.0 ? cfg.step_size
                          : default_step_size(d, cfg.degree, cfg.bound_C, cfg.steps);
  if (!(eta > 0.0)) throw std::invalid_argument("psgd_fit: step size must be positive");

  BasisPtr basis = make_basis(d, cfg.degree);
  const int m = basis->size();
  const double proj_tol = 1e-7;
  Vec cur = Vec::Zero(m);
  Vec sum = Vec::Zero(m);
  FitReport report;
  Rng base(cfg.seed, Rng::hash_tag("psgd_fit"));
  const long record_every = std::max(cfg.steps / 10, 1L);
  Vec y(d), x(d);
  for (long t = 1; t <= cfg.steps; ++t) {
    PolyCoeffs vc(basis, cur);
    Samples model = sample_exp_family(vc, S, cfg.bound_C, 1, base.derive(t).next_u64());
    report.sampler_stats.proposals += model.stats.proposals;
    report.sampler_stats.accepts += model.stats.accepts;
    x = model.points.row(0);
    y = data.row(t - 1);
    Vec g = stochastic_gradient(*basis, x, y);
    PolyCoeffs stepped(basis, cur - eta * g);
    PolyCoeffs projected = project_onto_D(stepped, cfg.bound_C, proj_tol);
    if ((projected.v - stepped.v).norm() > 0.0) ++report.projection_count;
    cur = projected.v;
    sum += cur;
    if (target && t % record_every == 0) {
      Vec snap = cfg.averaging == Averaging::uniform_average ? Vec(sum / t) : cur;
      report.trajectory.push_back(
          {t, kl_objective(PolyCoeffs(basis, snap), *target, S, cfg.quad)});
    }
  }
  Vec final_v = cfg.averaging == Averaging::uniform_average ? Vec(sum / cfg.steps) : cur;
  report.coeffs = PolyCoeffs(basis, final_v);
  if (target) {
    report.final_kl_on_S = kl_objective(report.coeffs, *target, S, cfg.quad);
    SurvivalSet K = SurvivalSet::cube(d);
    QuadratureSpec tvspec = QuadratureSpec::for_dimension(d);
    TruncatedDensity fitK(report.coeffs, K, tvspec);
    TruncatedDensity truthK(*target, K, tvspec);
    report.tv_on_K = tv_distance(fitK, truthK, tvspec);
  }
  return report;
}

// ---------------------------------------------------------------------------
// deterministic population MLE, d = 1, in extended precision

namespace {

using LD = long double;
using VecLD = Eigen::Vector<LD, Eigen::Dynamic>;
using MatLD = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;

void gauss_legendre_ld(int n, std::vector<LD>& nodes, std::vector<LD>& weights) {
  nodes.assign(n, 0.0L);
  weights.assign(n, 0.0L);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    LD x = cosl(static_cast<LD>(M_PI) * (i + 0.75L) / (n + 0.5L));
    LD pp = 0.0L;
    for (int it = 0; it < 120; ++it) {
      LD p0 = 1.0L, p1 = 0.0L;
      for (int j = 0; j < n; ++j) {
        LD p2 = p1;
        p1 = p0;
        p0 = ((2.0L * j + 1.0L) * x * p1 - j * p2) / (j + 1.0L);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0L);
      LD dx = p0 / pp;
      x -= dx;
      if (fabsl(dx) < 1e-19L) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0L / ((1.0L - x * x) * pp * pp);
  }
}

}  // namespace

PolyCoeffs population_mle_1d(const LogDensity& f, const SurvivalSet& S, int k,
                             const QuadratureSpec& spec, double opt_tol) {
  if (f.d != 1 || S.dimension() != 1)
    throw std::invalid_argument("population_mle_1d requires d = 1");
  if (!S.exact_1d())
    throw std::invalid_argument("population_mle_1d requires an interval-union set");
  if (k < 1) throw std::invalid_argument("population_mle_1d: degree must be >= 1");

  // composite extended-precision quadrature over the interval union
  const int gl_n = 32;
  std::vector<LD> gn, gw;
  gauss_legendre_ld(gl_n, gn, gw);
  const int panels_per_unit = std::max({spec.resolution, 8 * k, 96});
  std::vector<LD> xs, ws;
  for (const Interval& iv : *S.exact_1d()) {
    LD len = static_cast<LD>(iv.b) - static_cast<LD>(iv.a);
    int panels = std::max(1, static_cast<int>(std::ceil(panels_per_unit * iv.b - panels_per_unit * iv.a)));
    LD h = len / panels;
    for (int p = 0; p < panels; ++p) {
      LD a = static_cast<LD>(iv.a) + p * h;
      for (int j = 0; j < gl_n; ++j) {
        xs.push_back(a + 0.5L * h * (gn[j] + 1.0L));
        ws.push_back(0.5L * h * gw[j]);
      }
    }
  }
  const int n = static_cast<int>(xs.size());
  VecLD x(n), w(n), fv(n);
  std::function<LD(LD)> feval = f.hd;
  if (!feval)
    feval = [&f](LD t) {
      Vec v(1);
      v[0] = static_cast<double>(t);
      return static_cast<LD>(f.f(v));
    };
  for (int i = 0; i < n; ++i) {
    x[i] = xs[i];
    w[i] = ws[i];
    fv[i] = feval(xs[i]);
  }

  // Vandermonde columns 1, x, ..., x^k and their orthonormalization under
  // the quadrature inner product (classical Gram-Schmidt, applied twice)
  MatLD V(n, k + 1);
  V.col(0).setOnes();
  for (int j = 1; j <= k; ++j) V.col(j) = V.col(j - 1).cwiseProduct(x);
  MatLD phi = V;
  MatLD A = MatLD::Identity(k + 1, k + 1);
  for (int j = 0; j <= k; ++j) {
    for (int rep = 0; rep < 2; ++rep)
      for (int i = 0; i < j; ++i) {
        LD c = (w.cwiseProduct(phi.col(j)).cwiseProduct(phi.col(i))).sum();
        phi.col(j) -= c * phi.col(i);
        A.col(j) -= c * A.col(i);
      }
    LD nrm = sqrtl(w.cwiseProduct(phi.col(j)).cwiseProduct(phi.col(j)).sum());
    phi.col(j) /= nrm;
    A.col(j) /= nrm;
  }

  // normalized data-side weights under P(f, S)
  VecLD ef = (fv.array() - fv.maxCoeff()).exp().matrix();
  VecLD pf = w.cwiseProduct(ef) / w.cwiseProduct(ef).sum();
  MatLD E = phi.rightCols(k);  // constant element dropped
  VecLD targetE = E.transpose() * pf;

  auto objective = [&](const VecLD& c) {
    VecLD g = E * c;
    LD m = g.maxCoeff();
    VecLD eg = (g.array() - m).exp().matrix();
    return logl(w.cwiseProduct(eg).sum()) + m - c.dot(targetE);
  };

  VecLD c = VecLD::Zero(k);
  LD gn_ortho = 0.0L;
  for (int it = 0; it < 200; ++it) {
    VecLD g = E * c;
    LD m = g.maxCoeff();
    VecLD eg = (g.array() - m).exp().matrix();
    VecLD pq = w.cwiseProduct(eg) / w.cwiseProduct(eg).sum();
    VecLD mean = E.transpose() * pq;
    VecLD grad = mean - targetE;
    gn_ortho = grad.norm();
    if (gn_ortho < 1e-17L) break;
    MatLD centered = E.rowwise() - mean.transpose();
    MatLD H = centered.transpose() * (centered.array().colwise() * pq.array()).matrix();
    VecLD step = H.ldlt().solve(grad);
    LD f0 = objective(c);
    LD slope = grad.dot(step);
    LD t = 1.0L;
    while (objective(c - t * step) > f0 - 1e-4L * t * slope) {
      t *= 0.5L;
      if (t < 1e-14L) break;
    }
    if (objective(c - t * step) >= f0 && gn_ortho < 1e-12L) break;  // line-search stall
    c -= t * step;
  }

  // postcondition: gradient in the monomial basis
  {
    VecLD g = E * c;
    LD m = g.maxCoeff();
    VecLD eg = (g.array() - m).exp().matrix();
    VecLD pq = w.cwiseProduct(eg) / w.cwiseProduct(eg).sum();
    MatLD Vm = V.rightCols(k);
    LD gm = (Vm.transpose() * (pq - pf)).norm();
    if (static_cast<double>(gm) > opt_tol) {
      std::ostringstream msg;
      msg << "population MLE did not reach gradient tolerance: |grad| = "
          << static_cast<double>(gm) << " > " << opt_tol << " at degree " << k;
      throw std::runtime_error(msg.str());
    }
  }

  VecLD mono = A.rightCols(k) * c;  // indices 0..k; entry 0 is the constant
  Vec out(k);
  for (int j = 1; j <= k; ++j) out[j - 1] = static_cast<double>(mono[j]);
  return PolyCoeffs(make_basis(1, k), out);
}

}  // namespace truncpoly
