#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

namespace truncpoly {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Multi-index alpha in N^d with |alpha| = sum of exponents.
struct MultiIndex {
  std::vector<int> exponents;

  int order() const {
    int s = 0;
    for (int e : exponents) s += e;
    return s;
  }
  int dimension() const { return static_cast<int>(exponents.size()); }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

bool lex_less(const MultiIndex& a, const MultiIndex& b);

// alpha! = prod_i (alpha_i !) in 128-bit arithmetic; throws std::overflow_error.
unsigned __int128 multi_index_factorial(const MultiIndex& alpha);

// All monomials x^alpha with 0 < |alpha| <= k over d variables, in strict
// lexicographic order of the exponent tuples. The coordinate vector of a
// polynomial in this ordering is the canonical serialized form everywhere
// in the library.
class MonomialBasis {
 public:
  MonomialBasis(int d, int k);

  int dimension() const { return d_; }
  int degree() const { return k_; }
  // t_k - 1 = C(d+k, k) - 1
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  // m_k(x): the vector (x^alpha)_alpha in canonical order.
  template <typename Scalar>
  Eigen::Vector<Scalar, Eigen::Dynamic> profile(
      const Eigen::Vector<Scalar, Eigen::Dynamic>& x) const {
    if (x.size() != d_) throw std::invalid_argument("monomial profile: dimension mismatch");
    Eigen::Vector<Scalar, Eigen::Dynamic> out(size());
    // powers[i][e] = x_i^e, e = 0..k
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> powers(d_, k_ + 1);
    for (int i = 0; i < d_; ++i) {
      powers(i, 0) = Scalar(1);
      for (int e = 1; e <= k_; ++e) powers(i, e) = powers(i, e - 1) * x[i];
    }
    for (int j = 0; j < size(); ++j) {
      Scalar m(1);
      for (int i = 0; i < d_; ++i) m *= powers(i, indices_[j].exponents[i]);
      out[j] = m;
    }
    return out;
  }

  Vec profile(const Vec& x) const { return profile<double>(x); }

  friend bool operator==(const MonomialBasis& a, const MonomialBasis& b) {
    return a.d_ == b.d_ && a.k_ == b.k_;
  }

 private:
  int d_;
  int k_;
  std::vector<MultiIndex> indices_;
};

using BasisPtr = std::shared_ptr<const MonomialBasis>;

inline BasisPtr make_basis(int d, int k) { return std::make_shared<MonomialBasis>(d, k); }

// Polynomial with zero constant term: q_v(x) = v . m_k(x).
struct PolyCoeffs {
  BasisPtr basis;
  Vec v;

  PolyCoeffs() = default;
  PolyCoeffs(BasisPtr b, Vec coeffs);

  double operator()(const Vec& x) const { return basis->profile(x).dot(v); }
  int dimension() const { return basis->dimension(); }
  int degree() const { return basis->degree(); }
};

// Guaranteed l1 bound B * (2(d+k))^{3k} on the coefficients of any degree-k
// polynomial bounded by B on the unit cube; sizes the PSGD diameter.
double coeff_l1_bound(double B, int d, int k);

struct SupNormResult {
  double value;
  Vec argmax;
};

// max over [0,1]^d of |q_v| within additive tol, via dense grid search plus
// coordinate-ascent refinement from the best grid cells. Deterministic;
// grid ties break toward the lexicographically smallest grid point.
SupNormResult poly_sup_norm(const PolyCoeffs& p, double tol);

}  // namespace truncpoly
