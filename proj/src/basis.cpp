#include "truncpoly/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace truncpoly {

bool lex_less(const MultiIndex& a, const MultiIndex& b) {
  return std::lexicographical_compare(a.exponents.begin(), a.exponents.end(),
                                      b.exponents.begin(), b.exponents.end());
}

unsigned __int128 multi_index_factorial(const MultiIndex& alpha) {
  unsigned __int128 result = 1;
  const unsigned __int128 max128 = ~static_cast<unsigned __int128>(0);
  for (int e : alpha.exponents) {
    if (e < 0) throw std::invalid_argument("multi-index exponent must be nonnegative");
    for (int j = 2; j <= e; ++j) {
      if (result > max128 / static_cast<unsigned>(j))
        throw std::overflow_error("multi-index factorial exceeds 128 bits");
      result *= static_cast<unsigned>(j);
    }
  }
  return result;
}

namespace {

void enumerate_rec(int d, int k, int pos, int remaining, MultiIndex& cur,
                   std::vector<MultiIndex>& out) {
  if (pos == d) {
    if (cur.order() > 0) out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur.exponents[pos] = e;
    enumerate_rec(d, k, pos + 1, remaining - e, cur, out);
  }
  cur.exponents[pos] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(int d, int k) : d_(d), k_(k) {
  if (d < 1) throw std::invalid_argument("basis dimension must be >= 1");
  if (k < 0) throw std::invalid_argument("basis degree must be >= 0");
  MultiIndex cur;
  cur.exponents.assign(d, 0);
  enumerate_rec(d, k, 0, k, cur, indices_);
  std::sort(indices_.begin(), indices_.end(), lex_less);
}

PolyCoeffs::PolyCoeffs(BasisPtr b, Vec coeffs) : basis(std::move(b)), v(std::move(coeffs)) {
  if (!basis) throw std::invalid_argument("PolyCoeffs: null basis");
  if (v.size() != basis->size())
    throw std::invalid_argument("PolyCoeffs: coefficient length does not match basis");
}

double coeff_l1_bound(double B, int d, int k) {
  if (B <= 0) throw std::invalid_argument("coeff_l1_bound: B must be positive");
  return B * std::pow(2.0 * (d + k), 3.0 * k);
}

namespace {

int grid_resolution(int d, int k, double tol) {
  int wanted = static_cast<int>(std::ceil(4.0 * std::max(k, 1) / std::sqrt(tol)));
  int cap = d == 1 ? 512 : d == 2 ? 128 : d == 3 ? 64 : 16;
  return std::clamp(wanted, 4 * std::max(k, 1) + 1, cap);
}

}  // namespace

SupNormResult poly_sup_norm(const PolyCoeffs& p, double tol) {
  if (tol <= 0) throw std::invalid_argument("poly_sup_norm: tol must be positive");
  const int d = p.dimension();
  const int n = grid_resolution(d, p.degree(), tol);

  auto absq = [&](const Vec& x) { return std::abs(p(x)); };

  // Dense grid scan, keeping the best few cells as refinement seeds.
  struct Seed {
    double value;
    Vec point;
  };
  std::vector<Seed> seeds;
  const int keep = 8;
  std::vector<int> idx(d, 0);
  Vec x(d);
  bool done = false;
  while (!done) {
    for (int i = 0; i < d; ++i) x[i] = static_cast<double>(idx[i]) / (n - 1);
    double val = absq(x);
    if (seeds.size() < keep || val > seeds.back().value) {
      // strict > keeps the lexicographically earliest grid point on ties
      auto it = std::find_if(seeds.begin(), seeds.end(),
                             [&](const Seed& s) { return val > s.value; });
      seeds.insert(it, Seed{val, x});
      if (seeds.size() > keep) seeds.pop_back();
    }
    int i = d - 1;
    for (; i >= 0; --i) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
    done = i < 0;
  }

  // Coordinate-ascent refinement within one grid cell around each seed.
  const double h0 = 1.0 / (n - 1);
  SupNormResult best{seeds.front().value, seeds.front().point};
  for (const Seed& s : seeds) {
    Vec cur = s.point;
    double curval = s.value;
    double h = h0;
    for (int pass = 0; pass < 40; ++pass) {
      for (int i = 0; i < d; ++i) {
        for (double step : {-h, h}) {
          Vec cand = cur;
          cand[i] = std::clamp(cur[i] + step, 0.0, 1.0);
          double val = absq(cand);
          if (val > curval) {
            curval = val;
            cur = cand;
          }
        }
      }
      h *= 0.5;
      if (h < tol * 1e-3) break;
    }
    if (curval > best.value) best = SupNormResult{curval, cur};
  }
  return best;
}

}  // namespace truncpoly
