#pragma once

// Root-system layer for the split group SL_d(R): positive roots as coordinate
// differences, coroots under the trace form, the half-sum rho, the symmetric
// Weyl group with signatures, and the growth proxy for the Plancherel density.

#include <algorithm>
#include <limits>
#include <numeric>

#include "core.hpp"

namespace ranklab {

/// A coordinate permutation w; acts on vectors by (w.x)_{perm[i]} = x_i.
struct WeylElement {
  std::vector<int> perm;
  int signature = 1;

  Vec apply(const Vec& x) const {
    Vec y(x.size());
    for (int i = 0; i < x.size(); ++i) y(perm[i]) = x(i);
    return y;
  }
  SpectralParameter apply(const SpectralParameter& l) const {
    return SpectralParameter(apply(l.re), apply(l.im));
  }
};

class RootDatum {
 public:
  /// Dimensions outside [3, 8] are refused: the Weyl group is materialized
  /// and 8! is the largest order this library is sized for.
  explicit RootDatum(int d) : d_(d) {
    if (d < 3 || d > 8) fail_arg("root datum: d must be in [3, 8], got " + std::to_string(d));
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) positive_.push_back({i, j});
    rho_.resize(d);
    for (int i = 0; i < d; ++i) rho_(i) = 0.5 * (d - 1) - i;
    // All d! permutations with signatures.
    std::vector<int> p(d);
    std::iota(p.begin(), p.end(), 0);
    do {
      weyl_.push_back({p, parity(p)});
    } while (std::next_permutation(p.begin(), p.end()));
  }

  int d() const { return d_; }
  int rank() const { return d_ - 1; }
  int num_positive() const { return static_cast<int>(positive_.size()); }
  const std::vector<std::pair<int, int>>& positive_roots() const { return positive_; }

  /// Root e_i - e_j as an ambient vector; under the trace form the coroot of
  /// any root is the same vector (all roots have squared length 2).
  Vec root_vec(const std::pair<int, int>& a) const {
    Vec v = Vec::Zero(d_);
    v(a.first) = 1.0;
    v(a.second) = -1.0;
    return v;
  }
  std::pair<int, int> simple_root(int i) const {
    if (i < 0 || i >= rank()) fail_arg("simple root index out of range");
    return {i, i + 1};
  }

  const Vec& rho() const { return rho_; }
  double rho_norm() const { return rho_.norm(); }  // equals sqrt(d(d^2-1)/12)

  const std::vector<WeylElement>& weyl() const { return weyl_; }
  const WeylElement& weyl_identity() const { return weyl_.front(); }

  /// <x, alpha-coroot> = x_i - x_j.
  static double pair_coroot(const Vec& x, const std::pair<int, int>& a) {
    return x(a.first) - x(a.second);
  }
  static Cplx pair_coroot(const SpectralParameter& l, const std::pair<int, int>& a) {
    return {l.re(a.first) - l.re(a.second), l.im(a.first) - l.im(a.second)};
  }

  /// Smallest |<lambda, coroot>| over the positive roots.
  double regularity(const SpectralParameter& l) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& a : positive_) m = std::min(m, std::abs(pair_coroot(l, a)));
    return m;
  }
  bool is_regular(const SpectralParameter& l, double c = 1e-6) const {
    return regularity(l) >= c;
  }

  /// Growth proxy for the Plancherel density: prod over positive roots of
  /// (t + |<lambda, coroot>|).  Vanishes at t = 0 on singular lambda.
  double plancherel_proxy(double t, const SpectralParameter& l) const {
    if (t < 0) fail_arg("plancherel_proxy: t >= 0 required");
    double p = 1.0;
    for (const auto& a : positive_) p *= t + std::abs(pair_coroot(l, a));
    return p;
  }

  /// Radial Jacobian of the polar-coordinates measure, product form.
  double jacobian(const Vec& x) const {
    double j = 1.0;
    for (const auto& a : positive_) j *= std::sinh(pair_coroot(x, a));
    return j;
  }
  /// Same Jacobian through the signed exponential sum over the Weyl group;
  /// agreement of the two forms is a test oracle.
  double jacobian_alternating(const Vec& x) const {
    double s = 0.0;
    for (const auto& w : weyl_) s += w.signature * std::exp(2.0 * w.apply(rho_).dot(x));
    return std::ldexp(s, -num_positive());  // 2^{-|Phi+|} * sum
  }

 private:
  static int parity(const std::vector<int>& p) {
    int sgn = 1;
    for (size_t i = 0; i < p.size(); ++i)
      for (size_t j = i + 1; j < p.size(); ++j)
        if (p[i] > p[j]) sgn = -sgn;
    return sgn;
  }

  int d_;
  std::vector<std::pair<int, int>> positive_;
  Vec rho_;
  std::vector<WeylElement> weyl_;
};

}  // namespace ranklab
