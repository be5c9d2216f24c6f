#pragma once

// Harish-Chandra c-function for the split group at hand, its Levi-relative
// ratio, and the spherical Plancherel density.  The c-function is assembled
// from rank-one factors over positive roots (Gindikin-Karpelevich product)
// and normalized so that c(rho) = 1; with that choice the constant-function
// expansion  1 = sum_w c(w rho) e^{<w rho - rho, tX>}  holds exactly and the
// leading coefficient of every tempered expansion is pinned.

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "ranklab/core.hpp"
#include "ranklab/root_datum.hpp"

namespace ranklab {

// log Gamma on the complex plane (Lanczos, g = 7, double accuracy ~1e-13
// relative away from poles; reflection handles Re z < 1/2).
inline Cplx log_gamma(Cplx z) {
  static const double kCoef[9] = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5) {
    // log pi/sin(pi z) - log Gamma(1 - z); fine for the moderate |Im z| used here
    return std::log(M_PI / std::sin(M_PI * z)) - log_gamma(1.0 - z);
  }
  z -= 1.0;
  Cplx x = kCoef[0];
  for (int k = 1; k < 9; ++k) x += kCoef[k] / (z + static_cast<double>(k));
  const Cplx t = z + 7.5;
  return 0.5 * std::log(2 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// Rank-one factor gamma1(y) = Gamma(y/2) / (sqrt(pi) Gamma((y+1)/2)), applied
// below at y = <lambda, alpha^vee>.  Poles at y in {0, -2, -4, ...}, zeros at
// y in {-1, -3, ...}; gamma1(1) = 1 and gamma1(2) = 2/pi.
inline Cplx rank_one_factor(Cplx y) {
  return std::exp(log_gamma(0.5 * y) - log_gamma(0.5 * (y + 1.0))) / std::sqrt(M_PI);
}

// True when y sits within tol of a pole of the rank-one factor.
inline bool rank_one_pole(Cplx y, double tol = 1e-9) {
  if (std::abs(y.imag()) > tol) return false;
  const double nearest = 2.0 * std::round(0.5 * y.real());
  return nearest <= tol && std::abs(y.real() - nearest) <= tol;
}

struct CFunctionValue {
  Cplx value{std::numeric_limits<double>::quiet_NaN(), 0.0};
  bool pole_flag = false;  // value is unusable when set
};

// Normalizing constant: the raw rank-one product evaluated at rho, so that
// the normalized c below satisfies c(rho) = 1.
inline double c_normalizer(const RootDatum& roots) {
  double k = 1.0;
  for (const auto& pr : roots.positive_roots()) {
    const double y = roots.rho()(pr.first) - roots.rho()(pr.second);
    k *= rank_one_factor(Cplx(y, 0.0)).real();
  }
  return k;
}

// c(lambda) = prod_{alpha > 0} gamma1(<lambda, alpha^vee>) / c_normalizer.
inline CFunctionValue c_function(const RootDatum& roots, const SpectralParameter& l) {
  CFunctionValue out;
  Cplx prod = 1.0;
  for (const auto& pr : roots.positive_roots()) {
    const Cplx y = RootDatum::pair_coroot(l, pr);
    if (rank_one_pole(y)) {
      out.pole_flag = true;
      return out;
    }
    prod *= rank_one_factor(y);
  }
  out.value = prod / c_normalizer(roots);
  out.pole_flag = false;
  return out;
}

// Spherical Plancherel density on the tempered axis: for lambda = i nu,
// beta(nu) = |c(i nu)|^{-2} = c_normalizer^2 prod_{alpha>0} pi u/2 tanh(pi u/2)
// with u = <nu, alpha^vee>.  Computed directly in real arithmetic; vanishes
// to second order on chamber walls and is Weyl invariant.
inline double plancherel_density(const RootDatum& roots, const Vec& nu) {
  if (nu.size() != roots.rho().size()) fail_arg("plancherel_density: dimension mismatch");
  const double k = c_normalizer(roots);
  double prod = k * k;
  for (const auto& pr : roots.positive_roots()) {
    const double u = nu(pr.first) - nu(pr.second);
    prod *= 0.5 * M_PI * u * std::tanh(0.5 * M_PI * u);
  }
  return prod;
}

}  // namespace ranklab
