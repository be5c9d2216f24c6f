#pragma once

// Averaging-window transform h_t(lambda) = m(E_t)^{-1/2} int_{E_t} phi_lambda,
// its cone-exponential main term I(t, lambda), rationality of the phase
// spectrum, and the time-average / replacement diagnostics that compare the
// two along tau -> infinity.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "ranklab/c_function.hpp"
#include "ranklab/cone_geometry.hpp"
#include "ranklab/quadrature.hpp"
#include "ranklab/rng.hpp"
#include "ranklab/root_datum.hpp"
#include "ranklab/spherical.hpp"

namespace ranklab {

struct PropagatorValue {
  double t = 0.0;
  SpectralParameter lambda;
  Cplx value{0.0, 0.0};
  double abs_error = 0.0;
};

// Radial-grid evaluator for h_t(lambda) at d = 3.  phi_lambda J is cached on
// the chamber part of the box [0, t_max]^2 in cone coordinates (step 1/64),
// so every t on the grid reuses the same spherical-function evaluations; the
// mass m(E_t) comes from the independent polytope quadrature.
class HtEvaluator {
 public:
  static constexpr int kPerUnit = 64;

  HtEvaluator(SpectralParameter l, double t_max, double phi_tol = 1e-4)
      : l_(std::move(l)), cd_(3), roots_(3), phi_tol_(phi_tol) {
    if (l_.dim() != 3) fail_arg("h_transform: only d = 3 is supported");
    if (!(t_max > 0.0) || t_max > 4.0 + 1e-9)
      fail_arg("h_transform: t must lie in (0, 4]");
    if (l_.norm2() > 5.0 + 1e-9)
      fail_arg("h_transform: |lambda| <= 5 required");
    n_ = static_cast<int>(std::lround(t_max * kPerUnit));
    if (std::abs(t_max * kPerUnit - n_) > 1e-6)
      fail_arg("h_transform: t_max must be a multiple of 1/64");
    const double step = 1.0 / kPerUnit;
    const int m = n_ + 1;
    cells_.assign(static_cast<std::size_t>(m) * m, Cplx(0.0, 0.0));
    jcells_.assign(static_cast<std::size_t>(m) * m, 0.0);
    const Mat& beta = cd_.beta();
    const double gram = cd_.gram_sqrt();
    parallel_chunks(m, [&](int i) {
      for (int j = 0; j < m; ++j) {
        const Vec x = beta.col(0) * (i * step) + beta.col(1) * (j * step);
        if (!cd_.in_chamber(x, 1e-12)) continue;
        const double jac = roots_.jacobian(x) * gram;
        if (jac <= 0.0) continue;
        const SphericalEval phi = spherical_phi3(l_, x, phi_tol_);
        cells_[static_cast<std::size_t>(i) * m + j] = phi.value * jac;
        jcells_[static_cast<std::size_t>(i) * m + j] = jac;
      }
    });
  }

  double t_max() const { return n_ / static_cast<double>(kPerUnit); }
  const SpectralParameter& lambda() const { return l_; }

  // m(E_t) by the adaptive polytope quadrature, cached per grid index.
  double mass(double t) const {
    const int k = grid_index(t);
    if (k == 0) return 0.0;
    auto it = mass_.find(k);
    if (it != mass_.end()) return it->second;
    const double v = cd_.volume_quadrature(k / static_cast<double>(kPerUnit)).value;
    mass_.emplace(k, v);
    return v;
  }

  PropagatorValue at(double t) const {
    const int k = grid_index(t);
    PropagatorValue out;
    out.t = k / static_cast<double>(kPerUnit);
    out.lambda = l_;
    if (k == 0) return out;  // h_0 = 0 by convention
    const double sqm = std::sqrt(mass(t));
    const double step2 = 1.0 / (kPerUnit * static_cast<double>(kPerUnit));
    out.value = trap_sum(k, 1) * step2 / sqm;
    out.abs_error = phi_tol_ * jsum(k) * step2 / sqm;
    if (k % 2 == 0) {  // trapezoid discretization by step doubling
      const Cplx coarse = trap_sum(k, 2) * (4.0 * step2);
      out.abs_error += std::abs(out.value - coarse / sqm) / 3.0;
    }
    return out;
  }

 private:
  int grid_index(double t) const {
    const int k = static_cast<int>(std::lround(t * kPerUnit));
    if (std::abs(t * kPerUnit - k) > 1e-6)
      fail_arg("h_transform: t must be a multiple of 1/64");
    if (k < 0 || k > n_) fail_arg("h_transform: t outside the cached range");
    return k;
  }

  Cplx trap_sum(int k, int stride) const {
    const int m = n_ + 1;
    Cplx acc = 0.0;
    for (int i = 0; i <= k; i += stride) {
      const double wi = (i == 0 || i == k) ? 0.5 : 1.0;
      Cplx row = 0.0;
      for (int j = 0; j <= k; j += stride) {
        const double wj = (j == 0 || j == k) ? 0.5 : 1.0;
        row += wj * cells_[static_cast<std::size_t>(i) * m + j];
      }
      acc += wi * row;
    }
    return acc;
  }

  double jsum(int k) const {
    const int m = n_ + 1;
    double acc = 0.0;
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j)
        acc += jcells_[static_cast<std::size_t>(i) * m + j];
    return acc;
  }

  SpectralParameter l_;
  ConeDatum cd_;
  RootDatum roots_;
  double phi_tol_;
  int n_ = 0;
  std::vector<Cplx> cells_;
  std::vector<double> jcells_;
  mutable std::map<int, double> mass_;
};

// --- cone exponential transform ----------------------------------------------

struct ConeTransform {
  Cplx value{0.0, 0.0};
  bool convergent = false;
};

// J(lambda) = int_{-C+} e^{<lambda + rho, Y>} dY over the negative cone
// spanned by the beta basis: in those coordinates the integral factors, giving
// sqrt(det Gram(beta)) / prod_i <lambda + rho, beta_i>.  Divergent unless
// every pairing has positive real part.
inline ConeTransform j_cone(const ConeDatum& cd, const RootDatum& roots,
                            const SpectralParameter& l) {
  if (l.dim() != cd.d()) fail_arg("j_cone: dimension mismatch");
  const Mat& beta = cd.beta();
  const Vec re = l.re + roots.rho();
  ConeTransform out;
  Cplx denom = 1.0;
  out.convergent = true;
  for (int i = 0; i < beta.cols(); ++i) {
    const Cplx z(re.dot(beta.col(i)), l.im.dot(beta.col(i)));
    if (z.real() <= 1e-12) out.convergent = false;
    denom *= z;
  }
  if (out.convergent) out.value = cd.gram_sqrt() / denom;
  return out;
}

// Truncated numeric counterpart of j_cone: per-axis Gauss-Legendre refinement
// of int_{-L}^0 e^{z s} ds without using the antiderivative; the separable
// product cross-checks the closed form.
inline Cplx j_cone_quadrature(const ConeDatum& cd, const RootDatum& roots,
                              const SpectralParameter& l, double trunc = 30.0,
                              double tol = 1e-10) {
  if (l.dim() != cd.d()) fail_arg("j_cone_quadrature: dimension mismatch");
  const Mat& beta = cd.beta();
  const Vec re = l.re + roots.rho();
  Cplx prod = cd.gram_sqrt();
  for (int i = 0; i < beta.cols(); ++i) {
    const Cplx z(re.dot(beta.col(i)), l.im.dot(beta.col(i)));
    if (z.real() <= 1e-12)
      fail_numeric("j_cone_quadrature: divergent pairing on a cone generator");
    auto axis = [&](int n) {
      const Rule1D& g = gauss_legendre(n);
      Cplx acc = 0.0;
      for (int k = 0; k < n; ++k) {
        const double s = -0.5 * trunc * (1.0 - g.nodes[k]);
        acc += 0.5 * trunc * g.weights[k] * std::exp(z * s);
      }
      return acc;
    };
    Cplx prev = axis(32);
    bool done = false;
    for (int n = 64; n <= 4096; n *= 2) {
      const Cplx cur = axis(n);
      if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) {
        prev = cur;
        done = true;
        break;
      }
      prev = cur;
    }
    if (!done) fail_numeric("j_cone_quadrature: axis quadrature did not converge");
    prod *= prev;
  }
  return prod;
}

// --- cone main term I(t, lambda) ---------------------------------------------

// Phase/amplitude data of I(t, lambda) = sum over W^M \ W of
// (c/c^M)(w lambda) J(w lambda) e^{t <w lambda, X0>}.
struct MainTermSpectrum {
  SpectralParameter lambda;
  std::vector<Cplx> amplitudes;
  std::vector<Cplx> exponents;  // <w lambda, X0>
  bool generic = false;         // exponents pairwise distinct
};

inline MainTermSpectrum main_term_spectrum(const ConeDatum& cd, const RootDatum& roots,
                                           const LeviData& levi, const SpectralParameter& l) {
  if (l.dim() != cd.d()) fail_arg("main_term_spectrum: dimension mismatch");
  if (roots.regularity(l) <= 1e-9)
    fail_arg("main_term_spectrum: invalid spectral parameter (irregular lambda)");
  MainTermSpectrum out;
  out.lambda = l;
  const Vec x0 = cd.x0();
  for (const WeylElement& w : levi_cosets(roots, levi)) {
    const SpectralParameter lw = w.apply(l);
    const CFunctionValue ratio = c_levi_ratio(roots, levi, lw);
    if (ratio.pole_flag)
      fail_arg("main_term_spectrum: invalid spectral parameter (c-function pole)");
    const ConeTransform j = j_cone(cd, roots, lw);
    if (!j.convergent)
      fail_numeric("main_term_spectrum: divergent cone transform in the coset sum");
    out.amplitudes.push_back(ratio.value * j.value);
    out.exponents.push_back(lw.pair(x0));
  }
  out.generic = true;
  for (std::size_t a = 0; a < out.exponents.size() && out.generic; ++a)
    for (std::size_t b = a + 1; b < out.exponents.size(); ++b)
      if (std::abs(out.exponents[a] - out.exponents[b]) <= 1e-9) {
        out.generic = false;
        break;
      }
  return out;
}

inline Cplx i_of_t(const MainTermSpectrum& sp, double t) {
  Cplx acc = 0.0;
  for (std::size_t w = 0; w < sp.amplitudes.size(); ++w)
    acc += sp.amplitudes[w] * std::exp(t * sp.exponents[w]);
  return acc;
}

// --- rational phase spectra ---------------------------------------------------

struct RationalSpectral {
  SpectralParameter lambda;
  std::vector<double> phases;  // <w nu, X0> over the full Weyl group
  double tau1 = 0.0;           // least common period 2 pi / gcd(phases)
  bool is_rational = false;
};

namespace detail {

// Continued-fraction rationalization with bounded denominator.  Acceptance is
// machine-tight: a double that encodes p/q with q <= 10^6 sits within a few
// ulp of it, while the convergents of an irrational keep error ~ 1/q^2, so a
// loose tolerance would rationalize every real below the denominator cap.
inline bool rationalize(double x, long long& num, long long& den,
                        long long max_den = 1000000, double tol = 5e-14) {
  long long p0 = 1, q0 = 0, p1 = static_cast<long long>(std::floor(x)), q1 = 1;
  double frac = x - std::floor(x);
  for (int it = 0; it < 64; ++it) {
    if (std::abs(x - static_cast<double>(p1) / q1) <= tol * std::max(1.0, std::abs(x))) {
      num = p1;
      den = q1;
      return true;
    }
    if (frac < 1e-15) break;
    const double inv = 1.0 / frac;
    const long long a = static_cast<long long>(std::floor(inv));
    frac = inv - std::floor(inv);
    const long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return false;
}

}  // namespace detail

// Rationality of the phase family {<w nu, X0>} over the coset reps entering
// I(t, lambda), and the least common period tau1 of t -> I(t, i nu).
// Non-rational phases are an outcome, not an error.
inline RationalSpectral rational_spectrum(const ConeDatum& cd, const RootDatum& roots,
                                          const LeviData& levi, const SpectralParameter& l) {
  if (l.dim() != cd.d()) fail_arg("rational_spectrum: dimension mismatch");
  if (!l.is_tempered(1e-12))
    fail_arg("rational_spectrum: tempered lambda required");
  RationalSpectral out;
  out.lambda = l;
  const Vec x0 = cd.x0();
  for (const WeylElement& w : levi_cosets(roots, levi))
    out.phases.push_back(w.apply(l.im).dot(x0));
  std::vector<std::pair<long long, long long>> fracs;
  for (double p : out.phases) {
    if (std::abs(p) < 1e-12) continue;
    long long num = 0, den = 1;
    if (!detail::rationalize(std::abs(p), num, den)) return out;  // not rational
    fracs.emplace_back(num, den);
  }
  if (fracs.empty()) {
    out.is_rational = true;  // I is constant along the ray
    return out;
  }
  long long lcm = 1;
  for (const auto& f : fracs) {
    const long long g = std::gcd(lcm, f.second);
    if (lcm / g > 2000000000LL / f.second) return out;  // overflow guard
    lcm = lcm / g * f.second;
  }
  long long gnum = 0;
  for (const auto& f : fracs) gnum = std::gcd(gnum, f.first * (lcm / f.second));
  out.tau1 = 2.0 * M_PI * static_cast<double>(lcm) / static_cast<double>(gnum);
  for (double p : out.phases)
    if (std::abs(std::remainder(out.tau1 * p, 2.0 * M_PI)) >
        std::max(1e-9, 1e-12 * std::abs(out.tau1 * p)))
      fail_numeric("rational_spectrum: period does not close the phase lattice");
  out.is_rational = true;
  return out;
}

// --- replacement fit and time averages ----------------------------------------

struct ReplacementReport {
  std::vector<double> ts;
  std::vector<Cplx> h_values;
  std::vector<Cplx> i_values;
  double c_fit = 0.0;          // real least-squares scale between h and I
  std::vector<double> residuals;
  bool endpoint_decrease = false;
  bool median_decrease = false;
  bool conclusive = false;     // I not identically negligible
};

// Fits h_t ~ C I(t) on the given grid and reports the residual profile.
inline ReplacementReport replacement_check(const HtEvaluator& ht,
                                           const MainTermSpectrum& sp,
                                           const std::vector<double>& ts) {
  if (ts.size() < 4) fail_arg("replacement_check: need at least four grid points");
  ReplacementReport out;
  out.ts = ts;
  double num = 0.0, den = 0.0;
  for (double t : ts) {
    const Cplx h = ht.at(t).value;
    const Cplx i = i_of_t(sp, t);
    out.h_values.push_back(h);
    out.i_values.push_back(i);
    num += (h * std::conj(i)).real();
    den += std::norm(i);
  }
  out.conclusive = den > 1e-12 * static_cast<double>(ts.size());
  if (!out.conclusive) return out;
  out.c_fit = num / den;
  for (std::size_t k = 0; k < ts.size(); ++k)
    out.residuals.push_back(std::abs(out.h_values[k] - out.c_fit * out.i_values[k]));
  out.endpoint_decrease = out.residuals.front() > out.residuals.back();
  out.median_decrease = true;
  auto med3 = [&](std::size_t k) {
    double a = out.residuals[k - 1], b = out.residuals[k], c = out.residuals[k + 1];
    return std::max(std::min(a, b), std::min(std::max(a, b), c));
  };
  double prev = med3(1);
  for (std::size_t k = 2; k + 1 < ts.size(); ++k) {
    const double cur = med3(k);
    if (cur > prev * (1.0 + 1e-9)) out.median_decrease = false;
    prev = cur;
  }
  return out;
}

struct TimeAverageReport {
  double tau = 0.0;
  double average = 0.0;          // (1/tau) int_0^tau |.|^2
  double parseval_target = 0.0;  // c_fit^2 sum_w |amplitude_w|^2
  double relative_gap = 0.0;
};

namespace detail {

inline double parseval_sum(const MainTermSpectrum& sp, double c_fit) {
  double acc = 0.0;
  for (const Cplx& a : sp.amplitudes) acc += std::norm(a);
  return c_fit * c_fit * acc;
}

}  // namespace detail

// Direct time average of |h_t|^2 on the cached grid (tau within the cache).
inline TimeAverageReport time_average_direct(const HtEvaluator& ht,
                                             const MainTermSpectrum& sp, double c_fit,
                                             double tau) {
  const int k = static_cast<int>(std::lround(tau * HtEvaluator::kPerUnit));
  if (k < 2) fail_arg("time_average_direct: tau too small for the grid");
  TimeAverageReport out;
  out.tau = k / static_cast<double>(HtEvaluator::kPerUnit);
  double acc = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double w = (j == 0 || j == k) ? 0.5 : 1.0;
    acc += w * std::norm(ht.at(j / static_cast<double>(HtEvaluator::kPerUnit)).value);
  }
  out.average = acc / k;
  out.parseval_target = detail::parseval_sum(sp, c_fit);
  out.relative_gap = std::abs(out.average - out.parseval_target) /
                     std::max(1e-300, out.parseval_target);
  return out;
}

// Proxy time average of |c_fit I(t)|^2; tau is unrestricted, so this probes
// the tau -> infinity Parseval limit sum_w |c_fit amplitude_w|^2.
inline TimeAverageReport time_average_proxy(const MainTermSpectrum& sp, double c_fit,
                                            double tau) {
  const int k = static_cast<int>(std::lround(tau * HtEvaluator::kPerUnit));
  if (k < 2) fail_arg("time_average_proxy: tau too small for the grid");
  TimeAverageReport out;
  out.tau = k / static_cast<double>(HtEvaluator::kPerUnit);
  double acc = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double w = (j == 0 || j == k) ? 0.5 : 1.0;
    acc += w * std::norm(c_fit * i_of_t(sp, j / static_cast<double>(HtEvaluator::kPerUnit)));
  }
  out.average = acc / k;
  out.parseval_target = detail::parseval_sum(sp, c_fit);
  out.relative_gap = std::abs(out.average - out.parseval_target) /
                     std::max(1e-300, out.parseval_target);
  return out;
}

}  // namespace ranklab
