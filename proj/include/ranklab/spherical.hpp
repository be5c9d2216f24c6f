#pragma once

// Elementary spherical functions phi_lambda on the symmetric space, their
// boundary-Levi counterparts, and the leading-term expansion along rays into
// the chamber interior.  phi_lambda(exp X) = int_K exp(<lambda + rho, H(k e^X)>) dk
// with H the upper-triangular Iwasawa radial part.  For d = 3 the K-integral
// reduces to a 3-axis tensor quadrature over Euler angles; for d >= 4 it is
// estimated by Monte Carlo over Haar-random rotations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "ranklab/c_function.hpp"
#include "ranklab/cone_geometry.hpp"
#include "ranklab/haar_sampling.hpp"
#include "ranklab/matrix_group.hpp"
#include "ranklab/quadrature.hpp"
#include "ranklab/rng.hpp"
#include "ranklab/root_datum.hpp"

namespace ranklab {

enum class EvalMethod { tensor_quadrature, monte_carlo };

struct SphericalEval {
  Cplx value{0.0, 0.0};
  double abs_error = 0.0;
  EvalMethod method = EvalMethod::tensor_quadrature;
};

namespace detail {

// Gauss hypergeometric series, reliable for |w| <= 0.45.
inline Cplx hyp2f1_small(Cplx a, Cplx b, Cplx c, double w) {
  Cplx term = 1.0, acc = 1.0;
  for (int k = 0; k < 256; ++k) {
    const double kk = k;
    term *= (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * w;
    acc += term;
    if (std::abs(term) <= 1e-17 * std::abs(acc)) return acc;
  }
  return acc;
}

// Circle mean  (1/pi) int_0^pi (M + R cos s)^{p/2} ds  =
// (M^2 - R^2)^{p/4} P_{p/2}(M / sqrt(M^2 - R^2)),  the Legendre function of
// complex degree.  Three regimes: a periodic trapezoid for mild R/M, the
// large-argument hypergeometric connection formula when R/M -> 1 (the layered
// regime), and a graded log quadrature when p sits at an odd integer where the
// two connection exponents collide.
struct CircleMean {
  Cplx p, nu;
  Cplx c1, c2;  // Gamma(nu+1/2)/(sqrt(pi) Gamma(nu+1)) and its nu -> -nu-1 mirror
  bool series_ok = false;

  explicit CircleMean(Cplx p_) : p(p_), nu(0.5 * p_) {
    // distance from p to the nearest odd integer, where the series degenerates
    const double base = 2.0 * std::round(0.5 * (p.real() - 1.0)) + 1.0;
    const double gap = std::hypot(p.real() - base, p.imag());
    series_ok = gap > 0.05;
    if (series_ok) {
      c1 = std::exp(log_gamma(nu + 0.5) - log_gamma(nu + 1.0)) / std::sqrt(M_PI);
      c2 = std::exp(log_gamma(-nu - 0.5) - log_gamma(-nu)) / std::sqrt(M_PI);
    }
  }

  // det = M^2 - R^2 computed stably by the caller.
  Cplx eval(double m, double r, double det) const {
    const double ratio = r / m;
    if (ratio < 0.76) {
      // periodic trapezoid: nearest integrand singularity gives error
      // ~ exp(-n arccosh(1/ratio)), so n adapts to the ratio (38 e-foldings)
      const double rho = std::acosh(1.0 / std::max(ratio, 1e-12));
      const int n = std::min(64, std::max(12, static_cast<int>(std::ceil(38.0 / rho))));
      Cplx acc = 0.0;
      for (int j = 0; j < n; ++j) {
        const double ker = m + r * std::cos(2 * M_PI * j / n);
        acc += std::exp(0.5 * p * std::log(ker));
      }
      return acc / static_cast<double>(n);
    }
    if (series_ok) {
      const double z = m / std::sqrt(det);
      const double w = det / (m * m);  // 1/z^2
      const Cplx f1 = hyp2f1_small(-0.5 * nu, 0.5 * (1.0 - nu), 0.5 - nu, w);
      const Cplx f2 = hyp2f1_small(0.5 * (nu + 1.0), 0.5 * nu + 1.0, nu + 1.5, w);
      const Cplx lp = std::log(2.0 * z);
      const Cplx pleg = c1 * std::exp(nu * lp) * f1 + c2 * std::exp(-(nu + 1.0) * lp) * f2;
      return std::exp(0.25 * p * std::log(det)) * pleg;
    }
    return hard(m, r, det);
  }

  // Graded quadrature for the degenerate-exponent case: substitute
  // s -> pi - s, so the kernel is D + 2R sin^2(s/2) with D = M - R << R,
  // then resolve the s ~ sqrt(D/R) layer on a log grid.
  Cplx hard(double m, double r, double det) const {
    const double dd = det / (m + r);  // M - R without cancellation
    const double s0 = 0.5;
    const Rule1D& g48 = gauss_legendre(48);
    const Rule1D& g96 = gauss_legendre(96);
    Cplx acc = 0.0;
    for (int j = 0; j < 48; ++j) {  // smooth part s in [s0, pi]
      const double s = s0 + 0.5 * (M_PI - s0) * (1.0 + g48.nodes[j]);
      const double si = std::sin(0.5 * s);
      acc += 0.5 * (M_PI - s0) * g48.weights[j] *
             std::exp(0.5 * p * std::log(dd + 2.0 * r * si * si));
    }
    const double smin = 1e-9 * std::sqrt(dd / r);
    const double ya = std::log(smin), yb = std::log(s0);
    for (int j = 0; j < 96; ++j) {  // layer, s = e^y
      const double y = ya + 0.5 * (yb - ya) * (1.0 + g96.nodes[j]);
      const double s = std::exp(y);
      const double si = std::sin(0.5 * s);
      acc += 0.5 * (yb - ya) * g96.weights[j] * s *
             std::exp(0.5 * p * std::log(dd + 2.0 * r * si * si));
    }
    acc += smin * std::exp(0.5 * p * std::log(dd));  // [0, smin] tail
    return acc / M_PI;
  }
};

// One resolution level of the d = 3 reduced K-quadrature.  Writing k in Euler
// angles and using row2 x row3 = row1, the integrand depends on k only via
// A = |row3(k) e^X| and B = |row1(k) e^-X|:
//   phi = E_k[ A^q B^p ],  p = (l2 - l1) - 1,  q = (l3 - l2) - 1.
// The mean of B^p over the inner Euler circle is the Legendre circle mean of
// the e^{-2X} form restricted to the plane normal to u = row3, leaving a 2-D
// integral over u in spherical angles (beta, delta).  Its sharp layers sit on
// the coordinate great circles, i.e. at beta in {0, pi/2} and delta in
// {0, pi/2} after folding by the dihedral symmetry group of the diagonal
// forms (which also folds beta about pi/2: the crossing form P'FQ' flips sign
// but enters only squared), so Gauss-Legendre endpoint clustering on both
// axes resolves them with O(e^{t/2}) nodes.
inline Cplx phi3_level(const CircleMean& cm, Cplx q, const double* ex, const double* exm,
                       int nb, int nd) {
  const Rule1D& rb = gauss_legendre(nb);
  const Rule1D& rd = gauss_legendre(nd);
  const double e2[3] = {ex[0] * ex[0], ex[1] * ex[1], ex[2] * ex[2]};
  const double f2[3] = {exm[0] * exm[0], exm[1] * exm[1], exm[2] * exm[2]};
  Cplx total = 0.0;
  double wtot = 0.0;
  for (int ib = 0; ib < nb; ++ib) {
    const double be = 0.25 * M_PI * (1.0 + rb.nodes[ib]);
    const double cb = std::cos(be), sb = std::sin(be);
    const double wb = rb.weights[ib] * sb;
    wtot += wb;
    Cplx acc_d = 0.0;
    for (int id = 0; id < nd; ++id) {
      const double de = 0.25 * M_PI * (1.0 + rd.nodes[id]);  // folded to [0, pi/2]
      const double cd = std::cos(de), sd = std::sin(de);
      // u = row3 of Ry(beta)Rz(delta); A^2 = sum u_i^2 e^{2 x_i}
      const double u0 = -sb * cd, u1 = sb * sd, u2 = cb;
      const double asq = u0 * u0 * e2[0] + u1 * u1 * e2[1] + u2 * u2 * e2[2];
      // orthonormal basis (P, Q) of the plane normal to u
      const double P0 = cb * cd, P1 = -cb * sd, P2 = sb;
      const double Q0 = sd, Q1 = cd;
      const double pp = P0 * P0 * f2[0] + P1 * P1 * f2[1] + P2 * P2 * f2[2];
      const double qq = Q0 * Q0 * f2[0] + Q1 * Q1 * f2[1];
      const double pq = P0 * Q0 * f2[0] + P1 * Q1 * f2[1];
      const double mm = 0.5 * (pp + qq);
      const double det = pp * qq - pq * pq;
      const double rr = std::sqrt(std::max(0.0, mm * mm - det));
      acc_d += rd.weights[id] * std::exp(0.5 * q * std::log(asq)) * cm.eval(mm, rr, det);
    }
    total += wb * acc_d;
  }
  const double wdtot = 2.0;  // GL weights on [-1, 1] sum to 2
  return total / (wtot * wdtot);
}

}  // namespace detail

// d = 3 tensor-quadrature spherical function with Cauchy-doubling error
// control; tol is treated relative to max(1, |phi|).
inline SphericalEval spherical_phi3(const SpectralParameter& l, const Vec& x,
                                    double tol = 1e-8) {
  if (l.dim() != 3 || x.size() != 3) fail_arg("spherical_phi3: expected dimension 3");
  ChamberVector guard(x);  // validates the zero-sum constraint
  SphericalEval out;
  out.method = EvalMethod::tensor_quadrature;
  const double linf = guard.linf();
  if (linf < 1e-14) {
    out.value = 1.0;
    return out;
  }
  const Cplx p = Cplx(l.re(1) - l.re(0), l.im(1) - l.im(0)) - 1.0;
  const Cplx q = Cplx(l.re(2) - l.re(1), l.im(2) - l.im(1)) - 1.0;
  const detail::CircleMean cm(p);
  const double ex[3] = {std::exp(x(0)), std::exp(x(1)), std::exp(x(2))};
  const double exm[3] = {1.0 / ex[0], 1.0 / ex[1], 1.0 / ex[2]};
  const double need = 12.0 + 8.0 * std::exp(0.5 * linf);
  int lev = 0;
  while ((12 << lev) < need && lev < 7) ++lev;
  auto eval = [&](int lv) {
    return detail::phi3_level(cm, q, ex, exm, 8 << lv, 12 << lv);
  };
  Cplx prev = eval(lev);
  for (int lv = lev + 1; lv <= 9; ++lv) {
    const Cplx cur = eval(lv);
    const double diff = std::abs(cur - prev);
    if (diff <= tol * std::max(1.0, std::abs(cur))) {
      out.value = cur;
      out.abs_error = diff;
      return out;
    }
    prev = cur;
  }
  fail_numeric("spherical_phi3: quadrature cap reached before convergence");
}

// Monte Carlo spherical function for any supported d: Haar rotations combined
// with the fast Iwasawa radial part; the error bar is three standard errors
// across 16 independent batches.
inline SphericalEval spherical_phi_mc(const SpectralParameter& l, const Vec& x,
                                      int n = 200000, std::uint64_t seed = 20240901) {
  const int d = static_cast<int>(x.size());
  if (l.dim() != d) fail_arg("spherical_phi_mc: dimension mismatch");
  RootDatum roots(d);
  ChamberVector guard(x);
  SphericalEval out;
  out.method = EvalMethod::monte_carlo;
  if (guard.linf() < 1e-14) {
    out.value = 1.0;
    return out;
  }
  if (n < 1600) fail_arg("spherical_phi_mc: need at least 1600 samples");
  const Vec expo_re = l.re + roots.rho();
  const Vec& expo_im = l.im;
  const Vec exd = x.array().exp();
  auto gen = stream(seed, 2);
  const int kBatches = 16, per = n / kBatches;
  std::vector<Cplx> means(kBatches);
  for (int b = 0; b < kBatches; ++b) {
    Cplx acc = 0.0;
    for (int i = 0; i < per; ++i) {
      const Mat k = haar_so(d, gen);
      const Vec h0 = iwasawa_h0_fast(k * exd.asDiagonal());
      acc += std::exp(Cplx(expo_re.dot(h0), expo_im.dot(h0)));
    }
    means[b] = acc / static_cast<double>(per);
  }
  Cplx mean = 0.0;
  for (const Cplx& m : means) mean += m;
  mean /= static_cast<double>(kBatches);
  double var = 0.0;
  for (const Cplx& m : means) var += std::norm(m - mean);
  var /= (kBatches - 1.0);
  out.value = mean;
  out.abs_error = 3.0 * std::sqrt(var / kBatches);
  return out;
}

// Dispatch: exact-tolerance tensor path at d = 3, Monte Carlo otherwise.
inline SphericalEval spherical_phi(const SpectralParameter& l, const Vec& x,
                                   double tol = 1e-8) {
  if (x.size() == 3) return spherical_phi3(l, x, tol);
  return spherical_phi_mc(l, x);
}

// f_lambda(X) = e^{<rho, X>} phi_lambda(exp X), the normalized kernel whose
// chamber-interior expansion the main term captures.
inline SphericalEval f_lambda(const SpectralParameter& l, const Vec& x,
                              double tol = 1e-8) {
  const int d = static_cast<int>(x.size());
  RootDatum roots(d);
  SphericalEval e = spherical_phi(l, x, tol);
  const double s = std::exp(roots.rho().dot(x));
  e.value *= s;
  e.abs_error *= s;
  return e;
}

// --- boundary Levi data -----------------------------------------------------

// The Levi subgroup attached to the distinguished ray direction X0: its blocks
// are the maximal runs of equal X0 coordinates, so the Levi simple roots are
// exactly those vanishing on X0.
struct LeviData {
  int d = 0;
  std::vector<std::pair<int, int>> blocks;  // [first, last) index ranges
  std::vector<int> delta_m;                 // simple-root indices inside the Levi
  Mat proj_center;                          // orthogonal projector onto the central split part
  Mat proj_anti;                            // complement: the semisimple directions
  Vec rho_m;                                // half-sum of Levi positive roots
};

inline LeviData levi_data(int d) {
  ConeDatum cd(d);
  const Vec x0 = cd.x0();
  LeviData out;
  out.d = d;
  int start = 0;
  for (int i = 1; i <= d; ++i) {
    if (i == d || std::abs(x0(i) - x0(start)) > 1e-12) {
      out.blocks.emplace_back(start, i);
      start = i;
    }
  }
  for (int i = 0; i + 1 < d; ++i)
    if (std::abs(x0(i) - x0(i + 1)) < 1e-12) out.delta_m.push_back(i);
  out.proj_center = Mat::Zero(d, d);
  out.rho_m = Vec::Zero(d);
  for (const auto& blk : out.blocks) {
    const int a = blk.first, n = blk.second - blk.first;
    for (int i = a; i < a + n; ++i) {
      out.rho_m(i) = 0.5 * (n - 1) - (i - a);
      for (int j = a; j < a + n; ++j) out.proj_center(i, j) = 1.0 / n;
    }
  }
  out.proj_anti = Mat::Identity(d, d) - out.proj_center;
  return out;
}

// Minimal-length coset representatives for W^M \ W: one permutation per way of
// distributing source indices into the blocks, ascending within each block.
inline std::vector<WeylElement> levi_cosets(const RootDatum& roots, const LeviData& levi) {
  const int d = levi.d;
  std::map<std::vector<int>, const WeylElement*> canon;
  for (const WeylElement& w : roots.weyl()) {
    std::vector<int> key(d);
    for (const auto& blk : levi.blocks) {
      std::vector<int> pre;
      for (int i = 0; i < d; ++i)
        if (w.perm[i] >= blk.first && w.perm[i] < blk.second) pre.push_back(i);
      std::sort(pre.begin(), pre.end());
      for (int k = 0; k < static_cast<int>(pre.size()); ++k)
        key[pre[k]] = blk.first + k;
    }
    canon.emplace(std::move(key), &w);
  }
  std::vector<WeylElement> reps;
  reps.reserve(canon.size());
  for (const auto& kv : canon) {
    for (const WeylElement& w : roots.weyl()) {
      if (std::equal(kv.first.begin(), kv.first.end(), w.perm.begin())) {
        reps.push_back(w);
        break;
      }
    }
  }
  return reps;
}

// c(lambda) / c^M(lambda): the Gindikin-Karpelevich product restricted to the
// positive roots crossing distinct blocks, carrying the same normalization as
// c_function so the ratio equals 1 at lambda = rho.
inline CFunctionValue c_levi_ratio(const RootDatum& roots, const LeviData& levi,
                                   const SpectralParameter& l) {
  std::vector<int> block_of(levi.d);
  for (int b = 0; b < static_cast<int>(levi.blocks.size()); ++b)
    for (int i = levi.blocks[b].first; i < levi.blocks[b].second; ++i) block_of[i] = b;
  CFunctionValue out;
  Cplx prod = 1.0;
  double km = 1.0;
  for (const auto& pr : roots.positive_roots()) {
    if (block_of[pr.first] == block_of[pr.second]) {
      km *= rank_one_factor(Cplx(levi.rho_m(pr.first) - levi.rho_m(pr.second), 0.0)).real();
      continue;
    }
    const Cplx y = RootDatum::pair_coroot(l, pr);
    if (rank_one_pole(y)) {
      out.pole_flag = true;
      return out;
    }
    prod *= rank_one_factor(y);
  }
  out.value = prod * km / c_normalizer(roots);
  out.pole_flag = false;
  return out;
}

// Rank-one spherical function phi_m(h) = (1/2pi) int (sin^2 e^{2h} +
// cos^2 e^{-2h})^{-(m + 1/2)} dtheta, even in m, exactly 1 at h = 0.  Equals
// the Legendre function P_{m - 1/2}(cosh 2h).
inline SphericalEval sl2_spherical(Cplx m, double h, double tol = 1e-12) {
  if (h == 0.0) {
    SphericalEval unit;
    unit.method = EvalMethod::tensor_quadrature;
    unit.value = 1.0;
    return unit;
  }
  const Cplx s = -(m + 0.5);
  const double e2 = std::exp(2.0 * h), em2 = std::exp(-2.0 * h);
  auto level = [&](int n) {
    Cplx acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double th = 2 * M_PI * j / n;
      const double c = std::cos(th), sn = std::sin(th);
      acc += std::exp(s * std::log(sn * sn * e2 + c * c * em2));
    }
    return acc / static_cast<double>(n);
  };
  SphericalEval out;
  out.method = EvalMethod::tensor_quadrature;
  Cplx prev = level(64);
  for (int n = 128; n <= (1 << 22); n *= 2) {
    const Cplx cur = level(n);
    const double diff = std::abs(cur - prev);
    if (diff <= tol * std::max(1.0, std::abs(cur))) {
      out.value = cur;
      out.abs_error = diff;
      return out;
    }
    prev = cur;
  }
  fail_numeric("sl2_spherical: quadrature cap reached before convergence");
}

// Boundary kernel f^M_lambda(Y) = e^{<rho^M, Y>} phi^M_lambda(exp Y): the Levi
// spherical function splits into the central exponential times one rank-one
// factor per 2-block.  Blocks of size >= 3 are outside the supported range.
inline SphericalEval f_levi(const RootDatum& roots, const LeviData& levi,
                            const SpectralParameter& l, const Vec& y,
                            double tol = 1e-12) {
  if (static_cast<int>(y.size()) != levi.d || l.dim() != levi.d)
    fail_arg("f_levi: dimension mismatch");
  ChamberVector guard(y);
  SphericalEval out;
  out.method = EvalMethod::tensor_quadrature;
  const Vec yc = levi.proj_center * y;
  const Cplx central = l.pair(yc);
  Cplx value = std::exp(Cplx(levi.rho_m.dot(y) + central.real(), central.imag()));
  double rel_err = 0.0;
  for (const auto& blk : levi.blocks) {
    const int n = blk.second - blk.first;
    if (n == 1) continue;
    if (n > 2) fail_arg("f_levi: unsupported dimension (Levi block larger than 2)");
    const int a = blk.first;
    const Cplx m = 0.5 * Cplx(l.re(a) - l.re(a + 1), l.im(a) - l.im(a + 1));
    const double h = 0.5 * (y(a) - y(a + 1));
    const SphericalEval f = sl2_spherical(m, h, tol);
    value *= f.value;
    rel_err += f.abs_error / std::max(1e-300, std::abs(f.value));
  }
  out.value = value;
  out.abs_error = std::abs(value) * rel_err;
  return out;
}

// Leading-term expansion Phi_lambda(Y) = sum over W^M \ W of
// (c/c^M)(w lambda) f^M_{w lambda}(Y); for d = 3 this is the full flat
// expansion sum_w c(w lambda) e^{<w lambda, Y>}.
inline SphericalEval main_term_phi(const RootDatum& roots, const LeviData& levi,
                                   const SpectralParameter& l, const Vec& y,
                                   double tol = 1e-12) {
  if (roots.regularity(l) <= 1e-9)
    fail_arg("main_term_phi: invalid spectral parameter (irregular lambda)");
  SphericalEval out;
  out.method = EvalMethod::tensor_quadrature;
  Cplx acc = 0.0;
  double err = 0.0;
  for (const WeylElement& w : levi_cosets(roots, levi)) {
    const SpectralParameter lw = w.apply(l);
    const CFunctionValue ratio = c_levi_ratio(roots, levi, lw);
    if (ratio.pole_flag)
      fail_arg("main_term_phi: invalid spectral parameter (c-function pole)");
    const SphericalEval f = f_levi(roots, levi, lw, y, tol);
    acc += ratio.value * f.value;
    err += std::abs(ratio.value) * f.abs_error;
  }
  out.value = acc;
  out.abs_error = err;
  return out;
}

// --- expansion error scan ---------------------------------------------------

struct ExpansionScan {
  std::vector<double> ts;
  std::vector<double> residuals;  // |f_lambda(Y + tX0) - Phi_lambda(Y + tX0)|
  double fitted_rate = 0.0;       // least-squares slope of log residual vs t
  double target_rate = 0.0;       // -2 min_{alpha notin Delta_M} alpha(X0)
  bool conclusive = false;        // quadrature error stayed well below residual
};

// Measures the decay of the remainder f_lambda - Phi_lambda along Y + t X0.
inline ExpansionScan expansion_error_scan(const RootDatum& roots, const LeviData& levi,
                                          const SpectralParameter& l, const Vec& y,
                                          const std::vector<double>& ts) {
  if (ts.size() < 2) fail_arg("expansion_error_scan: need at least two ray points");
  ConeDatum cd(levi.d);
  const Vec x0 = cd.x0();
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < levi.d; ++i) {
    const double a = x0(i) - x0(i + 1);
    if (a > 1e-12) gap = std::min(gap, a);
  }
  ExpansionScan out;
  out.ts = ts;
  out.target_rate = -2.0 * gap;
  out.conclusive = true;
  for (double t : ts) {
    const Vec h = y + t * x0;
    const double scale = std::exp(roots.rho().dot(h));
    // aim the quadrature error an order of magnitude below the expected residual
    const double tol =
        std::clamp(0.05 * std::exp(out.target_rate * t) / scale, 5e-11, 1e-6);
    const SphericalEval f = f_lambda(l, h, tol);
    const SphericalEval mt = main_term_phi(roots, levi, l, h);
    const double res = std::abs(f.value - mt.value);
    out.residuals.push_back(res);
    if (4.0 * (f.abs_error + mt.abs_error) > res) out.conclusive = false;
  }
  // least-squares slope of log residual against t
  const int n = static_cast<int>(ts.size());
  double st = 0, sl = 0, stt = 0, stl = 0;
  for (int i = 0; i < n; ++i) {
    const double li = std::log(std::max(1e-300, out.residuals[i]));
    st += ts[i];
    sl += li;
    stt += ts[i] * ts[i];
    stl += ts[i] * li;
  }
  out.fitted_rate = (n * stl - st * sl) / (n * stt - st * st);
  return out;
}

}  // namespace ranklab
