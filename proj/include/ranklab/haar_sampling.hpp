#pragma once

// Sampling on the group: Haar-distributed special orthogonal matrices, the
// rejection sampler for the radial law on truncated chambers, Monte-Carlo
// intersection ratios of translated averaging sets, and the support/entry
// bound scan for products of sampled elements.

#include "cone_geometry.hpp"
#include "matrix_group.hpp"
#include "rng.hpp"

namespace ranklab {

/// Haar measure on SO(d): orthogonalize a Gaussian matrix, fix the column
/// signs from the triangular factor, then flip one fixed column on the
/// reflection component.
inline Mat haar_so(int d, std::mt19937_64& g) {
  if (d < 2) fail_arg("haar_so: d >= 2 required");
  Mat z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = gaussian(g);
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  const Vec diag = qr.matrixQR().diagonal();
  for (int j = 0; j < d; ++j)
    if (diag(j) < 0.0) q.col(j) *= -1.0;
  if (q.determinant() < 0.0) q.col(d - 1) *= -1.0;
  return q;
}

struct SamplerStats {
  long proposals = 0;
  long accepted = 0;
  double efficiency() const { return proposals ? double(accepted) / proposals : 0.0; }
};

inline void starve_guard(const SamplerStats& st) {
  if (st.proposals >= 1000000 && double(st.accepted) < 1e-6 * double(st.proposals))
    fail_numeric("sample_radial: rejection efficiency below 1e-6 (proposals=" +
                 std::to_string(st.proposals) + ")");
}

/// Radial part X distributed with density proportional to the polar Jacobian
/// on the truncated chamber: per-coordinate truncated exponential envelope
/// exp(2 <rho, X>) on the face-coordinate box, rejected to the chamber and
/// thinned by prod (1 - exp(-2 alpha(X))).
inline Vec sample_radial(const ConeDatum& cd, double t, std::mt19937_64& g,
                         SamplerStats* stats = nullptr) {
  if (t <= 0.0) fail_arg("sample_radial: t > 0 required");
  if (t > 6.0) fail_arg("sample_radial: t > 6 refused (overflow-prone envelope)");
  const int n = cd.d() - 1;
  const Vec& r = cd.rho_coeffs();
  SamplerStats local;
  SamplerStats& st = stats ? *stats : local;
  while (true) {
    ++st.proposals;
    Vec c(n);
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * r(i);
      const double lo = std::exp(-a * t), hi = std::exp(a * t);
      c(i) = std::log(lo + uniform01(g) * (hi - lo)) / a;
    }
    Vec x = cd.beta() * c;
    if (!cd.in_chamber(x, 0.0)) {
      starve_guard(st);
      continue;
    }
    double thin = 1.0;
    for (const auto& a : cd.roots().positive_roots())
      thin *= 1.0 - std::exp(-2.0 * RootDatum::pair_coroot(x, a));
    if (uniform01(g) >= thin) {
      starve_guard(st);
      continue;
    }
    ++st.accepted;
    return x;
  }
}

/// Group element Haar-distributed on the radial ball E_t (k1 exp(X) k2 with
/// Haar-orthogonal factors and Jacobian-weighted radial part).
struct GroupSample {
  Mat g;
  Vec x;  // radial part used to assemble g
};

inline GroupSample sample_e_t(const ConeDatum& cd, double t, std::mt19937_64& gen,
                              SamplerStats* stats = nullptr) {
  GroupSample s;
  s.x = sample_radial(cd, t, gen, stats);
  const Mat k1 = haar_so(cd.d(), gen);
  const Mat k2 = haar_so(cd.d(), gen);
  s.g = assemble_cartan(k1, s.x, k2);
  return s;
}

struct IntersectionEstimate {
  double ratio = 0.0;
  double stderr_ = 0.0;
  long n = 0;
};

/// Monte-Carlo estimate of m(e^Y E_t cap E_t) / m(E_t): the fraction of E_t
/// samples g with |exp(-Y) g| <= t, with binomial standard error.
inline IntersectionEstimate intersection_ratio(const ConeDatum& cd, double t, const Vec& y,
                                               long n, std::uint64_t seed) {
  if (y.size() != cd.d()) fail_arg("intersection_ratio: Y has wrong dimension");
  ChamberVector cy(y);  // validates the zero sum
  if (!cy.in_chamber(1e-12)) fail_arg("intersection_ratio: Y must lie in the closed chamber");
  if (n < 1000) fail_arg("intersection_ratio: n >= 1000 required");
  auto gen = stream(seed, 0);
  const Mat shift = (-y.array()).exp().matrix().asDiagonal();
  long hits = 0;
  for (long k = 0; k < n; ++k) {
    const GroupSample s = sample_e_t(cd, t, gen);
    if (group_norm(shift * s.g) <= t) ++hits;
  }
  IntersectionEstimate out;
  out.n = n;
  out.ratio = double(hits) / double(n);
  out.stderr_ = std::sqrt(out.ratio * (1.0 - out.ratio) / double(n));
  return out;
}

struct SupportScan {
  double b_emp = -std::numeric_limits<double>::infinity();  // max |g x| - 2t
  double entry_ratio = 0.0;  // max over samples of max_ij |y_ij| / e^{|y|}
  double c_emp = std::numeric_limits<double>::infinity();   // min_i max_j |y_ij| e^{|y|}
  double mean_radial_linf = 0.0;  // mean sup norm of sampled radial parts
  long n = 0;
};

/// Samples n pairs (g, x) from E_t and scans the products y = g x for the
/// support bound |y| <= 2t, the entry upper bound max |y_ij| <= e^{|y|}, and
/// the entry lower bound min_i max_j |y_ij| >= c e^{-|y|}.
inline SupportScan support_bound_scan(const ConeDatum& cd, double t, long n,
                                      std::uint64_t seed) {
  if (n < 1000) fail_arg("support_bound_scan: n >= 1000 required");
  auto gen = stream(seed, 1);
  SupportScan out;
  out.n = n;
  double linf_sum = 0.0;
  for (long k = 0; k < n; ++k) {
    const GroupSample a = sample_e_t(cd, t, gen);
    const GroupSample b = sample_e_t(cd, t, gen);
    linf_sum += a.x.cwiseAbs().maxCoeff() + b.x.cwiseAbs().maxCoeff();
    const Mat y = a.g * b.g;
    const double norm = group_norm(y);
    out.b_emp = std::max(out.b_emp, norm - 2.0 * t);
    const double entry_max = y.cwiseAbs().maxCoeff();
    out.entry_ratio = std::max(out.entry_ratio, entry_max / std::exp(norm));
    double row_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < y.rows(); ++i)
      row_min = std::min(row_min, y.row(i).cwiseAbs().maxCoeff());
    out.c_emp = std::min(out.c_emp, row_min * std::exp(norm));
  }
  out.mean_radial_linf = linf_sum / double(2 * n);
  return out;
}

}  // namespace ranklab
