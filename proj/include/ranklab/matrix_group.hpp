#pragma once

// Matrix decompositions on SL_d(R): polar/radial (Cartan) factorization via
// singular values, the upper-triangular-times-orthogonal factorization with
// its diagonal logarithm H0, the radial norm, and the Frobenius comparison.

#include <Eigen/SVD>

#include "core.hpp"

namespace ranklab {

/// g = k1 * exp(diag x) * k2 with k1, k2 special orthogonal and x weakly
/// decreasing trace-zero.
struct CartanFactors {
  Mat k1;
  Vec x;
  Mat k2;

  Mat reconstruct() const { return k1 * x.array().exp().matrix().asDiagonal() * k2; }
};

/// g = n * exp(diag h0) * k with n unit upper triangular and k special
/// orthogonal.
struct IwasawaFactors {
  Mat n;
  Vec h0;
  Mat k;

  Mat reconstruct() const { return n * h0.array().exp().matrix().asDiagonal() * k; }
};

inline void require_square(const Mat& g, const char* who) {
  if (g.rows() != g.cols() || g.rows() < 2) fail_arg(std::string(who) + ": square matrix required");
}

inline CartanFactors cartan_decompose(const Mat& g) {
  require_square(g, "cartan");
  Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat u = svd.matrixU(), v = svd.matrixV();
  const int d = static_cast<int>(g.rows());
  if (svd.singularValues()(d - 1) <= 0.0) fail_arg("cartan: singular matrix");
  // det u = det v for positive-determinant input; repair both together so the
  // product is unchanged
  if (u.determinant() < 0.0) {
    if (v.determinant() > 0.0) fail_arg("cartan: determinant must be positive");
    u.col(d - 1) *= -1.0;
    v.col(d - 1) *= -1.0;
  } else if (v.determinant() < 0.0) {
    fail_arg("cartan: determinant must be positive");
  }
  CartanFactors f;
  f.k1 = u;
  f.x = svd.singularValues().array().log();
  f.x.array() -= f.x.mean();  // remove float drift off the trace-zero subspace
  f.k2 = v.transpose();
  return f;
}

/// Radial sup norm |g| = max(log sigma_1, -log sigma_d); needs only the
/// singular values.
inline double group_norm(const Mat& g) {
  require_square(g, "group_norm");
  Eigen::JacobiSVD<Mat> svd(g);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 0.0) fail_arg("group_norm: singular matrix");
  return std::max(std::log(s(0)), -std::log(s(s.size() - 1)));
}

/// log max(||g||_F, ||g^{-1}||_F); sandwiched between |g| and |g| + log sqrt(d).
inline double frobenius_log(const Mat& g) {
  require_square(g, "frobenius_log");
  return std::log(std::max(g.norm(), g.inverse().norm()));
}

/// Factor g = R * Q (R upper triangular, positive diagonal; Q special
/// orthogonal) through a QR of the row-reversed transpose, then read off
/// n = R / diag(R) and h0 = log diag(R).
inline IwasawaFactors iwasawa_decompose(const Mat& g) {
  require_square(g, "iwasawa");
  const int d = static_cast<int>(g.rows());
  Mat J = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) J(i, d - 1 - i) = 1.0;
  const Mat B = g.transpose() * J;
  Eigen::HouseholderQR<Mat> qr(B);
  Mat Q1 = qr.householderQ();
  Mat R1 = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (R1(j, j) == 0.0) fail_arg("iwasawa: singular matrix");
    if (R1(j, j) < 0.0) {
      R1.row(j) *= -1.0;
      Q1.col(j) *= -1.0;
    }
  }
  IwasawaFactors f;
  const Mat R = J * R1.transpose() * J;  // upper triangular, positive diagonal
  f.k = J * Q1.transpose();
  f.h0 = R.diagonal().array().log();
  f.h0.array() -= f.h0.mean();
  f.n = R * R.diagonal().cwiseInverse().asDiagonal();
  return f;
}

/// Iwasawa projection only (the vector h0 of g = n exp(h0) k).
inline Vec iwasawa_h0(const Mat& g) { return iwasawa_decompose(g).h0; }

/// Same projection through the trailing Gram minors: the bottom-right k x k
/// minor of g g^T equals (a_{d-k+1} ... a_d)^2, so a Cholesky of the
/// order-reversed Gram matrix reads off exp(h0) from its pivots.  Cheaper
/// than the full factorization and an independent derivation of it.
inline Vec iwasawa_h0_fast(const Mat& g) {
  require_square(g, "iwasawa_h0_fast");
  const int d = static_cast<int>(g.rows());
  Mat b(d, d);
  const Mat gram = g * g.transpose();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) = gram(d - 1 - i, d - 1 - j);
  Eigen::LLT<Mat> llt(b);
  if (llt.info() != Eigen::Success) fail_arg("iwasawa_h0_fast: Gram not positive definite");
  const Mat l = llt.matrixL();
  Vec h0(d);
  for (int i = 0; i < d; ++i) h0(i) = std::log(l(d - 1 - i, d - 1 - i));
  h0.array() -= h0.mean();
  return h0;
}

/// Group element with radial part x: k1 exp(diag x) k2.
inline Mat assemble_cartan(const Mat& k1, const Vec& x, const Mat& k2) {
  return k1 * x.array().exp().matrix().asDiagonal() * k2;
}

}  // namespace ranklab
