#pragma once

// Core value types shared by every module: trace-zero vectors on the split
// Cartan subspace, complex spectral parameters, and the isometric chart that
// all polytope/quadrature code works in.

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ranklab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;

inline constexpr double kSumZeroTol = 1e-12;

/// Throws std::invalid_argument with a prefixed message.
[[noreturn]] inline void fail_arg(const std::string& msg) {
  throw std::invalid_argument("ranklab: " + msg);
}

/// Numeric/accuracy failure (diverged integral, sampler starvation, failed
/// extrapolation) as opposed to a usage error; callers map it to a dedicated
/// exit path with diagnostics.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error("ranklab: " + msg) {}
};
[[noreturn]] inline void fail_numeric(const std::string& msg) { throw numeric_error(msg); }

/// A point of the trace-zero subspace, stored in ambient coordinates.
/// Construction enforces the zero-sum constraint to 1e-12 (relative to scale).
class ChamberVector {
 public:
  ChamberVector() = default;
  explicit ChamberVector(Vec v) : v_(std::move(v)) {
    const double scale = std::max(1.0, v_.cwiseAbs().maxCoeff());
    if (std::abs(v_.sum()) > kSumZeroTol * scale * v_.size())
      fail_arg("vector does not sum to zero: sum=" + std::to_string(v_.sum()));
  }
  static ChamberVector zero(int d) { return ChamberVector(Vec::Zero(d)); }

  int dim() const { return static_cast<int>(v_.size()); }
  const Vec& coords() const { return v_; }
  double operator[](int i) const { return v_(i); }
  double linf() const { return v_.cwiseAbs().maxCoeff(); }
  double norm2() const { return v_.norm(); }

  /// Weakly decreasing coordinates (closure of the positive chamber)?
  bool in_chamber(double tol = 0.0) const {
    for (int i = 0; i + 1 < v_.size(); ++i)
      if (v_(i) < v_(i + 1) - tol) return false;
    return true;
  }

 private:
  Vec v_;
};

/// Spectral parameter lambda = re + i*im with both parts trace-zero covectors
/// (identified with vectors through the trace form).
struct SpectralParameter {
  Vec re, im;

  SpectralParameter() = default;
  SpectralParameter(Vec re_, Vec im_) : re(std::move(re_)), im(std::move(im_)) {
    if (re.size() != im.size()) fail_arg("spectral parameter: size mismatch");
    const double s = std::max(1.0, std::max(re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff()));
    if (std::abs(re.sum()) > kSumZeroTol * s * re.size() ||
        std::abs(im.sum()) > kSumZeroTol * s * im.size())
      fail_arg("spectral parameter: parts must sum to zero");
  }
  static SpectralParameter tempered(Vec im) {
    const auto n = im.size();
    return SpectralParameter(Vec::Zero(n), std::move(im));
  }
  static SpectralParameter real(Vec re) {
    const auto n = re.size();
    return SpectralParameter(std::move(re), Vec::Zero(n));
  }

  int dim() const { return static_cast<int>(re.size()); }
  bool is_tempered(double tol = 1e-14) const { return re.cwiseAbs().maxCoeff() <= tol; }
  double norm2() const { return std::sqrt(re.squaredNorm() + im.squaredNorm()); }

  /// Complex pairing with a vector through the trace form.
  Cplx pair(const Vec& v) const { return {re.dot(v), im.dot(v)}; }
};

/// Isometric chart for the trace-zero subspace: columns of basis() are an
/// orthonormal basis (Helmert construction), so Lebesgue measure in chart
/// coordinates is the trace-form measure used by every volume in this library.
class Chart {
 public:
  explicit Chart(int d) : d_(d), basis_(d, d - 1) {
    if (d < 2) fail_arg("chart needs d >= 2");
    basis_.setZero();
    for (int k = 1; k < d; ++k) {  // column k-1: (1,...,1,-k,0,...)/sqrt(k(k+1))
      const double s = 1.0 / std::sqrt(double(k) * (k + 1));
      for (int i = 0; i < k; ++i) basis_(i, k - 1) = s;
      basis_(k, k - 1) = -double(k) * s;
    }
  }

  int d() const { return d_; }
  int dim() const { return d_ - 1; }
  const Mat& basis() const { return basis_; }

  Vec to_chart(const Vec& x) const { return basis_.transpose() * x; }
  Vec from_chart(const Vec& y) const { return basis_ * y; }
  /// Chart representation of a covector given in ambient coordinates.
  Vec covector_to_chart(const Vec& a) const { return basis_.transpose() * a; }

 private:
  int d_;
  Mat basis_;
};

/// Majorization test: is x in the convex hull of the permutation orbit of y?
/// (Both trace-zero; classical Schur-Horn characterization.)
inline bool in_permutohedron(const Vec& x, const Vec& y, double tol = 1e-12) {
  if (x.size() != y.size()) fail_arg("in_permutohedron: size mismatch");
  std::vector<double> xs(x.data(), x.data() + x.size());
  std::vector<double> ys(y.data(), y.data() + y.size());
  std::sort(xs.rbegin(), xs.rend());
  std::sort(ys.rbegin(), ys.rend());
  double px = 0, py = 0;
  for (size_t k = 0; k + 1 < xs.size(); ++k) {
    px += xs[k];
    py += ys[k];
    if (px > py + tol) return false;
  }
  return true;
}

}  // namespace ranklab
