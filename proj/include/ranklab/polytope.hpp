#pragma once

// Convex polytopes in the chart of the trace-zero subspace: H-representation,
// brute-force vertex enumeration (dimensions here are <= 7), recursive stellar
// triangulation, tensor quadrature over a simplicial decomposition, and the
// exact vertex-cone evaluation of integrals of exponentials (Brion's sum) with
// an epsilon-perturbation + Richardson fallback for non-generic directions.

#include <json.hpp>

#include <array>
#include <functional>
#include <optional>

#include "core.hpp"
#include "quadrature.hpp"

namespace ranklab {

struct Simplex {
  Mat verts;      // (dim) x (dim+1), columns are vertices in chart coords
  double absdet;  // |det[v_1-v_0, ..., v_n-v_0]| = n! * volume
};

namespace detail {

// Solves the n x n system of active constraints; returns nullopt if singular.
inline std::optional<Vec> solve_square(const Mat& A, const Vec& b) {
  Eigen::FullPivLU<Mat> lu(A);
  if (!lu.isInvertible()) return std::nullopt;
  return lu.solve(b);
}

inline bool near(const Vec& a, const Vec& b, double tol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

// Enumerates vertices of {y : A y <= b} by inspecting all n-subsets of rows.
inline std::vector<Vec> enumerate_vertices(const Mat& A, const Vec& b, double tol) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  std::vector<Vec> verts;
  std::vector<int> idx(n);
  std::function<void(int, int)> rec = [&](int start, int k) {
    if (k == n) {
      Mat S(n, n);
      Vec rb(n);
      for (int r = 0; r < n; ++r) {
        S.row(r) = A.row(idx[r]);
        rb(r) = b(idx[r]);
      }
      auto y = solve_square(S, rb);
      if (!y) return;
      const double scale = 1.0 + y->cwiseAbs().maxCoeff();
      if (((A * *y - b).array() > tol * scale).any()) return;
      for (const auto& v : verts)
        if (near(v, *y, 10 * tol * scale)) return;
      verts.push_back(*y);
      return;
    }
    for (int i = start; i <= m - (n - k); ++i) {
      idx[k] = i;
      rec(i + 1, k + 1);
    }
  };
  rec(0, 0);
  return verts;
}

}  // namespace detail

/// Result of a Brion evaluation.
struct BrionValue {
  double value = 0.0;
  bool perturbed = false;    // non-generic direction handled by extrapolation
  double est_error = 0.0;    // Richardson disagreement when perturbed
};

class Polytope {
 public:
  /// Halfspaces {x : a_k . x <= b_k} with ambient covectors a_k in R^d acting
  /// on the trace-zero subspace.
  Polytope(int d, Mat ambient_covectors, Vec offsets)
      : chart_(d), a_ambient_(std::move(ambient_covectors)), b_(std::move(offsets)) {
    if (a_ambient_.cols() != d || a_ambient_.rows() != b_.size())
      fail_arg("polytope: halfspace shape mismatch");
    A_ = a_ambient_ * chart_.basis();
  }

  int d() const { return chart_.d(); }
  int dim() const { return chart_.dim(); }
  const Chart& chart() const { return chart_; }
  const Mat& halfspace_covectors() const { return a_ambient_; }
  const Vec& halfspace_offsets() const { return b_; }
  int num_halfspaces() const { return static_cast<int>(b_.size()); }

  bool contains_ambient(const Vec& x, double tol = 1e-9) const {
    const Vec s = a_ambient_ * x - b_;
    return (s.array() <= tol).all();
  }

  /// Vertices in chart coordinates (cached).
  const std::vector<Vec>& vertices() const {
    if (!verts_) verts_ = detail::enumerate_vertices(A_, b_, tol_);
    return *verts_;
  }
  std::vector<Vec> vertices_ambient() const {
    std::vector<Vec> out;
    for (const auto& v : vertices()) out.push_back(chart_.from_chart(v));
    return out;
  }

  /// max <xi, x> over the polytope together with the maximizing vertex,
  /// xi given as an ambient covector.  Exact LP by vertex enumeration.
  std::pair<double, Vec> max_linear_ambient(const Vec& xi) const {
    const Vec c = chart_.covector_to_chart(xi);
    const auto& vs = vertices();
    if (vs.empty()) fail_arg("max_linear: empty polytope");
    double best = -std::numeric_limits<double>::infinity();
    Vec arg;
    for (const auto& v : vs) {
      const double val = c.dot(v);
      if (val > best) {
        best = val;
        arg = v;
      }
    }
    return {best, chart_.from_chart(arg)};
  }

  /// Simplicial decomposition by recursive stellar (barycentric) subdivision;
  /// vertices of every simplex are vertices of the polytope or barycenters of
  /// faces, so the decomposition is deterministic.
  const std::vector<Simplex>& triangulation() const {
    if (!tri_) tri_ = triangulate_hrep(A_, b_);
    return *tri_;
  }

  /// Integral of f over the polytope: per-simplex tensor Gauss-Legendre of
  /// order n per axis through the stick-breaking cube-to-simplex map.
  template <class F>
  auto integrate(F f, int n) const -> decltype(f(std::declval<const Vec&>())) {
    using R = decltype(f(std::declval<const Vec&>()));
    const int k = dim();
    const Rule1D& rule = gauss_legendre(n);
    R total{};
    for (const auto& s : triangulation()) {
      // iterate over the tensor grid u in [0,1]^k
      std::vector<int> ix(k, 0);
      const Vec v0 = s.verts.col(0);
      Mat E(k, k);
      for (int j = 0; j < k; ++j) E.col(j) = s.verts.col(j + 1) - v0;
      while (true) {
        // stick-breaking map u in [0,1]^k -> barycentric sticks t, with
        // Jacobian prod_a (1-u_a)^{k-1-a}
        double w = s.absdet;
        Vec t(k);
        double rest = 1.0;
        for (int a = 0; a < k; ++a) {
          const double u = 0.5 * (rule.nodes[ix[a]] + 1.0);
          w *= 0.5 * rule.weights[ix[a]] * std::pow(1.0 - u, k - 1 - a);
          t(a) = u * rest;
          rest *= (1.0 - u);
        }
        const Vec y = v0 + E * t;
        total += w * f(chart_.from_chart(y));
        int a = 0;
        for (; a < k; ++a) {
          if (++ix[a] < n) break;
          ix[a] = 0;
        }
        if (a == k) break;
      }
    }
    return total;
  }

  /// Exact integral of exp(<xi, x>) over the polytope (xi ambient covector).
  /// Uses tangent-cone sums at simple vertices when every vertex is simple,
  /// otherwise the simplicial decomposition; non-generic xi is handled by a
  /// deterministic epsilon-perturbation with Richardson extrapolation.
  BrionValue exponential_integral(const Vec& xi_ambient) const {
    const Vec xi = chart_.covector_to_chart(xi_ambient);
    if (auto direct = try_brion(xi)) return {*direct, false, 0.0};
    // Perturb: xi_eps = xi + eps * eta with a fixed generic direction.
    const Vec eta = generic_direction(dim());
    const double scale = std::max(1.0, xi.norm());
    double eps = 1e-4 * scale;
    std::array<double, 3> s{};
    for (int k = 0; k < 3; ++k) {
      std::optional<double> v;
      double e = eps / (1 << k);
      for (int bump = 0; bump < 8 && !v; ++bump) {  // nudge past residual poles
        v = try_brion(xi + (e * (1.0 + 1e-3 * bump)) * eta);
      }
      if (!v) fail_numeric("brion: perturbation failed to reach a generic direction");
      s[k] = *v;
    }
    const double r1 = 2.0 * s[1] - s[0];
    const double r2 = 2.0 * s[2] - s[1];
    BrionValue out;
    out.value = r2;
    out.perturbed = true;
    out.est_error = std::abs(r2 - r1);
    return out;
  }

  /// JSON form: {"halfspaces":[{"a":[...],"b":r},...], "vertices":[[...],...]}.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["halfspaces"] = nlohmann::ordered_json::array();
    for (int k = 0; k < num_halfspaces(); ++k) {
      nlohmann::ordered_json h;
      h["a"] = std::vector<double>(a_ambient_.row(k).begin(), a_ambient_.row(k).end());
      h["b"] = b_(k);
      j["halfspaces"].push_back(h);
    }
    j["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : vertices_ambient())
      j["vertices"].push_back(std::vector<double>(v.begin(), v.end()));
    return j;
  }

  static Polytope from_json(const nlohmann::json& j) {
    if (!j.contains("halfspaces") || j["halfspaces"].empty())
      fail_arg("polytope json: missing halfspaces");
    const auto& hs = j["halfspaces"];
    const int m = static_cast<int>(hs.size());
    const int d = static_cast<int>(hs[0]["a"].size());
    Mat A(m, d);
    Vec b(m);
    for (int k = 0; k < m; ++k) {
      const auto& a = hs[k]["a"];
      if (static_cast<int>(a.size()) != d) fail_arg("polytope json: ragged covectors");
      for (int i = 0; i < d; ++i) A(k, i) = a[i].get<double>();
      b(k) = hs[k]["b"].get<double>();
    }
    return Polytope(d, A, b);
  }

 private:
  // ---- Brion machinery ----------------------------------------------------

  // Direct evaluation; nullopt when xi is non-generic for some tangent cone.
  std::optional<double> try_brion(const Vec& xi) const {
    const auto& vs = vertices();
    if (vs.empty()) fail_arg("brion: empty polytope");
    const int n = dim();
    // Determine simplicity of every vertex via active constraint count.
    bool all_simple = true;
    std::vector<std::vector<int>> active(vs.size());
    for (size_t vi = 0; vi < vs.size(); ++vi) {
      const double scale = 1.0 + vs[vi].cwiseAbs().maxCoeff();
      for (int k = 0; k < num_halfspaces(); ++k)
        if (std::abs(A_.row(k).dot(vs[vi]) - b_(k)) <= tol_ * scale) active[vi].push_back(k);
      if (static_cast<int>(active[vi].size()) != n) all_simple = false;
    }
    if (all_simple) {
      // Tangent cone at a simple vertex has ray matrix R = -S^{-1} (columns),
      // and the cone's exponential integral is |det R| / prod_j (-xi . R_j).
      double total = 0.0;
      for (size_t vi = 0; vi < vs.size(); ++vi) {
        Mat S(n, n);
        for (int r = 0; r < n; ++r) S.row(r) = A_.row(active[vi][r]);
        Eigen::FullPivLU<Mat> lu(S);
        if (!lu.isInvertible()) return std::nullopt;
        const Mat rays = -lu.inverse();
        double denom = 1.0;
        for (int j = 0; j < n; ++j) {
          const double p = -xi.dot(rays.col(j));
          if (std::abs(p) < genericity_tol(xi)) return std::nullopt;
          denom *= p;
        }
        total += std::exp(xi.dot(vs[vi])) / (std::abs(lu.determinant()) * denom);
      }
      return total;
    }
    // Fallback: exact sum over the simplicial decomposition.
    return brion_over_simplices(xi);
  }

  std::optional<double> brion_over_simplices(const Vec& xi) const {
    double total = 0.0;
    for (const auto& s : triangulation()) {
      const int n = dim();
      for (int i = 0; i <= n; ++i) {
        double denom = 1.0;
        for (int j = 0; j <= n; ++j) {
          if (j == i) continue;
          const double p = -xi.dot(s.verts.col(j) - s.verts.col(i));
          if (std::abs(p) < genericity_tol(xi)) return std::nullopt;
          denom *= p;
        }
        total += s.absdet * std::exp(xi.dot(s.verts.col(i))) / denom;
      }
    }
    return total;
  }

  double genericity_tol(const Vec& xi) const { return 1e-9 * std::max(1.0, xi.norm()); }

  static Vec generic_direction(int n) {
    Vec eta(n);
    for (int i = 0; i < n; ++i) eta(i) = std::cos(1.234 + 2.618 * (i + 1));
    eta.normalize();
    return eta;
  }

  // ---- triangulation ------------------------------------------------------

  // Recursive stellar triangulation of {y : A y <= b} in dimension k.
  static std::vector<Simplex> triangulate_hrep(const Mat& A, const Vec& b) {
    std::vector<Simplex> out;
    std::vector<Mat> faces = face_simplices(A, b);
    for (const auto& f : faces) {
      Simplex s;
      s.verts = f;
      const int k = static_cast<int>(f.rows());
      Mat E(k, k);
      for (int j = 0; j < k; ++j) E.col(j) = f.col(j + 1) - f.col(0);
      s.absdet = std::abs(E.determinant());
      if (s.absdet > 1e-14) out.push_back(std::move(s));
    }
    return out;
  }

  // Returns full-dimensional simplices (as vertex matrices k x (k+1)).
  static std::vector<Mat> face_simplices(const Mat& A, const Vec& b) {
    const int k = static_cast<int>(A.cols());
    const auto vs = detail::enumerate_vertices(A, b, 1e-9);
    std::vector<Mat> out;
    if (vs.empty()) return out;
    if (k == 1) {  // segment: min to max
      double lo = vs[0](0), hi = vs[0](0);
      for (const auto& v : vs) {
        lo = std::min(lo, v(0));
        hi = std::max(hi, v(0));
      }
      Mat s(1, 2);
      s << lo, hi;
      out.push_back(s);
      return out;
    }
    // barycenter of all vertices
    Vec c = Vec::Zero(k);
    for (const auto& v : vs) c += v;
    c /= double(vs.size());
    // for each supporting halfspace: facet = polytope in (k-1) dims;
    // skip duplicates of an earlier (normalized) halfspace so a facet is
    // triangulated once even if the H-rep repeats a covector
    for (int h = 0; h < A.rows(); ++h) {
      const double nh = A.row(h).norm();
      if (nh < 1e-14) continue;
      bool dup = false;
      for (int g = 0; g < h && !dup; ++g) {
        const double ng = A.row(g).norm();
        if (ng < 1e-14) continue;
        dup = (A.row(h) / nh - A.row(g) / ng).norm() < 1e-12 &&
              std::abs(b(h) / nh - b(g) / ng) < 1e-12;
      }
      if (dup) continue;
      std::vector<Vec> on_face;
      for (const auto& v : vs) {
        const double scale = 1.0 + v.cwiseAbs().maxCoeff();
        if (std::abs(A.row(h).dot(v) - b(h)) <= 1e-9 * scale) on_face.push_back(v);
      }
      if (static_cast<int>(on_face.size()) < k) continue;  // not a facet
      // affine chart of the hyperplane a.y = b
      const Vec a = A.row(h).transpose();
      const Vec p0 = on_face[0];
      // orthonormal basis of a-perp via QR of the projector
      Eigen::HouseholderQR<Mat> qr(a);
      const Mat Q = qr.householderQ();
      Mat basis = Q.rightCols(k - 1);  // columns orthogonal to a
      // facet H-rep in u-coords: all other halfspaces restricted
      std::vector<int> keep;
      for (int g = 0; g < A.rows(); ++g)
        if (g != h) keep.push_back(g);
      Mat Af(static_cast<int>(keep.size()), k - 1);
      Vec bf(static_cast<int>(keep.size()));
      for (size_t r = 0; r < keep.size(); ++r) {
        Af.row(r) = A.row(keep[r]) * basis;
        bf(r) = b(keep[r]) - A.row(keep[r]).dot(p0);
      }
      auto sub = face_simplices(Af, bf);
      for (const auto& fs : sub) {
        // lift u-simplex back and cone with barycenter c
        Mat s(k, k + 1);
        for (int j = 0; j < k; ++j) s.col(j) = p0 + basis * fs.col(j);
        s.col(k) = c;
        out.push_back(s);
      }
    }
    return out;
  }

  Chart chart_;
  Mat a_ambient_;  // m x d ambient covectors
  Vec b_;
  Mat A_;  // m x (d-1) chart covectors
  double tol_ = 1e-9;
  mutable std::optional<std::vector<Vec>> verts_;
  mutable std::optional<std::vector<Simplex>> tri_;
};

}  // namespace ranklab
