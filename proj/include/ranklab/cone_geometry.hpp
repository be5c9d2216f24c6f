#pragma once

// Geometry of the positive chamber and the radial averaging sets: the
// distinguished growth direction X0, the simplicial covector basis mu with its
// dual vectors beta, the truncated chamber polytope, shrink/gap parameters,
// boundary comparison constants, and the volume of the averaging sets
// (quadrature, alternating exponential sums, leading exponential term).

#include "core.hpp"
#include "polytope.hpp"
#include "root_datum.hpp"

namespace ranklab {

/// Parameters of the shrunken window: delta = drop of the linear functional
/// rho when any single face is pulled in by eta; c_min = smallest value of a
/// non-degenerate simple root on the corner cell spanned by [1-eta,1] in the
/// dual basis.
struct ShrinkParameters {
  double eta = 0.0;
  double delta = 0.0;
  double c_min = 0.0;
};

/// Comparison constants of the residual boundary cone around X0.
struct ConeBoundaryConstants {
  double gamma = 0.0;  // angular gap pi/2 - max angle(ray, X0)
  double c1 = 0.0;     // max_w |<w.rho, proj_{R X0} u>| / (-<rho, u>)
  double c2 = 0.0;     // same numerator over (-<rho, proj_{R X0} u>)
  std::vector<Vec> rays;       // generating rays of the outward cone
  bool pairing_negative = true;  // <rho, u> < 0 for every inward ray u
};

/// Alternating-exponential-sum evaluation of a volume, with diagnostics.
struct AlternatingVolume {
  double value = 0.0;
  double max_term = 0.0;   // largest |single term|, cancellation monitor
  double est_error = 0.0;  // extrapolation disagreement if perturbed
  bool perturbed = false;
};

/// Leading term of the volume: coefficient * exp(exponent * t) as t -> inf.
struct LeadingVolumeTerm {
  double coefficient = 0.0;
  double exponent = 0.0;
  double est_error = 0.0;
  bool extrapolated = false;
};

class ConeDatum {
 public:
  explicit ConeDatum(int d) : roots_(d), chart_(d) {
    const int s2 = (d % 2 == 0) ? d / 2 : (d + 1) / 2;
    s_ = s2;
    x0_ = Vec::Zero(d);
    if (d % 2 == 0) {
      for (int i = 0; i < d; ++i) x0_(i) = (i < s2) ? 1.0 : -1.0;
    } else {
      for (int i = 0; i < s2 - 1; ++i) x0_(i) = 1.0;
      for (int i = s2; i < d; ++i) x0_(i) = -1.0;
    }
    build_mu();
  }

  const RootDatum& roots() const { return roots_; }
  const Chart& chart() const { return chart_; }
  int d() const { return roots_.d(); }
  int s() const { return s_; }

  /// Distinguished unit-sup-norm chamber direction of fastest volume growth.
  const Vec& x0() const { return x0_; }
  double rho_x0() const { return roots_.rho().dot(x0_); }

  /// Independent recovery of X0 as the maximizer of <rho, .> over the
  /// truncated chamber at t = 1 (exact vertex-enumeration LP).
  Vec x0_from_support() const { return p_plus(1.0).max_linear_ambient(roots_.rho()).second; }

  /// Covector basis mu_1..mu_{d-1} (rows, ambient) with mu_i(X0) = 1.
  const Mat& mu() const { return mu_; }
  /// Dual vector basis beta_1..beta_{d-1} (columns, ambient, trace-zero).
  const Mat& beta() const { return beta_; }
  Vec mu_coords(const Vec& x) const { return mu_ * x; }
  /// Coefficients of rho in the mu basis; positive integers.
  const Vec& rho_coeffs() const { return rho_coeffs_; }
  /// sqrt(det Gram(beta)): Lebesgue density of mu-coordinates.
  double gram_sqrt() const { return gram_sqrt_; }

  bool in_chamber(const Vec& x, double tol = 1e-12) const {
    for (int i = 0; i + 1 < d(); ++i)
      if (x(i) - x(i + 1) < -tol) return false;
    return true;
  }
  bool in_radial_ball(const Vec& x, double t, double tol = 1e-12) const {
    return x.cwiseAbs().maxCoeff() <= t + tol;
  }
  bool in_cone_box(const Vec& x, double t, double tol = 1e-12) const {
    return (mu_coords(x).array() <= t + tol).all();
  }

  /// Truncated chamber {chamber} cap {mu_i <= t} = {chamber, sup norm <= t}.
  Polytope p_plus(double t) const {
    const int n = d();
    Mat A(2 * (n - 1), n);
    Vec b(2 * (n - 1));
    for (int i = 0; i + 1 < n; ++i) {  // X_{i+1} - X_i <= 0
      A.row(i).setZero();
      A(i, i) = -1.0;
      A(i, i + 1) = 1.0;
      b(i) = 0.0;
    }
    for (int i = 0; i < n - 1; ++i) {
      A.row(n - 1 + i) = mu_.row(i);
      b(n - 1 + i) = t;
    }
    return Polytope(n, A, b);
  }

  /// As p_plus(t) but with the which-th face pulled in to (1 - eta) * t.
  Polytope p_plus_shrunk(double t, int which_mu, double eta) const {
    if (which_mu < 0 || which_mu >= d() - 1) fail_arg("shrunk polytope: face index");
    Polytope p = p_plus(t);
    Mat A = p.halfspace_covectors();
    Vec b = p.halfspace_offsets();
    b(d() - 1 + which_mu) = (1.0 - eta) * t;
    return Polytope(d(), A, b);
  }

  ShrinkParameters shrink_parameters(double eta) const {
    if (eta <= 0.0 || eta >= 1.0) fail_arg("shrink: eta must lie in (0,1)");
    ShrinkParameters out;
    out.eta = eta;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < d() - 1; ++i)
      worst = std::max(worst, p_plus_shrunk(1.0, i, eta).max_linear_ambient(roots_.rho()).first);
    out.delta = rho_x0() - worst;
    // corner cell sum_i [1-eta, 1] beta_i; minimize each non-Levi simple root
    // over the 2^{d-1} cell vertices
    const std::vector<int> live = non_levi_simple_indices();
    double cmin = std::numeric_limits<double>::infinity();
    const int n = d() - 1;
    for (long mask = 0; mask < (1L << n); ++mask) {
      Vec x = Vec::Zero(d());
      for (int i = 0; i < n; ++i) x += ((mask >> i) & 1 ? 1.0 : 1.0 - eta) * beta_.col(i);
      for (int a : live) cmin = std::min(cmin, x(a) - x(a + 1));
    }
    out.c_min = cmin;
    return out;
  }

  /// Simple roots not vanishing on X0 (i.e. not in the centralizer datum).
  std::vector<int> non_levi_simple_indices() const {
    std::vector<int> out;
    for (int i = 0; i + 1 < d(); ++i)
      if (std::abs(x0_(i) - x0_(i + 1)) > 0.5) out.push_back(i);
    return out;
  }

  /// Generating rays of the outward residual cone at X0: differences of
  /// orthant generators with opposite trace signs.
  std::vector<Vec> outward_rays() const {
    const int n = d();
    std::vector<std::pair<int, int>> pairs;
    auto add = [&](int i, int j) {
      for (auto& p : pairs)
        if (p.first == i && p.second == j) return;
      pairs.emplace_back(i, j);
    };
    if (n % 2 == 0) {
      for (int i = 0; i < n / 2; ++i)
        for (int j = n / 2; j < n; ++j) add(i, j);
    } else {
      const int sp = (n + 1) / 2;  // positive part has sp slots, negative n-sp+1
      for (int i = 0; i < sp; ++i)
        for (int j = sp; j < n; ++j) add(i, j);
      for (int i = 0; i < sp - 1; ++i)
        for (int j = sp - 1; j < n; ++j)
          if (i != j) add(i, j);
    }
    std::vector<Vec> rays;
    for (auto& p : pairs) {
      Vec r = Vec::Zero(n);
      r(p.first) = 1.0;
      r(p.second) = -1.0;
      rays.push_back(r);
    }
    return rays;
  }

  ConeBoundaryConstants boundary_constants() const {
    ConeBoundaryConstants out;
    out.rays = outward_rays();
    const double x0n2 = x0_.squaredNorm();
    double max_angle = 0.0;
    for (const auto& r : out.rays)
      max_angle = std::max(max_angle, std::acos(std::clamp(
                                          r.dot(x0_) / (r.norm() * std::sqrt(x0n2)), -1.0, 1.0)));
    out.gamma = 0.5 * std::acos(-1.0) - max_angle;
    const Vec& rho = roots_.rho();
    double c1 = 0.0, c2 = 0.0;
    bool neg = true;
    for (const auto& r : out.rays) {
      const Vec u = -r;  // inward ray
      if (rho.dot(u) >= 0.0) neg = false;
      const Vec proj = (u.dot(x0_) / x0n2) * x0_;
      double num = 0.0;
      for (const auto& w : roots_.weyl()) num = std::max(num, std::abs(w.apply(rho).dot(proj)));
      c1 = std::max(c1, num / (-rho.dot(u)));
      c2 = std::max(c2, num / (-rho.dot(proj)));
    }
    out.c1 = c1;
    out.c2 = c2;
    out.pairing_negative = neg;
    return out;
  }

  /// Volume of the radial averaging set by adaptive simplex quadrature of the
  /// sinh-product density over the truncated chamber.
  Refined<double> volume_quadrature(double t, double rel_tol = 1e-8, int n0 = 8,
                                    int n_cap = 96) const {
    const Polytope p = p_plus(t);
    auto eval = [&](int n) {
      return p.integrate([&](const Vec& x) { return roots_.jacobian(x); }, n);
    };
    auto probe = eval(n0);
    const double scale = std::max(1.0, std::abs(probe));
    auto r = refine_until([&](int n) { return eval(n); }, n0, rel_tol * scale, n_cap);
    return r;
  }

  /// Same volume as an alternating sum of exact exponential integrals,
  /// 2^{-|Phi+|} sum_w sgn(w) int exp(<2 w.rho, X>).
  AlternatingVolume volume_alternating(double t) const {
    const Polytope p = p_plus(t);
    AlternatingVolume out;
    const int nroots = roots_.num_positive();
    for (const auto& w : roots_.weyl()) {
      const Vec xi = 2.0 * w.apply(roots_.rho());
      const BrionValue bv = p.exponential_integral(xi);
      const double term = std::ldexp(bv.value, -nroots);
      out.value += w.signature * term;
      out.max_term = std::max(out.max_term, std::abs(term));
      out.perturbed = out.perturbed || bv.perturbed;
      out.est_error += std::ldexp(bv.est_error, -nroots);
    }
    return out;
  }

  /// Coefficient and exponent of the top exponential term of the volume:
  /// vol(t) = coefficient * exp(exponent * t) * (1 + o(1)).  The coefficient
  /// is assembled from the simplices of the unit polytope whose vertices
  /// realize the extreme pairing; non-generic directions are handled by a
  /// Weyl-equivariant perturbation of rho with Richardson extrapolation.
  LeadingVolumeTerm volume_leading_term() const {
    LeadingVolumeTerm out;
    out.exponent = 2.0 * rho_x0();
    const Polytope p = p_plus(1.0);
    const auto& tri = p.triangulation();
    const Chart& ch = p.chart();
    const int n = d() - 1;
    const double target = out.exponent;
    // unperturbed leading flags per (weyl element, simplex, vertex)
    struct Item {
      int w, s, v;
    };
    std::vector<Item> leading;
    std::vector<Vec> wrho_chart(roots_.weyl().size());
    for (size_t wi = 0; wi < roots_.weyl().size(); ++wi) {
      wrho_chart[wi] = ch.covector_to_chart(2.0 * roots_.weyl()[wi].apply(roots_.rho()));
      for (size_t si = 0; si < tri.size(); ++si)
        for (int vi = 0; vi <= n; ++vi)
          if (std::abs(wrho_chart[wi].dot(tri[si].verts.col(vi)) - target) < 1e-9)
            leading.push_back({static_cast<int>(wi), static_cast<int>(si), vi});
    }
    if (leading.empty()) fail_arg("leading term: no extreme vertex found");
    auto sum_at = [&](double eps, const Vec& eta_ambient, bool& ok) {
      double total = 0.0;
      ok = true;
      for (const auto& it : leading) {
        const auto& w = roots_.weyl()[it.w];
        const Vec xi =
            ch.covector_to_chart(2.0 * w.apply(Vec(roots_.rho() + eps * eta_ambient)));
        const auto& s = tri[it.s];
        double denom = 1.0;
        for (int j = 0; j <= n; ++j) {
          if (j == it.v) continue;
          const double q = -xi.dot(s.verts.col(j) - s.verts.col(it.v));
          if (std::abs(q) < 1e-11) {
            ok = false;
            return 0.0;
          }
          denom *= q;
        }
        total += w.signature * std::ldexp(s.absdet, -roots_.num_positive()) / denom;
      }
      return total;
    };
    // trace-free generic perturbation direction
    Vec eta(d());
    for (int i = 0; i < d(); ++i) eta(i) = std::sin(1.7 + 2.399963 * (i + 1));
    eta.array() -= eta.mean();
    eta.normalize();
    bool ok = true;
    const double direct = sum_at(0.0, eta, ok);
    if (ok) {
      out.coefficient = direct;
      return out;
    }
    std::array<double, 3> s{};
    for (int k = 0; k < 3; ++k) {
      double e = 1e-4 / (1 << k);
      bool good = false;
      for (int bump = 0; bump < 8 && !good; ++bump)
        s[k] = sum_at(e * (1.0 + 1e-3 * bump), eta, good);
      if (!good) fail_numeric("leading term: perturbation failed to become generic");
    }
    const double r1 = 2.0 * s[1] - s[0];
    const double r2 = 2.0 * s[2] - s[1];
    out.coefficient = r2;
    out.extrapolated = true;
    out.est_error = std::abs(r2 - r1);
    return out;
  }

 private:
  void build_mu() {
    const int n = d();
    // fundamental covectors: w_i = sum_{k<=i} e_k - (i/d) * ones
    auto fund = [&](int i) {  // i in 1..n-1
      Vec w = Vec::Constant(n, -double(i) / n);
      for (int k = 0; k < i; ++k) w(k) += 1.0;
      return w;
    };
    mu_ = Mat(n - 1, n);
    mu_.row(0) = fund(1);
    mu_.row(n - 2) = fund(n - 1);
    if (n % 2 == 0) {
      const int sp = n / 2;
      for (int i = 2; i <= sp; ++i) mu_.row(i - 1) = fund(i) - fund(i - 1);
      for (int i = sp + 1; i <= n - 2; ++i) mu_.row(i - 1) = fund(i) - fund(i + 1);
    } else {
      const int sp = (n + 1) / 2;
      for (int i = 2; i <= sp - 1; ++i) mu_.row(i - 1) = fund(i) - fund(i - 1);
      for (int i = sp; i <= n - 2; ++i) mu_.row(i - 1) = fund(i) - fund(i + 1);
    }
    // dual basis inside the trace-zero subspace, via the chart
    const Mat Mchart = mu_ * chart_.basis();              // (n-1) x (n-1)
    const Mat Bchart = Mchart.inverse();                  // columns beta_j
    beta_ = chart_.basis() * Bchart;                      // ambient columns
    rho_coeffs_ = beta_.transpose() * roots_.rho();
    gram_sqrt_ = std::sqrt(std::abs((beta_.transpose() * beta_).determinant()));
  }

  RootDatum roots_;
  Chart chart_;
  int s_ = 0;
  Vec x0_;
  Mat mu_;          // (d-1) x d
  Mat beta_;        // d x (d-1)
  Vec rho_coeffs_;  // d-1
  double gram_sqrt_ = 0.0;
};

}  // namespace ranklab
