#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "ranklab/c_function.hpp"
#include "ranklab/spherical.hpp"

using namespace ranklab;

namespace {

SpectralParameter mk(std::initializer_list<double> re, std::initializer_list<double> im) {
  Vec r(static_cast<int>(re.size())), i(static_cast<int>(im.size()));
  int k = 0;
  for (double v : re) r(k++) = v;
  k = 0;
  for (double v : im) i(k++) = v;
  return SpectralParameter(r, i);
}

Vec v3(double a, double b, double c) {
  Vec x(3);
  x << a, b, c;
  return x;
}

}  // namespace

TEST_CASE("rank-one factor: values, zeros and poles") {
  // gamma_1(y) = Gamma(y/2) / (sqrt(pi) Gamma((y+1)/2))
  REQUIRE(rank_one_factor(1.0).real() == Catch::Approx(1.0).epsilon(1e-14));
  REQUIRE(rank_one_factor(1.0).imag() == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(rank_one_factor(2.0).real() == Catch::Approx(2.0 / M_PI).epsilon(1e-14));
  REQUIRE(rank_one_factor(3.0).real() == Catch::Approx(0.5).epsilon(1e-13));
  // zeros at negative odd integers, poles at non-positive even integers
  REQUIRE(std::abs(rank_one_factor(-1.0)) < 1e-13);
  REQUIRE(std::abs(rank_one_factor(-3.0)) < 1e-13);
  REQUIRE(rank_one_pole(0.0));
  REQUIRE(rank_one_pole(-2.0));
  REQUIRE(rank_one_pole(Cplx(-4.0, 1e-12)));
  REQUIRE_FALSE(rank_one_pole(Cplx(0.0, 0.5)));
  REQUIRE_FALSE(rank_one_pole(1e-3));
}

TEST_CASE("log_gamma agrees with lgamma and the functional equation") {
  for (double x : {0.3, 1.0, 2.5, 7.1, 11.0})
    REQUIRE(log_gamma(Cplx(x, 0.0)).real() == Catch::Approx(std::lgamma(x)).margin(1e-12));
  // Gamma(z+1) = z Gamma(z) off the real axis
  for (Cplx z : {Cplx(0.4, 1.3), Cplx(-1.7, 0.6), Cplx(2.2, -3.0)}) {
    const Cplx lhs = log_gamma(z + 1.0);
    const Cplx rhs = log_gamma(z) + std::log(z);
    REQUIRE(std::abs(std::exp(lhs - rhs) - 1.0) < 1e-12);
  }
}

TEST_CASE("c-function is 1 at rho and finite at regular tempered points") {
  for (int d : {3, 4, 5}) {
    RootDatum roots(d);
    const CFunctionValue at_rho =
        c_function(roots, SpectralParameter(roots.rho(), Vec::Zero(d)));
    REQUIRE_FALSE(at_rho.pole_flag);
    REQUIRE(std::abs(at_rho.value - 1.0) < 1e-12);
  }
  RootDatum r3(3);
  const CFunctionValue tempered = c_function(r3, mk({0, 0, 0}, {1, 0, -1}));
  REQUIRE_FALSE(tempered.pole_flag);
  REQUIRE(std::abs(tempered.value) > 0.0);
  // irregular direction hits the Gamma pole of a vanishing pairing
  const CFunctionValue wall = c_function(r3, mk({0, 0, 0}, {1, 1, -2}));
  REQUIRE(wall.pole_flag);
}

TEST_CASE("Plancherel density matches |c|^-2 and the Weyl group") {
  for (int d : {3, 4}) {
    RootDatum roots(d);
    std::mt19937_64 gen = stream(11, d);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 8; ++rep) {
      Vec nu(d);
      for (int i = 0; i < d; ++i) nu(i) = g(gen);
      nu.array() -= nu.mean();
      if (roots.regularity(SpectralParameter(Vec::Zero(d), nu)) < 0.1) continue;
      const double direct = plancherel_density(roots, nu);
      const CFunctionValue c = c_function(roots, SpectralParameter(Vec::Zero(d), nu));
      REQUIRE_FALSE(c.pole_flag);
      REQUIRE(direct ==
              Catch::Approx(1.0 / std::norm(c.value)).epsilon(1e-12));
      for (const WeylElement& w : roots.weyl()) {
        const double moved = plancherel_density(roots, w.apply(nu));
        REQUIRE(moved == Catch::Approx(direct).epsilon(1e-10).margin(1e-10));
      }
    }
    // vanishing on a chamber wall
    Vec wall = Vec::Zero(d);
    wall(0) = 1.0;
    wall(1) = 1.0;
    wall(d - 1) = -2.0;
    wall.array() -= wall.mean();
    REQUIRE(std::abs(plancherel_density(roots, wall)) < 1e-12);
  }
}

TEST_CASE("|c(i nu)|^-2 is dominated by a bounded multiple of the proxy") {
  // density / proxy stays bounded on a 1-regular grid (the growth-rate bound)
  RootDatum roots(3);
  double worst = 0.0;
  for (double a = 1.0; a <= 6.0; a += 0.5)
    for (double b = 1.0; b <= 6.0; b += 0.5) {
      Vec nu = v3(a + b, b, 0.0);
      nu.array() -= nu.mean();
      const SpectralParameter l(Vec::Zero(3), nu);
      if (roots.regularity(l) < 1.0) continue;
      const double density = plancherel_density(roots, nu);
      const double proxy = roots.plancherel_proxy(1.0, l);
      REQUIRE(proxy > 0.0);
      worst = std::max(worst, density / proxy);
    }
  REQUIRE(worst > 0.0);
  REQUIRE(worst < 10.0);
}

TEST_CASE("spherical function is exactly 1 at the identity") {
  const SpectralParameter l = mk({0.2, 0.1, -0.3}, {0.7, -0.2, -0.5});
  const SphericalEval tensor = spherical_phi3(l, Vec::Zero(3));
  REQUIRE(tensor.value == Cplx(1.0, 0.0));
  REQUIRE(tensor.abs_error == 0.0);
  const SphericalEval mc = spherical_phi_mc(mk({0, 0, 0, 0}, {1, 0.5, -0.5, -1}),
                                            Vec::Zero(4), 1600, 5);
  REQUIRE(mc.value.real() == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(std::abs(mc.value.imag()) < 1e-12);
}

TEST_CASE("phi at lambda = +-rho is the constant function 1") {
  RootDatum roots(3);
  for (double sgn : {1.0, -1.0}) {
    const SpectralParameter l(sgn * roots.rho(), Vec::Zero(3));
    for (const Vec& x : {v3(0.5, 0.2, -0.7), v3(2.0, -0.3, -1.7), v3(1.5, 1.5, -3.0)}) {
      const SphericalEval e = spherical_phi3(l, x, 1e-10);
      REQUIRE(std::abs(e.value - Cplx(1.0, 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("tempered phi: modulus bound, conjugation, Weyl symmetry") {
  RootDatum roots(3);
  const SpectralParameter l = mk({0, 0, 0}, {1.3, 0.1, -1.4});
  const Vec x = v3(1.2, -0.2, -1.0);
  const SphericalEval base = spherical_phi3(l, x, 1e-10);
  REQUIRE(std::abs(base.value) <= 1.0 + 1e-9);
  // conj(phi_{i nu}) = phi_{-i nu}; -1 is not in the Weyl group, so tempered
  // phi itself is complex unless -nu is a permutation of nu
  const SphericalEval mirror = spherical_phi3(mk({0, 0, 0}, {1.4, -0.1, -1.3}), x, 1e-10);
  REQUIRE(std::abs(mirror.value - std::conj(base.value)) < 1e-9);
  for (const WeylElement& w : roots.weyl()) {
    const SphericalEval moved = spherical_phi3(w.apply(l), x, 1e-10);
    REQUIRE(std::abs(moved.value - base.value) <=
            3.0 * (moved.abs_error + base.abs_error) + 1e-9);
  }
  // symmetric ray: -nu in the Weyl orbit forces phi real
  const SphericalEval sym = spherical_phi3(mk({0, 0, 0}, {1, 0, -1}), x, 1e-10);
  REQUIRE(std::abs(sym.value.imag()) <= 3.0 * sym.abs_error + 1e-11);
  // |phi| <= 1 on a radial sweep
  for (double t = 0.5; t <= 3.0; t += 0.5) {
    const SphericalEval e = spherical_phi3(l, v3(t, 0.0, -t), 1e-8);
    REQUIRE(std::abs(e.value) <= 1.0 + 1e-7);
  }
}

TEST_CASE("frozen regression value of the d=3 tensor quadrature") {
  const SpectralParameter l = mk({0.3, 0.1, -0.4}, {0.9, -0.2, -0.7});
  const SphericalEval e = spherical_phi3(l, v3(0.8, 0.1, -0.9), 1e-12);
  REQUIRE(e.value.real() == Catch::Approx(0.643197108603075).margin(5e-12));
  REQUIRE(e.value.imag() == Catch::Approx(0.106913882087498).margin(5e-12));
}

TEST_CASE("tensor and Monte Carlo paths agree at d=3") {
  const SpectralParameter l = mk({0, 0, 0}, {0.9, -0.2, -0.7});
  const Vec x = v3(0.8, 0.1, -0.9);
  const SphericalEval tensor = spherical_phi3(l, x, 1e-10);
  const SphericalEval mc = spherical_phi_mc(l, x);
  REQUIRE(mc.method == EvalMethod::monte_carlo);
  REQUIRE(std::abs(tensor.value - mc.value) <= mc.abs_error + 1e-9);
  REQUIRE_THROWS_AS(spherical_phi_mc(l, x, 100), std::invalid_argument);
}

TEST_CASE("rank-one building block matches the Legendre polynomials") {
  // sl2_spherical(m, h) = P_{m - 1/2}(cosh 2h)
  for (double h : {0.0, 0.3, 1.1}) {
    const double z = std::cosh(2.0 * h);
    REQUIRE(sl2_spherical(Cplx(0.5, 0.0), h).value.real() ==
            Catch::Approx(1.0).epsilon(1e-11));
    REQUIRE(sl2_spherical(Cplx(1.5, 0.0), h).value.real() == Catch::Approx(z).epsilon(1e-11));
    REQUIRE(sl2_spherical(Cplx(2.5, 0.0), h).value.real() ==
            Catch::Approx(0.5 * (3.0 * z * z - 1.0)).epsilon(1e-11));
  }
  // evenness in the spectral parameter: P_s = P_{-1-s} with s = m - 1/2
  const Cplx a = sl2_spherical(Cplx(0.3, 0.8), 0.9).value;
  const Cplx b = sl2_spherical(Cplx(-0.3, -0.8), 0.9).value;
  REQUIRE(std::abs(a - b) < 1e-11);
  REQUIRE(sl2_spherical(Cplx(0.9, -1.2), 0.0).value == Cplx(1.0, 0.0));
}

TEST_CASE("Levi data of the distinguished direction") {
  const LeviData l3 = levi_data(3);
  REQUIRE(l3.blocks == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}});
  REQUIRE(l3.delta_m.empty());
  const LeviData l4 = levi_data(4);
  REQUIRE(l4.blocks == std::vector<std::pair<int, int>>{{0, 2}, {2, 4}});
  REQUIRE(l4.delta_m == std::vector<int>{0, 2});
  const LeviData l5 = levi_data(5);
  REQUIRE(l5.blocks == std::vector<std::pair<int, int>>{{0, 2}, {2, 3}, {3, 5}});
  REQUIRE(l5.delta_m == std::vector<int>{0, 3});
  for (int d : {3, 4, 5}) {
    const LeviData ld = levi_data(d);
    const ConeDatum cd(d);
    // projector: idempotent, fixes X0, annihilates nothing twice
    REQUIRE((ld.proj_center * ld.proj_center - ld.proj_center).norm() < 1e-12);
    REQUIRE((ld.proj_center * cd.x0() - cd.x0()).norm() < 1e-12);
    REQUIRE((ld.proj_center + ld.proj_anti - Mat::Identity(d, d)).norm() < 1e-12);
    // rho_m is orthogonal to the center direction
    REQUIRE(std::abs(ld.rho_m.dot(cd.x0())) < 1e-12);
    // delta_m = simple roots inside the Levi = complement of the crossing set
    std::vector<int> crossing = cd.non_levi_simple_indices();
    for (int i : ld.delta_m)
      REQUIRE(std::find(crossing.begin(), crossing.end(), i) == crossing.end());
    REQUIRE(ld.delta_m.size() + crossing.size() == static_cast<std::size_t>(d - 1));
  }
}

TEST_CASE("coset enumeration sizes") {
  for (auto [d, expect] : {std::pair<int, int>{3, 6}, {4, 6}, {5, 30}}) {
    RootDatum roots(d);
    const auto cosets = levi_cosets(roots, levi_data(d));
    REQUIRE(static_cast<int>(cosets.size()) == expect);
    // identity coset present
    bool has_id = false;
    for (const WeylElement& w : cosets) {
      bool id = true;
      for (std::size_t i = 0; i < w.perm.size(); ++i)
        if (w.perm[i] != static_cast<int>(i)) id = false;
      has_id |= id;
    }
    REQUIRE(has_id);
  }
}

TEST_CASE("flat factor: central covariance and block rejection") {
  RootDatum roots(3);
  const LeviData levi = levi_data(3);
  const ConeDatum cd(3);
  const SpectralParameter l = mk({0.2, -0.1, -0.1}, {1.1, 0.4, -1.5});
  const Vec y = v3(0.4, 0.1, -0.5);
  const SphericalEval base = f_levi(roots, levi, l, y);
  for (double t : {0.7, 1.9}) {
    const SphericalEval moved = f_levi(roots, levi, l, y + t * cd.x0());
    const Cplx factor = std::exp(t * l.pair(cd.x0()));
    REQUIRE(std::abs(moved.value - factor * base.value) <=
            1e-12 * std::abs(moved.value) + 1e-14);
  }
  // d = 6 puts a 3-block in the Levi: unsupported by the rank-one factorization
  RootDatum r6(6);
  const SpectralParameter l6(Vec::Zero(6), Vec::Zero(6));
  REQUIRE_THROWS_AS(f_levi(r6, levi_data(6), l6, Vec::Zero(6)), std::invalid_argument);
}

TEST_CASE("main-term sum: Weyl invariance and parameter validation") {
  RootDatum roots(3);
  const LeviData levi = levi_data(3);
  const SpectralParameter l = mk({0, 0, 0}, {1.3, 0.1, -1.4});
  const Vec y = v3(0.6, -0.1, -0.5);
  const SphericalEval base = main_term_phi(roots, levi, l, y);
  for (const WeylElement& w : roots.weyl()) {
    const SphericalEval moved = main_term_phi(roots, levi, w.apply(l), y);
    REQUIRE(std::abs(moved.value - base.value) <= 1e-9 * std::max(1.0, std::abs(base.value)));
  }
  REQUIRE_THROWS_AS(main_term_phi(roots, levi, mk({0, 0, 0}, {1, 1, -2}), y),
                    std::invalid_argument);
}

TEST_CASE("expansion error decays at the spectral-gap rate") {
  RootDatum roots(3);
  const LeviData levi = levi_data(3);
  const SpectralParameter l = mk({0, 0, 0}, {1.3, 0.1, -1.4});
  const ExpansionScan scan =
      expansion_error_scan(roots, levi, l, Vec::Zero(3), {1.0, 1.5, 2.0, 2.5, 3.0});
  REQUIRE(scan.target_rate == Catch::Approx(-2.0).epsilon(1e-12));
  REQUIRE(scan.conclusive);
  REQUIRE(scan.fitted_rate > -2.5);
  REQUIRE(scan.fitted_rate < -1.5);
  // frozen profile: residuals fall from ~2.3e-1 to ~2.2e-3 over the window
  REQUIRE(scan.residuals.front() == Catch::Approx(0.2317).epsilon(0.05));
  REQUIRE(scan.residuals.back() == Catch::Approx(2.184e-3).epsilon(0.05));
}
