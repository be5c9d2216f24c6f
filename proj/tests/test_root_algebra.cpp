#include <catch2/catch_amalgamated.hpp>

#include "ranklab/rng.hpp"
#include "ranklab/root_datum.hpp"

using namespace ranklab;

TEST_CASE("rho and root counts match the closed forms") {
  for (int d = 3; d <= 8; ++d) {
    RootDatum rd(d);
    REQUIRE(rd.num_positive() == d * (d - 1) / 2);
    REQUIRE(rd.weyl().size() == static_cast<size_t>([&] {
              size_t f = 1;
              for (int k = 2; k <= d; ++k) f *= k;
              return f;
            }()));
    // rho = ((d-1)/2, (d-3)/2, ..., -(d-1)/2); norm^2 = d(d^2-1)/12.
    REQUIRE(std::abs(rd.rho().sum()) < 1e-12);
    REQUIRE(rd.rho()(0) == Catch::Approx(0.5 * (d - 1)));
    REQUIRE(rd.rho_norm() == Catch::Approx(std::sqrt(d * (d * d - 1) / 12.0)).epsilon(1e-14));
    // rho pairs to 1 against every simple coroot.
    for (int i = 0; i < rd.rank(); ++i)
      REQUIRE(RootDatum::pair_coroot(rd.rho(), rd.simple_root(i)) == Catch::Approx(1.0));
  }
  REQUIRE_THROWS_AS(RootDatum(2), std::invalid_argument);
  REQUIRE_THROWS_AS(RootDatum(9), std::invalid_argument);
}

TEST_CASE("d=3 values frozen from hand computation") {
  RootDatum rd(3);
  Vec rho(3);
  rho << 1, 0, -1;
  REQUIRE((rd.rho() - rho).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(rd.rho_norm() == Catch::Approx(std::sqrt(2.0)));

  // beta_tilde(1, i*(1,0,-1)) = (1+1)(1+1)(1+2) = 12.
  Vec im(3);
  im << 1, 0, -1;
  auto l = SpectralParameter::tempered(im);
  REQUIRE(rd.plancherel_proxy(1.0, l) == Catch::Approx(12.0));
  // Vanishes at t=0 when some pairing does.
  Vec im2(3);
  im2 << 1, 1, -2;  // <lambda, alpha_1-coroot> = 0
  REQUIRE(rd.plancherel_proxy(0.0, SpectralParameter::tempered(im2)) == 0.0);
  REQUIRE_FALSE(rd.is_regular(SpectralParameter::tempered(im2)));
  REQUIRE(rd.is_regular(l));
}

TEST_CASE("Weyl action: orbit size, signature, invariance of the proxy") {
  for (int d : {3, 4, 5}) {
    RootDatum rd(d);
    // Signature is multiplicative: sgn(uv) = sgn(u)sgn(v) via composition.
    const auto& W = rd.weyl();
    std::mt19937_64 g = stream(7, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const auto& u = W[g() % W.size()];
      const auto& v = W[g() % W.size()];
      // compose: (uv)(x) = u(v(x)) -> perm_uv[i] = u.perm[v.perm[i]]
      WeylElement uv;
      uv.perm.resize(d);
      for (int i = 0; i < d; ++i) uv.perm[i] = u.perm[v.perm[i]];
      int sgn = 1;
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          if (uv.perm[i] > uv.perm[j]) sgn = -sgn;
      REQUIRE(sgn == u.signature * v.signature);
    }
    // W-invariance of the proxy and of regularity.
    Vec im = Vec::Zero(d);
    for (int i = 0; i < d; ++i) im(i) = 1.3 - 0.61 * i;
    im.array() -= im.mean();
    auto l = SpectralParameter::tempered(im);
    const double p0 = rd.plancherel_proxy(1.0, l);
    for (const auto& w : W) {
      REQUIRE(rd.plancherel_proxy(1.0, w.apply(l)) == Catch::Approx(p0).epsilon(1e-12));
    }
  }
}

TEST_CASE("growth bound for the proxy holds with constant 1") {
  // For random (lambda, mu, t), t in [1,10]:
  //   beta_tilde(1, t*lambda + mu) <= (1 + |lambda|_2)^{|Phi+|} * beta_tilde(t, mu).
  for (int d : {3, 4, 5}) {
    RootDatum rd(d);
    std::mt19937_64 g = stream(20240816, d);
    int checked = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      Vec a(d), b(d);
      for (int i = 0; i < d; ++i) {
        a(i) = 3.0 * (2.0 * uniform01(g) - 1.0);
        b(i) = 5.0 * (2.0 * uniform01(g) - 1.0);
      }
      a.array() -= a.mean();
      b.array() -= b.mean();
      const double t = 1.0 + 9.0 * uniform01(g);
      auto mu = SpectralParameter::tempered(b);
      auto shifted = SpectralParameter::tempered((t * a + b).eval());
      const double lhs = rd.plancherel_proxy(1.0, shifted);
      const double rhs =
          std::pow(1.0 + a.norm(), rd.num_positive()) * rd.plancherel_proxy(t, mu);
      REQUIRE(lhs <= rhs * (1.0 + 1e-12));
      ++checked;
    }
    REQUIRE(checked == 10000);
  }
}

TEST_CASE("jacobian: product and alternating forms agree; spot value") {
  // d=3 at X=(1,0,-1): sinh(1)^2 sinh(2) ~= 5.0090.
  RootDatum rd3(3);
  Vec x(3);
  x << 1, 0, -1;
  REQUIRE(rd3.jacobian(x) == Catch::Approx(5.0090).margin(1e-3));
  for (int d : {3, 4, 5}) {
    RootDatum rd(d);
    std::mt19937_64 g = stream(99, d);
    for (int trial = 0; trial < 200; ++trial) {
      Vec y(d);
      for (int i = 0; i < d; ++i) y(i) = 2.0 * uniform01(g);
      y.array() -= y.mean();
      std::sort(y.data(), y.data() + d, std::greater<double>());
      const double a = rd.jacobian(y), b = rd.jacobian_alternating(y);
      REQUIRE(b == Catch::Approx(a).epsilon(1e-9).margin(1e-12));
    }
  }
}

TEST_CASE("chamber vector validation") {
  Vec bad(3);
  bad << 1, 0, -0.5;
  REQUIRE_THROWS_AS(ChamberVector(bad), std::invalid_argument);
  Vec ok(3);
  ok << 1, 0, -1;
  REQUIRE(ChamberVector(ok).in_chamber());
  REQUIRE(ChamberVector(ok).linf() == 1.0);
}

TEST_CASE("permutohedron membership by majorization") {
  RootDatum rd(4);
  const Vec rho = rd.rho();  // (1.5, .5, -.5, -1.5)
  REQUIRE(in_permutohedron(0.5 * rho, rho));
  REQUIRE(in_permutohedron(Vec::Zero(4), rho));
  Vec outside(4);
  outside << 2, 0, 0, -2;
  REQUIRE_FALSE(in_permutohedron(outside, rho));
}
