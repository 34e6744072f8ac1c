#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gen.hpp"
#include "oracles.hpp"
#include "problems.hpp"
#include "weakkam/bounds.hpp"
#include "weakkam/error.hpp"
#include "weakkam/lagrangian.hpp"

using namespace weakkam;

namespace {

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> out;
  const int count = static_cast<int>(std::round((hi - lo) / step));
  for (int i = 0; i <= count; ++i) out.push_back(lo + i * step);
  return out;
}

}  // namespace

TEST_SUITE("lagrangian") {
  TEST_CASE("quadratic Hamiltonian is self-conjugate") {
    const auto p = range(-5.0, 5.0, 0.01);
    std::vector<double> h;
    for (double q : p) h.push_back(0.5 * q * q);
    const std::vector<double> v{1.0};
    CHECK(legendre_transform(h, p, v)[0] == doctest::Approx(0.5).epsilon(1e-3));
  }

  TEST_CASE("constant shift negates") {
    const auto p = range(-5.0, 5.0, 0.01);
    std::vector<double> h;
    for (double q : p) h.push_back(0.5 * q * q + 1.0);
    const std::vector<double> v{0.0};
    CHECK(legendre_transform(h, p, v)[0] == doctest::Approx(-1.0).epsilon(1e-3));
  }

  TEST_CASE("narrow momentum grid is flagged as truncated") {
    const auto p = range(-1.0, 1.0, 0.01);
    std::vector<double> h;
    for (double q : p) h.push_back(0.5 * q * q);
    const std::vector<double> v{0.5, 3.0};
    CHECK_THROWS_AS(legendre_transform(h, p, v), TruncationError);
    std::vector<Point> pg, vg{{0.5, 0.0}, {3.0, 0.0}};
    for (double q : p) pg.push_back({q, 0.0});
    const LegendreResult r = legendre_transform_report(h, pg, vg, 1);
    REQUIRE(r.truncated.size() == 1);
    CHECK(r.truncated[0] == 1);
  }

  TEST_CASE("closed-form families") {
    const LagrangianSpec pend = fixture::pendulum();
    CHECK(pend.lagrangian({0.0, 0.0}, {0.0, 0.0}) == doctest::Approx(-1.0));
    CHECK(pend.lagrangian({0.5, 0.0}, {2.0, 0.0}) == doctest::Approx(3.0));
    const LagrangianSpec tr = LagrangianSpec::transport(1, {1.0, 0.0});
    CHECK(tr.lagrangian({0.3, 0.0}, {1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(tr.hamiltonian({0.3, 0.0}, {2.0, 0.0}) == doctest::Approx(4.0));
  }

  TEST_CASE("search box is enforced") {
    const LagrangianSpec s = fixture::pendulum().with_search_box(2.0);
    CHECK(eval_lagrangian(s, {0.5, 0.0}, {2.0, 0.0}) == doctest::Approx(3.0));
    CHECK_THROWS_AS(eval_lagrangian(s, {0.0, 0.0}, {2.5, 0.0}), BoundViolation);
  }

  TEST_CASE("tabulated family matches the mechanical one") {
    const Potential v = Potential::cosine(1.0, 1);
    const LagrangianSpec mech = LagrangianSpec::mechanical(1, v);
    const LagrangianSpec tab = LagrangianSpec::tabulated(1, v).with_momentum_box(6.0);
    for (double x : {0.0, 0.1, 0.37, 0.5}) {
      for (double vel : {-3.0, -1.2, 0.0, 0.4, 2.5}) {
        CHECK(tab.lagrangian({x, 0.0}, {vel, 0.0}) ==
              doctest::Approx(mech.lagrangian({x, 0.0}, {vel, 0.0})).epsilon(1e-5));
      }
    }
    CHECK_THROWS_AS(LagrangianSpec::tabulated(1, v).lagrangian({0.0, 0.0}, {0.0, 0.0}),
                    InvalidArgument);
  }

  TEST_CASE("tabulated potential interpolates node values") {
    const TorusGrid g = fixture::line(4);
    const Potential p = Potential::table(g, {0.0, 1.0, 2.0, 1.0});
    CHECK(p({0.25, 0.0}, 1) == doctest::Approx(1.0));
    CHECK(p({0.375, 0.0}, 1) == doctest::Approx(1.5));
    CHECK(p({0.875, 0.0}, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(Potential::table(g, {0.0, 1.0}), InvalidArgument);
  }

  TEST_CASE("transform is convex along the velocity line") {
    gen::for_all(21, 10, [](gen::Rng& rng, int) {
      const double a = rng.real(0.2, 3.0), b = rng.real(-1.0, 1.0), c = rng.real(-2.0, 2.0);
      const auto p = range(-8.0, 8.0, 0.02);
      std::vector<double> h;
      for (double q : p) h.push_back(0.5 * a * q * q + b * q + std::abs(q) * 0.1 * c * c);
      const auto v = range(-2.0, 2.0, 0.05);
      const std::vector<double> l = legendre_transform(h, p, v);
      for (std::size_t i = 1; i + 1 < l.size(); ++i) {
        CHECK(l[i - 1] - 2.0 * l[i] + l[i + 1] >= -1e-9);
      }
    });
  }

  TEST_CASE("Fenchel inequality on sampled triples") {
    gen::for_all(22, 200, [](gen::Rng& rng, int) {
      const Potential pot = Potential::cosine(rng.real(0.1, 2.0), rng.integer(1, 3));
      const LagrangianSpec spec =
          rng.integer(0, 1) ? LagrangianSpec::mechanical(2, pot)
                            : LagrangianSpec::transport(2, {rng.real(-1, 1), rng.real(-1, 1)}, pot);
      const Point x{rng.real(0, 1), rng.real(0, 1)};
      const Point v{rng.real(-4, 4), rng.real(-4, 4)};
      const Point p{rng.real(-4, 4), rng.real(-4, 4)};
      CHECK(spec.lagrangian(x, v) + spec.hamiltonian(x, p) >= p[0] * v[0] + p[1] * v[1] - 1e-9);
    });
  }

  TEST_CASE("mechanical minimum sits at zero velocity") {
    gen::for_all(23, 50, [](gen::Rng& rng, int) {
      const Potential pot = Potential::cosine(rng.real(0.1, 2.0), rng.integer(1, 3));
      const LagrangianSpec spec = LagrangianSpec::mechanical(1, pot);
      const Point x{rng.real(0, 1), 0.0};
      const double at_zero = spec.lagrangian(x, {0.0, 0.0});
      CHECK(at_zero == -pot(x, 1));
      const double v = rng.real(-3, 3);
      CHECK(spec.lagrangian(x, {v, 0.0}) >= at_zero);
    });
  }
}

TEST_SUITE("bounds") {
  TEST_CASE("free particle kappa is the square root of 2c") {
    const StabilityBounds b = stability_bounds(fixture::free_particle(), 2.0, fixture::line(16));
    CHECK(b.kappa == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(b.alpha > 0.0);
    CHECK(b.v_search == doctest::Approx(2.0 * b.alpha));
  }

  TEST_CASE("pendulum kappa against dense sampling") {
    const double oracle_kappa = oracle::kappa_sampled(oracle::cosine(1.0, 1), 1.0);
    CHECK(oracle_kappa == doctest::Approx(2.0).epsilon(1e-6));
    const StabilityBounds b = stability_bounds(fixture::pendulum(), 1.0, fixture::line(200));
    CHECK(b.kappa == doctest::Approx(oracle_kappa).epsilon(1e-4));
  }

  TEST_CASE("empty sublevel") {
    CHECK_THROWS_AS(stability_bounds(fixture::free_particle(), -1.0, fixture::line(16)),
                    NoSublevel);
  }

  TEST_CASE("bounds are ordered") {
    gen::for_all(31, 10, [](gen::Rng& rng, int) {
      const LagrangianSpec spec =
          LagrangianSpec::mechanical(1, Potential::cosine(rng.real(0.1, 2.0), rng.integer(1, 3)));
      const TorusGrid g = fixture::line(rng.integer(8, 64));
      const double c = critical_value_upper_bound(spec, g) + rng.real(0.0, 1.0);
      const StabilityBounds b = stability_bounds(spec, c, g);
      CHECK(b.kappa >= 0.0);
      CHECK(b.alpha > 0.0);
      CHECK(b.alpha >= b.A_kappa);
      CHECK(b.C0 >= 0.0);
    });
  }

  TEST_CASE("upper bound of the critical value") {
    CHECK(critical_value_upper_bound(fixture::pendulum(), fixture::line(200)) ==
          doctest::Approx(1.0));
    CHECK(critical_value_upper_bound(fixture::free_particle(), fixture::line(8)) == 0.0);
  }

  TEST_CASE("default stencil") {
    const TorusGrid g = fixture::line(200);
    const VelocityStencil s = default_stencil(g, 7.5);
    CHECK(s.tau == doctest::Approx(std::sqrt(1.0 / 200)));
    CHECK(s.radius == 99);
    CHECK(s.radius_capped);
    CHECK(s.size() == 199);
    CHECK(s.offsets[s.zero_index] == Offset{0, 0});

    const TorusGrid fine = fixture::line(64);
    const VelocityStencil t = default_stencil(fine, 1.0);
    CHECK_FALSE(t.radius_capped);
    CHECK(t.radius == static_cast<int>(std::ceil(1.0 * t.tau * 64)));
    CHECK(t.max_speed(fine) >= 1.0);
    CHECK_THROWS_AS(default_stencil(fine, 0.0), InvalidArgument);
  }

  TEST_CASE("stencils are symmetric and contain zero") {
    gen::for_all(32, 20, [](gen::Rng& rng, int) {
      const int dim = rng.integer(1, 2);
      std::vector<int> sizes{rng.integer(8, 40)};
      if (dim == 2) sizes.push_back(rng.integer(8, 40));
      const TorusGrid g = TorusGrid::build(dim, sizes);
      const VelocityStencil s = make_stencil(g, rng.real(0.05, 0.5), rng.integer(0, 3));
      CHECK(s.offsets[s.zero_index] == Offset{0, 0});
      for (const Offset& k : s.offsets) {
        bool mirrored = false;
        for (const Offset& m : s.offsets) mirrored |= (m[0] == -k[0] && m[1] == -k[1]);
        CHECK(mirrored);
      }
      const std::size_t side = 2 * s.radius + 1;
      CHECK(s.size() == (dim == 1 ? side : side * side));
    });
  }
}
