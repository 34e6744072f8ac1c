#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gen.hpp"
#include "oracles.hpp"
#include "problems.hpp"
#include "weakkam/barrier.hpp"
#include "weakkam/error.hpp"
#include "weakkam/mather.hpp"
#include "weakkam/measure.hpp"

using namespace weakkam;

namespace {

struct Critical {
  ActionKernel kernel;
  BarrierMatrix h;
  double c;
};

Critical critical(const LagrangianSpec& spec, int n) {
  const ActionKernel base = fixture::default_kernel(spec, n, 0.0);
  const double c = -min_mean_cycle(base).mean;
  ActionKernel k = base.reshifted(c);
  const std::size_t n0 = default_burn_in(k.grid());
  BarrierMatrix h = peierls_barrier(k, n0, 2 * n0, 1e-9);
  return {std::move(k), std::move(h), c};
}

std::vector<NodeIndex> all_nodes(std::size_t n) {
  std::vector<NodeIndex> out(n);
  for (NodeIndex i = 0; i < n; ++i) out[i] = i;
  return out;
}

}  // namespace

TEST_SUITE("mather") {
  TEST_CASE("minimum mean cycles") {
    const ActionKernel f = fixture::kernel(fixture::free_particle(), 8, 2, 0.25, 0.0);
    const MeanCycle cf = min_mean_cycle(f);
    CHECK(cf.mean == doctest::Approx(0.0));
    CHECK(cf.nodes.size() == 1);

    const ActionKernel p = fixture::kernel(fixture::pendulum(), 16, 3, 0.25, 0.0);
    const MeanCycle cp = min_mean_cycle(p);
    CHECK(cp.mean == doctest::Approx(-1.0));
    CHECK(cp.nodes == std::vector<NodeIndex>{0});
    CHECK(cp.offsets == std::vector<std::size_t>{p.stencil().zero_index});
    CHECK(cp.karp_value == doctest::Approx(cp.mean).epsilon(1e-12));

    const ActionKernel t = fixture::kernel(LagrangianSpec::transport(1, {0.5, 0.0}), 8, 2, 0.25, 0.0);
    const MeanCycle ct = min_mean_cycle(t);
    CHECK(ct.mean == doctest::Approx(0.0));
    CHECK(ct.nodes.size() == 8);
    CHECK(closedness_residual(ct.measure(), t) <= 1e-15);
  }

  TEST_CASE("Karp against exhaustive simple-cycle enumeration") {
    gen::for_all(71, 15, [](gen::Rng& rng, int) {
      const LagrangianSpec spec =
          rng.integer(0, 1)
              ? LagrangianSpec::mechanical(1, Potential::cosine(rng.real(0.2, 2.0), rng.integer(1, 3)))
              : LagrangianSpec::transport(1, {rng.real(-1.0, 1.0), 0.0},
                                          Potential::cosine(rng.real(0.0, 1.0), 1));
      const ActionKernel k = fixture::kernel(spec, 8, 2, rng.real(0.1, 0.6), 0.0);
      const MeanCycle c = min_mean_cycle(k);
      CHECK(std::abs(c.mean - oracle::enumerate_min_mean_cycle(k)) <= 1e-12);
      CHECK(c.measure().mass() == doctest::Approx(1.0));
      CHECK(c.measure().action(k) == doctest::Approx(c.mean).epsilon(1e-12));
    });
  }

  TEST_CASE("Mather LP values") {
    const MatherSolveResult f =
        solve_mather_lp(fixture::kernel(fixture::free_particle(), 8, 2, 0.25, 0.0));
    CHECK(f.value == doctest::Approx(0.0));

    const ActionKernel pk = fixture::kernel(fixture::pendulum(), 16, 3, 0.25, 0.0);
    const MatherSolveResult p = solve_mather_lp(pk);
    CHECK(p.value == doctest::Approx(-1.0));
    CHECK(p.measure.support_nodes(pk) == std::vector<NodeIndex>{0});
    CHECK(p.conservation_residual <= 1e-9);

    const ActionKernel tk = fixture::kernel(fixture::pendulum(2), 16, 3, 0.25, 0.0);
    const MatherSolveResult t = solve_mather_lp(tk);
    CHECK(t.value == doctest::Approx(-1.0));
    const auto support = t.measure.support_nodes(tk);
    REQUIRE(support.size() == 1);
    CHECK((support[0] == 0 || support[0] == 8));
    CHECK(t.value == doctest::Approx(oracle::enumerate_min_mean_cycle(tk)).epsilon(1e-12));
  }

  TEST_CASE("LP agrees with Karp on random kernels") {
    gen::for_all(72, 10, [](gen::Rng& rng, int) {
      const int n = rng.integer(6, 24);
      const LagrangianSpec spec =
          rng.integer(0, 1)
              ? LagrangianSpec::mechanical(1, Potential::cosine(rng.real(0.2, 2.0), rng.integer(1, 3)))
              : LagrangianSpec::transport(1, {rng.real(-1.0, 1.0), 0.0},
                                          Potential::cosine(rng.real(0.0, 1.0), 1));
      const ActionKernel k = fixture::kernel(spec, n, rng.integer(1, (n - 1) / 2), rng.real(0.1, 0.6), 0.0);
      const MatherSolveResult r = solve_mather_lp(k);
      CHECK(std::abs(r.value - min_mean_cycle(k).mean) <= 1e-8);
      CHECK(r.conservation_residual <= 1e-9);
      CHECK(std::abs(r.measure.mass() - 1.0) <= 1e-9);
      for (const EdgeWeight& e : r.measure.entries) CHECK(e.weight >= 0.0);
    });
  }

  TEST_CASE("closedness of simple measures") {
    const ActionKernel k = fixture::kernel(fixture::free_particle(), 8, 2, 0.25, 0.0);
    OccupationMeasure single;
    single.entries.push_back({2, k.stencil().zero_index + 1, 1.0});
    CHECK(closedness_residual(single, k) == 1.0);
    OccupationMeasure loop;
    loop.entries.push_back({2, k.stencil().zero_index, 1.0});
    CHECK(closedness_residual(loop, k) == 0.0);
  }

  TEST_CASE("limit function on the free particle") {
    const Critical f = critical(fixture::free_particle(), 16);
    const LimitFunctionResult u = compute_u0(f.h, f.kernel, 0.0, 1e-6, all_nodes(16));
    for (double v : u.values) CHECK(std::abs(v) <= 1e-12);
    CHECK(u.method == "lp");
  }

  TEST_CASE("pendulum and two-well limit functions against quadrature") {
    const Critical p = critical(fixture::pendulum(), 64);
    const LimitFunctionResult u = compute_u0(p.h, p.kernel, p.c, 1e-6, {0, 16, 32});
    CHECK(std::abs(u.values[0]) <= 1e-9);
    CHECK(u.values[32] ==
          doctest::Approx(oracle::maupertuis_distance(oracle::cosine(1, 1), 1.0, 0.0, 0.5)).epsilon(0.05));
    CHECK(std::isnan(u.values[1]));

    const Critical t = critical(fixture::pendulum(2), 64);
    const LimitFunctionResult w = compute_u0(t.h, t.kernel, t.c, 1e-6, {16, 48});
    const double quarter = oracle::maupertuis_distance(oracle::cosine(1, 2), 1.0, 0.0, 0.25);
    CHECK(quarter == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-10));
    CHECK(w.values[16] == doctest::Approx(quarter).epsilon(0.05));
    CHECK(w.values[48] == doctest::Approx(quarter).epsilon(0.05));
  }

  TEST_CASE("band too narrow is infeasible") {
    const Critical p = critical(fixture::pendulum(), 32);
    CHECK_THROWS_AS(compute_u0(p.h, p.kernel, p.c + 0.1, 0.01, {0}), InfeasibleError);
    CHECK_THROWS_AS(compute_u0(p.h, p.kernel, p.c, 1e-6, {32}), InvalidArgument);
  }

  TEST_CASE("widening the band can only lower the limit function") {
    const Critical t = critical(fixture::pendulum(2), 32);
    const auto targets = all_nodes(32);
    const LimitFunctionResult narrow = compute_u0(t.h, t.kernel, t.c, 1e-6, targets);
    const LimitFunctionResult wide = compute_u0(t.h, t.kernel, t.c, 0.05, targets);
    for (NodeIndex x : targets) CHECK(wide.values[x] <= narrow.values[x] + 1e-9);
  }

  TEST_CASE("limit function is below the Mather average of the barrier") {
    const Critical t = critical(fixture::pendulum(2), 32);
    const MatherSolveResult m = solve_mather_lp(t.kernel);
    const LimitFunctionResult u = compute_u0(t.h, t.kernel, t.c, 1e-6, all_nodes(32));
    for (NodeIndex x = 0; x < 32; ++x) {
      double avg = 0.0;
      for (NodeIndex y = 0; y < 32; ++y) avg += m.projected[y] * t.h(y, x);
      CHECK(u.values[x] <= avg + 1e-9);
    }
    for (const OccupationMeasure& cert : u.certificates) {
      CHECK(closedness_residual(cert, t.kernel) <= 1e-9);
      CHECK(cert.action(t.kernel) <= -t.c + 1e-6 + 1e-9);
    }
  }

  TEST_CASE("mechanical shortcut") {
    const Critical p = critical(fixture::pendulum(), 64);
    const LimitFunctionResult s = u0_mechanical(p.h, p.kernel, fixture::pendulum(), p.c, 1e-6);
    CHECK(s.base_nodes == std::vector<NodeIndex>{0});
    for (NodeIndex x = 0; x < 64; ++x) CHECK(s.values[x] == p.h(0, x));

    const Critical t = critical(fixture::pendulum(2), 64);
    const LimitFunctionResult w = u0_mechanical(t.h, t.kernel, fixture::pendulum(2), t.c, 1e-6);
    CHECK(w.base_nodes == std::vector<NodeIndex>{0, 32});
    for (NodeIndex x = 0; x < 64; ++x) CHECK(w.values[x] == std::min(t.h(0, x), t.h(32, x)));

    const LimitFunctionResult lp = compute_u0(t.h, t.kernel, t.c, 1e-6, all_nodes(64));
    const double tol = lipschitz_quotient(t.kernel.grid(), w.values) / 64.0 + 1e-6 + 1e-9;
    CHECK(sup_distance(lp.values, w.values) <= tol);

    const LagrangianSpec tr = LagrangianSpec::transport(1, {0.5, 0.0});
    CHECK_THROWS_AS(u0_mechanical(t.h, t.kernel, tr, t.c, 1e-6), InvalidArgument);
    CHECK_THROWS_AS(u0_mechanical(p.h, p.kernel, fixture::pendulum(), p.c - 0.5, 1e-6),
                    InvalidArgument);
  }

  TEST_CASE("critical solutions agreeing on the Aubry set coincide") {
    const Critical t = critical(fixture::pendulum(2), 48);
    const std::vector<NodeIndex> aubry = aubry_set(t.h, 1e-8);
    REQUIRE(aubry.size() == 2);
    gen::for_all(73, 5, [&](gen::Rng& rng, int) {
      const double a = rng.real(0.0, 0.5), b = rng.real(0.0, 0.5);
      std::vector<double> w1(48), w2(48);
      for (NodeIndex x = 0; x < 48; ++x) w1[x] = std::min(t.h(aubry[0], x) + a, t.h(aubry[1], x) + b);
      // representation from the values on the Aubry set
      for (NodeIndex x = 0; x < 48; ++x) {
        w2[x] = oracle::kInf;
        for (NodeIndex y : aubry) w2[x] = std::min(w2[x], w1[y] + t.h(y, x));
      }
      for (NodeIndex y : aubry) CHECK(std::abs(w1[y] - w2[y]) <= 1e-9);
      CHECK(sup_distance(w1, w2) <= 1e-9);
    });
  }

  TEST_CASE("default band") {
    CHECK(default_eps_c(1.0, -1.0) == doctest::Approx(1e-6));
    CHECK(default_eps_c(1.01, -1.0) == doctest::Approx(0.1 + 1e-6));
  }
}
