#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "gen.hpp"
#include "oracles.hpp"
#include "problems.hpp"
#include "weakkam/barrier.hpp"
#include "weakkam/error.hpp"
#include "weakkam/mather.hpp"
#include "weakkam/minplus.hpp"

using namespace weakkam;

namespace {

ActionKernel critical_kernel(const LagrangianSpec& spec, int n) {
  const ActionKernel base = fixture::default_kernel(spec, n, 0.0);
  return base.reshifted(-min_mean_cycle(base).mean);
}

BarrierMatrix barrier_of(const ActionKernel& k) {
  const std::size_t n0 = default_burn_in(k.grid());
  return peierls_barrier(k, n0, 2 * n0, 1e-9);
}

DenseMatrix permuted(const DenseMatrix& m, const std::vector<std::size_t>& p) {
  DenseMatrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) out(p[i], p[j]) = m(i, j);
  }
  return out;
}

}  // namespace

TEST_SUITE("kernel") {
  TEST_CASE("free particle self-edges cost nothing") {
    const ActionKernel k = fixture::kernel(fixture::free_particle(), 16, 3, 0.25, 0.0);
    for (NodeIndex x = 0; x < 16; ++x) CHECK(k.cost(x, k.stencil().zero_index) == 0.0);
  }

  TEST_CASE("pendulum at the critical level") {
    const ActionKernel k = fixture::kernel(fixture::pendulum(), 32, 5, 0.2, 1.0);
    CHECK(k.cost(0, k.stencil().zero_index) == doctest::Approx(0.0));
    for (double c : k.costs()) CHECK(c >= -1e-15);
  }

  TEST_CASE("edge costs are tau times the step quadrature plus shift") {
    const LagrangianSpec spec = fixture::pendulum();
    const ActionKernel left = fixture::kernel(spec, 20, 2, 0.1, 0.7, Quadrature::left);
    const ActionKernel trap = fixture::kernel(spec, 20, 2, 0.1, 0.7, Quadrature::trapezoid);
    const TorusGrid& g = left.grid();
    for (NodeIndex x = 0; x < 20; ++x) {
      for (std::size_t j = 0; j < left.edges_per_node(); ++j) {
        const Point v = left.stencil().velocity(g, j);
        const NodeIndex y = left.head(x, j);
        CHECK(y == g.shift(x, left.stencil().offsets[j]));
        const double lx = spec.lagrangian(g.coordinate(x), v);
        const double ly = spec.lagrangian(g.coordinate(y), v);
        CHECK(left.cost(x, j) == doctest::Approx(0.1 * (lx + 0.7)));
        CHECK(trap.cost(x, j) == doctest::Approx(0.1 * (0.5 * (lx + ly) + 0.7)));
        CHECK(left.tail_into(y, j) == x);
      }
    }
  }

  TEST_CASE("ambiguous wraps are rejected") {
    const TorusGrid g = fixture::line(8);
    CHECK_THROWS_AS(build_kernel(g, fixture::free_particle(), make_stencil(g, 0.1, 4), 0.0),
                    InvalidArgument);
  }

  TEST_CASE("search box violations surface") {
    const TorusGrid g = fixture::line(16);
    const LagrangianSpec spec = fixture::free_particle().with_search_box(1.0);
    CHECK_THROWS_AS(build_kernel(g, spec, make_stencil(g, 0.1, 3), 0.0), BoundViolation);
  }

  TEST_CASE("reshift changes only the shift") {
    const ActionKernel k = fixture::kernel(fixture::pendulum(), 16, 2, 0.25, 0.0);
    const ActionKernel r = k.reshifted(1.0);
    for (std::size_t e = 0; e < k.edge_count(); ++e) {
      CHECK(r.costs()[e] == doctest::Approx(k.costs()[e] + 0.25));
      CHECK(r.lagrangians()[e] == k.lagrangians()[e]);
    }
  }
}

TEST_SUITE("minplus") {
  TEST_CASE("one step is the kernel") {
    const ActionKernel k = fixture::kernel(fixture::pendulum(), 12, 2, 0.3, 1.0);
    CHECK(minplus_power(k, 1).values == kernel_matrix(k));
  }

  TEST_CASE("two free steps to the antipode") {
    const ActionKernel k = fixture::kernel(fixture::free_particle(), 4, 1, 1.0, 0.0);
    CHECK(minplus_power(k, 2)(0, 2) == doctest::Approx(0.0625));
    CHECK(oracle::enumerate_paths(k, 0, 2)[2] == doctest::Approx(0.0625));
  }

  TEST_CASE("identity is neutral") {
    const DenseMatrix a = kernel_matrix(fixture::kernel(fixture::pendulum(), 10, 2, 0.3, 1.0));
    CHECK(minplus_product(a, DenseMatrix::identity(10)) == a);
    CHECK(minplus_product(DenseMatrix::identity(10), a) == a);
  }

  TEST_CASE("products are associative") {
    gen::for_all(41, 10, [](gen::Rng& rng, int) {
      const int n = rng.integer(5, 20);
      const ActionKernel k =
          fixture::kernel(fixture::pendulum(rng.integer(1, 2)), n, rng.integer(1, (n - 1) / 2),
                          rng.real(0.05, 0.5), rng.real(0.5, 1.5));
      const DenseMatrix m = kernel_matrix(k);
      const DenseMatrix six = minplus_power(m, 6);
      CHECK(six == minplus_product(minplus_power(m, 2), minplus_power(m, 4)));
      CHECK(sup_difference(six, minplus_product(minplus_power(m, 4), minplus_power(m, 2))) <= 1e-12);
      // exact against brute force where ties cannot reorder sums
      const DenseMatrix two = minplus_product(m, m);
      CHECK(sup_difference(two, minplus_power(m, 2)) <= 1e-12);
    });
  }

  TEST_CASE("two-step action obeys the triangle inequality") {
    const ActionKernel k = fixture::kernel(fixture::pendulum(), 16, 3, 0.25, 1.0);
    const BarrierMatrix h1 = minplus_power(k, 1), h2 = minplus_power(k, 2);
    for (NodeIndex x = 0; x < 16; ++x)
      for (NodeIndex y = 0; y < 16; ++y)
        for (NodeIndex z = 0; z < 16; ++z) CHECK(h2(x, y) <= h1(x, z) + h1(z, y));
  }

  TEST_CASE("window power is the running minimum") {
    const DenseMatrix m = kernel_matrix(fixture::kernel(fixture::pendulum(), 9, 2, 0.3, 1.0));
    DenseMatrix expected = DenseMatrix::identity(9);
    for (std::size_t p = 1; p <= 5; ++p) expected = elementwise_min(expected, minplus_power(m, p));
    CHECK(sup_difference(minplus_window_power(m, 5), expected) <= 1e-12);
  }

  TEST_CASE("sup difference sees infinite mismatches") {
    DenseMatrix a(2, 0.0), b(2, 0.0);
    b(0, 1) = kInfinity;
    CHECK(sup_difference(a, b) == kInfinity);
    CHECK(sup_difference(b, b) == 0.0);
  }

  TEST_CASE("results are invariant under relabeling nodes") {
    gen::for_all(42, 5, [](gen::Rng& rng, int) {
      const int n = rng.integer(6, 12);
      const ActionKernel k = fixture::kernel(fixture::pendulum(), n, 2, 0.25, 1.0);
      std::vector<std::size_t> p(n);
      std::iota(p.begin(), p.end(), 0);
      for (std::size_t i = p.size() - 1; i > 0; --i) std::swap(p[i], p[rng.index(i + 1)]);
      const DenseMatrix m = kernel_matrix(k);
      CHECK(minplus_power(permuted(m, p), 7) == permuted(minplus_power(m, 7), p));
      BarrierMatrix h = peierls_barrier(k, 24, 48, 1e-9);
      BarrierMatrix hp = h;
      hp.values = permuted(h.values, p);
      std::vector<NodeIndex> mapped;
      for (NodeIndex y : aubry_set(h, 1e-8)) mapped.push_back(p[y]);
      std::sort(mapped.begin(), mapped.end());
      CHECK(aubry_set(hp, 1e-8) == mapped);
    });
  }
}

TEST_SUITE("barrier") {
  TEST_CASE("pendulum barrier against the Maupertuis oracle") {
    const ActionKernel k = critical_kernel(fixture::pendulum(), 64);
    const BarrierMatrix h = barrier_of(k);
    CHECK(h.stable);
    CHECK(std::abs(h(0, 0)) <= 1e-9);
    const auto V = oracle::cosine(1.0, 1);
    const double half = oracle::maupertuis_distance(V, 1.0, 0.0, 0.5);
    CHECK(half == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-10));
    CHECK(h(0, 32) == doctest::Approx(half).epsilon(0.05));
    CHECK(h(0, 16) == doctest::Approx(oracle::maupertuis_distance(V, 1.0, 0.0, 0.25)).epsilon(0.05));
  }

  TEST_CASE("Aubry sets") {
    CHECK(aubry_set(barrier_of(critical_kernel(fixture::pendulum(), 64)), 1e-8) ==
          std::vector<NodeIndex>{0});
    CHECK(aubry_set(barrier_of(critical_kernel(fixture::pendulum(2), 64)), 1e-8) ==
          std::vector<NodeIndex>{0, 32});
    const std::vector<NodeIndex> all = aubry_set(barrier_of(critical_kernel(fixture::free_particle(), 16)), 1e-8);
    CHECK(all.size() == 16);
  }

  TEST_CASE("empty Aubry set is an error") {
    const ActionKernel k = fixture::default_kernel(fixture::pendulum(), 32, 1.5);
    CHECK_THROWS_AS(aubry_set(barrier_of(k), 1e-8), EmptyAubrySet);
  }

  TEST_CASE("Mather classes") {
    const ActionKernel pk = critical_kernel(fixture::pendulum(), 64);
    const AubryReport pr = analyse_aubry(barrier_of(pk), pk, 1e-8, 0.0);
    CHECK(pr.classes == std::vector<std::vector<NodeIndex>>{{0}});

    const ActionKernel tk = critical_kernel(fixture::pendulum(2), 64);
    const BarrierMatrix th = barrier_of(tk);
    const AubryReport tr = analyse_aubry(th, tk, 1e-8, 0.0);
    CHECK(tr.classes == std::vector<std::vector<NodeIndex>>{{0}, {32}});
    const double delta_oracle = 2.0 * oracle::maupertuis_distance(oracle::cosine(1.0, 2), 1.0, 0.0, 0.5);
    CHECK(delta_oracle == doctest::Approx(4.0 / std::numbers::pi).epsilon(1e-10));
    CHECK(tr.delta(0, 1) == doctest::Approx(delta_oracle).epsilon(0.05));
    CHECK(tr.delta(0, 1) == tr.delta(1, 0));

    const ActionKernel fk = critical_kernel(fixture::free_particle(), 16);
    const AubryReport fr = analyse_aubry(barrier_of(fk), fk, 1e-8, 0.0);
    REQUIRE(fr.classes.size() == 1);
    CHECK(fr.classes[0].size() == 16);
  }

  TEST_CASE("subsolution verifier") {
    const ActionKernel k = critical_kernel(fixture::pendulum(), 64);
    const BarrierMatrix h = barrier_of(k);
    CHECK(verify_subsolution(std::vector<double>(64, 3.0), k) <= 0.0);
    std::vector<double> row(h.values.row(0).begin(), h.values.row(0).end());
    CHECK(verify_subsolution(row, k) <= 1e-9);
    for (double& v : row) v *= 2.0;
    CHECK(verify_subsolution(row, k) > 1e-3);
    CHECK_THROWS_AS(verify_subsolution(std::vector<double>(3), k), InvalidArgument);
  }

  TEST_CASE("barrier properties on small critical kernels") {
    gen::for_all(43, 4, [](gen::Rng& rng, int) {
      const int n = 2 * rng.integer(6, 16);
      const ActionKernel k = critical_kernel(fixture::pendulum(rng.integer(1, 2)), n);
      const BarrierMatrix h = barrier_of(k);
      CHECK(fixed_point_residual(h, k) <= 1e-9);
      double worst = 0.0;
      for (NodeIndex y = 0; y < h.size(); ++y) {
        CHECK(h(y, y) >= -1e-9);
        for (NodeIndex x = 0; x < h.size(); ++x)
          for (NodeIndex z = 0; z < h.size(); ++z) worst = std::max(worst, h(y, x) - h(y, z) - h(z, x));
      }
      CHECK(worst <= 1e-9);
      for (std::size_t t : {1u, 3u, 7u}) {
        const BarrierMatrix ht = minplus_power(k, t);
        double mixed = 0.0;
        for (NodeIndex y = 0; y < h.size(); ++y)
          for (NodeIndex x = 0; x < h.size(); ++x)
            for (NodeIndex z = 0; z < h.size(); ++z) mixed = std::max(mixed, h(y, x) - h(y, z) - ht(z, x));
        CHECK(mixed <= 1e-9);
      }
    });
  }

  TEST_CASE("reflection symmetry of the pendulum barrier") {
    const ActionKernel k = critical_kernel(fixture::pendulum(), 40);
    const BarrierMatrix h = barrier_of(k);
    auto mirror = [](NodeIndex i) { return (40 - i) % 40; };
    for (NodeIndex y = 0; y < 40; ++y)
      for (NodeIndex x = 0; x < 40; ++x) CHECK(std::abs(h(y, x) - h(mirror(y), mirror(x))) <= 1e-12);
  }

  TEST_CASE("window validation") {
    const ActionKernel k = fixture::kernel(fixture::free_particle(), 8, 1, 0.5, 0.0);
    CHECK_THROWS_AS(peierls_barrier(k, 0, 4, 1e-9), InvalidArgument);
    CHECK_THROWS_AS(peierls_barrier(k, 5, 4, 1e-9), InvalidArgument);
    CHECK(default_burn_in(fixture::line(50)) == 200);
  }
}
