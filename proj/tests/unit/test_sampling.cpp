#include <doctest.h>

#include <cmath>
#include <random>

#include "conewave/experiments.hpp"
#include "conewave/sampling.hpp"

using namespace conewave;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

GridFunction random_grid_function(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  GridFunction u(g);
  for (auto& v : u.values) v = cplx(n(rng), n(rng));
  return u;
}

}  // namespace

TEST_CASE("dimension and radius menu") {
  CHECK(homogeneous_dimension(heisenberg_siegel()) == 2);
  CHECK(homogeneous_dimension(abelian_siegel(make_cone(ConeKind::product, 2))) == 2);
  const auto r = radius_menu(1.0);
  REQUIRE(r.size() == 7);
  CHECK(r.front() == 0.125);
  CHECK(r.back() == 8.0);
}

TEST_CASE("group lattice separation and cover") {
  const SiegelData h = heisenberg_siegel();
  const Grid g = make_grid(1, 12, 1.5, {24}, {3.0});
  const double delta = 0.5;
  const GroupLattice lat = build_group_lattice(h, g, delta);
  REQUIRE(lat.points.size() > 1);
  for (std::size_t i = 0; i < lat.points.size(); ++i)
    for (std::size_t j = i + 1; j < lat.points.size(); ++j)
      CHECK(quasi_distance(h, lat.points[i], lat.points[j]) >= 2 * delta * (1 - 1e-12));
  for (std::size_t idx = 0; idx < g.size(); idx += 7) {
    double best = 1e300;
    for (const GroupPoint& p : lat.points) best = std::min(best, quasi_distance(h, p, g.point(idx)));
    CHECK(best < 2 * delta);
  }
  const SiegelData a = abelian_siegel(make_cone(ConeKind::product, 2));
  const Grid ga = make_grid(0, 1, 1.0, {32, 32}, {2.0, 2.0});
  const GroupLattice la = build_group_lattice(a, ga, 0.4);
  for (std::size_t i = 0; i < la.points.size(); ++i)
    for (std::size_t j = i + 1; j < la.points.size(); ++j)
      CHECK(quasi_distance(a, la.points[i], la.points[j]) >= 0.8 * (1 - 1e-12));
}

TEST_CASE("maximal function") {
  const SiegelData a = abelian_siegel(make_cone(ConeKind::product, 2));
  const Grid g = make_grid(0, 1, 1.0, {32, 32}, {4.0, 4.0});
  GridFunction c(g);
  for (auto& v : c.values) v = cplx(0.0, 2.5);
  for (double p : {0.5, 1.0, 2.0}) {
    const GridFunction m = maximal_function(a, c, p, radius_menu(0.5));
    for (const cplx& v : m.values) CHECK(v.real() == doctest::Approx(2.5));
  }
  std::mt19937_64 rng(3);
  const GridFunction u = random_grid_function(g, rng);
  double mx = 0.0;
  for (const cplx& v : u.values) mx = std::max(mx, std::abs(v));
  for (const cplx& v : maximal_function(a, u, kInf, radius_menu(0.5)).values) CHECK(v.real() == mx);

  // heisenberg: constant away from the E window edge
  const SiegelData h = heisenberg_siegel();
  const Grid gh = make_grid(1, 16, 4.0, {16}, {4.0});
  GridFunction ch(gh);
  for (auto& v : ch.values) v = 1.0;
  const GridFunction mh = maximal_function(h, ch, 1.0, {0.5, 0.7});
  const std::size_t centre = gh.e_flat({8, 8}) * gh.f_size() + 3;
  CHECK(mh.values[centre].real() == doctest::Approx(1.0));

  // L^q boundedness for p < q: the ratio stays bounded over random inputs
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const GridFunction w = random_grid_function(g, rng);
    worst = std::max(worst, lp_norm(maximal_function(a, w, 1.0, radius_menu(0.5)), 2.0) / lp_norm(w, 2.0));
  }
  CHECK(worst < 5.0);
  CHECK_THROWS_AS(maximal_function(a, c, 0.0, {1.0}), DomainError);
}

TEST_CASE("sample bounds") {
  const SiegelData a = abelian_siegel(make_cone(ConeKind::product, 1));
  const double delta = 0.5;
  const Grid g = make_grid(0, 1, 1.0, {1024}, {16.0});  // spacing 1/32 <= delta^2/4
  const SpectralContext ctx = make_context(a, g);
  std::mt19937_64 rng(10);
  const ScalarSymbol s = random_band_limited(ctx, Region::annulus(0.5, 2.0, 0.0), rng, 3, 0.2);
  const GridFunction u = synthesize(ctx, s);
  const GroupLattice lat = build_group_lattice(a, g, delta);
  for (double p : {0.5, 1.0, 2.0, kInf}) {
    const SampleBounds b = sample_bounds(a, u, lat, p);
    CHECK(b.lower <= b.upper);
    CHECK(b.true_norm == doctest::Approx(lp_norm(u, p)));
  }
  const SampleBounds z = sample_bounds(a, GridFunction(g), lat, 1.0);
  CHECK(z.upper == 0.0);
  CHECK(z.lower == 0.0);
  CHECK(z.true_norm == 0.0);
  CHECK_THROWS_AS(sample_bounds(a, u, build_group_lattice(a, g, 0.3), 1.0), DomainError);

  SUBCASE("dilation covariance") {
    const double rho = 4.0, p = 1.5;
    const Grid g2 = make_grid(0, 1, 1.0, {1024}, {16.0 * rho});
    const GridFunction u2(g2, u.values);  // u2(x) = u(x / rho)
    const SampleBounds b1 = sample_bounds(a, u, lat, p);
    const SampleBounds b2 = sample_bounds(a, u2, build_group_lattice(a, g2, delta * std::sqrt(rho)), p);
    const double f = std::pow(rho, 1.0 / p);
    CHECK(b2.upper == doctest::Approx(f * b1.upper).epsilon(1e-12));
    CHECK(b2.lower == doctest::Approx(f * b1.lower).epsilon(1e-12));
    CHECK(b2.true_norm == doctest::Approx(f * b1.true_norm).epsilon(1e-12));
  }
}

TEST_CASE("pointwise bound") {
  const SiegelData a = abelian_siegel(make_cone(ConeKind::product, 1));
  const Grid g = make_grid(0, 1, 1.0, {512}, {32.0});
  const SpectralContext ctx = make_context(a, g);
  std::mt19937_64 rng(2);
  const ScalarSymbol s = random_band_limited(ctx, Region::annulus(0.5, 2.0, 0.0), rng, 3, 0.2);
  const PointwiseReport same = pointwise_bound_check(ctx, s, 1.0, {0}, 1000, 7, true);
  CHECK(same.pairs == 1000);
  CHECK(std::isfinite(same.max_ratio));
  const PointwiseReport deriv = pointwise_bound_check(ctx, s, 1.0, {1}, 200, 7);
  CHECK(deriv.max_ratio > 0.0);
  CHECK(pointwise_bound_check(ctx, zero_symbol_like(s), 1.0, {0}, 10, 1).pairs == 0);
  CHECK_THROWS_AS(pointwise_bound_check(ctx, s, 1.0, {0, 0}, 10, 1), DomainError);
}

TEST_CASE("young checks") {
  CHECK_THROWS_AS(check_young_exponents(2.0, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(check_young_exponents(2.0, 2.0, 2.0), DomainError);
  CHECK_THROWS_AS(check_young_exponents(0.5, -1.0, 0.5), DomainError);
  CHECK_NOTHROW(check_young_exponents(0.5, 0.5, 0.5));
  CHECK_NOTHROW(check_young_exponents(1.0, 2.0, 2.0));

  const SiegelData a = abelian_siegel(make_cone(ConeKind::product, 1));
  const Grid g = make_grid(0, 1, 1.0, {512}, {32.0});
  const SpectralContext ctx = make_context(a, g);
  const auto bump = [&](double c) {
    return make_dual_symbol(a.cone, g, v1(0.1), v1(5.0),
                            [&](const Vec& l) { return cplx(cinf_bump(a.cone, v1(c), 0.1, l), 0.0); });
  };
  CHECK(young_check(ctx, bump(1.0), bump(2.0), 0.5, 0.5, 0.5).ratio == 0.0);
  CHECK(young_check(ctx, bump(1.0), bump(1.05), 0.5, 0.5, 0.5).ratio > 0.0);

  // p = 1 on the torus: |u * v|_1 <= |u|_1 |v|_1
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) {
    const GridFunction u = random_grid_function(g, rng), v = random_grid_function(g, rng);
    CHECK(young_check_grid(a, u, v, 1.0, 1.0, 1.0).ratio <= 1.0 + 1e-12);
  }
}
