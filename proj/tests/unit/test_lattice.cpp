#include <doctest.h>

#include <cmath>
#include <random>

#include "conewave/lattice.hpp"
#include "conewave/spectral.hpp"

using namespace conewave;

TEST_CASE("build and verify lattices") {
  const auto p2 = make_cone(ConeKind::product, 2);
  const LatticeSpec spec = build_lattice(p2, 0.3, Region::annulus(0.5, 2.0, 0.6));
  const LatticeReport rep = verify_lattice(p2, spec);
  CHECK(rep.passed);
  CHECK(rep.separation_violations == 0);
  CHECK(rep.cover_violations == 0);
  CHECK(rep.min_separation >= 2.0 - 1e-9);
  CHECK(rep.max_cover_distance <= spec.R);
  for (std::size_t k = 0; k < spec.points.size(); ++k)
    CHECK((spec.transports[k].act_dual(p2.e_dual) - spec.points[k]).norm() < 1e-12);

  const auto l3 = make_cone(ConeKind::lorentz, 3);
  const LatticeSpec ls = build_lattice(l3, 0.3, Region::annulus(0.7, 1.4, 0.4));
  CHECK(verify_lattice(l3, ls).passed);

  SUBCASE("duplicated point") {
    LatticeSpec dup = spec;
    dup.points.push_back(dup.points.front());
    dup.transports.push_back(dup.transports.front());
    CHECK(verify_lattice(p2, dup).separation_violations >= 1);
  }
  SUBCASE("R below 1") {
    LatticeSpec thin = spec;
    thin.R = 0.9;
    CHECK(verify_lattice(p2, thin).cover_violations > 0);
  }
  SUBCASE("transported lattice stays verified") {
    std::mt19937_64 rng(6);
    const LatticeSpec moved = transform_lattice(spec, random_element(p2, rng, 0.8));
    const LatticeReport mr = verify_lattice(p2, moved);
    CHECK(mr.passed);
    CHECK(mr.max_overlap == rep.max_overlap);
    const LatticeSpec lmoved = transform_lattice(ls, random_element(l3, rng, 0.5));
    CHECK(verify_lattice(l3, lmoved).passed);
  }
}

TEST_CASE("lattice counting and overlap") {
  const auto p2 = make_cone(ConeKind::product, 2);
  const Region box = Region::log_box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0));
  const double n1 = static_cast<double>(build_lattice(p2, 0.2, box).points.size());
  const double n2 = static_cast<double>(build_lattice(p2, 0.1, box).points.size());
  // volume counting: about 2^dim more points
  CHECK(n2 / n1 > 2.5);
  CHECK(n2 / n1 < 6.0);

  const int o1 = verify_lattice(p2, build_lattice(p2, 0.3, Region::annulus(0.5, 2.0, 0.6))).max_overlap;
  const int o2 = verify_lattice(p2, build_lattice(p2, 0.3, Region::annulus(8.0, 32.0, 0.6))).max_overlap;
  CHECK(std::abs(o1 - o2) <= 1);
}

TEST_CASE("region validation") {
  const auto p2 = make_cone(ConeKind::product, 2);
  CHECK_THROWS_AS(build_lattice(p2, 0.3, Region::annulus(0.0, 2.0, 0.5)), DomainError);
  CHECK_THROWS_AS(build_lattice(make_cone(ConeKind::lorentz, 3), 0.3, Region::log_box(Vec::Zero(3), Vec::Ones(3))),
                  DomainError);
  CHECK_THROWS_AS(build_lattice(p2, -1.0, Region::annulus(1.0, 2.0, 0.5)), DomainError);
  CHECK_THROWS_AS(bump_mode_from_string("sideways"), DomainError);
  CHECK(bump_mode_from_string(to_string(BumpMode::partition_sq)) == BumpMode::partition_sq);
}

TEST_CASE("bump families") {
  CHECK(plateau_profile(0.1, 0.2, 0.5) == 1.0);
  CHECK(plateau_profile(0.5, 0.2, 0.5) == 0.0);
  CHECK(plateau_profile(0.35, 0.2, 0.5) == doctest::Approx(0.5));

  for (const auto& cone : {make_cone(ConeKind::product, 2), make_cone(ConeKind::lorentz, 3)}) {
    const Region region = Region::annulus(0.7, 1.4, 0.4);
    const LatticeSpec spec = build_lattice(cone, 0.3, region);
    const auto samples = dense_region_sample(cone, region, 0.05);
    REQUIRE(samples.size() > 20);
    for (BumpMode mode : {BumpMode::partition, BumpMode::partition_sq}) {
      for (TransportChoice tc : {TransportChoice::triangular, TransportChoice::quadratic}) {
        const BumpFamily bumps = build_bumps(cone, spec, mode, tc);
        double worst = 0.0;
        for (const Vec& l : samples) worst = std::max(worst, std::abs(bumps.sum(l) - 1.0));
        CHECK(worst < 1e-8);
      }
    }
    const BumpFamily cover = build_bumps(cone, spec, BumpMode::cover);
    for (std::size_t k = 0; k < spec.points.size(); ++k) CHECK(cover.raw(static_cast<int>(k), spec.points[k]) == 1.0);
    for (const Vec& l : samples) CHECK(cover.sum(l) >= 1.0);
  }

  const auto p1 = make_cone(ConeKind::product, 1);
  const Region tiny = Region::annulus(0.95, 1.05, 0.0);
  const LatticeSpec one = single_point_lattice(p1, Vec::Ones(1), 0.3, tiny);
  const BumpFamily b = build_bumps(p1, one, BumpMode::partition_sq);
  for (const Vec& l : dense_region_sample(p1, tiny, 0.01)) CHECK(b.value(0, l) == 1.0);
}

TEST_CASE("shell indices") {
  const auto p1 = make_cone(ConeKind::product, 1);
  const SiegelData a = abelian_siegel(p1);
  const LatticeSpec far = build_lattice(p1, 0.2, Region::annulus(8.0, 16.0, 0.0));
  CHECK(shell_indices(a, far, build_bumps(p1, far, BumpMode::cover), 1.01).empty());
  const LatticeSpec near = build_lattice(p1, 0.2, Region::annulus(0.5, 2.0, 0.0));
  const BumpFamily nb = build_bumps(p1, near, BumpMode::cover);
  const auto k4 = shell_indices(a, near, nb, 4.0);
  CHECK_FALSE(k4.empty());
  CHECK(k4.size() <= near.points.size());
  CHECK(shell_indices(a, near, nb, 1.5).size() <= k4.size());
  CHECK_THROWS_AS(shell_indices(a, near, nb, 1.0), DomainError);
}
