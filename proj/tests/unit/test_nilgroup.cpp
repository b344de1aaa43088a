#include <doctest.h>

#include <cmath>
#include <random>

#include "conewave/nilgroup.hpp"

using namespace conewave;

namespace {

GroupPoint point(cplx z, double x) { return {CVec::Constant(1, z), Vec::Constant(1, x)}; }

GroupPoint random_point(const SiegelData& s, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  GroupPoint p{CVec(s.n), Vec(s.m)};
  for (int a = 0; a < s.n; ++a) p.zeta[a] = cplx(g(rng), g(rng));
  for (int k = 0; k < s.m; ++k) p.x[k] = g(rng);
  return p;
}

double dist(const GroupPoint& a, const GroupPoint& b) {
  return (a.zeta - b.zeta).norm() + (a.x - b.x).norm();
}

}  // namespace

TEST_CASE("heisenberg group law") {
  const SiegelData h = heisenberg_siegel();
  const GroupPoint g = multiply(h, point({1, 0}, 0), point({0, 1}, 0));
  CHECK(std::abs(g.zeta[0] - cplx(1, 1)) < 1e-15);
  CHECK(g.x[0] == doctest::Approx(-2.0));

  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const GroupPoint a = random_point(h, rng), b = random_point(h, rng), c = random_point(h, rng);
    CHECK(dist(multiply(h, a, group_identity(h)), a) < 1e-14);
    CHECK(dist(multiply(h, a, inverse(a)), group_identity(h)) < 1e-13);
    CHECK(dist(multiply(h, multiply(h, a, b), c), multiply(h, a, multiply(h, b, c))) < 1e-12);
    // dilations are automorphisms
    CHECK(dist(dilate(3.0, multiply(h, a, b)), multiply(h, dilate(3.0, a), dilate(3.0, b))) < 1e-12);
    CHECK(quasi_norm(dilate(4.0, a)) == doctest::Approx(4.0 * quasi_norm(a)));
    CHECK(quasi_distance(h, a, a) < 1e-12);
    // left invariance
    CHECK(quasi_distance(h, multiply(h, c, a), multiply(h, c, b)) == doctest::Approx(quasi_distance(h, a, b)));
  }
  const GroupPoint d = dilate(4.0, point({1, 2}, 3));
  CHECK(std::abs(d.zeta[0] - cplx(2, 4)) < 1e-15);
  CHECK(d.x[0] == doctest::Approx(12.0));
  CHECK_THROWS_AS(dilate(0.0, d), DomainError);
}

TEST_CASE("make_siegel validation") {
  const auto p1 = make_cone(ConeKind::product, 1);
  CHECK_THROWS_AS(make_siegel(p1, 1, {CVec::Zero(1)}), DomainError);
  CHECK_THROWS_AS(make_siegel(p1, 1, {CVec::Constant(1, cplx(-1, 0))}), DomainError);
  // non-hermitian off-diagonal pair
  std::vector<CVec> phi{CVec::Constant(1, 1.0), CVec::Constant(1, cplx(0.5, 0)), CVec::Constant(1, cplx(0.2, 0)),
                        CVec::Constant(1, 1.0)};
  CHECK_THROWS_AS(make_siegel(p1, 2, phi), DomainError);
  // rank-one form in n = 2 is degenerate
  std::vector<CVec> deg{CVec::Constant(1, 1.0), CVec::Constant(1, 1.0), CVec::Constant(1, 1.0),
                        CVec::Constant(1, 1.0)};
  CHECK_THROWS_AS(make_siegel(p1, 2, deg), DomainError);
}

TEST_CASE("derive_b") {
  CHECK(heisenberg_siegel().b[0] == doctest::Approx(-1.0));
  const auto p1 = make_cone(ConeKind::product, 1);
  CHECK(abelian_siegel(p1).b[0] == 0.0);
  CHECK(diagonal_siegel(p1, 2, Vec::Ones(1)).b[0] == doctest::Approx(-2.0));
  const auto p2 = make_cone(ConeKind::product, 2);
  Vec dir(2);
  dir << 1.0, 0.0;
  // E couples to the first factor only
  const PowerExponent b = diagonal_siegel(p2, 1, dir).b;
  CHECK(b[0] == doctest::Approx(-1.0));
  CHECK(b[1] == doctest::Approx(0.0));
  // equivariance for t = 2 on H^1: g = sqrt(2), |det_C g|^2 = 2
  const EquivariantSolution sol =
      solve_equivariance(p1, 1, heisenberg_siegel().phi, axis_dilation(p1, 0, 2.0));
  CHECK(std::norm(sol.g.determinant()) == doctest::Approx(2.0));
  CHECK(sol.residual < 1e-10);
}

TEST_CASE("bracket round trip and orientation") {
  const SiegelData h = heisenberg_siegel();
  const auto [bracket, j] = bracket_from_siegel(h);
  CHECK(bracket.dim_v == 2);
  CHECK((j * j + Mat::Identity(2, 2)).norm() < 1e-14);
  CHECK(check_admissible(bracket, j, h.cone, 16).admissible);
  CHECK_FALSE(check_admissible(bracket, -j, h.cone, 16).admissible);
  CHECK(orient_complex_structure(bracket, -j, h.cone).isApprox(j));
  const SiegelData back = phi_from_bracket(bracket, j, h.cone);
  CHECK(std::abs(back.phi[0][0] - h.phi[0][0]) < 1e-12);
  CHECK(back.b[0] == doctest::Approx(-1.0));

  Mat bad = Mat::Identity(2, 2);
  CHECK_THROWS_AS(check_admissible(bracket, bad, h.cone, 4), DomainError);
  LieBracket flat = bracket;
  for (Vec& v : flat.table) v.setZero();
  CHECK_THROWS_AS(phi_from_bracket(flat, j, h.cone), DomainError);
}

TEST_CASE("grid and integrate") {
  const Grid g = make_grid(0, 1, 1.0, {64, 32}, {2.0, 3.0});
  CHECK(g.size() == 64 * 32);
  CHECK(g.x_at(0)[0] == doctest::Approx(-2.0));
  CHECK(g.f_flat(g.f_multi(517)) == 517);
  GridFunction one(g);
  for (auto& v : one.values) v = 1.0;
  CHECK(integrate(g, one).real() == doctest::Approx(24.0));

  const double sigma = 0.7;
  const Grid gg = make_grid(0, 1, 1.0, {128, 128}, {8 * sigma, 8 * sigma});
  GridFunction gauss(gg);
  for (std::size_t i = 0; i < gg.f_size(); ++i) {
    const Vec x = gg.x_at(i);
    gauss.values[i] = std::exp(-x.squaredNorm() / (2 * sigma * sigma));
  }
  CHECK(std::abs(integrate(gg, gauss).real() / (2 * M_PI * sigma * sigma) - 1.0) < 1e-8);

  const Grid h = make_grid(1, 8, 2.0, {16}, {4.0});
  CHECK(h.size() == 64 * 16);
  const GroupPoint p = h.point(h.e_flat({3, 5}) * h.f_size() + 7);
  CHECK(p.zeta[0].real() == doctest::Approx(h.e_axes[0].coord(3)));
  CHECK(p.zeta[0].imag() == doctest::Approx(h.e_axes[1].coord(5)));
  CHECK(p.x[0] == doctest::Approx(h.f_axes[0].coord(7)));
}
