#include <doctest.h>

#include <cmath>
#include <random>

#include "conewave/cone.hpp"
#include "../support/oracles.hpp"

using namespace conewave;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::vector<ConeDescriptor> all_cones() {
  return {make_cone(ConeKind::product, 1), make_cone(ConeKind::product, 2), make_cone(ConeKind::lorentz, 3),
          make_cone(ConeKind::lorentz, 4)};
}

PowerExponent random_s(int r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Vec s(r);
  for (int j = 0; j < r; ++j) s[j] = u(rng);
  return PowerExponent(s);
}

}  // namespace

TEST_CASE("make_cone descriptors") {
  const auto p2 = make_cone(ConeKind::product, 2);
  CHECK(p2.rank == 2);
  CHECK(p2.d.s.isApprox(vec({-1, -1})));
  CHECK(p2.m_vec.isZero());
  CHECK(p2.m_dual_vec.isZero());
  CHECK(membership(p2, Side::primal, p2.e_primal));
  CHECK(membership(p2, Side::dual, p2.e_dual));

  const auto l3 = make_cone(ConeKind::lorentz, 3);
  CHECK(l3.rank == 2);
  // density Delta_2^{-3/2}
  CHECK(l3.d[0] == doctest::Approx(-1.5));
  CHECK(l3.d[1] == doctest::Approx(-1.5));
  CHECK(lorentz_delta2(vec({2, 1, 1})) == doctest::Approx(2.0));

  CHECK_THROWS_AS(make_cone(ConeKind::lorentz, 2), DomainError);
  CHECK_THROWS_AS(make_cone(ConeKind::product, 0), DomainError);
}

TEST_CASE("membership") {
  const auto l3 = make_cone(ConeKind::lorentz, 3);
  CHECK(membership(l3, Side::primal, vec({2, 1, 0})));
  CHECK_FALSE(membership(l3, Side::primal, vec({1, 1, 0})));
  CHECK_FALSE(membership(make_cone(ConeKind::product, 2), Side::dual, vec({1, -1})));
  CHECK_FALSE(membership(l3, Side::dual, vec({1, 0})));
}

TEST_CASE("delta_power values") {
  const auto p2 = make_cone(ConeKind::product, 2);
  CHECK(delta_power(p2, Side::primal, {1, 1}, vec({2, 3})) == doctest::Approx(6.0));
  const auto p1 = make_cone(ConeKind::product, 1);
  CHECK(delta_power(p1, Side::dual, {0.7}, vec({3.0})) == doctest::Approx(std::pow(3.0, 0.7)));
  const auto l3 = make_cone(ConeKind::lorentz, 3);
  // Delta_1^{s1-s2} Delta_2^{s2} at 2e: Delta_1 = 2, Delta_2 = 4
  CHECK(delta_power(l3, Side::primal, {0, 1}, vec({2, 0, 0})) == doctest::Approx(2.0));
  CHECK(delta_power(l3, Side::primal, {1, 1}, vec({2, 0, 0})) == doctest::Approx(4.0));
  for (const auto& cone : all_cones()) {
    std::mt19937_64 rng(3);
    const PowerExponent s = random_s(cone.rank, rng);
    CHECK(delta_power(cone, Side::primal, s, cone.e_primal) == doctest::Approx(1.0));
    CHECK(delta_power(cone, Side::dual, s, cone.e_dual) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(delta_power(l3, Side::primal, {1, 1}, vec({1, 2, 0})), DomainError);
}

TEST_CASE("character law and exponent additivity") {
  std::mt19937_64 rng(11);
  for (const auto& cone : all_cones()) {
    for (int trial = 0; trial < 20; ++trial) {
      const TriangularElement t1 = random_element(cone, rng, 0.7);
      const TriangularElement t2 = random_element(cone, rng, 0.7);
      const PowerExponent s = random_s(cone.rank, rng);
      const PowerExponent sp = random_s(cone.rank, rng);
      const double lhs = t1.compose(t2).character(s);
      CHECK(std::abs(lhs / (t1.character(s) * t2.character(s)) - 1.0) < 1e-10);
      // the characters of t are the minors of t.e
      const Vec x = t1.act_primal(cone.e_primal);
      CHECK(std::abs(delta_power(cone, Side::primal, s, x) / t1.character(s) - 1.0) < 1e-10);
      const double a = delta_power(cone, Side::primal, s + sp, x);
      CHECK(std::abs(a / (delta_power(cone, Side::primal, s, x) * delta_power(cone, Side::primal, sp, x)) - 1.0) <
            1e-10);
      // T+ maps the cone to itself
      CHECK(membership(cone, Side::primal, t1.act_primal(x)));
    }
  }
}

TEST_CASE("transport_solve") {
  const auto p2 = make_cone(ConeKind::product, 2);
  const TriangularElement t = transport_solve(p2, vec({2, 5}));
  CHECK(t.matrix.isApprox(vec({2, 5}).asDiagonal().toDenseMatrix()));
  CHECK(t.delta.isApprox(vec({2, 5})));

  std::mt19937_64 rng(5);
  for (const auto& cone : all_cones()) {
    CHECK(transport_solve(cone, cone.e_dual).matrix.isApprox(Mat::Identity(cone.dim, cone.dim), 1e-12));
    for (int trial = 0; trial < 20; ++trial) {
      const Vec lambda = random_element(cone, rng, 0.8).act_dual(cone.e_dual);
      const TriangularElement tk = transport_solve(cone, lambda);
      CHECK((tk.act_dual(cone.e_dual) - lambda).norm() < 1e-10 * lambda.norm());
      const PowerExponent s = random_s(cone.rank, rng);
      CHECK(std::abs(delta_power(cone, Side::dual, s, lambda) / tk.character(s) - 1.0) < 1e-10);
      const Vec x = random_element(cone, rng, 0.8).act_primal(cone.e_primal);
      CHECK((transport_solve_primal(cone, x).act_primal(cone.e_primal) - x).norm() < 1e-10 * x.norm());
    }
  }
  const auto l3 = make_cone(ConeKind::lorentz, 3);
  const TriangularElement dil = transport_solve(l3, vec({2, 0, 0}));
  CHECK(dil.matrix.isApprox(2.0 * Mat::Identity(3, 3)));
  CHECK(dil.character({1, 1}) == doctest::Approx(delta_power(l3, Side::dual, {1, 1}, vec({2, 0, 0}))));
}

TEST_CASE("transport coordinates round trip") {
  std::mt19937_64 rng(8);
  for (const auto& cone : all_cones()) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vec lambda = random_element(cone, rng, 0.8).act_dual(cone.e_dual);
      const Vec theta = transport_coordinates(cone, lambda);
      CHECK(theta.size() == transport_coordinate_count(cone));
      CHECK((from_transport_coordinates(cone, theta) - lambda).norm() < 1e-10 * lambda.norm());
    }
  }
}

TEST_CASE("invariant distance") {
  const auto p2 = make_cone(ConeKind::product, 2);
  CHECK(invariant_distance(p2, vec({1, 1}), vec({M_E, M_E * M_E})) == doctest::Approx(std::sqrt(5.0)));
  const auto l3 = make_cone(ConeKind::lorentz, 3);
  CHECK(invariant_distance(l3, vec({1, 0, 0}), vec({4, 0, 0})) ==
        doctest::Approx(invariant_distance(l3, vec({2, 0, 0}), vec({8, 0, 0}))));
  std::mt19937_64 rng(21);
  for (const auto& cone : all_cones()) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vec x = random_element(cone, rng, 0.8).act_dual(cone.e_dual);
      const Vec y = random_element(cone, rng, 0.8).act_dual(cone.e_dual);
      const Vec z = random_element(cone, rng, 0.8).act_dual(cone.e_dual);
      const TriangularElement t = random_element(cone, rng, 0.8);
      const double dxy = invariant_distance(cone, x, y);
      CHECK(invariant_distance(cone, x, x) < 1e-12);
      CHECK(std::abs(dxy - invariant_distance(cone, y, x)) < 1e-8);
      CHECK(dxy <= invariant_distance(cone, x, z) + invariant_distance(cone, z, y) + 1e-10);
      CHECK(std::abs(invariant_distance(cone, t.act_dual(x), t.act_dual(y)) - dxy) < 1e-8);
    }
  }
}

TEST_CASE("gamma_cone against Laplace quadrature") {
  const auto p2 = make_cone(ConeKind::product, 2);
  CHECK(gamma_cone(p2, {2, 3}) == doctest::Approx(2.0));
  CHECK(gamma_cone(make_cone(ConeKind::product, 1), {1}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(gamma_cone(p2, {0, 1}), DomainError);

  const auto l3 = make_cone(ConeKind::lorentz, 3);
  const PowerExponent s{1.3, 1.7};
  const double quad = oracle::laplace_quadrature(l3, s, l3.e_dual, l3.d);
  CHECK(std::abs(gamma_cone(l3, s) / quad - 1.0) < 1e-4);
  // away from e', through the transport
  const Vec lam = vec({2.0, 0.5, -0.7});
  const double q2 = oracle::laplace_quadrature(l3, s, lam, l3.d);
  CHECK(std::abs(gamma_cone(l3, s) * delta_power(l3, Side::dual, -s, lam) / q2 - 1.0) < 1e-4);
}

TEST_CASE("derive_d_vector") {
  CHECK(derive_d_vector(make_cone(ConeKind::product, 1)).s.isApprox(vec({-1})));
  CHECK(derive_d_vector(make_cone(ConeKind::product, 3)).s.isApprox(vec({-1, -1, -1})));
  const auto l3 = make_cone(ConeKind::lorentz, 3);
  const PowerExponent d = derive_d_vector(l3);
  // Delta^d = Delta_1^{d1-d2} Delta_2^{d2} = Delta_2^{-3/2}
  CHECK(d[0] - d[1] == doctest::Approx(0.0));
  CHECK(d[1] == doctest::Approx(-1.5));
  // consistency with the Gamma shifts
  for (int j = 0; j < 2; ++j) CHECK(d[j] == doctest::Approx(-(1.0 + 0.5 * l3.m_vec[j] + 0.5 * l3.m_dual_vec[j])));
  const auto l4 = make_cone(ConeKind::lorentz, 4);
  CHECK(derive_d_vector(l4)[1] == doctest::Approx(-2.0));
}

TEST_CASE("measure invariance by quadrature") {
  std::mt19937_64 rng(99);
  for (const auto& cone : {make_cone(ConeKind::product, 2), make_cone(ConeKind::lorentz, 3)}) {
    const PowerExponent s = cone.kind == ConeKind::product ? PowerExponent{1.2, 0.8} : PowerExponent{1.1, 1.4};
    const Vec lam = cone.e_dual;
    const double base = oracle::laplace_quadrature(cone, s, lam, cone.d);
    for (int trial = 0; trial < 3; ++trial) {
      const TriangularElement t = random_element(cone, rng, 0.4);
      // int f(t x) dnu(x) with f = e^{-<lam, .>} Delta^s
      const double moved = oracle::laplace_quadrature(cone, s, t.act_dual(lam), cone.d) * t.character(s);
      CHECK(std::abs(moved / base - 1.0) < 1e-6);
    }
  }
}
