#include <doctest.h>

#include <cmath>
#include <random>

#include "conewave/besov.hpp"
#include "conewave/experiments.hpp"

using namespace conewave;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

struct R1 {
  SiegelData siegel = abelian_siegel(make_cone(ConeKind::product, 1));
  Grid grid;
  SpectralContext ctx;
  explicit R1(int n = 512, double L = 64.0) : grid(make_grid(0, 1, 1.0, {n}, {L})), ctx(make_context(siegel, grid)) {}
};

ScalarSymbol bump_symbol(const R1& r, double centre, double radius) {
  return make_dual_symbol(r.siegel.cone, r.grid, v1(centre * std::exp(-radius)), v1(centre * std::exp(radius)),
                          [&](const Vec& l) { return cplx(cinf_bump(r.siegel.cone, v1(centre), radius, l), 0.0); });
}

}  // namespace

TEST_CASE("lp and lq norms") {
  const Grid g = make_grid(0, 1, 1.0, {64}, {2.0});
  GridFunction box(g);
  // [0, 1) has unit length: 16 cells of width 1/16
  for (std::size_t i = 0; i < g.f_size(); ++i) {
    const double x = g.x_at(i)[0];
    box.values[i] = (x >= 0.0 && x < 1.0 - 1e-12) ? 1.0 : 0.0;
  }
  for (double p : {0.5, 1.0, 2.0, 3.0}) CHECK(lp_norm(box, p) == doctest::Approx(1.0));
  box.values[3] = cplx(0.0, -7.0);
  CHECK(lp_norm(box, kInf) == 7.0);
  CHECK_THROWS_AS(lp_norm(box, 0.0), DomainError);

  const std::vector<double> seq{3.0, 4.0};
  CHECK(lq_norm(seq, 2.0) == doctest::Approx(5.0));
  CHECK(lq_norm(seq, kInf) == 4.0);
  CHECK(lq_norm(seq, 1.0) >= lq_norm(seq, 2.0));
  CHECK(lq_norm(seq, 0.5) >= lq_norm(seq, 1.0));

  // p-th power subadditivity for p < 1, triangle inequality for p >= 1
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n;
  for (int t = 0; t < 20; ++t) {
    GridFunction u(g), v(g), w(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      u.values[i] = cplx(n(rng), n(rng));
      v.values[i] = cplx(n(rng), n(rng)) * (i % 3 == 0 ? 5.0 : 0.0);
      w.values[i] = u.values[i] + v.values[i];
    }
    for (double p : {0.3, 0.5, 0.9})
      CHECK(std::pow(lp_norm(w, p), p) <= std::pow(lp_norm(u, p), p) + std::pow(lp_norm(v, p), p) + 1e-12);
    for (double p : {1.0, 2.0, 4.0, kInf}) CHECK(lp_norm(w, p) <= lp_norm(u, p) + lp_norm(v, p) + 1e-12);
  }
}

TEST_CASE("dyadic partition of unity") {
  CHECK(dyadic_eta(1.0) == 1.0);
  CHECK(dyadic_eta(0.75) == doctest::Approx(1.0));
  CHECK(dyadic_eta(0.5) == 0.0);
  CHECK(dyadic_eta(3.0) == 0.0);
  for (double x = 0.01; x < 100.0; x *= 1.07) {
    double acc = 0.0;
    for (int j = -10; j <= 10; ++j) acc += dyadic_eta(std::pow(4.0, -j) * x);
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("analytic norm: zero, single term, q monotonicity") {
  R1 r;
  const ConeDescriptor& cone = r.siegel.cone;
  const LatticeSpec spec = build_lattice(cone, 0.2, Region::annulus(0.5, 2.0, 0.0));
  const BumpFamily cover = build_bumps(cone, spec, BumpMode::cover);
  const BesovParams params{PowerExponent{0.7}, 1.5, 2.0};
  const ScalarSymbol zero = zero_symbol_like(bump_symbol(r, 1.0, 0.1));
  CHECK(besov_analytic(r.ctx, zero, params, cover) == 0.0);

  // support inside the plateau of the lattice point nearest to it and no other bump
  const Vec lk = spec.points[0];
  const ScalarSymbol single = bump_symbol(r, lk[0], 0.05);
  const NormReport rep = besov_analytic_report(r.ctx, single, params, cover);
  double expect = 0.0;
  for (const IndexTerm& t : rep.per_index) {
    CHECK(t.weight == doctest::Approx(std::pow(t.lambda_k[0], 0.7)));
    if ((t.lambda_k - lk).norm() < 1e-14) expect = t.weight * lp_norm(synthesize(r.ctx, single), 1.5);
  }
  if (rep.per_index.size() == 1) CHECK(rep.total == doctest::Approx(expect).epsilon(1e-12));

  std::mt19937_64 rng(1);
  const ScalarSymbol s = random_band_limited(r.ctx, Region::annulus(0.6, 1.7, 0.0), rng, 4, 0.1);
  double prev = kInf;
  for (double q : {0.5, 1.0, 2.0, kInf}) {
    const double v = besov_analytic(r.ctx, s, BesovParams{PowerExponent{0.0}, 2.0, q}, cover);
    CHECK(v <= prev * (1.0 + 1e-12));
    prev = v;
  }
  CHECK_THROWS_AS(besov_analytic(r.ctx, bump_symbol(r, 8.0, 0.1), params, cover), DomainError);
}

TEST_CASE("dilation covariance in rank one") {
  const double L = 64.0, s = 0.6, p = 1.5;
  R1 a(512, L), b(512, L / 2);
  const ConeDescriptor& cone = a.siegel.cone;
  const LatticeSpec spec = build_lattice(cone, 0.2, Region::annulus(0.5, 2.0, 0.0));
  const LatticeSpec spec2 = transform_lattice(spec, product_element(v1(2.0)));
  std::mt19937_64 rng(3);
  const ScalarSymbol sig = random_band_limited(a.ctx, Region::annulus(0.6, 1.7, 0.0), rng, 3, 0.15);
  // sigma2(lambda) = sigma(lambda / 2) on the lattice of step 2 pi / L
  ScalarSymbol sig2 = sig;
  sig2.axes[0].start *= 2.0;
  sig2.axes[0].step *= 2.0;
  CHECK(sig2.axes[0].step == doctest::Approx(M_PI / (L / 2)));
  const BesovParams params{PowerExponent{s}, p, 2.0};
  const double n1 = besov_analytic(a.ctx, sig, params, build_bumps(cone, spec, BumpMode::partition_sq));
  const double n2 = besov_analytic(b.ctx, sig2, params, build_bumps(cone, spec2, BumpMode::partition_sq));
  CHECK(n2 / n1 == doctest::Approx(std::pow(2.0, s + 1.0 - 1.0 / p)).epsilon(1e-9));
}

TEST_CASE("classical norm") {
  R1 r;
  // N = lambda^2 inside N(e) [3/4, 2]: only j = 0 contributes with multiplier 1
  const ScalarSymbol s = bump_symbol(r, 1.1, 0.15);
  const ClassicalReport rep = besov_classical_report(r.ctx, s, ClassicalParams{0.8, 1.0, 2.0});
  REQUIRE(rep.per_scale.size() == 1);
  CHECK(rep.per_scale[0].j == 0);
  CHECK(rep.total == doctest::Approx(lp_norm(synthesize(r.ctx, s), 1.0)).epsilon(1e-12));
  CHECK(besov_classical(r.ctx, zero_symbol_like(s), ClassicalParams{0.8, 1.0, 2.0}) == 0.0);
  // symbol and grid paths agree
  std::mt19937_64 rng(5);
  const ScalarSymbol w = random_band_limited(r.ctx, Region::annulus(0.4, 6.0, 0.0), rng, 5, 0.2);
  const ClassicalParams cp{0.5, 2.0, 1.0};
  CHECK(besov_classical(r.ctx, synthesize(r.ctx, w), cp) ==
        doctest::Approx(besov_classical(r.ctx, w, cp)).epsilon(1e-9));
  CHECK_THROWS_AS(besov_classical(r.ctx, w, ClassicalParams{0.0, -1.0, 2.0}), DomainError);
}

TEST_CASE("duality pairing") {
  R1 r;
  const ConeDescriptor& cone = r.siegel.cone;
  const LatticeSpec spec = build_lattice(cone, 0.2, Region::annulus(0.5, 2.0, 0.0));
  const BumpFamily sq = build_bumps(cone, spec, BumpMode::partition_sq);
  std::mt19937_64 rng(8);
  const ScalarSymbol u = random_band_limited(r.ctx, Region::annulus(0.6, 1.7, 0.0), rng, 3, 0.1);
  // sum_k |phi_k|^2 = 1 and Plancherel
  const double l2 = lp_norm(synthesize(r.ctx, u), 2.0);
  CHECK(duality_pairing(r.ctx, u, u, sq).real() == doctest::Approx(l2 * l2).epsilon(1e-10));
  // disjoint spectra: lambda < 1 against lambda > 1.2
  const ScalarSymbol a = map_symbol(cone, u, [](const Vec& l, cplx v) { return l[0] < 1.0 ? v : cplx(0.0, 0.0); });
  const ScalarSymbol b = map_symbol(cone, u, [](const Vec& l, cplx v) { return l[0] > 1.2 ? v : cplx(0.0, 0.0); });
  CHECK(std::abs(duality_pairing(r.ctx, a, b, sq)) < 1e-12 * l2 * l2);
  CHECK_THROWS_AS(duality_pairing(r.ctx, u, u, build_bumps(cone, spec, BumpMode::cover)), DomainError);
}

TEST_CASE("embedding relation") {
  R1 r;
  const ConeDescriptor& cone = r.siegel.cone;
  CHECK(embedding_shift(r.siegel, 1.0, 2.0)[0] == doctest::Approx(-0.5));
  CHECK(embedding_shift(heisenberg_siegel(), 1.0, 2.0)[0] == doctest::Approx(-1.0));
  const LatticeSpec spec = build_lattice(cone, 0.2, Region::annulus(0.5, 2.0, 0.0));
  const BumpFamily bumps = build_bumps(cone, spec, BumpMode::partition);
  std::mt19937_64 rng(4);
  const ScalarSymbol u = random_band_limited(r.ctx, Region::annulus(0.6, 1.7, 0.0), rng, 3, 0.1);
  const BesovParams p1{PowerExponent{0.3}, 1.0, 2.0};
  CHECK(embedding_ratio(r.ctx, u, p1, p1, bumps).ratio == doctest::Approx(1.0));
  const BesovParams p2{PowerExponent{0.3 - 0.5}, 2.0, 2.0};
  const EmbeddingReport e = embedding_ratio(r.ctx, u, p1, p2, bumps);
  CHECK(e.ratio > 0.0);
  CHECK(e.ratio == doctest::Approx(e.norm_high / e.norm_low));
  CHECK_THROWS_AS(embedding_ratio(r.ctx, u, p1, BesovParams{PowerExponent{0.3}, 2.0, 2.0}, bumps), DomainError);
  CHECK_THROWS_AS(embedding_ratio(r.ctx, u, p2, p1, bumps), DomainError);
}

TEST_CASE("riemann-liouville lifting on the weighted sequence") {
  R1 r;
  const ConeDescriptor& cone = r.siegel.cone;
  const LatticeSpec spec = build_lattice(cone, 0.2, Region::annulus(0.5, 2.0, 0.0));
  const BumpFamily cover = build_bumps(cone, spec, BumpMode::cover);
  const PowerExponent s{0.4}, sp{0.9};
  const double radius = 0.05;
  const ScalarSymbol single = bump_symbol(r, spec.points[1][0], radius);
  const ScalarSymbol lifted = riemann_liouville(cone, single, sp);
  // p = 2: Plancherel makes each term an exact weighted symbol integral
  const NormReport rep = besov_analytic_report(r.ctx, lifted, BesovParams{s, 2.0, 2.0}, cover);
  for (const IndexTerm& t : rep.per_index) {
    double acc = 0.0;
    for (std::size_t i = 0; i < single.size(); ++i) {
      if (single.values[i] == cplx(0.0, 0.0)) continue;
      const Vec l = single.lambda_at(i);
      const double phi = cover.value(t.k, l);
      acc += std::norm(single.values[i] * phi) * std::pow(l[0], -2.0 * sp[0]);
    }
    const double expect = t.weight * std::sqrt(r.ctx.c * acc * single.weight());
    CHECK(t.weight * t.lp == doctest::Approx(expect).epsilon(1e-10));
  }
  // p = 1: on the support of phi_k, Delta^{-s'} is within e^{s' (R + 1) delta} of its value at lambda_k
  const double spread = std::exp(sp[0] * cover.outer_radius);
  const NormReport a = besov_analytic_report(r.ctx, lifted, BesovParams{s, 1.0, 1.0}, cover);
  const NormReport b = besov_analytic_report(r.ctx, single, BesovParams{s - sp, 1.0, 1.0}, cover);
  REQUIRE(a.per_index.size() == b.per_index.size());
  for (std::size_t i = 0; i < a.per_index.size(); ++i) {
    const double ratio = (a.per_index[i].weight * a.per_index[i].lp) / (b.per_index[i].weight * b.per_index[i].lp);
    CHECK(ratio <= spread * (1 + 1e-12));
    CHECK(ratio >= (1 - 1e-12) / spread);
  }
}
