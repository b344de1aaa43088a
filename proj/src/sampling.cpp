#include "conewave/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace conewave {

namespace {

long wrap(long k, long n) {
  long r = k % n;
  return r < 0 ? r + n : r;
}

// Minimum-image F displacement on the periodic grid.
Vec periodic_delta(const Grid& grid, const Vec& dx) {
  Vec out = dx;
  for (int i = 0; i < dx.size(); ++i) {
    const double period = 2.0 * grid.f_axes[i].half_width;
    out[i] -= period * std::round(dx[i] / period);
  }
  return out;
}

double real_power(double a, double p) { return p == 1.0 ? a : std::pow(a, p); }

double lp_of(const std::vector<double>& v, double p) {
  if (std::isinf(p)) return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += real_power(x, p);
  return std::pow(acc, 1.0 / p);
}

// Calls fn(e_index, f_index) for every grid point within quasi-distance `radius` of grid point `center`.
template <class Fn>
void scan_ball(const SiegelData& siegel, const Grid& grid, std::size_t center, double radius, Fn&& fn) {
  const GroupPoint g = grid.point(center);
  const double r2 = radius * radius;
  const double r4 = r2 * r2;
  const std::size_t ec = center / grid.f_size();
  const auto em = grid.e_multi(ec);
  const int ne = static_cast<int>(grid.e_axes.size());
  std::vector<int> elo(ne), ehi(ne);
  for (int k = 0; k < ne; ++k) {
    const int span = static_cast<int>(std::floor(radius / grid.e_axes[k].spacing()));
    elo[k] = std::max(0, em[k] - span);
    ehi[k] = std::min(grid.e_axes[k].count - 1, em[k] + span);
  }
  const int nf = grid.m();
  std::vector<int> fspan(nf);
  for (int k = 0; k < nf; ++k)
    fspan[k] = std::min(static_cast<int>(std::floor(r2 / grid.f_axes[k].spacing())), grid.f_axes[k].count / 2);
  std::vector<int> e = elo;
  while (true) {
    const std::size_t ei = grid.e_flat(e);
    const CVec zeta = grid.zeta_at(ei);
    const CVec dz = zeta - g.zeta;
    const double z2 = dz.squaredNorm();
    if (z2 * z2 <= r4) {
      // d(g, h) uses g^{-1} h = (z_h - z_g, x_h - x_g - 2 Im Phi(z_g, z_h)).
      const Vec centre_x = g.x + 2.0 * siegel.form(g.zeta, zeta).imag();
      const double budget = r4 - z2 * z2;
      std::vector<int> c(nf);
      Vec base(nf);
      for (int k = 0; k < nf; ++k) {
        base[k] = (centre_x[k] + grid.f_axes[k].half_width) / grid.f_axes[k].spacing();
      }
      std::vector<int> off(nf);
      for (int k = 0; k < nf; ++k) off[k] = -fspan[k];
      std::vector<int> fm(nf);
      while (true) {
        Vec x(nf);
        for (int k = 0; k < nf; ++k) {
          const long idx = static_cast<long>(std::lround(base[k])) + off[k];
          fm[k] = static_cast<int>(wrap(idx, grid.f_axes[k].count));
          x[k] = grid.f_axes[k].coord(fm[k]);
        }
        const Vec dx = periodic_delta(grid, x - centre_x);
        if (dx.squaredNorm() <= budget) fn(ei, grid.f_flat(fm));
        int k = nf - 1;
        while (k >= 0 && off[k] == fspan[k]) {
          off[k] = -fspan[k];
          --k;
        }
        if (k < 0) break;
        ++off[k];
      }
    }
    int k = ne - 1;
    while (k >= 0 && e[k] == ehi[k]) {
      e[k] = elo[k];
      --k;
    }
    if (k < 0) break;
    ++e[k];
  }
}

GridFunction ball_kernel(const SiegelData& siegel, const Grid& grid, double radius, std::size_t& count) {
  GridFunction chi(grid);
  count = 0;
  std::vector<int> em(grid.e_axes.size()), fm(grid.f_axes.size());
  for (std::size_t k = 0; k < em.size(); ++k) em[k] = grid.e_axes[k].count / 2;
  for (std::size_t k = 0; k < fm.size(); ++k) fm[k] = grid.f_axes[k].count / 2;
  const std::size_t origin = grid.e_flat(em) * grid.f_size() + grid.f_flat(fm);
  scan_ball(siegel, grid, origin, radius, [&](std::size_t e, std::size_t f) {
    chi.at(e, f) = cplx(1.0, 0.0);
    ++count;
  });
  return chi;
}

}  // namespace

int homogeneous_dimension(const SiegelData& siegel) { return siegel.n + siegel.m; }

std::vector<double> radius_menu(double box_scale) {
  std::vector<double> r;
  for (int k = -3; k <= 3; ++k) r.push_back(std::ldexp(box_scale, k));
  return r;
}

GroupLattice build_group_lattice(const SiegelData& siegel, const Grid& grid, double delta) {
  if (!(delta > 0.0)) throw DomainError("group lattice needs delta > 0");
  if (grid.n() != siegel.n || grid.m() != siegel.m) throw DomainError("grid dimensions do not match the Siegel data");
  GroupLattice lat;
  lat.delta = delta;
  lat.R = 2.0;
  const double sep = 2.0 * delta;
  if (siegel.n == 0) {
    // Quasi-distance |x|^{1/2}: buckets of side sep^2 in x.
    const double cell = sep * sep;
    std::map<std::vector<long>, std::vector<std::size_t>> buckets;
    for (std::size_t f = 0; f < grid.f_size(); ++f) {
      const Vec x = grid.x_at(f);
      std::vector<long> key(x.size());
      for (int i = 0; i < x.size(); ++i) key[i] = static_cast<long>(std::floor(x[i] / cell));
      bool ok = true;
      std::vector<long> nb(x.size(), -1);
      while (ok) {
        std::vector<long> probe(x.size());
        for (int i = 0; i < x.size(); ++i) probe[i] = key[i] + nb[i];
        auto it = buckets.find(probe);
        if (it != buckets.end())
          for (std::size_t j : it->second)
            if ((lat.points[j].x - x).norm() < cell * (1.0 - 1e-12)) {
              ok = false;
              break;
            }
        int i = static_cast<int>(x.size()) - 1;
        while (i >= 0 && nb[i] == 1) {
          nb[i] = -1;
          --i;
        }
        if (i < 0) break;
        ++nb[i];
      }
      if (!ok) continue;
      buckets[key].push_back(lat.points.size());
      lat.points.push_back({CVec::Zero(0), x});
      lat.grid_index.push_back(f);
    }
    return lat;
  }
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const GroupPoint g = grid.point(idx);
    bool ok = true;
    for (const GroupPoint& p : lat.points)
      if (quasi_distance(siegel, p, g) < sep * (1.0 - 1e-12)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    lat.points.push_back(g);
    lat.grid_index.push_back(idx);
  }
  return lat;
}

GridFunction maximal_function(const SiegelData& siegel, const GridFunction& u, double p,
                              const std::vector<double>& radii) {
  if (!(p > 0.0)) throw DomainError("maximal_function needs p > 0");
  const Grid& grid = u.grid;
  GridFunction out(grid);
  if (std::isinf(p)) {
    double m = 0.0;
    for (const cplx& v : u.values) m = std::max(m, std::abs(v));
    std::fill(out.values.begin(), out.values.end(), cplx(m, 0.0));
    return out;
  }
  GridFunction f(grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = real_power(std::abs(u.values[i]), p);
  std::vector<double> best(grid.size(), 0.0);
  for (double r : radii) {
    std::size_t count = 0;
    const GridFunction chi = ball_kernel(siegel, grid, r, count);
    const GridFunction avg = convolve(siegel, f, chi);
    const double norm = 1.0 / (static_cast<double>(count) * grid.cell_measure());
    for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], std::max(0.0, avg.values[i].real() * norm));
  }
  for (std::size_t i = 0; i < best.size(); ++i) out.values[i] = cplx(std::pow(best[i], 1.0 / p), 0.0);
  return out;
}

SampleBounds sample_bounds(const SiegelData& siegel, const GridFunction& u, const GroupLattice& lattice, double p) {
  if (!(p > 0.0)) throw DomainError("sample_bounds needs p > 0");
  const Grid& grid = u.grid;
  const double delta = lattice.delta;
  for (const Axis& a : grid.f_axes)
    if (a.spacing() > delta * delta / 4.0 * (1.0 + 1e-12))
      throw DomainError("sample_bounds: grid coarser than delta (F spacing must be <= delta^2/4)");
  for (const Axis& a : grid.e_axes)
    if (a.spacing() > delta / 4.0 * (1.0 + 1e-12))
      throw DomainError("sample_bounds: grid coarser than delta (E spacing must be <= delta/4)");
  std::vector<double> maxima, minima;
  maxima.reserve(lattice.points.size());
  minima.reserve(lattice.points.size());
  for (std::size_t idx : lattice.grid_index) {
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    scan_ball(siegel, grid, idx, lattice.R * delta, [&](std::size_t e, std::size_t f) {
      const double a = std::abs(u.at(e, f));
      mx = std::max(mx, a);
      mn = std::min(mn, a);
    });
    maxima.push_back(mx);
    minima.push_back(mn);
  }
  const int q = homogeneous_dimension(siegel);
  const double factor = std::isinf(p) ? 1.0 : std::pow(delta, 2.0 * q / p);
  SampleBounds out;
  out.upper = factor * lp_of(maxima, p);
  out.lower = factor * lp_of(minima, p);
  out.true_norm = lp_norm(u, p);
  return out;
}

PointwiseReport pointwise_bound_check(const SpectralContext& ctx, const ScalarSymbol& sigma, double p,
                                      const std::vector<int>& order, std::size_t pair_count, std::uint64_t seed,
                                      bool same_point) {
  const SiegelData& siegel = ctx.siegel;
  const Grid& grid = ctx.grid;
  const int dims = 2 * siegel.n + siegel.m;
  if (static_cast<int>(order.size()) != dims) throw DomainError("derivative multi-index has wrong length");
  int total_order = 0;
  for (int o : order) {
    if (o < 0) throw DomainError("derivative orders must be nonnegative");
    total_order += o;
  }
  if (siegel.n > 0 && total_order > 1) throw DomainError("non-abelian derivatives are limited to first order");
  PointwiseReport report;
  const GridFunction u = synthesize(ctx, sigma);
  if (sigma.is_zero()) return report;
  double lmax = 0.0;
  for (std::size_t i = 0; i < sigma.size(); ++i)
    if (sigma.values[i] != cplx(0.0, 0.0)) lmax = std::max(lmax, sigma.lambda_at(i).norm());
  const GridFunction mu = maximal_function(siegel, u, p, radius_menu(std::sqrt(2.0 * M_PI / lmax)));
  GridFunction xu = u;
  if (siegel.n == 0 && total_order > 0) {
    const ScalarSymbol ds = map_symbol(siegel.cone, sigma, [&](const Vec& l, cplx v) {
      for (int i = 0; i < l.size(); ++i)
        for (int k = 0; k < order[i]; ++k) v *= cplx(0.0, l[i]);
      return v;
    });
    xu = synthesize(ctx, ds);
  }
  std::mt19937_64 rng(seed);
  const int q = homogeneous_dimension(siegel);
  std::vector<double> ratios;
  // Interior window: the central half of every axis.
  auto draw = [&]() {
    std::vector<int> em(grid.e_axes.size()), fm(grid.f_axes.size());
    for (std::size_t k = 0; k < em.size(); ++k) {
      const int n = grid.e_axes[k].count;
      em[k] = n / 4 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(1, n / 2)));
    }
    for (std::size_t k = 0; k < fm.size(); ++k) {
      const int n = grid.f_axes[k].count;
      fm[k] = n / 4 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(1, n / 2)));
    }
    return grid.e_flat(em) * grid.f_size() + grid.f_flat(fm);
  };
  for (std::size_t t = 0; t < pair_count; ++t) {
    const std::size_t a = draw();
    const std::size_t b = same_point ? a : draw();
    double lhs;
    if (siegel.n > 0 && total_order == 1) {
      const int dir = static_cast<int>(std::find(order.begin(), order.end(), 1) - order.begin());
      const double eps = 1e-4;
      GroupPoint step{CVec::Zero(siegel.n), Vec::Zero(siegel.m)};
      if (dir < 2 * siegel.n)
        step.zeta[dir / 2] = dir % 2 == 0 ? cplx(eps, 0.0) : cplx(0.0, eps);
      else
        step.x[dir - 2 * siegel.n] = eps;
      const GroupPoint g = grid.point(a);
      const cplx plus = evaluate_at(siegel, sigma, ctx.c, multiply(siegel, g, step));
      const cplx minus = evaluate_at(siegel, sigma, ctx.c, multiply(siegel, g, inverse(step)));
      lhs = std::abs((plus - minus) / (2.0 * eps));
    } else {
      lhs = std::abs(xu.values[a]);
    }
    const double d = quasi_distance(siegel, grid.point(a), grid.point(b));
    const double rhs = std::pow(1.0 + d, 2.0 * q / p) * mu.values[b].real();
    if (rhs == 0.0) continue;
    ratios.push_back(lhs / rhs);
  }
  report.pairs = ratios.size();
  if (!ratios.empty()) {
    report.max_ratio = *std::max_element(ratios.begin(), ratios.end());
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    report.median_ratio = ratios[ratios.size() / 2];
  }
  return report;
}

void check_young_exponents(double p1, double p2, double p3) {
  if (!(p1 > 0.0) || !(p2 > 0.0) || !(p3 > 0.0)) throw DomainError("Young exponents must be positive");
  if (p1 > p3 || p2 > p3) throw DomainError("Young check needs p1, p2 <= p3");
  auto dual = [](double p) { return 1.0 - 1.0 / std::max(1.0, p); };
  if (dual(p1) + dual(p2) > dual(p3) + 1e-12)
    throw DomainError("Young check needs 1/p1' + 1/p2' <= 1/p3'");
}

YoungReport young_check(const SpectralContext& ctx, const ScalarSymbol& sigma_u, const ScalarSymbol& sigma_v,
                        double p1, double p2, double p3) {
  check_young_exponents(p1, p2, p3);
  YoungReport r;
  r.norm_u = lp_norm(synthesize(ctx, sigma_u), p1);
  r.norm_v = lp_norm(synthesize(ctx, sigma_v), p2);
  r.lhs = lp_norm(synthesize(ctx, convolve(sigma_u, sigma_v)), p3);
  r.ratio = (r.norm_u > 0.0 && r.norm_v > 0.0) ? r.lhs / (r.norm_u * r.norm_v) : 0.0;
  return r;
}

YoungReport young_check_grid(const SiegelData& siegel, const GridFunction& u, const GridFunction& v, double p1,
                             double p2, double p3) {
  check_young_exponents(p1, p2, p3);
  YoungReport r;
  r.norm_u = lp_norm(u, p1);
  r.norm_v = lp_norm(v, p2);
  r.lhs = lp_norm(convolve(siegel, u, v), p3);
  r.ratio = (r.norm_u > 0.0 && r.norm_v > 0.0) ? r.lhs / (r.norm_u * r.norm_v) : 0.0;
  return r;
}

}  // namespace conewave
