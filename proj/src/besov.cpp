#include "conewave/besov.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "conewave/fft.hpp"

namespace conewave {

namespace {

class Compensated {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double smooth_step_inf(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

ScalarSymbol support_union(const ScalarSymbol& a, const ScalarSymbol& b) {
  if (!a.same_lattice(b)) throw DomainError("symbols live on different lattices");
  ScalarSymbol out = a;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] = cplx(std::abs(a.values[i]) + std::abs(b.values[i]), 0.0);
  return out;
}

void check_support(const BumpFamily& bumps, const ScalarSymbol& sigma) {
  for (std::size_t idx = 0; idx < sigma.size(); ++idx) {
    if (sigma.values[idx] == cplx(0.0, 0.0)) continue;
    if (!bumps.spec.region.contains(bumps.cone, sigma.lambda_at(idx)))
      throw DomainError("symbol support escapes the region covered by the lattice");
  }
}

ScalarSymbol masked(const ScalarSymbol& sigma, const std::vector<double>& mask, bool squared) {
  ScalarSymbol out = sigma;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= squared ? mask[i] * mask[i] : mask[i];
  return out;
}

std::pair<int, int> dyadic_range(double nmin, double nmax, double ne) {
  const double l4 = std::log(4.0);
  return {static_cast<int>(std::floor(std::log(nmin / (3.0 * ne)) / l4)),
          static_cast<int>(std::ceil(std::log(2.0 * nmax / ne) / l4))};
}

}  // namespace

void validate_exponents(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw DomainError("Besov exponents p, q must be positive or infinite");
}

double lp_norm(const GridFunction& u, double p) {
  if (!(p > 0.0)) throw DomainError("lp_norm needs p > 0");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const cplx& v : u.values) m = std::max(m, std::abs(v));
    return m;
  }
  Compensated acc;
  for (const cplx& v : u.values) {
    const double a = std::abs(v);
    if (a > 0.0) acc.add(p == 2.0 ? a * a : std::pow(a, p));
  }
  return std::pow(acc.value() * u.grid.cell_measure(), 1.0 / p);
}

double lq_norm(std::span<const double> values, double q) {
  if (!(q > 0.0)) throw DomainError("lq_norm needs q > 0");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  Compensated acc;
  for (double v : values) acc.add(std::pow(std::abs(v), q));
  return std::pow(acc.value(), 1.0 / q);
}

BumpSamples sample_bumps(const BumpFamily& bumps, const ScalarSymbol& sigma) {
  std::map<int, std::vector<double>> rows;
  for (std::size_t idx = 0; idx < sigma.size(); ++idx) {
    if (sigma.values[idx] == cplx(0.0, 0.0)) continue;
    const Vec lambda = sigma.lambda_at(idx);
    for (int k : bumps.active(lambda)) {
      auto& row = rows[k];
      if (row.empty()) row.assign(sigma.size(), 0.0);
      row[idx] = bumps.value(k, lambda);
    }
  }
  BumpSamples out;
  for (auto& [k, row] : rows) {
    out.indices.push_back(k);
    out.values.push_back(std::move(row));
  }
  return out;
}

NormReport besov_analytic_report(const SpectralContext& ctx, const ScalarSymbol& sigma, const BesovParams& params,
                                 const BumpFamily& bumps, bool symmetrized) {
  validate_exponents(params.p, params.q);
  if (params.s.size() != ctx.siegel.cone.rank) throw DomainError("Besov exponent length differs from the rank");
  check_support(bumps, sigma);
  NormReport report;
  report.params = params;
  const BumpSamples samples = sample_bumps(bumps, sigma);
  std::vector<double> weighted;
  for (std::size_t i = 0; i < samples.indices.size(); ++i) {
    const int k = samples.indices[i];
    IndexTerm term;
    term.k = k;
    term.lambda_k = bumps.spec.points[k];
    term.weight = delta_power(ctx.siegel.cone, Side::dual, params.s, term.lambda_k);
    term.lp = lp_norm(synthesize(ctx, masked(sigma, samples.values[i], symmetrized)), params.p);
    weighted.push_back(term.weight * term.lp);
    report.per_index.push_back(std::move(term));
  }
  report.total = lq_norm(weighted, params.q);
  return report;
}

double besov_analytic(const SpectralContext& ctx, const ScalarSymbol& sigma, const BesovParams& params,
                      const BumpFamily& bumps, bool symmetrized) {
  return besov_analytic_report(ctx, sigma, params, bumps, symmetrized).total;
}

double dyadic_eta(double x) {
  if (!(x > 0.0)) return 0.0;
  const double y = std::log(x) / std::log(4.0);
  const double rise_end = std::log(0.75) / std::log(4.0);
  const double width = rise_end + 0.5;
  if (y <= -0.5 || y >= 0.5 + width) return 0.0;
  if (y < rise_end) return smooth_step_inf((y + 0.5) / width);
  if (y <= 0.5) return 1.0;
  return 1.0 - smooth_step_inf((y - 0.5) / width);
}

ClassicalReport besov_classical_report(const SpectralContext& ctx, const ScalarSymbol& sigma,
                                       const ClassicalParams& params) {
  validate_exponents(params.p, params.q);
  ClassicalReport report;
  report.params = params;
  const double ne = n_lambda(ctx.siegel, ctx.siegel.cone.e_dual);
  std::vector<double> nvals(sigma.size(), 0.0);
  double nmin = std::numeric_limits<double>::infinity(), nmax = 0.0;
  for (std::size_t idx = 0; idx < sigma.size(); ++idx) {
    if (sigma.values[idx] == cplx(0.0, 0.0)) continue;
    nvals[idx] = n_lambda(ctx.siegel, sigma.lambda_at(idx));
    nmin = std::min(nmin, nvals[idx]);
    nmax = std::max(nmax, nvals[idx]);
  }
  if (nmax == 0.0) return report;
  const auto [j0, j1] = dyadic_range(nmin, nmax, ne);
  std::vector<double> weighted;
  for (int j = j0; j <= j1; ++j) {
    ScalarSymbol piece = sigma;
    bool any = false;
    const double scale = std::pow(4.0, -j) / ne;
    for (std::size_t idx = 0; idx < piece.size(); ++idx) {
      if (piece.values[idx] == cplx(0.0, 0.0)) continue;
      const double eta = dyadic_eta(nvals[idx] * scale);
      piece.values[idx] *= eta;
      any |= eta != 0.0;
    }
    if (!any) continue;
    const double lp = lp_norm(synthesize(ctx, piece), params.p);
    report.per_scale.push_back({j, lp});
    weighted.push_back(std::pow(2.0, params.s * j) * lp);
  }
  report.total = lq_norm(weighted, params.q);
  return report;
}

ClassicalReport besov_classical_report(const SpectralContext& ctx, const GridFunction& u,
                                       const ClassicalParams& params) {
  validate_exponents(params.p, params.q);
  if (ctx.siegel.n != 0)
    throw DomainError("besov_classical: non-abelian grid functions are rejected (pass an analytic-type symbol)");
  if (!(u.grid == ctx.grid)) throw DomainError("besov_classical: grid differs from the context grid");
  ClassicalReport report;
  report.params = params;
  const Grid& grid = u.grid;
  const auto shape = grid.f_shape();
  const std::size_t fs = grid.f_size();
  std::vector<cplx> uh(fs);
  {
    FftPlan plan(shape, true);
    std::copy(u.values.begin(), u.values.end(), plan.data());
    plan.execute();
    std::copy(plan.data(), plan.data() + fs, uh.begin());
  }
  double peak = 0.0;
  for (const cplx& v : uh) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return report;
  std::vector<double> xi2(fs, 0.0);
  double nmin = std::numeric_limits<double>::infinity(), nmax = 0.0;
  for (std::size_t f = 0; f < fs; ++f) {
    const auto multi = grid.f_multi(f);
    double s2 = 0.0;
    for (std::size_t i = 0; i < multi.size(); ++i) {
      long k = multi[i];
      if (2 * k >= shape[i]) k -= shape[i];
      const double xi = 2.0 * M_PI * k / (shape[i] * grid.f_axes[i].spacing());
      s2 += xi * xi;
    }
    xi2[f] = s2;
    if (s2 > 0.0 && std::abs(uh[f]) > 1e-14 * peak) {
      nmin = std::min(nmin, s2);
      nmax = std::max(nmax, s2);
    }
  }
  if (nmax == 0.0) return report;
  const double ne = ctx.siegel.cone.e_dual.squaredNorm();
  const auto [j0, j1] = dyadic_range(nmin, nmax, ne);
  std::vector<double> weighted;
  FftPlan inv(shape, false);
  for (int j = j0; j <= j1; ++j) {
    const double scale = std::pow(4.0, -j) / ne;
    bool any = false;
    for (std::size_t f = 0; f < fs; ++f) {
      const double eta = dyadic_eta(xi2[f] * scale);
      inv.data()[f] = uh[f] * (eta / static_cast<double>(fs));
      any |= eta != 0.0 && std::abs(uh[f]) > 1e-14 * peak;
    }
    if (!any) continue;
    inv.execute();
    GridFunction piece(grid, std::vector<cplx>(inv.data(), inv.data() + fs));
    const double lp = lp_norm(piece, params.p);
    report.per_scale.push_back({j, lp});
    weighted.push_back(std::pow(2.0, params.s * j) * lp);
  }
  report.total = lq_norm(weighted, params.q);
  return report;
}

double besov_classical(const SpectralContext& ctx, const ScalarSymbol& sigma, const ClassicalParams& params) {
  return besov_classical_report(ctx, sigma, params).total;
}

double besov_classical(const SpectralContext& ctx, const GridFunction& u, const ClassicalParams& params) {
  return besov_classical_report(ctx, u, params).total;
}

cplx duality_pairing(const SpectralContext& ctx, const ScalarSymbol& sigma_u, const ScalarSymbol& sigma_v,
                     const BumpFamily& bumps) {
  if (bumps.mode != BumpMode::partition_sq) throw DomainError("duality_pairing needs partition_sq bumps");
  const ScalarSymbol support = support_union(sigma_u, sigma_v);
  check_support(bumps, support);
  const BumpSamples samples = sample_bumps(bumps, support);
  cplx total(0.0, 0.0);
  for (std::size_t i = 0; i < samples.indices.size(); ++i) {
    const GridFunction a = synthesize(ctx, masked(sigma_u, samples.values[i], false));
    const GridFunction b = synthesize(ctx, masked(sigma_v, samples.values[i], false));
    cplx acc(0.0, 0.0);
    for (std::size_t g = 0; g < a.values.size(); ++g) acc += a.values[g] * std::conj(b.values[g]);
    total += acc * ctx.grid.cell_measure();
  }
  return total;
}

PowerExponent embedding_shift(const SiegelData& siegel, double p1, double p2) {
  return (siegel.b + siegel.cone.d) * (1.0 / p1 - 1.0 / p2);
}

EmbeddingReport embedding_ratio(const SpectralContext& ctx, const ScalarSymbol& sigma, const BesovParams& params1,
                                const BesovParams& params2, const BumpFamily& bumps) {
  validate_exponents(params1.p, params1.q);
  validate_exponents(params2.p, params2.q);
  if (params1.p > params2.p || params1.q > params2.q)
    throw DomainError("embedding_ratio needs p1 <= p2 and q1 <= q2");
  const PowerExponent shift = embedding_shift(ctx.siegel, params1.p, params2.p);
  if (((params2.s - params1.s).s - shift.s).cwiseAbs().maxCoeff() > 1e-9)
    throw DomainError("embedding_ratio: s2 != s1 + (1/p1 - 1/p2)(b + d)");
  EmbeddingReport report;
  report.norm_low = besov_analytic(ctx, sigma, params1, bumps);
  report.norm_high = besov_analytic(ctx, sigma, params2, bumps);
  report.ratio = report.norm_low > 0.0 ? report.norm_high / report.norm_low : 0.0;
  return report;
}

}  // namespace conewave
