#include "conewave/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "conewave/error.hpp"

namespace conewave {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
}

cplx complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }
double min_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end()); }

template <class T>
std::vector<T> broadcast(const std::vector<T>& v, int n, const char* key) {
  if (v.size() == static_cast<std::size_t>(n)) return v;
  if (v.size() == 1) return std::vector<T>(n, v[0]);
  throw ConfigError(std::string(key) + ": expected 1 or " + std::to_string(n) + " entries");
}

BumpMode mode_from(const ExperimentConfig& cfg) {
  try {
    return bump_mode_from_string(cfg.bump_mode);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

TransportChoice transport_from(const ExperimentConfig& cfg) {
  if (cfg.transport == "triangular") return TransportChoice::triangular;
  if (cfg.transport == "quadratic") return TransportChoice::quadratic;
  throw ConfigError("transport must be 'triangular' or 'quadratic'");
}

LatticeSpec lattice_from(const ExperimentConfig& cfg, const ConeDescriptor& cone, const Region& region,
                         double delta) {
  LatticeSpec spec = build_lattice(cone, delta, region);
  spec.R = cfg.R;
  return spec;
}

std::vector<double> ratios_of(const std::vector<TrialRow>& rows) {
  std::vector<double> r;
  r.reserve(rows.size());
  for (const TrialRow& row : rows) r.push_back(row.ratio);
  return r;
}

// Box of the union of bump supports over the given indices.
std::pair<Vec, Vec> bump_box(const BumpFamily& bumps, const std::vector<int>& indices) {
  const auto ball = ball_sample(bumps.cone, bumps.outer_radius, 9);
  const int dim = bumps.cone.dim;
  Vec lo = Vec::Constant(dim, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (int k : indices)
    for (const Vec& b : ball) {
      const Vec l = bumps.spec.transports[k].act_dual(b);
      lo = lo.cwiseMin(l);
      hi = hi.cwiseMax(l);
    }
  const Vec pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

struct BlowupPoint {
  double lp = 0.0;
  double analytic = 0.0;
  double classical = 0.0;
  double expected_growth = 1.0;  // Delta^{-s}(t_k)
};

// Norms of phi_k = Delta^{-s-(b+d)/p}(t_k) phi(t_k .) on the grid rescaled by t_k^{-1},
// against the lattice transported by t_k.
BlowupPoint blowup_point(const SpectralContext& base, const ScalarSymbol& base_symbol, const LatticeSpec& spec,
                         BumpMode mode, TransportChoice transport, const BesovParams& params, int j, int k,
                         bool with_classical) {
  const ConeDescriptor& cone = base.siegel.cone;
  const TriangularElement t = blowup_element(cone, j, k);
  const TriangularElement tinv = t.inverse();
  Grid grid = base.grid;
  for (int i = 0; i < grid.m(); ++i) grid.f_axes[i].half_width /= t.matrix(i, i);
  const SpectralContext ctx{base.siegel, grid, base.c};
  const PowerExponent norm_exp = -params.s - (base.siegel.b + cone.d) * (1.0 / params.p);
  const double amp = t.character(norm_exp) / std::abs(t.matrix.determinant());

  Vec lo = Vec::Constant(cone.dim, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (std::size_t i = 0; i < base_symbol.size(); ++i) {
    if (base_symbol.values[i] == cplx(0.0, 0.0)) continue;
    const Vec l = t.act_dual(base_symbol.lambda_at(i));
    lo = lo.cwiseMin(l);
    hi = hi.cwiseMax(l);
  }
  Vec step(cone.dim);
  for (int i = 0; i < cone.dim; ++i) step[i] = M_PI / grid.f_axes[i].half_width;
  lo -= 2.0 * step;
  hi += 2.0 * step;
  // The rescaled dual lattice is the image of the base lattice under t, so every sample maps to a base sample.
  const ScalarSymbol sigma = make_dual_symbol(cone, grid, lo, hi, [&](const Vec& mu) {
    const Vec l = tinv.act_dual(mu);
    std::size_t flat = 0;
    for (int a = 0; a < cone.dim; ++a) {
      const SymbolAxis& ax = base_symbol.axes[a];
      const double r = (l[a] - ax.start) / ax.step;
      const long n = std::lround(r);
      if (n < 0 || n >= ax.count || std::abs(r - n) > 1e-6) return cplx(0.0, 0.0);
      flat = flat * ax.count + static_cast<std::size_t>(n);
    }
    return amp * base_symbol.values[flat];
  });
  BlowupPoint out;
  out.expected_growth = t.character(-params.s);
  out.lp = lp_norm(synthesize(ctx, sigma), params.p);
  const LatticeSpec moved = transform_lattice(spec, t);
  const BumpFamily bumps = build_bumps(cone, moved, mode, transport);
  out.analytic = besov_analytic(ctx, sigma, params, bumps);
  if (with_classical) out.classical = besov_classical(ctx, sigma, ClassicalParams{params.s.sum(), params.p, params.q});
  return out;
}

int blowup_coordinate(const ExperimentConfig& cfg, const PowerExponent& s) {
  if (cfg.blowup_j >= 0) {
    if (cfg.blowup_j >= s.size()) throw ConfigError("blowup_j out of range");
    return cfg.blowup_j;
  }
  int j = 0;
  for (int i = 1; i < s.size(); ++i)
    if (s[i] > s[j]) j = i;
  return j;
}

void require_blowup_setting(const SiegelData& siegel) {
  if (siegel.cone.kind != ConeKind::product) throw DomainError("blow-up family is implemented for product cones");
  if (siegel.cone.rank < 2) throw DomainError("blow-up needs rank > 1 (no blow-up mechanism for r = 1)");
  if (siegel.n != 0) throw DomainError("blow-up family is implemented for abelian groups");
}

ScalarSymbol blowup_base_symbol(const SpectralContext& ctx, double radius) {
  const ConeDescriptor& cone = ctx.siegel.cone;
  const auto ball = ball_sample(cone, radius, 9);
  Vec lo = Vec::Constant(cone.dim, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (const Vec& b : ball) {
    lo = lo.cwiseMin(b);
    hi = hi.cwiseMax(b);
  }
  return make_dual_symbol(cone, ctx.grid, lo, hi,
                          [&](const Vec& l) { return cplx(cinf_bump(cone, cone.e_dual, radius, l), 0.0); });
}

cplx multiplier_value(const ExperimentConfig& cfg, const ConeDescriptor& cone, const Vec& lambda) {
  if (cfg.multiplier == "one") return {1.0, 0.0};
  if (!membership(cone, Side::dual, lambda)) return {0.0, 0.0};
  if (cfg.multiplier == "delta_power") {
    const double logd = std::log(delta_power(cone, Side::dual, PowerExponent::constant(cone.rank, 1.0), lambda));
    return std::polar(1.0, cfg.tau * logd);
  }
  if (cfg.multiplier == "angular") {
    const double ratio = lambda[cone.dim - 1] / lambda.dot(cone.e_primal);
    return {1.0 + 0.5 * ratio, 0.0};
  }
  throw ConfigError("multiplier must be 'one', 'delta_power' or 'angular'");
}

}  // namespace

void TrialReport::finalize() {
  const auto r = ratios_of(rows);
  max_ratio = max_of(r);
  min_ratio = min_of(r);
  median_ratio = median_of(r);
}

bool TrialReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void TrialReport::add_check(std::string name, bool ok, double value, double bound) {
  checks.push_back({std::move(name), ok, value, bound});
}

double TrialReport::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  throw DomainError("no summary entry '" + key + "'");
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(trial));
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

SiegelData siegel_from_config(const ExperimentConfig& cfg) {
  ConeKind kind;
  try {
    kind = cone_kind_from_string(cfg.cone);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.cone_dim < 1) throw ConfigError("cone_dim must be positive");
  const ConeDescriptor cone = make_cone(kind, cfg.cone_dim);
  if (cfg.group == "abelian") return abelian_siegel(cone);
  if (cfg.group == "heisenberg") {
    if (cone.kind != ConeKind::product || cone.rank != 1) throw ConfigError("heisenberg group needs product(1)");
    return heisenberg_siegel();
  }
  if (cfg.group == "diagonal") {
    Vec dir = cone.e_primal;
    if (!cfg.group_direction.empty()) {
      if (static_cast<int>(cfg.group_direction.size()) != cone.dim)
        throw ConfigError("group_direction length differs from the cone dimension");
      dir = Eigen::Map<const Vec>(cfg.group_direction.data(), cone.dim);
    }
    return diagonal_siegel(cone, cfg.group_n, dir);
  }
  throw ConfigError("group must be 'abelian', 'heisenberg' or 'diagonal'");
}

Grid grid_from_config(const ExperimentConfig& cfg, const SiegelData& siegel) {
  const auto counts = broadcast(cfg.grid_count, siegel.m, "grid_count");
  const auto halves = broadcast(cfg.grid_half_width, siegel.m, "grid_half_width");
  for (int c : counts)
    if (c < 2 || c % 2) throw ConfigError("grid_count entries must be even and >= 2");
  for (double h : halves)
    if (!(h > 0.0)) throw ConfigError("grid_half_width entries must be positive");
  if (siegel.n > 0 && (cfg.e_count < 2 || cfg.e_count % 2 || !(cfg.e_half_width > 0.0)))
    throw ConfigError("e_count must be even and e_half_width positive");
  return make_grid(siegel.n, cfg.e_count, cfg.e_half_width, counts, halves);
}

Region region_from_config(const ExperimentConfig& cfg, const ConeDescriptor& cone) {
  if (cfg.region == "annulus") {
    Region r = Region::annulus(cfg.scale_lo, cfg.scale_hi, cfg.angle);
    try {
      r.validate(cone);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    return r;
  }
  if (cfg.region == "log_box") {
    if (cfg.box_lo.empty() || cfg.box_hi.empty()) throw ConfigError("log_box needs box_lo and box_hi");
    const auto lo = broadcast(cfg.box_lo, cone.dim, "box_lo");
    const auto hi = broadcast(cfg.box_hi, cone.dim, "box_hi");
    Region r = Region::log_box(Eigen::Map<const Vec>(lo.data(), cone.dim), Eigen::Map<const Vec>(hi.data(), cone.dim));
    try {
      r.validate(cone);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    return r;
  }
  throw ConfigError("region must be 'annulus' or 'log_box'");
}

PowerExponent s_from_config(const ExperimentConfig& cfg, const ConeDescriptor& cone) {
  if (cfg.s.empty()) return PowerExponent::zeros(cone.rank);
  const auto s = broadcast(cfg.s, cone.rank, "s");
  return PowerExponent(Eigen::Map<const Vec>(s.data(), cone.rank));
}

std::pair<Vec, Vec> region_box(const ConeDescriptor& cone, const Region& region, double pad) {
  const double spacing = candidate_spacing(cone, 0.4);
  const auto pts = dense_region_sample(cone, region, spacing);
  if (pts.empty()) throw DomainError("region_box: empty region sample");
  const auto ball = ball_sample(cone, pad + 2.0 * spacing, 3);
  Vec lo = Vec::Constant(cone.dim, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (const Vec& p : pts) {
    const TriangularElement t = transport_solve(cone, p);
    for (const Vec& b : ball) {
      const Vec l = t.act_dual(b);
      lo = lo.cwiseMin(l);
      hi = hi.cwiseMax(l);
    }
  }
  return {lo, hi};
}

ScalarSymbol random_band_limited(const SpectralContext& ctx, const Region& region, std::mt19937_64& rng, int terms,
                                 double radius) {
  const ConeDescriptor& cone = ctx.siegel.cone;
  if (terms < 1 || !(radius > 0.0)) throw DomainError("random_band_limited needs terms >= 1 and radius > 0");
  const auto [lo, hi] = region_box(cone, region, 0.0);
  const auto probe = ball_sample(cone, 1.15 * radius, 7);
  const Region base = [&] {
    Region r = region;
    r.moved.reset();
    return r;
  }();
  const auto [tlo, thi] = base.theta_bounds(cone);
  struct Term {
    Vec centre;
    cplx amp;
    Vec shift;
  };
  std::vector<Term> parts;
  for (int i = 0; i < terms; ++i) {
    Vec centre;
    bool found = false;
    for (int attempt = 0; attempt < 2000 && !found; ++attempt) {
      Vec theta(tlo.size());
      for (int a = 0; a < theta.size(); ++a) theta[a] = uniform(rng, tlo[a], thi[a]);
      centre = from_transport_coordinates(cone, theta);
      if (region.moved) centre = region.moved->act_dual(centre);
      if (!region.contains(cone, centre)) continue;
      const TriangularElement t = transport_solve(cone, centre);
      found = std::all_of(probe.begin(), probe.end(),
                          [&](const Vec& b) { return region.contains(cone, t.act_dual(b)); });
    }
    if (!found) throw DomainError("random_band_limited: region too small for the bump radius");
    Vec shift(cone.dim);
    for (int a = 0; a < cone.dim; ++a) {
      const double h = ctx.grid.f_axes[a].half_width;
      shift[a] = uniform(rng, -0.5 * h, 0.5 * h);
    }
    parts.push_back({centre, complex_gaussian(rng), shift});
  }
  return make_dual_symbol(cone, ctx.grid, lo, hi, [&](const Vec& l) {
    cplx v(0.0, 0.0);
    for (const Term& t : parts) {
      const double b = cinf_bump(cone, t.centre, radius, l);
      if (b != 0.0) v += t.amp * b * std::polar(1.0, -l.dot(t.shift));
    }
    return v;
  });
}

TriangularElement blowup_element(const ConeDescriptor& cone, int j, int k) {
  if (cone.kind != ConeKind::product) throw DomainError("blowup_element needs a product cone");
  if (j < 0 || j >= cone.rank || k < 0) throw DomainError("blowup_element: bad index");
  Vec diag = Vec::Ones(cone.rank);
  diag[j] = 1.0 / (k + 1.0);
  return product_element(diag);
}

TrialReport run_decoupling(const ExperimentConfig& cfg) {
  const SiegelData siegel = siegel_from_config(cfg);
  const ConeDescriptor& cone = siegel.cone;
  const SpectralContext ctx = make_context(siegel, grid_from_config(cfg, siegel));
  const Region region = region_from_config(cfg, cone);
  const PowerExponent s = s_from_config(cfg, cone);
  if (cfg.trials < 0) throw ConfigError("trials must be nonnegative");
  const LatticeSpec spec = lattice_from(cfg, cone, region, cfg.delta);
  const BumpFamily bumps = build_bumps(cone, spec, mode_from(cfg), transport_from(cfg));
  const std::vector<int> shell = shell_indices(siegel, spec, bumps, cfg.shell_c);
  if (shell.empty()) throw DomainError("run_decoupling: empty shell");

  const auto [lo, hi] = bump_box(bumps, shell);
  const ScalarSymbol frame = make_dual_symbol(cone, ctx.grid, lo, hi, [](const Vec&) { return cplx(1.0, 0.0); });
  std::vector<std::vector<double>> phi(shell.size(), std::vector<double>(frame.size(), 0.0));
  std::vector<double> weight(shell.size());
  for (std::size_t i = 0; i < shell.size(); ++i) {
    const int k = shell[i];
    for (std::size_t idx = 0; idx < frame.size(); ++idx)
      if (frame.values[idx] != cplx(0.0, 0.0)) phi[i][idx] = bumps.value(k, frame.lambda_at(idx));
    weight[i] = delta_power(cone, Side::dual, s, spec.points[k]);
    if (cfg.weighted) weight[i] *= std::exp(cfg.weight_c * spec.points[k].dot(cone.e_primal));
  }

  TrialReport report;
  report.experiment = "decoupling";
  report.rows.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](int trial) {
    const std::uint64_t ts = trial_seed(cfg.seed, trial);
    std::mt19937_64 rng(ts);
    ScalarSymbol total = zero_symbol_like(frame);
    std::vector<double> pieces;
    for (std::size_t i = 0; i < shell.size(); ++i) {
      const cplx a = complex_gaussian(rng);
      Vec shift(cone.dim);
      for (int d = 0; d < cone.dim; ++d) {
        const double h = ctx.grid.f_axes[d].half_width;
        shift[d] = uniform(rng, -h, h);
      }
      ScalarSymbol piece = zero_symbol_like(frame);
      for (std::size_t idx = 0; idx < frame.size(); ++idx)
        if (phi[i][idx] != 0.0) piece.values[idx] = a * phi[i][idx] * std::polar(1.0, -frame.lambda_at(idx).dot(shift));
      pieces.push_back(weight[i] * lp_norm(synthesize(ctx, piece), cfg.p));
      total = add_symbols(total, piece);
    }
    TrialRow row;
    row.trial = trial;
    row.seed = ts;
    row.lhs = lp_norm(synthesize(ctx, total), cfg.p);
    row.rhs = lq_norm(pieces, cfg.q);
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
    report.rows[trial] = row;
  });
  report.finalize();
  report.sweep_label = "trials";
  double running = 0.0;
  for (const TrialRow& row : report.rows) {
    running = std::max(running, row.ratio);
    report.trajectory.push_back({row.trial + 1.0, running});
  }
  report.summary = {{"shell_size", static_cast<double>(shell.size())},
                    {"lattice_points", static_cast<double>(spec.points.size())},
                    {"c_inversion", ctx.c},
                    {"empirical_constant", report.max_ratio}};
  bool finite = true;
  for (const TrialRow& row : report.rows) finite &= std::isfinite(row.ratio);
  report.add_check("ratios_finite", finite, report.max_ratio, kInf);
  const bool plancherel = cfg.p == 2.0 && cfg.q == 2.0 && s.s.isZero() && !cfg.weighted &&
                          mode_from(cfg) == BumpMode::partition_sq && siegel.n == 0;
  if (plancherel && !report.rows.empty()) {
    const double dev = std::max(report.max_ratio - 1.0, 1.0 - report.min_ratio);
    report.add_check("plancherel_band", dev <= 0.1, dev, 0.1);
  }
  return report;
}

TrialReport run_blowup(const ExperimentConfig& cfg) {
  const SiegelData siegel = siegel_from_config(cfg);
  require_blowup_setting(siegel);
  const ConeDescriptor& cone = siegel.cone;
  const SpectralContext ctx = make_context(siegel, grid_from_config(cfg, siegel));
  const Region region = region_from_config(cfg, cone);
  const PowerExponent s = s_from_config(cfg, cone);
  if (cfg.k_max < 1) throw ConfigError("k_max must be >= 1");
  const int j = blowup_coordinate(cfg, s);
  const BesovParams params{s, cfg.p, cfg.q};
  validate_exponents(cfg.p, cfg.q);
  const LatticeSpec spec = lattice_from(cfg, cone, region, cfg.delta);
  const BumpMode mode = mode_from(cfg);
  const TransportChoice transport = transport_from(cfg);
  const ScalarSymbol base = blowup_base_symbol(ctx, cfg.bump_radius);

  std::vector<BlowupPoint> points(cfg.k_max + 1);
  parallel_for(cfg.k_max + 1, cfg.threads, [&](int k) {
    points[k] = blowup_point(ctx, base, spec, mode, transport, params, j, k, false);
  });
  TrialReport report;
  report.experiment = "blowup";
  report.sweep_label = "k+1";
  const double base_ratio = points[0].lp / points[0].analytic;
  double identity_err = 0.0;
  std::vector<double> lx, ly;
  for (int k = 1; k <= cfg.k_max; ++k) {
    const BlowupPoint& pt = points[k];
    TrialRow row;
    row.trial = k;
    row.seed = cfg.seed;
    row.lhs = pt.lp;
    row.rhs = pt.analytic;
    row.ratio = pt.lp / pt.analytic;
    const double err = std::abs(pt.lp / (pt.expected_growth * points[0].lp) - 1.0);
    identity_err = std::max(identity_err, err);
    row.extras = {{"expected_growth", pt.expected_growth}, {"norm_identity_error", err}};
    report.rows.push_back(row);
    report.trajectory.push_back({k + 1.0, row.ratio});
    lx.push_back(std::log(k + 1.0));
    ly.push_back(std::log(row.ratio));
  }
  report.finalize();
  const double slope = least_squares_slope(lx, ly);
  const double growth = report.rows.back().ratio / base_ratio;
  report.summary = {{"j", static_cast<double>(j)},
                    {"s_j", s[j]},
                    {"slope", slope},
                    {"growth", growth},
                    {"base_ratio", base_ratio},
                    {"lattice_points", static_cast<double>(spec.points.size())}};
  report.add_check("norm_identity", identity_err <= 1e-3, identity_err, 1e-3);
  if (s[j] > 0.0) {
    report.add_check("slope", std::abs(slope - s[j]) <= 0.05, slope, s[j]);
  } else {
    const double spread = report.max_ratio / report.min_ratio - 1.0;
    report.add_check("flat", spread <= 0.05, spread, 0.05);
  }
  return report;
}

TrialReport run_multiplier(const ExperimentConfig& cfg) {
  const SiegelData siegel = siegel_from_config(cfg);
  const ConeDescriptor& cone = siegel.cone;
  const SpectralContext ctx = make_context(siegel, grid_from_config(cfg, siegel));
  const Region region = region_from_config(cfg, cone);
  const PowerExponent s = s_from_config(cfg, cone);
  validate_exponents(cfg.p, cfg.q);
  multiplier_value(cfg, cone, cone.e_dual);
  auto conj = [](double p) { return p <= 1.0 ? kInf : p / (p - 1.0); };
  const double p0 = cfg.p0 > 0.0 ? cfg.p0 : std::min(cfg.p, conj(cfg.p));
  if (cfg.p < p0 * (1.0 - 1e-12) || cfg.p > conj(p0) * (1.0 + 1e-12))
    throw DomainError("run_multiplier: p outside [p0, p0']");
  const double inv_q0 = 1.0 / std::max(1.0, p0) - 0.5;
  const double q0 = inv_q0 > 0.0 ? 1.0 / inv_q0 : kInf;
  const ClassicalParams mihlin{cone.dim * (1.0 / p0 - 0.5), q0, std::min(p0, 1.0)};

  // Mihlin seminorm: classical Besov norm of phi M(. t) on a lambda grid centred at e'.
  const SiegelData flat = abelian_siegel(cone);
  const int count = cone.dim >= 3 ? std::min(cfg.symbol_grid_count, 32) : cfg.symbol_grid_count;
  const Grid lgrid = make_grid(0, 2, 1.0, std::vector<int>(cone.dim, count),
                               std::vector<double>(cone.dim, cfg.symbol_grid_half_width));
  const SpectralContext lctx{flat, lgrid, std::pow(2.0 * M_PI, -cone.dim)};
  std::mt19937_64 trng(trial_seed(cfg.seed, -1));
  std::vector<TriangularElement> ts{identity_element(cone)};
  for (int i = 1; i < cfg.t_samples; ++i) ts.push_back(random_element(cone, trng, 0.5));
  std::vector<double> seminorms(ts.size());
  parallel_for(static_cast<int>(ts.size()), cfg.threads, [&](int i) {
    GridFunction f(lgrid);
    for (std::size_t idx = 0; idx < lgrid.size(); ++idx) {
      const Vec lambda = cone.e_dual + lgrid.x_at(idx);
      const double cut = cinf_bump(cone, cone.e_dual, 0.7, lambda);
      if (cut != 0.0) f.values[idx] = cut * multiplier_value(cfg, cone, ts[i].act_dual(lambda));
    }
    seminorms[i] = besov_classical(lctx, f, mihlin);
  });
  const double seminorm = max_of(seminorms);

  const LatticeSpec spec = lattice_from(cfg, cone, region, cfg.delta);
  const BumpFamily bumps = build_bumps(cone, spec, mode_from(cfg), transport_from(cfg));
  const BesovParams params{s, cfg.p, cfg.q};
  TrialReport report;
  report.experiment = "multiplier";
  report.rows.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](int trial) {
    const std::uint64_t ts_seed = trial_seed(cfg.seed, trial);
    std::mt19937_64 rng(ts_seed);
    const ScalarSymbol sigma = random_band_limited(ctx, region, rng, cfg.terms, cfg.bump_radius);
    const ScalarSymbol msigma =
        map_symbol(cone, sigma, [&](const Vec& l, cplx v) { return v * multiplier_value(cfg, cone, l); });
    TrialRow row;
    row.trial = trial;
    row.seed = ts_seed;
    row.rhs = besov_analytic(ctx, sigma, params, bumps);
    row.lhs = besov_analytic(ctx, msigma, params, bumps);
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
    report.rows[trial] = row;
  });
  report.finalize();
  report.sweep_label = "t sample";
  for (std::size_t i = 0; i < seminorms.size(); ++i) report.trajectory.push_back({i + 1.0, seminorms[i]});
  report.summary = {{"seminorm", seminorm},
                    {"p0", p0},
                    {"q0", q0},
                    {"mihlin_index", mihlin.s},
                    {"microindex", mihlin.q}};
  if (!report.rows.empty()) {
    double dev = 0.0;
    for (const TrialRow& row : report.rows) dev = std::max(dev, std::abs(row.ratio - 1.0));
    if (cfg.multiplier == "one") report.add_check("identity_exact", dev == 0.0, dev, 0.0);
    if (cfg.multiplier == "delta_power" && cfg.p == 2.0 && cfg.q == 2.0)
      report.add_check("unimodular_l2", dev <= 1e-10, dev, 1e-10);
    report.add_check("bounded_by_seminorm", report.max_ratio <= 5.0 * seminorm, report.max_ratio, 5.0 * seminorm);
  }
  return report;
}

TrialReport run_comparison(const ExperimentConfig& cfg) {
  const SiegelData siegel = siegel_from_config(cfg);
  const ConeDescriptor& cone = siegel.cone;
  const SpectralContext ctx = make_context(siegel, grid_from_config(cfg, siegel));
  const PowerExponent s = s_from_config(cfg, cone);
  validate_exponents(cfg.p, cfg.q);
  const BesovParams params{s, cfg.p, cfg.q};
  const ClassicalParams cparams{s.sum(), cfg.p, cfg.q};
  TrialReport report;
  report.experiment = "comparison";

  if (cfg.single_term) {
    const double scale = cfg.single_offset * std::ldexp(1.0, cfg.single_j);
    const Vec lambda_k = scale * cone.e_dual;
    const double r = 0.05;
    const Region region = Region::annulus(scale * std::exp(-0.2), scale * std::exp(0.2), 0.2);
    const LatticeSpec spec = single_point_lattice(cone, lambda_k, cfg.delta, region);
    const BumpFamily bumps = build_bumps(cone, spec, BumpMode::cover);
    const double expected =
        delta_power(cone, Side::dual, s, lambda_k) / std::pow(2.0, s.sum() * cfg.single_j);
    const auto [lo, hi] = region_box(cone, region, 0.0);
    report.rows.resize(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](int trial) {
      const std::uint64_t ts = trial_seed(cfg.seed, trial);
      std::mt19937_64 rng(ts);
      const cplx a = complex_gaussian(rng);
      Vec shift(cone.dim);
      for (int d = 0; d < cone.dim; ++d) shift[d] = uniform(rng, -0.5, 0.5) * ctx.grid.f_axes[d].half_width;
      const ScalarSymbol sigma = make_dual_symbol(cone, ctx.grid, lo, hi, [&](const Vec& l) {
        return a * cinf_bump(cone, lambda_k, r, l) * std::polar(1.0, -l.dot(shift));
      });
      TrialRow row;
      row.trial = trial;
      row.seed = ts;
      row.lhs = besov_analytic(ctx, sigma, params, bumps);
      row.rhs = besov_classical(ctx, sigma, cparams);
      row.ratio = row.lhs / row.rhs;
      row.extras = {{"expected", expected}};
      report.rows[trial] = row;
    });
    report.finalize();
    double err = 0.0;
    for (const TrialRow& row : report.rows) err = std::max(err, std::abs(row.ratio / expected - 1.0));
    report.summary = {{"expected_ratio", expected}, {"max_relative_error", err}};
    report.add_check("single_term_exact", err <= 1e-12, err, 1e-12);
    return report;
  }

  const Region region = region_from_config(cfg, cone);
  const LatticeSpec spec = lattice_from(cfg, cone, region, cfg.delta);
  const BumpFamily bumps = build_bumps(cone, spec, mode_from(cfg), transport_from(cfg));
  report.rows.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](int trial) {
    const std::uint64_t ts = trial_seed(cfg.seed, trial);
    std::mt19937_64 rng(ts);
    const ScalarSymbol sigma = random_band_limited(ctx, region, rng, cfg.terms, cfg.bump_radius);
    TrialRow row;
    row.trial = trial;
    row.seed = ts;
    row.lhs = besov_analytic(ctx, sigma, params, bumps);
    row.rhs = besov_classical(ctx, sigma, cparams);
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
    report.rows[trial] = row;
  });
  report.finalize();
  const double band = report.min_ratio > 0.0 ? report.max_ratio / report.min_ratio : kInf;
  report.summary = {{"band", band}, {"lattice_points", static_cast<double>(spec.points.size())}};
  if (cone.rank == 1) report.add_check("rank_one_band", band < 10.0, band, 10.0);

  if (cone.rank > 1 && cone.kind == ConeKind::product && siegel.n == 0) {
    // Analytic/classical ratio along the degenerating family.
    const int j = blowup_coordinate(cfg, s);
    const ScalarSymbol base = blowup_base_symbol(ctx, cfg.bump_radius);
    const LatticeSpec bspec = lattice_from(cfg, cone, region, cfg.delta);
    std::vector<int> ks{0};
    for (int k = 1; k < cfg.k_max; k *= 2) ks.push_back(k);
    if (ks.back() != cfg.k_max) ks.push_back(cfg.k_max);
    std::vector<BlowupPoint> pts(ks.size());
    parallel_for(static_cast<int>(ks.size()), cfg.threads, [&](int i) {
      pts[i] = blowup_point(ctx, base, bspec, mode_from(cfg), transport_from(cfg), params, j, ks[i], true);
    });
    report.sweep_label = "k+1";
    for (std::size_t i = 0; i < ks.size(); ++i)
      report.trajectory.push_back({ks[i] + 1.0, pts[i].analytic / pts[i].classical});
    const double degradation = report.trajectory.front().y / report.trajectory.back().y;
    report.summary.push_back({"family_degradation", degradation});
  }
  return report;
}

TrialReport run_calibrate(const ExperimentConfig& cfg) {
  const SiegelData siegel = siegel_from_config(cfg);
  const Grid grid = grid_from_config(cfg, siegel);
  const Calibration cal = calibrate_constants(siegel, grid);
  TrialReport report;
  report.experiment = "calibrate";
  report.summary = {{"c_inversion", cal.c_inversion},
                    {"c_plancherel", cal.c_plancherel},
                    {"inversion_residual", cal.inversion_residual},
                    {"plancherel_residual", cal.plancherel_residual},
                    {"truncation", cal.truncation}};
  report.add_check("inversion_residual", cal.inversion_residual <= 1e-3, cal.inversion_residual, 1e-3);
  report.add_check("plancherel_residual", cal.plancherel_residual <= 1e-3, cal.plancherel_residual, 1e-3);
  if (siegel.n == 0) {
    const double expected = std::pow(2.0 * M_PI, -siegel.m);
    const double err = std::abs(cal.c_inversion - expected);
    report.summary.push_back({"expected", expected});
    report.add_check("abelian_constant", err <= 1e-6, err, 1e-6);
  }
  return report;
}

TrialReport run_lattice(const ExperimentConfig& cfg) {
  const SiegelData siegel = siegel_from_config(cfg);
  const ConeDescriptor& cone = siegel.cone;
  const Region region = region_from_config(cfg, cone);
  const LatticeSpec spec = lattice_from(cfg, cone, region, cfg.delta);
  const LatticeReport lr = verify_lattice(cone, spec);
  TrialReport report;
  report.experiment = "lattice";
  report.summary = {{"points", static_cast<double>(lr.point_count)},
                    {"samples", static_cast<double>(lr.sample_count)},
                    {"separation_violations", static_cast<double>(lr.separation_violations)},
                    {"cover_violations", static_cast<double>(lr.cover_violations)},
                    {"max_overlap", static_cast<double>(lr.max_overlap)},
                    {"min_separation", lr.min_separation},
                    {"max_cover_distance", lr.max_cover_distance}};
  report.add_check("separation", lr.separation_violations == 0, lr.separation_violations, 0);
  report.add_check("cover", lr.cover_violations == 0, lr.cover_violations, 0);
  return report;
}

TrialReport run_sampling(const ExperimentConfig& cfg) {
  const SiegelData siegel = siegel_from_config(cfg);
  const ConeDescriptor& cone = siegel.cone;
  const SpectralContext ctx = make_context(siegel, grid_from_config(cfg, siegel));
  if (cfg.box_lo.empty() || cfg.box_hi.empty()) throw ConfigError("sampling needs box_lo and box_hi (spectral window)");
  const auto blo = broadcast(cfg.box_lo, cone.dim, "box_lo");
  const auto bhi = broadcast(cfg.box_hi, cone.dim, "box_hi");
  const Vec lo = Eigen::Map<const Vec>(blo.data(), cone.dim);
  const Vec hi = Eigen::Map<const Vec>(bhi.data(), cone.dim);
  std::vector<double> deltas = cfg.deltas.empty() ? std::vector<double>{cfg.delta, cfg.delta / 2.0} : cfg.deltas;
  TrialReport report;
  report.experiment = "sampling";
  report.sweep_label = "delta";
  const int nt = cfg.trials;
  report.rows.resize(deltas.size() * nt);
  std::vector<double> band(deltas.size(), 1.0);
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const GroupLattice glat = build_group_lattice(siegel, ctx.grid, deltas[di]);
    parallel_for(nt, cfg.threads, [&](int trial) {
      const int id = static_cast<int>(di) * nt + trial;
      const std::uint64_t ts = trial_seed(cfg.seed, trial);
      std::mt19937_64 rng(ts);
      const ScalarSymbol sigma = make_dual_symbol(cone, ctx.grid, lo, hi, [&](const Vec&) { return complex_gaussian(rng); });
      const GridFunction u = synthesize(ctx, sigma);
      const SampleBounds b = sample_bounds(siegel, u, glat, cfg.p);
      TrialRow row;
      row.trial = id;
      row.seed = ts;
      row.lhs = b.true_norm;
      row.rhs = b.upper;
      row.ratio = b.true_norm / b.upper;
      row.extras = {{"delta", deltas[di]}, {"p", cfg.p}, {"upper", b.upper}, {"lower", b.lower},
                    {"true", b.true_norm}, {"lower_over_true", b.lower / b.true_norm}};
      report.rows[id] = row;
    });
    double c = 1.0;
    for (int t = 0; t < nt; ++t) {
      const TrialRow& row = report.rows[di * nt + t];
      const double r1 = row.ratio;
      const double r2 = row.extras.back().second;
      for (double r : {r1, 1.0 / r1, r2, 1.0 / r2}) c = std::max(c, r);
    }
    band[di] = c;
    report.trajectory.push_back({deltas[di], c});
    report.summary.push_back({"C(delta=" + std::to_string(deltas[di]) + ")", c});
  }
  report.finalize();
  for (std::size_t di = 1; di < deltas.size(); ++di)
    report.add_check("band_stable_" + std::to_string(di), band[di] <= 2.0 * band[di - 1], band[di],
                     2.0 * band[di - 1]);

  // Two-frequency counterexample for the min version at a delta above the bandwidth scale.
  const ScalarSymbol frame = make_dual_symbol(cone, ctx.grid, lo, hi, [](const Vec&) { return cplx(1.0, 0.0); });
  std::size_t ia = 0, ib = 0;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame.values[i] == cplx(0.0, 0.0)) continue;
    const Vec l = frame.lambda_at(i);
    if (frame.values[ia] == cplx(0.0, 0.0) || l[0] < frame.lambda_at(ia)[0]) ia = i;
  }
  ib = ia;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame.values[i] == cplx(0.0, 0.0)) continue;
    const Vec l = frame.lambda_at(i);
    const Vec la = frame.lambda_at(ia);
    bool same_rest = true;
    for (int a = 1; a < l.size(); ++a) same_rest &= std::abs(l[a] - la[a]) < 1e-12;
    if (same_rest && l[0] > frame.lambda_at(ib)[0]) ib = i;
  }
  if (ib != ia) {
    ScalarSymbol two = zero_symbol_like(frame);
    two.values[ia] = 1.0;
    two.values[ib] = -1.0;
    const double gap = frame.lambda_at(ib)[0] - frame.lambda_at(ia)[0];
    const double big = std::sqrt(2.0 * M_PI / gap);
    const GroupLattice glat = build_group_lattice(siegel, ctx.grid, big);
    const SampleBounds b = sample_bounds(siegel, synthesize(ctx, two), glat, cfg.p);
    const double r = b.lower / b.true_norm;
    report.summary.push_back({"counterexample_delta", big});
    report.summary.push_back({"counterexample_lower_over_true", r});
    report.add_check("min_version_failure", r < 0.1, r, 0.1);
  }
  return report;
}

TrialReport run_young(const ExperimentConfig& cfg) {
  const SiegelData siegel = siegel_from_config(cfg);
  const ConeDescriptor& cone = siegel.cone;
  const Region region = region_from_config(cfg, cone);
  check_young_exponents(cfg.p1, cfg.p2, cfg.p3);
  std::vector<int> counts = cfg.refine_counts;
  if (counts.empty()) counts = {cfg.grid_count.at(0), 2 * cfg.grid_count.at(0)};
  TrialReport report;
  report.experiment = "young";
  report.sweep_label = "grid count";
  const int nt = cfg.trials;
  report.rows.resize(counts.size() * nt);
  std::vector<double> cmax(counts.size());
  for (std::size_t gi = 0; gi < counts.size(); ++gi) {
    ExperimentConfig g = cfg;
    g.grid_count = {counts[gi]};
    const SpectralContext ctx = make_context(siegel, grid_from_config(g, siegel));
    parallel_for(nt, cfg.threads, [&](int trial) {
      const int id = static_cast<int>(gi) * nt + trial;
      const std::uint64_t ts = trial_seed(cfg.seed, trial);
      std::mt19937_64 rng(ts);
      const ScalarSymbol su = random_band_limited(ctx, region, rng, cfg.terms, cfg.bump_radius);
      const ScalarSymbol sv = random_band_limited(ctx, region, rng, cfg.terms, cfg.bump_radius);
      const YoungReport y = young_check(ctx, su, sv, cfg.p1, cfg.p2, cfg.p3);
      TrialRow row;
      row.trial = id;
      row.seed = ts;
      row.lhs = y.lhs;
      row.rhs = y.norm_u * y.norm_v;
      row.ratio = y.ratio;
      row.extras = {{"grid_count", static_cast<double>(counts[gi])}};
      report.rows[id] = row;
    });
    std::vector<double> r;
    for (int t = 0; t < nt; ++t) r.push_back(report.rows[gi * nt + t].ratio);
    cmax[gi] = max_of(r);
    report.trajectory.push_back({static_cast<double>(counts[gi]), cmax[gi]});
    report.summary.push_back({"C(N=" + std::to_string(counts[gi]) + ")", cmax[gi]});
  }
  report.finalize();
  for (std::size_t gi = 1; gi < counts.size(); ++gi) {
    const double f = cmax[gi] / cmax[gi - 1];
    report.add_check("refinement_stable_" + std::to_string(gi), std::isfinite(f) && f <= 2.0 && f >= 0.5, f, 2.0);
  }

  if (siegel.n == 0 && siegel.m == 1) {
    // Control with indicator functions: no spectral hypothesis.
    const Grid cgrid = make_grid(0, 2, 1.0, {4096}, {8.0});
    auto box = [&](double width) {
      GridFunction f(cgrid);
      for (std::size_t i = 0; i < cgrid.size(); ++i) {
        const double x = cgrid.x_at(i)[0];
        if (x >= 0.0 && x < width) f.values[i] = 1.0;
      }
      return f;
    };
    const GridFunction wide = box(1.0), narrow = box(1.0 / 16.0);
    const double rw = young_check_grid(siegel, wide, wide, cfg.p1, cfg.p2, cfg.p3).ratio;
    const double rn = young_check_grid(siegel, narrow, narrow, cfg.p1, cfg.p2, cfg.p3).ratio;
    report.summary.push_back({"control_ratio_wide", rw});
    report.summary.push_back({"control_ratio_narrow", rn});
    report.summary.push_back({"control_growth", rn / rw});
    if (cfg.p3 < 1.0) report.add_check("control_growth", rn / rw > 10.0, rn / rw, 10.0);
  }
  return report;
}

TrialReport run_embedding(const ExperimentConfig& cfg) {
  const SiegelData siegel = siegel_from_config(cfg);
  const ConeDescriptor& cone = siegel.cone;
  const SpectralContext ctx = make_context(siegel, grid_from_config(cfg, siegel));
  const Region region = region_from_config(cfg, cone);
  const PowerExponent s1 = s_from_config(cfg, cone);
  const BesovParams params1{s1, cfg.p1, cfg.q};
  const BesovParams params2{s1 + embedding_shift(siegel, cfg.p1, cfg.p2), cfg.p2, cfg.q};
  std::vector<double> deltas = cfg.deltas.empty() ? std::vector<double>{cfg.delta, cfg.delta / 2.0} : cfg.deltas;
  TrialReport report;
  report.experiment = "embedding";
  report.sweep_label = "delta";
  const int nt = cfg.trials;
  report.rows.resize(deltas.size() * nt);
  std::vector<double> cmax(deltas.size());
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const LatticeSpec spec = lattice_from(cfg, cone, region, deltas[di]);
    const BumpFamily bumps = build_bumps(cone, spec, mode_from(cfg), transport_from(cfg));
    parallel_for(nt, cfg.threads, [&](int trial) {
      const int id = static_cast<int>(di) * nt + trial;
      const std::uint64_t ts = trial_seed(cfg.seed, trial);
      std::mt19937_64 rng(ts);
      const ScalarSymbol sigma = random_band_limited(ctx, region, rng, cfg.terms, cfg.bump_radius);
      const EmbeddingReport e = embedding_ratio(ctx, sigma, params1, params2, bumps);
      TrialRow row;
      row.trial = id;
      row.seed = ts;
      row.lhs = e.norm_high;
      row.rhs = e.norm_low;
      row.ratio = e.ratio;
      row.extras = {{"delta", deltas[di]}};
      report.rows[id] = row;
    });
    std::vector<double> r;
    for (int t = 0; t < nt; ++t) r.push_back(report.rows[di * nt + t].ratio);
    cmax[di] = max_of(r);
    const double band = max_of(r) / min_of(r);
    report.trajectory.push_back({deltas[di], cmax[di]});
    report.summary.push_back({"band(delta=" + std::to_string(deltas[di]) + ")", band});
    report.add_check("band_" + std::to_string(di), band < 10.0, band, 10.0);
  }
  report.finalize();
  for (std::size_t di = 1; di < deltas.size(); ++di) {
    const double f = cmax[di] / cmax[di - 1];
    report.add_check("delta_stable_" + std::to_string(di), f <= 2.0 && f >= 0.5, f, 2.0);
  }
  return report;
}

std::vector<std::string> experiment_names() {
  return {"decoupling", "blowup", "multiplier", "comparison", "calibrate",
          "lattice",    "sampling", "young",    "embedding"};
}

TrialReport run_experiment(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "decoupling") return run_decoupling(cfg);
  if (e == "blowup") return run_blowup(cfg);
  if (e == "multiplier") return run_multiplier(cfg);
  if (e == "comparison") return run_comparison(cfg);
  if (e == "calibrate") return run_calibrate(cfg);
  if (e == "lattice") return run_lattice(cfg);
  if (e == "sampling") return run_sampling(cfg);
  if (e == "young") return run_young(cfg);
  if (e == "embedding") return run_embedding(cfg);
  throw ConfigError("unknown experiment '" + e + "'");
}

}  // namespace conewave
