#include "conewave/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "conewave/fft.hpp"

namespace conewave {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<int> symbol_multi(const ScalarSymbol& s, std::size_t index) {
  std::vector<int> out(s.axes.size());
  for (int k = static_cast<int>(s.axes.size()) - 1; k >= 0; --k) {
    out[k] = static_cast<int>(index % s.axes[k].count);
    index /= s.axes[k].count;
  }
  return out;
}

// Signed dual-lattice integer coordinates K_i when the symbol lattice is dual to the grid.
bool dual_offsets(const ScalarSymbol& s, const Grid& grid, std::vector<long>& offsets) {
  if (s.axes.size() != grid.f_axes.size()) return false;
  offsets.resize(s.axes.size());
  for (std::size_t i = 0; i < s.axes.size(); ++i) {
    const double step = kPi / grid.f_axes[i].half_width;
    if (std::abs(s.axes[i].step - step) > 1e-12 * step) return false;
    const double ratio = s.axes[i].start / step;
    const double r = std::round(ratio);
    if (std::abs(ratio - r) > 1e-9) return false;
    offsets[i] = static_cast<long>(r);
  }
  return true;
}

long wrap(long k, int n) {
  long r = k % n;
  return r < 0 ? r + n : r;
}

void check_dims(const SiegelData& siegel, const Grid& grid) {
  if (grid.n() != siegel.n || grid.m() != siegel.m) throw DomainError("grid dimensions do not match the Siegel data");
}

void check_nyquist(const ScalarSymbol& sigma, const Grid& grid) {
  for (std::size_t idx = 0; idx < sigma.size(); ++idx) {
    if (sigma.values[idx] == cplx(0.0, 0.0)) continue;
    const Vec lambda = sigma.lambda_at(idx);
    for (int i = 0; i < lambda.size(); ++i) {
      const double nyquist = kPi / grid.f_axes[i].spacing();
      if (std::abs(lambda[i]) >= nyquist * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "synthesize: symbol support reaches |lambda_" << i << "| = " << std::abs(lambda[i])
           << " beyond the grid Nyquist bound " << nyquist;
        throw NumericalError(os.str());
      }
    }
  }
}

struct Weighted {
  std::vector<Vec> lambdas;
  std::vector<cplx> weights;
  std::vector<std::size_t> index;
};

// Nonzero samples times Delta'^{-b} times the quadrature weight.
Weighted weighted_samples(const SiegelData& siegel, const ScalarSymbol& sigma) {
  Weighted w;
  const double dl = sigma.weight();
  const PowerExponent minus_b = -siegel.b;
  for (std::size_t idx = 0; idx < sigma.size(); ++idx) {
    if (sigma.values[idx] == cplx(0.0, 0.0)) continue;
    const Vec lambda = sigma.lambda_at(idx);
    if (!membership(siegel.cone, Side::dual, lambda))
      throw DomainError("symbol has a nonzero sample outside the dual cone");
    w.lambdas.push_back(lambda);
    w.weights.push_back(sigma.values[idx] * delta_power(siegel.cone, Side::dual, minus_b, lambda) * dl);
    w.index.push_back(idx);
  }
  return w;
}

std::vector<Vec> quad_table(const SiegelData& siegel, const Grid& grid) {
  std::vector<Vec> q(grid.e_size());
  for (std::size_t e = 0; e < grid.e_size(); ++e) q[e] = siegel.quad(grid.zeta_at(e));
  return q;
}

std::string hex(double v) {
  std::ostringstream os;
  os << std::hexfloat << v;
  return os.str();
}

std::string cache_key(const SiegelData& siegel, const Grid& grid) {
  std::ostringstream os;
  os << to_string(siegel.cone.kind) << ':' << siegel.cone.dim << ':' << siegel.n << ':';
  for (const auto& v : siegel.phi)
    for (int k = 0; k < v.size(); ++k) os << hex(v[k].real()) << ',' << hex(v[k].imag()) << ';';
  os << '|';
  for (const Axis& a : grid.e_axes) os << a.count << '/' << hex(a.half_width) << ';';
  os << '|';
  for (const Axis& a : grid.f_axes) os << a.count << '/' << hex(a.half_width) << ';';
  return os.str();
}

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, Calibration>& cache() {
  static std::map<std::string, Calibration> c;
  return c;
}

// Boundary modulus of u relative to its peak over the grid faces.
double boundary_ratio(const GridFunction& u) {
  const Grid& g = u.grid;
  double peak = 0.0, edge = 0.0;
  for (std::size_t e = 0; e < g.e_size(); ++e) {
    const auto em = g.e_multi(e);
    bool e_edge = false;
    for (std::size_t k = 0; k < em.size(); ++k) e_edge |= (em[k] == 0 || em[k] == g.e_axes[k].count - 1);
    for (std::size_t f = 0; f < g.f_size(); ++f) {
      const double a = std::abs(u.at(e, f));
      peak = std::max(peak, a);
      bool is_edge = e_edge;
      if (!is_edge) {
        const auto fm = g.f_multi(f);
        for (std::size_t k = 0; k < fm.size(); ++k) is_edge |= (fm[k] == 0 || fm[k] == g.f_axes[k].count - 1);
      }
      if (is_edge) edge = std::max(edge, a);
    }
  }
  return peak > 0.0 ? edge / peak : 0.0;
}

}  // namespace

std::size_t ScalarSymbol::size() const {
  std::size_t s = 1;
  for (const auto& a : axes) s *= a.count;
  return axes.empty() ? 0 : s;
}

Vec ScalarSymbol::lambda_at(std::size_t index) const {
  const auto multi = symbol_multi(*this, index);
  Vec out(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) out[i] = axes[i].value(multi[i]);
  return out;
}

double ScalarSymbol::weight() const {
  double w = 1.0;
  for (const auto& a : axes) w *= a.step;
  return w;
}

bool ScalarSymbol::same_lattice(const ScalarSymbol& other) const {
  if (axes.size() != other.axes.size()) return false;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto &a = axes[i], &b = other.axes[i];
    if (a.count != b.count || std::abs(a.step - b.step) > 1e-12 * a.step ||
        std::abs(a.start - b.start) > 1e-12 * std::max(1.0, std::abs(a.start)))
      return false;
  }
  return true;
}

bool ScalarSymbol::is_zero() const {
  for (const cplx& v : values)
    if (v != cplx(0.0, 0.0)) return false;
  return true;
}

std::vector<SymbolAxis> dual_lattice_axes(const Grid& grid, const Vec& lo, const Vec& hi) {
  if (lo.size() != grid.m() || hi.size() != grid.m()) throw DomainError("symbol box has wrong dimension");
  std::vector<SymbolAxis> axes;
  for (int i = 0; i < grid.m(); ++i) {
    const double step = kPi / grid.f_axes[i].half_width;
    const long k0 = static_cast<long>(std::ceil(lo[i] / step - 1e-9));
    const long k1 = static_cast<long>(std::floor(hi[i] / step + 1e-9));
    if (k1 < k0) throw DomainError("symbol box contains no dual lattice point");
    axes.push_back(SymbolAxis{k0 * step, step, static_cast<int>(k1 - k0 + 1)});
  }
  return axes;
}

ScalarSymbol make_symbol(const ConeDescriptor& cone, std::vector<SymbolAxis> axes, const SymbolFn& fn) {
  if (static_cast<int>(axes.size()) != cone.dim) throw DomainError("symbol lattice dimension differs from the cone");
  ScalarSymbol s;
  s.axes = std::move(axes);
  s.values.assign(s.size(), cplx(0.0, 0.0));
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    const Vec lambda = s.lambda_at(idx);
    if (membership(cone, Side::dual, lambda)) s.values[idx] = fn(lambda);
  }
  return s;
}

ScalarSymbol make_dual_symbol(const ConeDescriptor& cone, const Grid& grid, const Vec& lo, const Vec& hi,
                              const SymbolFn& fn) {
  return make_symbol(cone, dual_lattice_axes(grid, lo, hi), fn);
}

ScalarSymbol map_symbol(const ConeDescriptor& cone, const ScalarSymbol& sigma,
                        const std::function<cplx(const Vec&, cplx)>& fn) {
  ScalarSymbol out = sigma;
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const Vec lambda = out.lambda_at(idx);
    out.values[idx] = membership(cone, Side::dual, lambda) ? fn(lambda, sigma.values[idx]) : cplx(0.0, 0.0);
  }
  return out;
}

ScalarSymbol zero_symbol_like(const ScalarSymbol& sigma) {
  ScalarSymbol out = sigma;
  std::fill(out.values.begin(), out.values.end(), cplx(0.0, 0.0));
  return out;
}

ScalarSymbol add_symbols(const ScalarSymbol& a, const ScalarSymbol& b) {
  if (!a.same_lattice(b)) throw DomainError("symbols live on different lattices");
  ScalarSymbol out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += b.values[i];
  return out;
}

double cinf_bump(const ConeDescriptor& cone, const Vec& center, double radius, const Vec& lambda) {
  if (!membership(cone, Side::dual, lambda)) return 0.0;
  const double d = invariant_distance(cone, center, lambda) / radius;
  if (d >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - d * d));
}

double n_lambda(const SiegelData& siegel, const Vec& lambda) {
  if (!membership(siegel.cone, Side::dual, lambda)) throw DomainError("n_lambda: point outside the dual cone");
  double trace = 0.0;
  for (int a = 0; a < siegel.n; ++a) trace += lambda.dot(siegel.phi[a * siegel.n + a].real());
  return trace * trace + lambda.squaredNorm();
}

GridFunction synthesize(const SiegelData& siegel, const ScalarSymbol& sigma, const Grid& grid, double c) {
  check_dims(siegel, grid);
  if (static_cast<int>(sigma.axes.size()) != siegel.m) throw DomainError("symbol dimension differs from F");
  GridFunction u(grid);
  if (sigma.is_zero()) return u;
  check_nyquist(sigma, grid);
  const Weighted w = weighted_samples(siegel, sigma);
  const auto q = quad_table(siegel, grid);
  std::vector<long> offsets;
  if (dual_offsets(sigma, grid, offsets)) {
    const auto shape = grid.f_shape();
    std::vector<std::size_t> pos(w.index.size());
    std::vector<double> sign(w.index.size());
    for (std::size_t j = 0; j < w.index.size(); ++j) {
      const auto multi = symbol_multi(sigma, w.index[j]);
      std::size_t p = 0;
      long parity = 0;
      for (std::size_t i = 0; i < multi.size(); ++i) {
        const long k = offsets[i] + multi[i];
        p = p * shape[i] + wrap(k, shape[i]);
        parity += k;
      }
      pos[j] = p;
      sign[j] = (parity % 2 == 0) ? 1.0 : -1.0;
    }
    FftPlan plan(shape, false);
    for (std::size_t e = 0; e < grid.e_size(); ++e) {
      std::fill(plan.data(), plan.data() + plan.size(), cplx(0.0, 0.0));
      for (std::size_t j = 0; j < pos.size(); ++j) {
        const double damp = siegel.n > 0 ? std::exp(-w.lambdas[j].dot(q[e])) : 1.0;
        plan.data()[pos[j]] += w.weights[j] * (sign[j] * damp);
      }
      plan.execute();
      for (std::size_t f = 0; f < grid.f_size(); ++f) u.at(e, f) = c * plan.data()[f];
    }
    return u;
  }
  std::vector<Vec> xs(grid.f_size());
  for (std::size_t f = 0; f < grid.f_size(); ++f) xs[f] = grid.x_at(f);
  for (std::size_t e = 0; e < grid.e_size(); ++e) {
    std::vector<cplx> damped(w.weights.size());
    for (std::size_t j = 0; j < w.weights.size(); ++j)
      damped[j] = w.weights[j] * (siegel.n > 0 ? std::exp(-w.lambdas[j].dot(q[e])) : 1.0);
    for (std::size_t f = 0; f < grid.f_size(); ++f) {
      cplx acc(0.0, 0.0);
      for (std::size_t j = 0; j < damped.size(); ++j) acc += damped[j] * std::polar(1.0, w.lambdas[j].dot(xs[f]));
      u.at(e, f) = c * acc;
    }
  }
  return u;
}

ScalarSymbol symbol_readback(const SiegelData& siegel, const GridFunction& u, const ScalarSymbol& lattice_of) {
  check_dims(siegel, u.grid);
  const Grid& grid = u.grid;
  ScalarSymbol out = zero_symbol_like(lattice_of);
  const auto q = quad_table(siegel, grid);
  std::vector<Vec> lambdas(out.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) lambdas[idx] = out.lambda_at(idx);
  const double cell = grid.cell_measure();
  std::vector<long> offsets;
  if (dual_offsets(out, grid, offsets)) {
    const auto shape = grid.f_shape();
    std::vector<std::size_t> pos(out.size());
    std::vector<double> sign(out.size());
    std::vector<bool> valid(out.size(), true);
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
      valid[idx] = membership(siegel.cone, Side::dual, lambdas[idx]);
      const auto multi = symbol_multi(out, idx);
      std::size_t p = 0;
      long parity = 0;
      for (std::size_t i = 0; i < multi.size(); ++i) {
        const long k = offsets[i] + multi[i];
        if (2 * std::abs(k) >= shape[i]) valid[idx] = false;
        p = p * shape[i] + wrap(k, shape[i]);
        parity += k;
      }
      pos[idx] = p;
      sign[idx] = (parity % 2 == 0) ? 1.0 : -1.0;
    }
    FftPlan plan(shape, true);
    for (std::size_t e = 0; e < grid.e_size(); ++e) {
      for (std::size_t f = 0; f < grid.f_size(); ++f) plan.data()[f] = u.at(e, f);
      plan.execute();
      for (std::size_t idx = 0; idx < out.size(); ++idx) {
        if (!valid[idx]) continue;
        const double damp = siegel.n > 0 ? std::exp(-lambdas[idx].dot(q[e])) : 1.0;
        out.values[idx] += plan.data()[pos[idx]] * (sign[idx] * damp * cell);
      }
    }
    return out;
  }
  std::vector<bool> inside(out.size());
  for (std::size_t idx = 0; idx < out.size(); ++idx) inside[idx] = membership(siegel.cone, Side::dual, lambdas[idx]);
  for (std::size_t e = 0; e < grid.e_size(); ++e)
    for (std::size_t f = 0; f < grid.f_size(); ++f) {
      const cplx v = u.at(e, f);
      if (v == cplx(0.0, 0.0)) continue;
      const Vec x = grid.x_at(f);
      for (std::size_t idx = 0; idx < out.size(); ++idx) {
        if (!inside[idx]) continue;
        const double damp = siegel.n > 0 ? std::exp(-lambdas[idx].dot(q[e])) : 1.0;
        out.values[idx] += v * std::polar(damp * cell, -lambdas[idx].dot(x));
      }
    }
  return out;
}

cplx evaluate_at(const SiegelData& siegel, const ScalarSymbol& sigma, double c, const GroupPoint& g) {
  const Weighted w = weighted_samples(siegel, sigma);
  const Vec q = siegel.quad(g.zeta);
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < w.weights.size(); ++j)
    acc += w.weights[j] * std::exp(cplx(-w.lambdas[j].dot(q), w.lambdas[j].dot(g.x)));
  return c * acc;
}

ScalarSymbol convolve(const ScalarSymbol& a, const ScalarSymbol& b) {
  if (!a.same_lattice(b)) throw DomainError("convolve: symbols live on different lattices");
  ScalarSymbol out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

GridFunction convolve(const SiegelData& siegel, const GridFunction& u, const GridFunction& v) {
  if (!(u.grid == v.grid)) throw DomainError("convolve: incompatible grids");
  const Grid& grid = u.grid;
  check_dims(siegel, grid);
  for (const auto* axes : {&grid.e_axes, &grid.f_axes})
    for (const Axis& a : *axes)
      if (a.count % 2 != 0) throw DomainError("grid convolution needs even axis counts");
  const auto shape = grid.f_shape();
  const std::size_t fs = grid.f_size(), es = grid.e_size();
  std::vector<cplx> uh(u.values.size()), vh(v.values.size());
  {
    FftPlan plan(shape, true);
    for (auto [src, dst] : {std::pair{&u.values, &uh}, std::pair{&v.values, &vh}})
      for (std::size_t e = 0; e < es; ++e) {
        std::copy(src->begin() + e * fs, src->begin() + (e + 1) * fs, plan.data());
        plan.execute();
        std::copy(plan.data(), plan.data() + fs, dst->begin() + e * fs);
      }
  }
  // Signed frequency indices and the (-1)^K recentring factor.
  std::vector<std::vector<long>> kvals(fs);
  std::vector<double> recentre(fs);
  for (std::size_t f = 0; f < fs; ++f) {
    const auto multi = grid.f_multi(f);
    long parity = 0;
    for (std::size_t i = 0; i < multi.size(); ++i) {
      long k = multi[i];
      if (2 * k >= shape[i]) k -= shape[i];
      kvals[f].push_back(k);
      parity += k;
    }
    recentre[f] = (parity % 2 == 0) ? 1.0 : -1.0;
  }
  std::vector<cplx> wh(u.values.size(), cplx(0.0, 0.0));
  const double e_cell = grid.e_cell();
  const double f_cell = grid.f_cell();
  if (siegel.n == 0) {
    for (std::size_t f = 0; f < fs; ++f) wh[f] = f_cell * recentre[f] * uh[f] * vh[f];
  } else {
    std::vector<CVec> zetas(es);
    for (std::size_t e = 0; e < es; ++e) zetas[e] = grid.zeta_at(e);
    std::vector<std::vector<int>> emulti(es);
    for (std::size_t e = 0; e < es; ++e) emulti[e] = grid.e_multi(e);
    const int naxes = static_cast<int>(grid.e_axes.size());
    std::vector<double> mu_scale(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) mu_scale[i] = 2.0 * kPi / (shape[i] * grid.f_axes[i].spacing());
    std::vector<std::vector<cplx>> axis_phase(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) axis_phase[i].resize(shape[i]);
    std::vector<cplx> phase(fs);
    std::vector<int> diff(naxes);
    for (std::size_t e = 0; e < es; ++e) {
      cplx* out = wh.data() + e * fs;
      for (std::size_t ep = 0; ep < es; ++ep) {
        bool inside = true;
        for (int k = 0; k < naxes && inside; ++k) {
          diff[k] = emulti[e][k] - emulti[ep][k] + grid.e_axes[k].count / 2;
          inside = diff[k] >= 0 && diff[k] < grid.e_axes[k].count;
        }
        if (!inside) continue;
        const std::size_t ed = grid.e_flat(diff);
        const Vec shift = 2.0 * siegel.form(zetas[ep], zetas[e]).imag();
        for (std::size_t i = 0; i < shape.size(); ++i) {
          const cplx base = std::polar(1.0, -mu_scale[i] * shift[i]);
          cplx cur = std::pow(base, -shape[i] / 2);
          for (int k = 0; k < shape[i]; ++k) {
            axis_phase[i][wrap(k - shape[i] / 2, shape[i])] = cur;
            cur *= base;
          }
        }
        const cplx* a = uh.data() + ep * fs;
        const cplx* b = vh.data() + ed * fs;
        for (std::size_t f = 0; f < fs; ++f) {
          cplx ph(1.0, 0.0);
          for (std::size_t i = 0; i < shape.size(); ++i) ph *= axis_phase[i][wrap(kvals[f][i], shape[i])];
          out[f] += a[f] * b[f] * ph;
        }
      }
      for (std::size_t f = 0; f < fs; ++f) out[f] *= e_cell * f_cell * recentre[f];
    }
  }
  GridFunction w(grid);
  FftPlan plan(shape, false);
  const double norm = 1.0 / static_cast<double>(fs);
  for (std::size_t e = 0; e < es; ++e) {
    std::copy(wh.begin() + e * fs, wh.begin() + (e + 1) * fs, plan.data());
    plan.execute();
    for (std::size_t f = 0; f < fs; ++f) w.at(e, f) = plan.data()[f] * norm;
  }
  return w;
}

ScalarSymbol riemann_liouville(const ConeDescriptor& cone, const ScalarSymbol& sigma, const PowerExponent& s,
                               RlReading reading) {
  if (s.size() != cone.rank) throw DomainError("riemann_liouville: exponent length differs from the rank");
  const cplx phase = std::polar(1.0, -0.5 * kPi * s.sum());
  const Side side = reading == RlReading::dual_power ? Side::dual : Side::primal;
  ScalarSymbol out = sigma;
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    if (sigma.values[idx] == cplx(0.0, 0.0)) continue;
    const Vec lambda = out.lambda_at(idx);
    if (!membership(cone, Side::dual, lambda)) throw DomainError("riemann_liouville: sample outside the dual cone");
    out.values[idx] = sigma.values[idx] * phase * delta_power(cone, side, -s, lambda);
  }
  return out;
}

double weighted_symbol_l2(const SiegelData& siegel, const ScalarSymbol& sigma) {
  double acc = 0.0;
  const PowerExponent minus_b = -siegel.b;
  for (std::size_t idx = 0; idx < sigma.size(); ++idx) {
    if (sigma.values[idx] == cplx(0.0, 0.0)) continue;
    acc += std::norm(sigma.values[idx]) * delta_power(siegel.cone, Side::dual, minus_b, sigma.lambda_at(idx));
  }
  return acc * sigma.weight();
}

Calibration calibrate_constants(const SiegelData& siegel, const Grid& grid) {
  check_dims(siegel, grid);
  const std::string key = cache_key(siegel, grid);
  {
    std::lock_guard<std::mutex> lock(cache_mutex());
    auto it = cache().find(key);
    if (it != cache().end()) return it->second;
  }
  const ConeDescriptor& cone = siegel.cone;
  const double radius = 0.5;
  double nyquist = std::numeric_limits<double>::infinity();
  for (const Axis& a : grid.f_axes) nyquist = std::min(nyquist, kPi / a.spacing());
  const double rho = 0.45 * nyquist / std::exp(radius) / cone.e_dual.cwiseAbs().maxCoeff();
  const Vec center = rho * cone.e_dual;
  const Vec hi = Vec::Constant(cone.dim, 0.9 * nyquist);
  const Vec lo = -hi;
  const ScalarSymbol reference =
      make_dual_symbol(cone, grid, lo, hi, [&](const Vec& l) { return cplx(cinf_bump(cone, center, radius, l), 0.0); });
  Vec shift = Vec::Zero(cone.dim);
  for (int i = 0; i < cone.dim; ++i) shift[i] = 0.1 * grid.f_axes[i].half_width * (i % 2 == 0 ? 1.0 : -1.0);
  const ScalarSymbol modulated = map_symbol(cone, reference, [&](const Vec& l, cplx v) {
    return v * std::polar(1.0, -l.dot(shift)) * std::polar(1.0, 0.7 * std::log(l.norm()));
  });

  Calibration cal;
  double num = 0.0, den = 0.0;
  std::vector<std::pair<ScalarSymbol, GridFunction>> runs;
  for (const ScalarSymbol* s : {&reference, &modulated}) {
    GridFunction u = synthesize(siegel, *s, grid, 1.0);
    const ScalarSymbol back = symbol_readback(siegel, u, *s);
    for (std::size_t i = 0; i < s->size(); ++i) {
      num += std::real(s->values[i] * std::conj(back.values[i]));
      den += std::norm(back.values[i]);
    }
    runs.emplace_back(*s, std::move(u));
  }
  if (!(den > 0.0)) throw NumericalError("calibrate_constants: reference symbol vanished on this grid");
  cal.c_inversion = num / den;
  double plancherel = 0.0;
  for (auto& [s, u] : runs) {
    const ScalarSymbol back = symbol_readback(siegel, u, s);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      err += std::norm(cal.c_inversion * back.values[i] - s.values[i]);
      ref += std::norm(s.values[i]);
    }
    cal.inversion_residual = std::max(cal.inversion_residual, std::sqrt(err / ref));
    cal.truncation = std::max(cal.truncation, boundary_ratio(u));
    // u was synthesized with c = 1; rescale to the calibrated constant.
    double l2 = 0.0;
    for (const cplx& v : u.values) l2 += std::norm(v);
    l2 *= grid.cell_measure() * cal.c_inversion * cal.c_inversion;
    const double cp = l2 / weighted_symbol_l2(siegel, s);
    if (plancherel == 0.0) plancherel = cp;
    cal.plancherel_residual = std::max(cal.plancherel_residual, std::abs(cp / cal.c_inversion - 1.0));
  }
  cal.c_plancherel = plancherel;
  if (cal.inversion_residual > 1e-3 || cal.plancherel_residual > 1e-3) {
    std::ostringstream os;
    os << "calibrate_constants: residuals (inversion " << cal.inversion_residual << ", plancherel "
       << cal.plancherel_residual << ", boundary " << cal.truncation << ") above 1e-3";
    throw NumericalError(os.str());
  }
  std::lock_guard<std::mutex> lock(cache_mutex());
  cache().emplace(key, cal);
  return cal;
}

SpectralContext make_context(const SiegelData& siegel, const Grid& grid) {
  return SpectralContext{siegel, grid, calibrate_constants(siegel, grid).c_inversion};
}

GridFunction synthesize(const SpectralContext& ctx, const ScalarSymbol& sigma) {
  return synthesize(ctx.siegel, sigma, ctx.grid, ctx.c);
}

}  // namespace conewave
