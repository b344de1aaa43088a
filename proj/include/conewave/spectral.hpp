#pragma once

#include <functional>

#include "conewave/nilgroup.hpp"

namespace conewave {

struct SymbolAxis {
  double start = 0.0;
  double step = 1.0;
  int count = 0;

  double value(int k) const { return start + k * step; }
};

// Samples of a function on a tensor lattice over F'. Row-major, axis 0 slowest.
// Samples outside the open dual cone are zero (membership masking).
struct ScalarSymbol {
  std::vector<SymbolAxis> axes;
  std::vector<cplx> values;

  std::size_t size() const;
  Vec lambda_at(std::size_t index) const;
  double weight() const;  // quadrature weight: product of steps
  bool same_lattice(const ScalarSymbol& other) const;
  bool is_zero() const;
};

using SymbolFn = std::function<cplx(const Vec&)>;

// Lattice with the steps pi/L_i dual to the grid's F axes, restricted to [lo, hi].
std::vector<SymbolAxis> dual_lattice_axes(const Grid& grid, const Vec& lo, const Vec& hi);
ScalarSymbol make_symbol(const ConeDescriptor& cone, std::vector<SymbolAxis> axes, const SymbolFn& fn);
ScalarSymbol make_dual_symbol(const ConeDescriptor& cone, const Grid& grid, const Vec& lo, const Vec& hi,
                              const SymbolFn& fn);
ScalarSymbol map_symbol(const ConeDescriptor& cone, const ScalarSymbol& sigma,
                        const std::function<cplx(const Vec&, cplx)>& fn);
ScalarSymbol zero_symbol_like(const ScalarSymbol& sigma);
ScalarSymbol add_symbols(const ScalarSymbol& a, const ScalarSymbol& b);

// C-infinity bump exp(1 - 1/(1 - (d/r)^2)) in the invariant metric; equals 1 at the center.
double cinf_bump(const ConeDescriptor& cone, const Vec& center, double radius, const Vec& lambda);

// (tr H_lambda)^2 + |lambda|^2.
double n_lambda(const SiegelData& siegel, const Vec& lambda);

// u(z, x) = c * sum_k w_k sigma(l_k) Delta'^{-b}(l_k) e^{-<l_k, Phi(z)> + i <l_k, x>}.
// FFT along F when the symbol lattice is the grid's dual lattice, direct quadrature otherwise.
GridFunction synthesize(const SiegelData& siegel, const ScalarSymbol& sigma, const Grid& grid, double c);
// Forward transform int u(z,x) e^{-<l, Phi(z)>} e^{-i<l,x>} on the lattice of `lattice_of`, zero outside the dual cone.
ScalarSymbol symbol_readback(const SiegelData& siegel, const GridFunction& u, const ScalarSymbol& lattice_of);
// Direct quadrature of the synthesis integral at one group point.
cplx evaluate_at(const SiegelData& siegel, const ScalarSymbol& sigma, double c, const GroupPoint& g);

ScalarSymbol convolve(const ScalarSymbol& a, const ScalarSymbol& b);
// (u*v)(g) = int u(h) v(h^{-1} g) dh: FFT along F, direct summation over E (zero outside the E window).
GridFunction convolve(const SiegelData& siegel, const GridFunction& u, const GridFunction& v);

enum class RlReading { dual_power, primal_power };
ScalarSymbol riemann_liouville(const ConeDescriptor& cone, const ScalarSymbol& sigma, const PowerExponent& s,
                               RlReading reading = RlReading::dual_power);

struct Calibration {
  double c_inversion = 0.0;
  double c_plancherel = 0.0;
  double inversion_residual = 0.0;
  double plancherel_residual = 0.0;
  double truncation = 0.0;  // boundary modulus relative to the peak
};

Calibration calibrate_constants(const SiegelData& siegel, const Grid& grid);

// int |sigma|^2 |Delta'^{-b}| on the symbol lattice, without the constant.
double weighted_symbol_l2(const SiegelData& siegel, const ScalarSymbol& sigma);

struct SpectralContext {
  SiegelData siegel;
  Grid grid;
  double c = 1.0;
};

SpectralContext make_context(const SiegelData& siegel, const Grid& grid);
GridFunction synthesize(const SpectralContext& ctx, const ScalarSymbol& sigma);

}  // namespace conewave
