#pragma once

#include "conewave/besov.hpp"

namespace conewave {

struct GroupLattice {
  std::vector<GroupPoint> points;
  std::vector<std::size_t> grid_index;
  double delta = 0.0;
  double R = 2.0;
};

// Greedy 2 delta-separated family of grid points in the quasi-distance.
GroupLattice build_group_lattice(const SiegelData& siegel, const Grid& grid, double delta);

// Homogeneous dimension Q = n + m.
int homogeneous_dimension(const SiegelData& siegel);

std::vector<double> radius_menu(double box_scale);

GridFunction maximal_function(const SiegelData& siegel, const GridFunction& u, double p,
                              const std::vector<double>& radii);

struct SampleBounds {
  double upper = 0.0;
  double lower = 0.0;
  double true_norm = 0.0;
};

SampleBounds sample_bounds(const SiegelData& siegel, const GridFunction& u, const GroupLattice& lattice, double p);

struct PointwiseReport {
  double max_ratio = 0.0;
  double median_ratio = 0.0;
  std::size_t pairs = 0;
};

// |X u(g)| / ((1 + d(g, g'))^{2Q/p} M_p u(g')) over random pairs of grid points.
// `order` is a multi-index over the coordinate directions (2n E axes then m F axes).
PointwiseReport pointwise_bound_check(const SpectralContext& ctx, const ScalarSymbol& sigma, double p,
                                      const std::vector<int>& order, std::size_t pair_count,
                                      std::uint64_t seed, bool same_point = false);

struct YoungReport {
  double ratio = 0.0;
  double lhs = 0.0;
  double norm_u = 0.0;
  double norm_v = 0.0;
};

void check_young_exponents(double p1, double p2, double p3);
YoungReport young_check(const SpectralContext& ctx, const ScalarSymbol& sigma_u, const ScalarSymbol& sigma_v,
                        double p1, double p2, double p3);
// Grid-mode variant for arbitrary (not band-limited) factors.
YoungReport young_check_grid(const SiegelData& siegel, const GridFunction& u, const GridFunction& v, double p1,
                             double p2, double p3);

}  // namespace conewave
