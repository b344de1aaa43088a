#pragma once

#include <optional>

#include "conewave/nilgroup.hpp"

namespace conewave {

// Bounded region of the dual cone. An annulus is {scale in [lo, hi], d(lambda/scale, e') <= angle} with
// scale = <lambda, e_Omega>/<e_Omega', e_Omega>; a log box bounds log lambda componentwise (product cones).
struct Region {
  enum class Kind { annulus, log_box };
  Kind kind = Kind::annulus;
  double scale_lo = 1.0;
  double scale_hi = 2.0;
  double angle = 0.5;
  Vec lo;
  Vec hi;
  std::optional<TriangularElement> moved;  // region . t

  static Region annulus(double scale_lo, double scale_hi, double angle);
  static Region log_box(Vec lo, Vec hi);

  void validate(const ConeDescriptor& cone) const;
  bool contains(const ConeDescriptor& cone, const Vec& lambda) const;
  // Axis-aligned bounds in transport coordinates of the unmoved region.
  std::pair<Vec, Vec> theta_bounds(const ConeDescriptor& cone) const;
  Vec center(const ConeDescriptor& cone) const;
};

double region_scale(const ConeDescriptor& cone, const Vec& lambda);

struct LatticeSpec {
  double delta = 0.0;
  double R = 2.25;
  std::vector<Vec> points;
  std::vector<TriangularElement> transports;
  Region region;
};

// Greedy maximal 2 delta-separated family over a transport-coordinate mesh.
LatticeSpec build_lattice(const ConeDescriptor& cone, double delta, const Region& region);
LatticeSpec single_point_lattice(const ConeDescriptor& cone, const Vec& lambda, double delta, const Region& region);
// Right action lambda -> lambda . t applied to points, transports and region.
LatticeSpec transform_lattice(const LatticeSpec& spec, const TriangularElement& t);
// Mesh spacing used for candidates, in transport coordinates.
double candidate_spacing(const ConeDescriptor& cone, double delta);

struct LatticeReport {
  std::size_t point_count = 0;
  std::size_t sample_count = 0;
  int separation_violations = 0;
  int cover_violations = 0;
  int max_overlap = 0;
  double min_separation = 0.0;    // in units of delta
  double max_cover_distance = 0.0;  // in units of delta
  bool passed = false;
};

LatticeReport verify_lattice(const ConeDescriptor& cone, const LatticeSpec& spec);
// Points of the region on a mesh offset from the candidate mesh.
std::vector<Vec> dense_region_sample(const ConeDescriptor& cone, const Region& region, double spacing);

enum class BumpMode { cover, partition, partition_sq };
enum class TransportChoice { triangular, quadratic };

std::string to_string(BumpMode mode);
BumpMode bump_mode_from_string(const std::string& name);

// Radial plateau profile: 1 on [0, inner], quintic smoothstep down to 0 at outer (C^2).
double plateau_profile(double d, double inner, double outer);

struct BumpFamily {
  ConeDescriptor cone;
  LatticeSpec spec;
  BumpMode mode = BumpMode::cover;
  TransportChoice transport = TransportChoice::triangular;
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  int smoothness = 2;
  std::vector<Mat> pullback;  // lambda -> lambda . t_k^{-1}
  std::vector<std::vector<int>> neighbours;

  std::size_t size() const { return spec.points.size(); }
  double raw(int k, const Vec& lambda) const;
  // phi_k(lambda . t_k^{-1}) after the normalization of the mode.
  double value(int k, const Vec& lambda) const;
  // sum_k phi_k (cover, partition) or sum_k phi_k^2 (partition_sq).
  double sum(const Vec& lambda) const;
  std::vector<int> active(const Vec& lambda) const;
};

BumpFamily build_bumps(const ConeDescriptor& cone, const LatticeSpec& spec, BumpMode mode,
                       TransportChoice transport = TransportChoice::triangular);

// Reference sample of the closed ball B(e', radius) in the invariant metric.
std::vector<Vec> ball_sample(const ConeDescriptor& cone, double radius, int per_axis);

std::vector<int> shell_indices(const SiegelData& siegel, const LatticeSpec& spec, const BumpFamily& bumps, double c);

}  // namespace conewave
