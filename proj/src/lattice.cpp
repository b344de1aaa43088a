#include "conewave/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "conewave/spectral.hpp"

namespace conewave {

namespace {

constexpr double kSeparationSlack = 1e-9;

// Calls fn(theta, k) for every mesh point seed + k*h inside [lo, hi].
template <class Fn>
void for_each_mesh_point(const Vec& seed, double h, double offset, const Vec& lo, const Vec& hi, Fn&& fn) {
  const int dim = static_cast<int>(seed.size());
  std::vector<long> kmin(dim), kmax(dim);
  for (int i = 0; i < dim; ++i) {
    kmin[i] = static_cast<long>(std::ceil((lo[i] - seed[i]) / h - offset - 1e-9));
    kmax[i] = static_cast<long>(std::floor((hi[i] - seed[i]) / h - offset + 1e-9));
    if (kmax[i] < kmin[i]) return;
  }
  std::vector<long> k = kmin;
  Vec theta(dim);
  while (true) {
    for (int i = 0; i < dim; ++i) theta[i] = seed[i] + (k[i] + offset) * h;
    fn(theta, k);
    int i = dim - 1;
    while (i >= 0 && k[i] == kmax[i]) {
      k[i] = kmin[i];
      --i;
    }
    if (i < 0) break;
    ++k[i];
  }
}

Vec base_seed(const ConeDescriptor& cone, const Region& base) {
  if (base.contains(cone, cone.e_dual)) return transport_coordinates(cone, cone.e_dual);
  return transport_coordinates(cone, base.center(cone));
}

Region unmoved(const Region& region) {
  Region r = region;
  r.moved.reset();
  return r;
}

}  // namespace

Region Region::annulus(double scale_lo, double scale_hi, double angle) {
  Region r;
  r.kind = Kind::annulus;
  r.scale_lo = scale_lo;
  r.scale_hi = scale_hi;
  r.angle = angle;
  return r;
}

Region Region::log_box(Vec lo, Vec hi) {
  Region r;
  r.kind = Kind::log_box;
  r.lo = std::move(lo);
  r.hi = std::move(hi);
  return r;
}

void Region::validate(const ConeDescriptor& cone) const {
  if (kind == Kind::annulus) {
    if (!(scale_lo > 0.0) || !(scale_hi > scale_lo) || !std::isfinite(scale_hi))
      throw DomainError("annulus region needs 0 < scale_lo < scale_hi < inf (touches the cone boundary)");
    if (!(angle >= 0.0) || !std::isfinite(angle)) throw DomainError("annulus region needs a finite angle");
    return;
  }
  if (cone.kind != ConeKind::product) throw DomainError("log-box regions are only defined for product cones");
  if (lo.size() != cone.dim || hi.size() != cone.dim) throw DomainError("log-box bounds have wrong dimension");
  if (!lo.allFinite() || !hi.allFinite() || ((hi - lo).array() <= 0.0).any())
    throw DomainError("log-box region must be bounded with lo < hi (touches the cone boundary)");
}

double region_scale(const ConeDescriptor& cone, const Vec& lambda) {
  return lambda.dot(cone.e_primal) / cone.e_dual.dot(cone.e_primal);
}

bool Region::contains(const ConeDescriptor& cone, const Vec& lambda) const {
  if (!membership(cone, Side::dual, lambda)) return false;
  if (moved) return unmoved(*this).contains(cone, moved->inverse().act_dual(lambda));
  if (kind == Kind::log_box) {
    for (int i = 0; i < lambda.size(); ++i) {
      const double l = std::log(lambda[i]);
      if (l < lo[i] || l > hi[i]) return false;
    }
    return true;
  }
  const double s = region_scale(cone, lambda);
  if (s < scale_lo || s > scale_hi) return false;
  const Vec unit = lambda / s;
  if (!membership(cone, Side::dual, unit)) return false;
  return invariant_distance(cone, unit, cone.e_dual) <= angle;
}

std::pair<Vec, Vec> Region::theta_bounds(const ConeDescriptor& cone) const {
  const int dim = cone.dim;
  if (kind == Kind::log_box) return {lo, hi};
  Vec blo(dim), bhi(dim);
  if (cone.kind == ConeKind::product) {
    blo.setConstant(std::log(scale_lo) - angle);
    bhi.setConstant(std::log(scale_hi) + angle);
    return {blo, bhi};
  }
  blo[0] = blo[1] = 0.5 * (std::log(scale_lo) - angle);
  bhi[0] = bhi[1] = 0.5 * (std::log(scale_hi) + angle);
  for (int i = 2; i < dim; ++i) {
    blo[i] = -std::sinh(angle);
    bhi[i] = std::sinh(angle);
  }
  return {blo, bhi};
}

Vec Region::center(const ConeDescriptor& cone) const {
  Vec c;
  if (kind == Kind::log_box)
    c = (0.5 * (lo + hi)).array().exp().matrix();
  else
    c = std::sqrt(scale_lo * scale_hi) * cone.e_dual;
  return moved ? moved->act_dual(c) : c;
}

double candidate_spacing(const ConeDescriptor& cone, double delta) {
  return cone.kind == ConeKind::product ? delta / 4.0 : delta / 10.0;
}

LatticeSpec build_lattice(const ConeDescriptor& cone, double delta, const Region& region) {
  if (!(delta > 0.0)) throw DomainError("build_lattice needs delta > 0");
  region.validate(cone);
  if (region.moved) return transform_lattice(build_lattice(cone, delta, unmoved(region)), *region.moved);
  const Vec seed = base_seed(cone, region);
  const auto [lo, hi] = region.theta_bounds(cone);
  const double h = candidate_spacing(cone, delta);
  struct Candidate {
    long norm2;
    std::vector<long> k;
    Vec lambda;
  };
  std::vector<Candidate> candidates;
  for_each_mesh_point(seed, h, 0.0, lo, hi, [&](const Vec& theta, const std::vector<long>& k) {
    const Vec lambda = from_transport_coordinates(cone, theta);
    if (!region.contains(cone, lambda)) return;
    long n2 = 0;
    for (long v : k) n2 += v * v;
    candidates.push_back({n2, k, lambda});
  });
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.norm2 != b.norm2) return a.norm2 < b.norm2;
    return a.k < b.k;
  });
  LatticeSpec spec;
  spec.delta = delta;
  spec.R = 2.25;
  spec.region = region;
  const double min_sep = 2.0 * delta * (1.0 - kSeparationSlack);
  for (const Candidate& c : candidates) {
    bool ok = true;
    for (const Vec& p : spec.points)
      if (invariant_distance(cone, p, c.lambda) < min_sep) {
        ok = false;
        break;
      }
    if (ok) spec.points.push_back(c.lambda);
  }
  if (spec.points.empty()) throw DomainError("build_lattice: region contains no candidate point");
  for (const Vec& p : spec.points) spec.transports.push_back(transport_solve(cone, p));
  return spec;
}

LatticeSpec single_point_lattice(const ConeDescriptor& cone, const Vec& lambda, double delta, const Region& region) {
  LatticeSpec spec;
  spec.delta = delta;
  spec.R = 2.25;
  spec.region = region;
  spec.points = {lambda};
  spec.transports = {transport_solve(cone, lambda)};
  return spec;
}

LatticeSpec transform_lattice(const LatticeSpec& spec, const TriangularElement& t) {
  LatticeSpec out = spec;
  for (std::size_t k = 0; k < out.points.size(); ++k) {
    out.points[k] = t.act_dual(spec.points[k]);
    out.transports[k] = spec.transports[k].compose(t);
  }
  out.region.moved = spec.region.moved ? spec.region.moved->compose(t) : t;
  return out;
}

std::vector<Vec> dense_region_sample(const ConeDescriptor& cone, const Region& region, double spacing) {
  const Region base = unmoved(region);
  base.validate(cone);
  const Vec seed = base_seed(cone, base);
  const auto [lo, hi] = base.theta_bounds(cone);
  std::vector<Vec> out;
  for_each_mesh_point(seed, spacing, 0.5, lo, hi, [&](const Vec& theta, const std::vector<long>&) {
    const Vec lambda = from_transport_coordinates(cone, theta);
    if (base.contains(cone, lambda)) out.push_back(region.moved ? region.moved->act_dual(lambda) : lambda);
  });
  return out;
}

LatticeReport verify_lattice(const ConeDescriptor& cone, const LatticeSpec& spec) {
  LatticeReport report;
  const std::size_t np = spec.points.size();
  report.point_count = np;
  const double delta = spec.delta;
  double min_sep = std::numeric_limits<double>::infinity();
  std::vector<int> overlap(np, 0);
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = i + 1; j < np; ++j) {
      const double d = invariant_distance(cone, spec.points[i], spec.points[j]);
      min_sep = std::min(min_sep, d);
      if (d < 2.0 * delta * (1.0 - kSeparationSlack)) ++report.separation_violations;
      if (d < 2.0 * spec.R * delta) {
        ++overlap[i];
        ++overlap[j];
      }
    }
  report.min_separation = np > 1 ? min_sep / delta : std::numeric_limits<double>::infinity();
  report.max_overlap = np ? *std::max_element(overlap.begin(), overlap.end()) : 0;
  const auto samples = dense_region_sample(cone, spec.region, candidate_spacing(cone, delta) / 2.0);
  report.sample_count = samples.size();
  double worst = 0.0;
  for (const Vec& s : samples) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& p : spec.points) best = std::min(best, invariant_distance(cone, p, s));
    worst = std::max(worst, best);
    if (best > spec.R * delta) ++report.cover_violations;
  }
  report.max_cover_distance = worst / delta;
  report.passed = report.separation_violations == 0 && report.cover_violations == 0;
  return report;
}

std::string to_string(BumpMode mode) {
  switch (mode) {
    case BumpMode::cover: return "cover";
    case BumpMode::partition: return "partition";
    case BumpMode::partition_sq: return "partition_sq";
  }
  return "cover";
}

BumpMode bump_mode_from_string(const std::string& name) {
  if (name == "cover") return BumpMode::cover;
  if (name == "partition") return BumpMode::partition;
  if (name == "partition_sq") return BumpMode::partition_sq;
  throw DomainError("unknown bump mode '" + name + "'");
}

double plateau_profile(double d, double inner, double outer) {
  if (d <= inner) return 1.0;
  if (d >= outer) return 0.0;
  const double t = (d - inner) / (outer - inner);
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double BumpFamily::raw(int k, const Vec& lambda) const {
  const Vec mu = pullback[k] * lambda;
  if (!membership(cone, Side::dual, mu)) return 0.0;
  return plateau_profile(invariant_distance(cone, mu, cone.e_dual), inner_radius, outer_radius);
}

double BumpFamily::value(int k, const Vec& lambda) const {
  const double r = raw(k, lambda);
  if (r == 0.0 || mode == BumpMode::cover) return r;
  double acc = mode == BumpMode::partition ? r : r * r;
  for (int j : neighbours[k]) {
    const double rj = raw(j, lambda);
    acc += mode == BumpMode::partition ? rj : rj * rj;
  }
  if (acc < 1e-12 && spec.region.contains(cone, lambda))
    throw NumericalError("bump normalization below 1e-12 inside the region (cover mismatch)");
  return mode == BumpMode::partition ? r / acc : r / std::sqrt(acc);
}

std::vector<int> BumpFamily::active(const Vec& lambda) const {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(size()); ++k)
    if (raw(k, lambda) > 0.0) out.push_back(k);
  return out;
}

double BumpFamily::sum(const Vec& lambda) const {
  double acc = 0.0;
  for (int k : active(lambda)) {
    const double v = value(k, lambda);
    acc += mode == BumpMode::partition_sq ? v * v : v;
  }
  return acc;
}

BumpFamily build_bumps(const ConeDescriptor& cone, const LatticeSpec& spec, BumpMode mode, TransportChoice transport) {
  if (spec.points.empty()) throw DomainError("build_bumps: empty lattice");
  BumpFamily bumps;
  bumps.cone = cone;
  bumps.spec = spec;
  bumps.mode = mode;
  bumps.transport = transport;
  bumps.inner_radius = spec.R * spec.delta;
  bumps.outer_radius = (spec.R + 1.0) * spec.delta;
  for (std::size_t k = 0; k < spec.points.size(); ++k) {
    if (transport == TransportChoice::triangular) {
      bumps.pullback.push_back(spec.transports[k].inverse().matrix.transpose());
    } else {
      const Vec root = jordan_sqrt(cone, spec.points[k]);
      const Mat q = cone.kind == ConeKind::product ? Mat(root.cwiseProduct(root).asDiagonal())
                                                    : lorentz_quadratic(root);
      bumps.pullback.push_back(q.inverse());
    }
  }
  const std::size_t np = spec.points.size();
  bumps.neighbours.assign(np, {});
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t j = i + 1; j < np; ++j)
      if (invariant_distance(cone, spec.points[i], spec.points[j]) < 2.0 * bumps.outer_radius) {
        bumps.neighbours[i].push_back(static_cast<int>(j));
        bumps.neighbours[j].push_back(static_cast<int>(i));
      }
  return bumps;
}

std::vector<Vec> ball_sample(const ConeDescriptor& cone, double radius, int per_axis) {
  const int dim = cone.dim;
  Vec lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    const double w = (cone.kind == ConeKind::lorentz && i >= 2) ? std::max(radius, std::sinh(radius)) : radius;
    lo[i] = -w;
    hi[i] = w;
  }
  std::vector<Vec> out;
  const int steps = std::max(per_axis, 2) - 1;
  std::vector<int> k(dim, 0);
  while (true) {
    Vec theta(dim);
    for (int i = 0; i < dim; ++i) theta[i] = lo[i] + (hi[i] - lo[i]) * k[i] / steps;
    const Vec lambda = from_transport_coordinates(cone, theta);
    if (invariant_distance(cone, cone.e_dual, lambda) <= radius) out.push_back(lambda);
    int i = dim - 1;
    while (i >= 0 && k[i] == steps) {
      k[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++k[i];
  }
  out.push_back(cone.e_dual);
  return out;
}

std::vector<int> shell_indices(const SiegelData& siegel, const LatticeSpec& spec, const BumpFamily& bumps, double c) {
  if (!(c > 1.0)) throw DomainError("shell_indices needs c > 1");
  const auto sample = ball_sample(siegel.cone, bumps.outer_radius, 13);
  std::vector<int> out;
  for (std::size_t k = 0; k < spec.points.size(); ++k) {
    double nmin = std::numeric_limits<double>::infinity(), nmax = 0.0;
    for (const Vec& s : sample) {
      const Vec lambda = spec.transports[k].act_dual(s);
      if (!membership(siegel.cone, Side::dual, lambda)) continue;
      const double n = n_lambda(siegel, lambda);
      nmin = std::min(nmin, n);
      nmax = std::max(nmax, n);
    }
    if (nmin <= c && nmax >= 1.0 / c) out.push_back(static_cast<int>(k));
  }
  return out;
}

}  // namespace conewave
