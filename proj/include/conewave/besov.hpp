#pragma once

#include <limits>
#include <span>

#include "conewave/lattice.hpp"
#include "conewave/spectral.hpp"

namespace conewave {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct BesovParams {
  PowerExponent s;
  double p = 2.0;
  double q = 2.0;
};

struct ClassicalParams {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
};

void validate_exponents(double p, double q);

double lp_norm(const GridFunction& u, double p);
double lq_norm(std::span<const double> values, double q);

struct IndexTerm {
  int k = 0;
  Vec lambda_k;
  double weight = 0.0;
  double lp = 0.0;
};

struct NormReport {
  BesovParams params;
  std::vector<IndexTerm> per_index;
  double total = 0.0;
};

// Bumps phi_k(. t_k^{-1}) sampled on the lattice of sigma; zero rows are dropped.
struct BumpSamples {
  std::vector<int> indices;
  std::vector<std::vector<double>> values;
};
BumpSamples sample_bumps(const BumpFamily& bumps, const ScalarSymbol& sigma);

NormReport besov_analytic_report(const SpectralContext& ctx, const ScalarSymbol& sigma, const BesovParams& params,
                                 const BumpFamily& bumps, bool symmetrized = false);
double besov_analytic(const SpectralContext& ctx, const ScalarSymbol& sigma, const BesovParams& params,
                      const BumpFamily& bumps, bool symmetrized = false);

// Dyadic profile eta in x / N(e'): 1 on [3/4, 2], supported in [1/2, 3], sum_j eta(4^{-j} x) = 1.
double dyadic_eta(double x_over_ne);

struct ClassicalTerm {
  int j = 0;
  double lp = 0.0;
};

struct ClassicalReport {
  ClassicalParams params;
  std::vector<ClassicalTerm> per_scale;
  double total = 0.0;
};

ClassicalReport besov_classical_report(const SpectralContext& ctx, const ScalarSymbol& sigma,
                                       const ClassicalParams& params);
ClassicalReport besov_classical_report(const SpectralContext& ctx, const GridFunction& u,
                                       const ClassicalParams& params);
double besov_classical(const SpectralContext& ctx, const ScalarSymbol& sigma, const ClassicalParams& params);
double besov_classical(const SpectralContext& ctx, const GridFunction& u, const ClassicalParams& params);

cplx duality_pairing(const SpectralContext& ctx, const ScalarSymbol& sigma_u, const ScalarSymbol& sigma_v,
                     const BumpFamily& bumps);

struct EmbeddingReport {
  double ratio = 0.0;
  double norm_low = 0.0;   // params1 norm
  double norm_high = 0.0;  // params2 norm
};

// s2 - s1 required for the embedding B^{s1}_{p1,q1} -> B^{s2}_{p2,q2}.
PowerExponent embedding_shift(const SiegelData& siegel, double p1, double p2);
EmbeddingReport embedding_ratio(const SpectralContext& ctx, const ScalarSymbol& sigma, const BesovParams& params1,
                                const BesovParams& params2, const BumpFamily& bumps);

}  // namespace conewave
