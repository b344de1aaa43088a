#pragma once

#include <complex>
#include <vector>

#include "conewave/cone.hpp"

namespace conewave {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Hermitian map Phi: E x E -> F_C with Phi(z, z') = sum_ab z_a conj(z'_b) phi[a*n+b].
struct SiegelData {
  int n = 0;
  int m = 1;
  std::vector<CVec> phi;
  ConeDescriptor cone;
  PowerExponent b;

  CVec form(const CVec& z, const CVec& zp) const;
  Vec quad(const CVec& z) const { return form(z, z).real(); }
  // H_lambda[a][b] = <lambda, Phi_ab>.
  CMat hermitian_matrix(const Vec& lambda) const;
};

// Validates hermitian symmetry, positivity and non-degeneracy, then derives b.
SiegelData make_siegel(const ConeDescriptor& cone, int n, std::vector<CVec> phi);
SiegelData abelian_siegel(const ConeDescriptor& cone);
SiegelData heisenberg_siegel();
// Phi(z, z') = sum_a z_a conj(z'_a) * direction, direction in the closed cone.
SiegelData diagonal_siegel(const ConeDescriptor& cone, int n, const Vec& direction);

struct GroupPoint {
  CVec zeta;
  Vec x;
};

GroupPoint group_identity(const SiegelData& siegel);
GroupPoint multiply(const SiegelData& siegel, const GroupPoint& g, const GroupPoint& h);
GroupPoint inverse(const GroupPoint& g);
GroupPoint dilate(double rho, const GroupPoint& g);
double quasi_norm(const GroupPoint& g);
double quasi_distance(const SiegelData& siegel, const GroupPoint& g, const GroupPoint& h);

struct Axis {
  int count = 1;
  double half_width = 1.0;

  double spacing() const { return 2.0 * half_width / count; }
  double coord(int j) const { return -half_width + j * spacing(); }
};

// Periodic-convention grid: x_j = -L + j h, h = 2L/N. E axes are ordered
// (Re z_1, Im z_1, Re z_2, ...). Storage is row-major with E axes outermost.
struct Grid {
  std::vector<Axis> e_axes;
  std::vector<Axis> f_axes;

  Grid() = default;
  Grid(std::vector<Axis> e, std::vector<Axis> f);

  int n() const { return static_cast<int>(e_axes.size()) / 2; }
  int m() const { return static_cast<int>(f_axes.size()); }
  std::size_t e_size() const;
  std::size_t f_size() const;
  std::size_t size() const { return e_size() * f_size(); }
  double e_cell() const;
  double f_cell() const;
  double cell_measure() const { return e_cell() * f_cell(); }

  CVec zeta_at(std::size_t e_index) const;
  Vec x_at(std::size_t f_index) const;
  GroupPoint point(std::size_t index) const;
  std::vector<int> e_multi(std::size_t e_index) const;
  std::vector<int> f_multi(std::size_t f_index) const;
  std::size_t e_flat(const std::vector<int>& multi) const;
  std::size_t f_flat(const std::vector<int>& multi) const;
  std::vector<int> f_shape() const;
  std::vector<int> e_shape() const;

  bool operator==(const Grid& other) const;
};

Grid make_grid(int n, int e_count, double e_half, const std::vector<int>& f_counts,
               const std::vector<double>& f_halves);

struct GridFunction {
  Grid grid;
  std::vector<cplx> values;

  GridFunction() = default;
  explicit GridFunction(Grid g) : grid(std::move(g)), values(grid.size(), cplx(0.0, 0.0)) {}
  GridFunction(Grid g, std::vector<cplx> v);

  cplx& at(std::size_t e_index, std::size_t f_index) { return values[e_index * grid.f_size() + f_index]; }
  const cplx& at(std::size_t e_index, std::size_t f_index) const {
    return values[e_index * grid.f_size() + f_index];
  }
};

// Compensated Riemann sum of f times the cell measure.
cplx integrate(const Grid& grid, const GridFunction& f);

// Real 2-step bracket on V = R^{dim_v} with values in R^{dim_z}.
struct LieBracket {
  int dim_v = 0;
  int dim_z = 0;
  std::vector<Vec> table;  // [X_i, X_j] at i*dim_v + j

  Vec apply(const Vec& x, const Vec& y) const;
};

struct AdmissibilityReport {
  bool admissible = false;
  double worst_eigenvalue = 0.0;
  double asymmetry = 0.0;
};

// J is a real dim_v x dim_v matrix with J^2 = -I.
AdmissibilityReport check_admissible(const LieBracket& bracket, const Mat& j, const ConeDescriptor& cone,
                                     int sample_count);
SiegelData phi_from_bracket(const LieBracket& bracket, const Mat& j, const ConeDescriptor& cone);
// Bracket [X, Y] = 4 Im Phi(X, Y) with J the multiplication by i.
std::pair<LieBracket, Mat> bracket_from_siegel(const SiegelData& siegel);
// Returns J or -J, whichever is admissible; throws if neither is.
Mat orient_complex_structure(const LieBracket& bracket, const Mat& j, const ConeDescriptor& cone);

struct BReport {
  PowerExponent b;
  double residual = 0.0;  // worst equivariance residual over the generators
};

struct EquivariantSolution {
  CMat g;
  double residual = 0.0;  // max |t.Phi_ab - sum g_ca conj(g_db) Phi_cd| relative to max |Phi_ab|
};

// g in GL(E) with t.Phi = Phi o (g x g), by a closed-form start and Levenberg-Marquardt refinement.
EquivariantSolution solve_equivariance(const ConeDescriptor& cone, int n, const std::vector<CVec>& phi,
                                       const TriangularElement& t);

BReport derive_b_report(const ConeDescriptor& cone, int n, const std::vector<CVec>& phi);
PowerExponent derive_b(const SiegelData& siegel);

// Generators of T+ used by derive_b and the measure-invariance checks.
std::vector<TriangularElement> cone_generators(const ConeDescriptor& cone);

}  // namespace conewave
