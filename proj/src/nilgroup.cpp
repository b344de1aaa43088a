#include "conewave/nilgroup.hpp"

#include <cmath>
#include <sstream>

namespace conewave {

namespace {

std::vector<Vec> sample_dual_points(const ConeDescriptor& cone, int count) {
  std::mt19937_64 rng(7719);
  std::vector<Vec> points{cone.e_dual};
  while (static_cast<int>(points.size()) < count)
    points.push_back(random_element(cone, rng, 0.9).act_dual(cone.e_dual));
  return points;
}

double max_abs(const std::vector<CVec>& phi) {
  double out = 0.0;
  for (const auto& v : phi) out = std::max(out, v.cwiseAbs().maxCoeff());
  return out;
}

CMat hermitian_sqrt(const CMat& a, bool inverse) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  const Vec ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) throw NumericalError("hermitian matrix is not positive definite");
  Vec f(ev.size());
  for (int i = 0; i < ev.size(); ++i) f[i] = inverse ? 1.0 / std::sqrt(ev[i]) : std::sqrt(ev[i]);
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

CMat g_from_params(const Vec& p, int n) {
  CMat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cplx(p[2 * (i * n + j)], p[2 * (i * n + j) + 1]);
  return g;
}

Vec equivariance_residual(const Vec& p, int n, const std::vector<CVec>& phi, const std::vector<CVec>& target) {
  const CMat g = g_from_params(p, n);
  const int m = static_cast<int>(phi[0].size());
  Vec r(2 * n * n * m);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      CVec acc = target[a * n + b];
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) acc -= g(c, a) * std::conj(g(d, b)) * phi[c * n + d];
      for (int k = 0; k < m; ++k) {
        r[2 * ((a * n + b) * m + k)] = acc[k].real();
        r[2 * ((a * n + b) * m + k) + 1] = acc[k].imag();
      }
    }
  return r;
}

void require_bracket(const LieBracket& bracket, const Mat& j) {
  if (bracket.dim_v <= 0 || bracket.dim_v % 2 != 0) throw DomainError("bracket needs an even-dimensional V");
  if (static_cast<int>(bracket.table.size()) != bracket.dim_v * bracket.dim_v)
    throw DomainError("bracket table has wrong size");
  if (j.rows() != bracket.dim_v || j.cols() != bracket.dim_v) throw DomainError("J has wrong shape");
  if ((j * j + Mat::Identity(bracket.dim_v, bracket.dim_v)).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("J does not satisfy J^2 = -I");
  for (int a = 0; a < bracket.dim_v; ++a)
    for (int b = 0; b < bracket.dim_v; ++b) {
      if (bracket.table[a * bracket.dim_v + b].size() != bracket.dim_z)
        throw DomainError("bracket value has wrong dimension");
      if ((bracket.table[a * bracket.dim_v + b] + bracket.table[b * bracket.dim_v + a]).cwiseAbs().maxCoeff() >
          1e-12)
        throw DomainError("bracket is not antisymmetric");
    }
}

// Real basis (v_1, J v_1, v_2, J v_2, ...) adapted to J.
Mat complex_adapted_basis(const Mat& j) {
  const int dim = static_cast<int>(j.rows());
  Mat basis(dim, 0);
  for (int i = 0; i < dim && basis.cols() < dim; ++i) {
    Mat trial(dim, basis.cols() + 2);
    trial << basis, Vec::Unit(dim, i), j * Vec::Unit(dim, i);
    Eigen::FullPivLU<Mat> lu(trial);
    if (lu.rank() == trial.cols()) basis = trial;
  }
  if (basis.cols() != dim) throw DomainError("could not build a J-adapted basis");
  return basis;
}

}  // namespace

CVec SiegelData::form(const CVec& z, const CVec& zp) const {
  CVec out = CVec::Zero(m);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out += z[a] * std::conj(zp[b]) * phi[a * n + b];
  return out;
}

CMat SiegelData::hermitian_matrix(const Vec& lambda) const {
  CMat h(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) h(a, b) = lambda.cast<cplx>().dot(phi[a * n + b]);
  return h;
}

std::vector<TriangularElement> cone_generators(const ConeDescriptor& cone) {
  std::vector<TriangularElement> gens;
  for (int j = 0; j < cone.rank; ++j) gens.push_back(axis_dilation(cone, j, 2.0));
  if (cone.kind == ConeKind::lorentz)
    for (int i = 0; i < cone.dim - 2; ++i)
      gens.push_back(lorentz_element(cone.dim, 1.0, 1.0, 0.5 * Vec::Unit(cone.dim - 2, i)));
  return gens;
}

EquivariantSolution solve_equivariance(const ConeDescriptor& cone, int n, const std::vector<CVec>& phi,
                                       const TriangularElement& t) {
  if (n == 0) return {CMat(0, 0), 0.0};
  std::vector<CVec> target(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) target[i] = t.matrix.cast<cplx>() * phi[i];
  auto hmat = [&](const std::vector<CVec>& f) {
    CMat h(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) h(a, b) = cone.e_dual.cast<cplx>().dot(f[a * n + b]);
    return h;
  };
  const CMat x = hermitian_sqrt(hmat(phi), true) * hermitian_sqrt(hmat(target), false);
  const CMat g0 = x.conjugate();
  Vec p(2 * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      p[2 * (i * n + j)] = g0(i, j).real();
      p[2 * (i * n + j) + 1] = g0(i, j).imag();
    }
  const double scale = std::max(max_abs(phi), 1e-300);
  Vec r = equivariance_residual(p, n, phi, target);
  double mu = 1e-6;
  for (int iter = 0; iter < 100 && r.cwiseAbs().maxCoeff() > 1e-14 * scale; ++iter) {
    Mat jac(r.size(), p.size());
    for (int k = 0; k < p.size(); ++k) {
      Vec pp = p, pm = p;
      pp[k] += 1e-7;
      pm[k] -= 1e-7;
      jac.col(k) = (equivariance_residual(pp, n, phi, target) - equivariance_residual(pm, n, phi, target)) / 2e-7;
    }
    const Mat normal = jac.transpose() * jac;
    const Vec grad = jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      const Vec step = (normal + mu * Mat::Identity(p.size(), p.size())).ldlt().solve(-grad);
      const Vec candidate = p + step;
      const Vec rc = equivariance_residual(candidate, n, phi, target);
      if (rc.squaredNorm() < r.squaredNorm()) {
        p = candidate;
        r = rc;
        mu = std::max(mu * 0.3, 1e-15);
        improved = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!improved) break;
  }
  return {g_from_params(p, n), r.cwiseAbs().maxCoeff() / scale};
}

BReport derive_b_report(const ConeDescriptor& cone, int n, const std::vector<CVec>& phi) {
  BReport report;
  report.b = PowerExponent::zeros(cone.rank);
  if (n == 0) return report;
  const auto gens = cone_generators(cone);
  Mat a(gens.size(), cone.rank);
  Vec rhs(gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const EquivariantSolution sol = solve_equivariance(cone, n, phi, gens[i]);
    report.residual = std::max(report.residual, sol.residual);
    a.row(i) = gens[i].delta.array().log().matrix().transpose();
    // Delta^{-b}(t) = |det_C g|^2.
    rhs[i] = -2.0 * std::log(std::abs(sol.g.determinant()));
  }
  Vec b = a.colPivHouseholderQr().solve(rhs);
  const double fit = (a * b - rhs).cwiseAbs().maxCoeff();
  report.residual = std::max(report.residual, fit);
  for (int j = 0; j < b.size(); ++j) {
    const double r = std::round(b[j] * 2.0) / 2.0;
    if (std::abs(r - b[j]) < 1e-8) b[j] = r;
  }
  report.b = PowerExponent(b);
  return report;
}

PowerExponent derive_b(const SiegelData& siegel) {
  const BReport report = derive_b_report(siegel.cone, siegel.n, siegel.phi);
  if (report.residual > 1e-8) {
    std::ostringstream os;
    os << "derive_b: no equivariant g (residual " << report.residual << ")";
    throw NumericalError(os.str());
  }
  return report.b;
}

SiegelData make_siegel(const ConeDescriptor& cone, int n, std::vector<CVec> phi) {
  if (n < 0) throw DomainError("n must be nonnegative");
  if (static_cast<int>(phi.size()) != n * n) throw DomainError("phi needs n*n entries");
  for (const auto& v : phi)
    if (v.size() != cone.dim) throw DomainError("phi entries must have the cone dimension");
  SiegelData s;
  s.n = n;
  s.m = cone.dim;
  s.phi = std::move(phi);
  s.cone = cone;
  if (n > 0) {
    const double scale = max_abs(s.phi);
    if (scale == 0.0) throw DomainError("phi is degenerate (identically zero)");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if ((s.phi[a * n + b] - s.phi[b * n + a].conjugate()).cwiseAbs().maxCoeff() > 1e-12 * scale)
          throw DomainError("phi is not hermitian");
    for (const Vec& lambda : sample_dual_points(cone, 16)) {
      Eigen::SelfAdjointEigenSolver<CMat> es(s.hermitian_matrix(lambda));
      if (es.eigenvalues().minCoeff() < -1e-12 * scale * lambda.norm())
        throw DomainError("phi is not positive with respect to the cone");
    }
    // z' -> (Phi(e_a, z'))_a as a real map R^{2n} -> R^{2nm}.
    Mat rmap(2 * n * cone.dim, 2 * n);
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) {
        const CVec col_re = s.phi[a * n + b];
        const CVec col_im = cplx(0.0, -1.0) * s.phi[a * n + b];
        for (int k = 0; k < cone.dim; ++k) {
          rmap(2 * (a * cone.dim + k), 2 * b) = col_re[k].real();
          rmap(2 * (a * cone.dim + k) + 1, 2 * b) = col_re[k].imag();
          rmap(2 * (a * cone.dim + k), 2 * b + 1) = col_im[k].real();
          rmap(2 * (a * cone.dim + k) + 1, 2 * b + 1) = col_im[k].imag();
        }
      }
    Eigen::FullPivLU<Mat> lu(rmap);
    lu.setThreshold(1e-10);
    if (lu.rank() != 2 * n) throw DomainError("phi is degenerate (nontrivial kernel)");
  }
  s.b = derive_b(s);
  return s;
}

SiegelData abelian_siegel(const ConeDescriptor& cone) { return make_siegel(cone, 0, {}); }

SiegelData heisenberg_siegel() {
  return make_siegel(make_cone(ConeKind::product, 1), 1, {CVec::Constant(1, cplx(1.0, 0.0))});
}

SiegelData diagonal_siegel(const ConeDescriptor& cone, int n, const Vec& direction) {
  std::vector<CVec> phi(n * n, CVec::Zero(cone.dim));
  for (int a = 0; a < n; ++a) phi[a * n + a] = direction.cast<cplx>();
  return make_siegel(cone, n, std::move(phi));
}

GroupPoint group_identity(const SiegelData& siegel) { return {CVec::Zero(siegel.n), Vec::Zero(siegel.m)}; }

GroupPoint multiply(const SiegelData& siegel, const GroupPoint& g, const GroupPoint& h) {
  if (g.zeta.size() != siegel.n || h.zeta.size() != siegel.n || g.x.size() != siegel.m || h.x.size() != siegel.m)
    throw DomainError("group point dimensions do not match the Siegel data");
  return {g.zeta + h.zeta, g.x + h.x + 2.0 * siegel.form(g.zeta, h.zeta).imag()};
}

GroupPoint inverse(const GroupPoint& g) { return {-g.zeta, -g.x}; }

GroupPoint dilate(double rho, const GroupPoint& g) {
  if (!(rho > 0.0)) throw DomainError("dilation needs rho > 0");
  return {std::sqrt(rho) * g.zeta, rho * g.x};
}

double quasi_norm(const GroupPoint& g) {
  const double z2 = g.zeta.squaredNorm();
  return std::sqrt(z2 * z2 + g.x.squaredNorm());
}

double quasi_distance(const SiegelData& siegel, const GroupPoint& g, const GroupPoint& h) {
  return std::sqrt(quasi_norm(multiply(siegel, inverse(g), h)));
}

Grid::Grid(std::vector<Axis> e, std::vector<Axis> f) : e_axes(std::move(e)), f_axes(std::move(f)) {
  if (e_axes.size() % 2 != 0) throw DomainError("grid needs an even number of E axes");
  for (const auto* axes : {&e_axes, &f_axes})
    for (const Axis& a : *axes)
      if (a.count < 1 || !(a.half_width > 0.0)) throw DomainError("grid axes need count >= 1 and half-width > 0");
}

std::size_t Grid::e_size() const {
  std::size_t s = 1;
  for (const Axis& a : e_axes) s *= a.count;
  return s;
}

std::size_t Grid::f_size() const {
  std::size_t s = 1;
  for (const Axis& a : f_axes) s *= a.count;
  return s;
}

double Grid::e_cell() const {
  double c = 1.0;
  for (const Axis& a : e_axes) c *= a.spacing();
  return c;
}

double Grid::f_cell() const {
  double c = 1.0;
  for (const Axis& a : f_axes) c *= a.spacing();
  return c;
}

std::vector<int> Grid::e_multi(std::size_t e_index) const {
  std::vector<int> out(e_axes.size());
  for (int k = static_cast<int>(e_axes.size()) - 1; k >= 0; --k) {
    out[k] = static_cast<int>(e_index % e_axes[k].count);
    e_index /= e_axes[k].count;
  }
  return out;
}

std::vector<int> Grid::f_multi(std::size_t f_index) const {
  std::vector<int> out(f_axes.size());
  for (int k = static_cast<int>(f_axes.size()) - 1; k >= 0; --k) {
    out[k] = static_cast<int>(f_index % f_axes[k].count);
    f_index /= f_axes[k].count;
  }
  return out;
}

std::size_t Grid::e_flat(const std::vector<int>& multi) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < e_axes.size(); ++k) idx = idx * e_axes[k].count + multi[k];
  return idx;
}

std::size_t Grid::f_flat(const std::vector<int>& multi) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < f_axes.size(); ++k) idx = idx * f_axes[k].count + multi[k];
  return idx;
}

std::vector<int> Grid::f_shape() const {
  std::vector<int> s;
  for (const Axis& a : f_axes) s.push_back(a.count);
  return s;
}

std::vector<int> Grid::e_shape() const {
  std::vector<int> s;
  for (const Axis& a : e_axes) s.push_back(a.count);
  return s;
}

CVec Grid::zeta_at(std::size_t e_index) const {
  const auto multi = e_multi(e_index);
  CVec z(n());
  for (int a = 0; a < n(); ++a)
    z[a] = cplx(e_axes[2 * a].coord(multi[2 * a]), e_axes[2 * a + 1].coord(multi[2 * a + 1]));
  return z;
}

Vec Grid::x_at(std::size_t f_index) const {
  const auto multi = f_multi(f_index);
  Vec x(m());
  for (int k = 0; k < m(); ++k) x[k] = f_axes[k].coord(multi[k]);
  return x;
}

GroupPoint Grid::point(std::size_t index) const { return {zeta_at(index / f_size()), x_at(index % f_size())}; }

bool Grid::operator==(const Grid& other) const {
  auto same = [](const std::vector<Axis>& a, const std::vector<Axis>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].count != b[i].count || a[i].half_width != b[i].half_width) return false;
    return true;
  };
  return same(e_axes, other.e_axes) && same(f_axes, other.f_axes);
}

Grid make_grid(int n, int e_count, double e_half, const std::vector<int>& f_counts,
               const std::vector<double>& f_halves) {
  if (f_counts.size() != f_halves.size()) throw DomainError("F axis counts and half-widths differ in length");
  std::vector<Axis> e(2 * n, Axis{e_count, e_half});
  std::vector<Axis> f;
  for (std::size_t k = 0; k < f_counts.size(); ++k) f.push_back(Axis{f_counts[k], f_halves[k]});
  return Grid(std::move(e), std::move(f));
}

GridFunction::GridFunction(Grid g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw DomainError("grid function value count does not match the grid");
}

cplx integrate(const Grid& grid, const GridFunction& f) {
  if (!(f.grid == grid)) throw DomainError("integrate: function lives on a different grid");
  cplx sum(0.0, 0.0), comp(0.0, 0.0);
  for (const cplx& v : f.values) {
    const cplx y = v - comp;
    const cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum * grid.cell_measure();
}

Vec LieBracket::apply(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(dim_z);
  for (int i = 0; i < dim_v; ++i)
    for (int j = 0; j < dim_v; ++j) {
      const double c = x[i] * y[j];
      if (c != 0.0) out += c * table[i * dim_v + j];
    }
  return out;
}

AdmissibilityReport check_admissible(const LieBracket& bracket, const Mat& j, const ConeDescriptor& cone,
                                     int sample_count) {
  require_bracket(bracket, j);
  if (bracket.dim_z != cone.dim) throw DomainError("bracket center dimension differs from the cone dimension");
  AdmissibilityReport report;
  report.worst_eigenvalue = std::numeric_limits<double>::infinity();
  const int dim = bracket.dim_v;
  // [JX, JY] = [X, Y] is needed for Phi to be sesquilinear.
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const Vec lhs = bracket.apply(j.col(a), j.col(b));
      const Vec rhs = bracket.table[a * dim + b];
      report.asymmetry = std::max(report.asymmetry, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  for (const Vec& lambda : sample_dual_points(cone, std::max(sample_count, 1))) {
    Mat form(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) form(a, b) = lambda.dot(bracket.apply(j.col(a), Vec::Unit(dim, b)));
    const double scale = std::max(form.cwiseAbs().maxCoeff(), 1e-300);
    report.asymmetry = std::max(report.asymmetry, (form - form.transpose()).cwiseAbs().maxCoeff() / scale);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (form + form.transpose()));
    report.worst_eigenvalue = std::min(report.worst_eigenvalue, es.eigenvalues().minCoeff() / scale);
  }
  report.admissible = report.asymmetry < 1e-10 && report.worst_eigenvalue > 1e-10;
  return report;
}

Mat orient_complex_structure(const LieBracket& bracket, const Mat& j, const ConeDescriptor& cone) {
  if (check_admissible(bracket, j, cone, 16).admissible) return j;
  if (check_admissible(bracket, -j, cone, 16).admissible) return -j;
  throw DomainError("neither J nor -J makes the bracket admissible for this cone");
}

SiegelData phi_from_bracket(const LieBracket& bracket, const Mat& j, const ConeDescriptor& cone) {
  const AdmissibilityReport report = check_admissible(bracket, j, cone, 16);
  if (report.asymmetry >= 1e-10) throw DomainError("phi_from_bracket: J is incompatible (non-hermitian result)");
  if (report.worst_eigenvalue <= 1e-10)
    throw DomainError("phi_from_bracket: form is not positive for this cone/orientation");
  const Mat basis = complex_adapted_basis(j);
  const int n = bracket.dim_v / 2;
  std::vector<CVec> phi(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Vec va = basis.col(2 * a), vb = basis.col(2 * b);
      const Vec re = 0.25 * bracket.apply(j * va, vb);
      const Vec im = 0.25 * bracket.apply(va, vb);
      phi[a * n + b] = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
    }
  return make_siegel(cone, n, std::move(phi));
}

std::pair<LieBracket, Mat> bracket_from_siegel(const SiegelData& siegel) {
  const int n = siegel.n;
  LieBracket bracket;
  bracket.dim_v = 2 * n;
  bracket.dim_z = siegel.m;
  bracket.table.assign(4 * n * n, Vec::Zero(siegel.m));
  auto as_complex = [n](int i) {
    CVec z = CVec::Zero(n);
    z[i / 2] = (i % 2 == 0) ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    return z;
  };
  for (int i = 0; i < 2 * n; ++i)
    for (int k = 0; k < 2 * n; ++k)
      bracket.table[i * 2 * n + k] = 4.0 * siegel.form(as_complex(i), as_complex(k)).imag();
  Mat j = Mat::Zero(2 * n, 2 * n);
  for (int a = 0; a < n; ++a) {
    j(2 * a + 1, 2 * a) = 1.0;
    j(2 * a, 2 * a + 1) = -1.0;
  }
  return {bracket, j};
}

}  // namespace conewave
