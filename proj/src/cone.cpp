#include "conewave/cone.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace conewave {

namespace {

void require_dim(const ConeDescriptor& cone, const Vec& v, const char* what) {
  if (v.size() != cone.dim) {
    std::ostringstream os;
    os << what << ": point has dimension " << v.size() << ", cone expects " << cone.dim;
    throw DomainError(os.str());
  }
}

void require_member(const ConeDescriptor& cone, Side side, const Vec& v, const char* what) {
  require_dim(cone, v, what);
  if (!membership(cone, side, v)) throw DomainError(std::string(what) + ": point outside the open cone");
}

void require_rank(const ConeDescriptor& cone, const PowerExponent& s) {
  if (s.size() != cone.rank) throw DomainError("exponent length does not match cone rank");
}

double norm_tail(const Vec& x) { return x.tail(x.size() - 1).norm(); }

// x -> (u, y, v) for lorentz light coordinates.
Mat light_basis(int m) {
  Mat p = Mat::Zero(m, m);
  p(0, 0) = 1.0;
  p(0, m - 1) = 1.0;
  for (int i = 1; i < m - 1; ++i) p(i, i) = 1.0;
  p(m - 1, 0) = 1.0;
  p(m - 1, m - 1) = -1.0;
  return p;
}

Mat light_basis_inverse(int m) {
  Mat q = Mat::Zero(m, m);
  q(0, 0) = 0.5;
  q(0, m - 1) = 0.5;
  for (int i = 1; i < m - 1; ++i) q(i, i) = 1.0;
  q(m - 1, 0) = 0.5;
  q(m - 1, m - 1) = -0.5;
  return q;
}

// Spectral values x_0 +- |x'| of a lorentz point.
std::pair<double, double> lorentz_spectrum(const Vec& x) {
  const double r = norm_tail(x);
  return {x[0] + r, x[0] - r};
}

Vec lorentz_power(const Vec& x, double exponent) {
  const double r = norm_tail(x);
  const double mp = x[0] + r, mm = x[0] - r;
  const double ap = std::pow(mp, exponent), am = std::pow(mm, exponent);
  Vec out = Vec::Zero(x.size());
  out[0] = 0.5 * (ap + am);
  if (r > 0.0) out.tail(x.size() - 1) = 0.5 * (ap - am) * x.tail(x.size() - 1) / r;
  return out;
}

double rationalize(double value) {
  for (int q = 1; q <= 12; ++q) {
    const double p = std::round(value * q);
    if (std::abs(p / q - value) < 1e-6) return p / q;
  }
  return value;
}

}  // namespace

PowerExponent::PowerExponent(std::initializer_list<double> values) : s(static_cast<Eigen::Index>(values.size())) {
  int i = 0;
  for (double v : values) s[i++] = v;
}

std::string to_string(ConeKind kind) { return kind == ConeKind::product ? "product" : "lorentz"; }

ConeKind cone_kind_from_string(const std::string& name) {
  if (name == "product") return ConeKind::product;
  if (name == "lorentz") return ConeKind::lorentz;
  throw DomainError("unknown cone kind '" + name + "'");
}

TriangularElement TriangularElement::compose(const TriangularElement& other) const {
  return {matrix * other.matrix, delta.cwiseProduct(other.delta)};
}

TriangularElement TriangularElement::inverse() const {
  return {matrix.inverse(), delta.cwiseInverse()};
}

double TriangularElement::character(const PowerExponent& s) const {
  if (s.size() != delta.size()) throw DomainError("exponent length does not match element rank");
  double log_value = 0.0;
  for (int j = 0; j < s.size(); ++j) log_value += s[j] * std::log(delta[j]);
  return std::exp(log_value);
}

TriangularElement product_element(const Vec& diagonal) {
  if ((diagonal.array() <= 0.0).any()) throw DomainError("product element needs positive diagonal");
  return {diagonal.asDiagonal().toDenseMatrix(), diagonal};
}

TriangularElement lorentz_element(int m, double alpha, double beta, const Vec& w) {
  if (m < 3) throw DomainError("lorentz cone needs m >= 3");
  if (w.size() != m - 2) throw DomainError("lorentz shear has wrong length");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("lorentz element needs alpha, beta > 0");
  Mat light = Mat::Zero(m, m);
  light(0, 0) = alpha * alpha;
  for (int i = 0; i < m - 2; ++i) {
    light(1 + i, 0) = alpha * beta * w[i];
    light(1 + i, 1 + i) = alpha * beta;
    light(m - 1, 1 + i) = 2.0 * beta * beta * w[i];
  }
  light(m - 1, 0) = beta * beta * w.squaredNorm();
  light(m - 1, m - 1) = beta * beta;
  Vec delta(2);
  delta << alpha * alpha, beta * beta;
  return {light_basis_inverse(m) * light * light_basis(m), delta};
}

TriangularElement identity_element(const ConeDescriptor& cone) {
  return {Mat::Identity(cone.dim, cone.dim), Vec::Ones(cone.rank)};
}

TriangularElement axis_dilation(const ConeDescriptor& cone, int j, double a) {
  if (j < 0 || j >= cone.rank) throw DomainError("axis index out of range");
  if (cone.kind == ConeKind::product) {
    Vec diag = Vec::Ones(cone.rank);
    diag[j] = a;
    return product_element(diag);
  }
  const double root = std::sqrt(a);
  return lorentz_element(cone.dim, j == 0 ? root : 1.0, j == 1 ? root : 1.0, Vec::Zero(cone.dim - 2));
}

TriangularElement random_element(const ConeDescriptor& cone, std::mt19937_64& rng, double spread) {
  std::normal_distribution<double> normal(0.0, 1.0);
  if (cone.kind == ConeKind::product) {
    Vec diag(cone.rank);
    for (int j = 0; j < cone.rank; ++j) diag[j] = std::exp(spread * normal(rng));
    return product_element(diag);
  }
  const double alpha = std::exp(0.5 * spread * normal(rng));
  const double beta = std::exp(0.5 * spread * normal(rng));
  Vec w(cone.dim - 2);
  for (int i = 0; i < w.size(); ++i) w[i] = spread * normal(rng);
  return lorentz_element(cone.dim, alpha, beta, w);
}

double lorentz_delta1(const Vec& x) { return x[0] + x[x.size() - 1]; }

double lorentz_delta2(const Vec& x) { return x[0] * x[0] - x.tail(x.size() - 1).squaredNorm(); }

Mat lorentz_quadratic(const Vec& a) {
  const int m = static_cast<int>(a.size());
  Mat reflect = -Mat::Identity(m, m);
  reflect(0, 0) = 1.0;
  return 2.0 * a * a.transpose() - lorentz_delta2(a) * reflect;
}

Vec jordan_sqrt(const ConeDescriptor& cone, const Vec& x) {
  require_member(cone, Side::primal, x, "jordan_sqrt");
  if (cone.kind == ConeKind::product) return x.cwiseSqrt();
  return lorentz_power(x, 0.5);
}

bool membership(const ConeDescriptor& cone, Side, const Vec& v) {
  if (v.size() != cone.dim) return false;
  if (!v.allFinite()) return false;
  if (cone.kind == ConeKind::product) return (v.array() > 0.0).all();
  return v[0] > norm_tail(v);
}

double delta_power(const ConeDescriptor& cone, Side side, const PowerExponent& s, const Vec& v) {
  require_rank(cone, s);
  require_member(cone, side, v, "delta_power");
  if (cone.kind == ConeKind::product) {
    double log_value = 0.0;
    for (int j = 0; j < cone.rank; ++j) log_value += s[j] * std::log(v[j]);
    return std::exp(log_value);
  }
  const double d2 = lorentz_delta2(v);
  if (side == Side::primal) {
    const double d1 = lorentz_delta1(v);
    return std::exp((s[0] - s[1]) * std::log(d1) + s[1] * std::log(d2));
  }
  const double d1 = v[0] - v[v.size() - 1];
  return std::exp((s[1] - s[0]) * std::log(d1) + s[0] * std::log(d2));
}

TriangularElement transport_solve(const ConeDescriptor& cone, const Vec& lambda) {
  require_member(cone, Side::dual, lambda, "transport_solve");
  if (cone.kind == ConeKind::product) return product_element(lambda);
  const int m = cone.dim;
  const double vhat = lambda[0] - lambda[m - 1];
  const double d2 = lorentz_delta2(lambda);
  if (!(vhat > 0.0) || !(d2 > 0.0)) throw NumericalError("transport_solve: degenerate point near the cone boundary");
  const double beta = std::sqrt(vhat);
  const double alpha = std::sqrt(d2 / vhat);
  const Vec w = lambda.segment(1, m - 2) / vhat;
  TriangularElement t = lorentz_element(m, alpha, beta, w);
  const Vec back = t.act_dual(cone.e_dual);
  if ((back - lambda).norm() > 1e-10 * lambda.norm())
    throw NumericalError("transport_solve: reconstruction residual above 1e-10");
  return t;
}

TriangularElement transport_solve_primal(const ConeDescriptor& cone, const Vec& x) {
  require_member(cone, Side::primal, x, "transport_solve_primal");
  if (cone.kind == ConeKind::product) return product_element(x);
  const int m = cone.dim;
  const double u = lorentz_delta1(x);
  const double d2 = lorentz_delta2(x);
  const double alpha = std::sqrt(u);
  const double beta = std::sqrt(d2) / alpha;
  const Vec w = x.segment(1, m - 2) / (alpha * beta);
  TriangularElement t = lorentz_element(m, alpha, beta, w);
  const Vec back = t.act_primal(cone.e_primal);
  if ((back - x).norm() > 1e-10 * x.norm())
    throw NumericalError("transport_solve_primal: reconstruction residual above 1e-10");
  return t;
}

double invariant_distance(const ConeDescriptor& cone, const Vec& x, const Vec& y) {
  require_member(cone, Side::dual, x, "invariant_distance");
  require_member(cone, Side::dual, y, "invariant_distance");
  if (cone.kind == ConeKind::product) return (y.array().log() - x.array().log()).matrix().norm();
  const Vec z = lorentz_quadratic(lorentz_power(x, -0.5)) * y;
  const auto [mp, mm] = lorentz_spectrum(z);
  const double lp = std::log(mp);
  const double lm = std::log(mm);
  return std::sqrt(lp * lp + lm * lm);
}

double gamma_cone(const ConeDescriptor& cone, const PowerExponent& s) {
  require_rank(cone, s);
  double value = cone.gamma_constant;
  for (int j = 0; j < cone.rank; ++j) {
    const double arg = s[j] - 0.5 * cone.m_vec[j];
    if (!(arg > 0.0)) throw DomainError("gamma_cone: exponent outside the convergence range");
    value *= std::tgamma(arg);
  }
  // <e', x> = x_1 is half the Jordan trace pairing
  if (cone.kind == ConeKind::lorentz) value *= std::pow(2.0, s.sum() - 0.5 * cone.dim);
  return value;
}

PowerExponent derive_d_vector(const ConeDescriptor& cone) {
  std::mt19937_64 rng(20240611);
  const int samples = 24;
  Mat a(samples, cone.rank);
  Vec rhs(samples);
  for (int i = 0; i < samples; ++i) {
    const TriangularElement t = random_element(cone, rng, 0.8);
    a.row(i) = t.delta.array().log().matrix().transpose();
    rhs[i] = -std::log(std::abs(t.matrix.determinant()));
  }
  Vec d = a.colPivHouseholderQr().solve(rhs);
  const double residual = (a * d - rhs).cwiseAbs().maxCoeff();
  if (residual > 1e-6) {
    std::ostringstream os;
    os << "derive_d_vector: invariance fit residual " << residual << " above 1e-6";
    throw NumericalError(os.str());
  }
  for (int j = 0; j < d.size(); ++j) d[j] = rationalize(d[j]);
  return PowerExponent(d);
}

ConeDescriptor make_cone(ConeKind kind, int rank_or_dim) {
  ConeDescriptor cone;
  cone.kind = kind;
  if (kind == ConeKind::product) {
    if (rank_or_dim < 1) throw DomainError("product cone needs r >= 1");
    cone.rank = rank_or_dim;
    cone.dim = rank_or_dim;
    cone.e_primal = Vec::Ones(cone.dim);
    cone.e_dual = Vec::Ones(cone.dim);
    cone.m_vec = Vec::Zero(cone.rank);
    cone.gamma_constant = 1.0;
  } else {
    if (rank_or_dim < 3) throw DomainError("lorentz cone needs m >= 3");
    cone.rank = 2;
    cone.dim = rank_or_dim;
    cone.e_primal = Vec::Unit(cone.dim, 0);
    cone.e_dual = Vec::Unit(cone.dim, 0);
    cone.m_vec = Vec::Zero(2);
    cone.m_vec[1] = cone.dim - 2;
    cone.gamma_constant = std::pow(2.0 * M_PI, 0.5 * (cone.dim - 2));
  }
  cone.d = derive_d_vector(cone);
  cone.m_dual_vec = -2.0 * (cone.d.s.array() + 1.0).matrix() - cone.m_vec;
  return cone;
}

int transport_coordinate_count(const ConeDescriptor& cone) { return cone.dim; }

Vec transport_coordinates(const ConeDescriptor& cone, const Vec& lambda) {
  require_member(cone, Side::dual, lambda, "transport_coordinates");
  if (cone.kind == ConeKind::product) return lambda.array().log().matrix();
  const int m = cone.dim;
  const double vhat = lambda[0] - lambda[m - 1];
  const double d2 = lorentz_delta2(lambda);
  Vec theta(m);
  theta[0] = 0.5 * std::log(d2 / vhat);
  theta[1] = 0.5 * std::log(vhat);
  theta.tail(m - 2) = lambda.segment(1, m - 2) / std::sqrt(d2);
  return theta;
}

Vec from_transport_coordinates(const ConeDescriptor& cone, const Vec& theta) {
  if (theta.size() != cone.dim) throw DomainError("transport coordinates have wrong length");
  if (cone.kind == ConeKind::product) return theta.array().exp().matrix();
  const int m = cone.dim;
  const double a2 = std::exp(2.0 * theta[0]);
  const double b2 = std::exp(2.0 * theta[1]);
  const Vec w = theta.tail(m - 2) * std::exp(theta[0] - theta[1]);
  const double uhat = a2 + b2 * w.squaredNorm();
  Vec lambda(m);
  lambda[0] = 0.5 * (uhat + b2);
  lambda[m - 1] = 0.5 * (uhat - b2);
  lambda.segment(1, m - 2) = b2 * w;
  return lambda;
}

}  // namespace conewave
