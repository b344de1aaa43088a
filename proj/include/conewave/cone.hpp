#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "conewave/error.hpp"

namespace conewave {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ConeKind { product, lorentz };
enum class Side { primal, dual };

std::string to_string(ConeKind kind);
ConeKind cone_kind_from_string(const std::string& name);

// Real exponent vector s in R^r.
struct PowerExponent {
  Vec s;

  PowerExponent() = default;
  explicit PowerExponent(Vec values) : s(std::move(values)) {}
  PowerExponent(std::initializer_list<double> values);

  static PowerExponent zeros(int r) { return PowerExponent(Vec::Zero(r)); }
  static PowerExponent constant(int r, double v) { return PowerExponent(Vec::Constant(r, v)); }

  int size() const { return static_cast<int>(s.size()); }
  double operator[](int j) const { return s[j]; }
  double sum() const { return s.sum(); }

  PowerExponent operator+(const PowerExponent& o) const { return PowerExponent(s + o.s); }
  PowerExponent operator-(const PowerExponent& o) const { return PowerExponent(s - o.s); }
  PowerExponent operator-() const { return PowerExponent(-s); }
  PowerExponent operator*(double a) const { return PowerExponent(s * a); }
};

// Element t of the triangular group T+. Acts on the left on F (x -> M x) and on
// the right on F' (lambda -> M^T lambda).
struct TriangularElement {
  Mat matrix;
  Vec delta;  // characters (Delta_1(t), ..., Delta_r(t))

  TriangularElement compose(const TriangularElement& other) const;  // this * other
  TriangularElement inverse() const;
  Vec act_primal(const Vec& x) const { return matrix * x; }
  Vec act_dual(const Vec& lambda) const { return matrix.transpose() * lambda; }
  double character(const PowerExponent& s) const;  // Delta^s(t)
};

struct ConeDescriptor {
  ConeKind kind = ConeKind::product;
  int rank = 1;
  int dim = 1;
  Vec e_primal;
  Vec e_dual;
  PowerExponent d;
  Vec m_vec;
  Vec m_dual_vec;
  double gamma_constant = 1.0;  // s-independent part of the Laplace normalization
};

ConeDescriptor make_cone(ConeKind kind, int rank_or_dim);

bool membership(const ConeDescriptor& cone, Side side, const Vec& v);

// Delta_Omega^s(v) on the primal side, Delta_Omega'^s(v) on the dual side.
double delta_power(const ConeDescriptor& cone, Side side, const PowerExponent& s, const Vec& v);

// Element with e_Omega' . t = lambda.
TriangularElement transport_solve(const ConeDescriptor& cone, const Vec& lambda);
// Element with t . e_Omega = x.
TriangularElement transport_solve_primal(const ConeDescriptor& cone, const Vec& x);

double invariant_distance(const ConeDescriptor& cone, const Vec& x, const Vec& y);

// int_Omega e^{-<e', x>} Delta^s dnu; lorentz(m) gives (2 pi)^{(m-2)/2} 2^{sum s - m/2} prod Gamma(s_j - m_j/2).
double gamma_cone(const ConeDescriptor& cone, const PowerExponent& s);

PowerExponent derive_d_vector(const ConeDescriptor& cone);

// Parametrized elements. product: diag(a). lorentz: (alpha, beta, w) acting in light
// coordinates u = x_1 + x_m, y = x_2..x_{m-1}, v = x_1 - x_m by
// u -> alpha^2 u, y -> alpha beta (y + u w), v -> beta^2 (v + 2 w.y + |w|^2 u).
TriangularElement product_element(const Vec& diagonal);
TriangularElement lorentz_element(int m, double alpha, double beta, const Vec& w);
TriangularElement identity_element(const ConeDescriptor& cone);

// Element with delta_j = a and delta_i = 1 otherwise, no shear.
TriangularElement axis_dilation(const ConeDescriptor& cone, int j, double a);

// Random element with log-characters and shears of size about `spread`.
TriangularElement random_element(const ConeDescriptor& cone, std::mt19937_64& rng, double spread);

// Lorentz light coordinates and principal minors.
double lorentz_delta1(const Vec& x);
double lorentz_delta2(const Vec& x);

// Jordan quadratic representation P(a) for lorentz cones (P(a) e = a^2).
Mat lorentz_quadratic(const Vec& a);
// Jordan square root of a point of a symmetric cone (product: componentwise).
Vec jordan_sqrt(const ConeDescriptor& cone, const Vec& x);

// Transport coordinates: product -> log lambda; lorentz -> (log alpha, log beta, omega)
// with omega = w beta / alpha for the element transporting e' to lambda.
Vec transport_coordinates(const ConeDescriptor& cone, const Vec& lambda);
Vec from_transport_coordinates(const ConeDescriptor& cone, const Vec& theta);
int transport_coordinate_count(const ConeDescriptor& cone);

}  // namespace conewave
