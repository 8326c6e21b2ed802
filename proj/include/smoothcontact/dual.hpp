#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace smoothcontact {

// Second-order forward-mode scalar: value, gradient and Hessian with respect
// to a small, dense stencil of n variables. Energies are written once as
// templates over the scalar type; instantiating with D2 yields exact
// derivatives, instantiating with double yields a cheap value-only path for
// line searches.
class D2 {
 public:
  double v = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd H;

  D2() = default;
  D2(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess)
      : v(value), g(std::move(grad)), H(std::move(hess)) {}

  static D2 constant(int n, double value) {
    return D2(value, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n));
  }
  static D2 variable(int n, int index, double value) {
    D2 r = constant(n, value);
    r.g[index] = 1.0;
    return r;
  }
  int size() const { return static_cast<int>(g.size()); }
};

inline D2 operator+(const D2& a, const D2& b) { return D2(a.v + b.v, a.g + b.g, a.H + b.H); }
inline D2 operator-(const D2& a, const D2& b) { return D2(a.v - b.v, a.g - b.g, a.H - b.H); }
inline D2 operator-(const D2& a) { return D2(-a.v, -a.g, -a.H); }
inline D2 operator+(const D2& a, double c) { return D2(a.v + c, a.g, a.H); }
inline D2 operator+(double c, const D2& a) { return a + c; }
inline D2 operator-(const D2& a, double c) { return D2(a.v - c, a.g, a.H); }
inline D2 operator-(double c, const D2& a) { return D2(c - a.v, -a.g, -a.H); }
inline D2 operator*(const D2& a, double c) { return D2(a.v * c, a.g * c, a.H * c); }
inline D2 operator*(double c, const D2& a) { return a * c; }
inline D2 operator/(const D2& a, double c) { return a * (1.0 / c); }

inline D2 operator*(const D2& a, const D2& b) {
  return D2(a.v * b.v, a.g * b.v + b.g * a.v,
            a.H * b.v + b.H * a.v + a.g * b.g.transpose() + b.g * a.g.transpose());
}

// Unary chain rule: f(a), given f' and f'' at a.v.
inline D2 chain(const D2& a, double f, double df, double ddf) {
  return D2(f, df * a.g, df * a.H + ddf * (a.g * a.g.transpose()));
}

inline D2 inv(const D2& a) {
  const double iv = 1.0 / a.v;
  return chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}
inline D2 operator/(const D2& a, const D2& b) { return a * inv(b); }
inline D2 operator/(double c, const D2& b) { return inv(b) * c; }

inline D2 sqrt(const D2& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline D2 log(const D2& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline D2 exp(const D2& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

// Uniform construction of constants/variables for double and D2.
template <class T>
struct AdTraits;

template <>
struct AdTraits<double> {
  static double constant(int, double v) { return v; }
  static double variable(int, int, double v) { return v; }
  static double value(double v) { return v; }
};

template <>
struct AdTraits<D2> {
  static D2 constant(int n, double v) { return D2::constant(n, v); }
  static D2 variable(int n, int i, double v) { return D2::variable(n, i, v); }
  static double value(const D2& v) { return v.v; }
};

// Minimal 2D vector over a generic scalar.
template <class T>
struct V2 {
  T x, y;

  friend V2 operator+(const V2& a, const V2& b) { return {a.x + b.x, a.y + b.y}; }
  friend V2 operator-(const V2& a, const V2& b) { return {a.x - b.x, a.y - b.y}; }
  friend V2 operator*(double c, const V2& a) { return {c * a.x, c * a.y}; }
  T dot(const V2& o) const { return x * o.x + y * o.y; }
  T squaredNorm() const { return x * x + y * y; }
  T norm() const {
    using std::sqrt;
    return sqrt(squaredNorm());
  }
};

// Rotation by -90 degrees; maps a CCW boundary tangent to the outward normal.
template <class T>
V2<T> perp_outward(const V2<T>& e) {
  return {e.y, -e.x};
}

// cross(a, b) = a.x*b.y - a.y*b.x
template <class T>
T cross2(const V2<T>& a, const V2<T>& b) {
  return a.x * b.y - a.y * b.x;
}

}  // namespace smoothcontact
