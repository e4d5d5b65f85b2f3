#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <utility>

#include "lbesc/core/objective.hpp"
#include "lbesc/core/system.hpp"
#include "lbesc/errors.hpp"

namespace lbesc {

/// Time-varying vector field b(t, x) on R^n with an optional analytic
/// Jacobian.
class VectorFieldFn {
 public:
  using EvalFn = std::function<Vector(double, const Vector&)>;
  using JacobianFn = std::function<Matrix(double, const Vector&)>;

  VectorFieldFn(Eigen::Index dimension, EvalFn eval, JacobianFn jacobian = {})
      : dimension_(dimension), eval_(std::move(eval)), jacobian_(std::move(jacobian)) {
    if (dimension_ <= 0 || !eval_) {
      throw ConfigError("vector field needs a positive dimension and a callable");
    }
  }

  Eigen::Index dimension() const noexcept { return dimension_; }
  bool has_jacobian() const noexcept { return static_cast<bool>(jacobian_); }

  Vector operator()(double t, const Vector& x) const { return eval_(t, x); }

  /// Analytic Jacobian when available, else central differences with step
  /// 1e-6 (1 + |x_k|) per column.
  Matrix jacobian(double t, const Vector& x) const {
    if (jacobian_) {
      return jacobian_(t, x);
    }
    return jacobian_fd(t, x);
  }

  Matrix jacobian_fd(double t, const Vector& x) const {
    Matrix jac(dimension_, x.size());
    Vector probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double h = 1e-6 * (1.0 + std::abs(x[k]));
      probe[k] = x[k] + h;
      const Vector plus = eval_(t, probe);
      probe[k] = x[k] - h;
      const Vector minus = eval_(t, probe);
      probe[k] = x[k];
      jac.col(k) = (plus - minus) / (2.0 * h);
    }
    return jac;
  }

 private:
  Eigen::Index dimension_;
  EvalFn eval_;
  JacobianFn jacobian_;
};

/// [b_i, b_j](t, x) = (d b_j / dx) b_i - (d b_i / dx) b_j.
inline Vector lie_bracket(const VectorFieldFn& b_i, const VectorFieldFn& b_j,
                          double t, const Vector& x) {
  if (b_i.dimension() != b_j.dimension() || x.size() != b_i.dimension()) {
    throw ConfigError("lie_bracket: dimension mismatch");
  }
  return b_j.jacobian(t, x) * b_i(t, x) - b_i.jacobian(t, x) * b_j(t, x);
}

/// Full vector fields b_s(f(x)) e_i of channel i, s = 1, 2, as they appear
/// in the multi-variable ESC. The objective is the controller's seek signal.
inline std::pair<VectorFieldFn, VectorFieldFn> channel_fields(
    const EscSystemSpec& spec, std::size_t channel) {
  const auto n = static_cast<Eigen::Index>(spec.dimension());
  const auto i = static_cast<Eigen::Index>(channel);
  auto make = [&spec, n, i](bool first) {
    return VectorFieldFn(n, [&spec, n, i, first](double, const Vector& x) {
      const ChannelSpec& c = spec.channels[static_cast<std::size_t>(i)];
      const double f = spec.objective.seek_value(x);
      Vector out = Vector::Zero(n);
      out[i] = first ? c.b1(f) : c.b2(f);
      return out;
    });
  };
  return {make(true), make(false)};
}

}  // namespace lbesc
