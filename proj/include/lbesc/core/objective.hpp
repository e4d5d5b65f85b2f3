#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "lbesc/errors.hpp"

namespace lbesc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ExtremumKind { minimum, maximum };

/// Axis-aligned box standing in for the compact set the assumptions
/// refer to.
struct DomainBox {
  Vector lower;
  Vector upper;

  static DomainBox symmetric(Eigen::Index n, double half_width) {
    return {Vector::Constant(n, -half_width), Vector::Constant(n, half_width)};
  }

  Eigen::Index dimension() const { return lower.size(); }
  Vector center() const { return 0.5 * (lower + upper); }
  double diagonal() const { return (upper - lower).norm(); }

  bool contains(const Vector& x) const {
    return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
           (x.array() <= upper.array()).all();
  }

  friend bool operator==(const DomainBox& l, const DomainBox& r) {
    return l.lower.size() == r.lower.size() && l.upper.size() == r.upper.size() &&
           l.lower == r.lower && l.upper == r.upper;
  }
};

/// Objective f: R^n -> R, seen by the controller only through its values.
///
/// Quadratic objectives f(x) = offset + sum_k w_k (x_k - c_k)^2 are fully
/// described by their parameters and round-trip through scenario files.
/// Custom objectives wrap arbitrary callables.
///
/// The analytic gradient is an oracle: tests and reference trajectories may
/// use it, the ESC loop never does.
class ObjectiveMap {
 public:
  using EvalFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  enum class Form { quadratic, custom };

  static ObjectiveMap quadratic(Vector weights, Vector center, double offset,
                                ExtremumKind kind) {
    if (weights.size() != center.size() || weights.size() == 0) {
      throw ConfigError("quadratic objective: weights and center differ in size");
    }
    ObjectiveMap m;
    m.form_ = Form::quadratic;
    m.dimension_ = weights.size();
    m.weights_ = std::move(weights);
    m.center_ = std::move(center);
    m.offset_ = offset;
    m.kind_ = kind;
    m.extremum_ = m.center_;
    m.extremum_value_ = offset;
    return m;
  }

  static ObjectiveMap custom(Eigen::Index dimension, EvalFn eval,
                             GradientFn gradient = {},
                             ExtremumKind kind = ExtremumKind::minimum,
                             std::optional<Vector> extremum = std::nullopt,
                             std::optional<double> extremum_value = std::nullopt) {
    if (dimension <= 0 || !eval) {
      throw ConfigError("custom objective needs a positive dimension and a callable");
    }
    ObjectiveMap m;
    m.form_ = Form::custom;
    m.dimension_ = dimension;
    m.eval_ = std::move(eval);
    m.gradient_ = std::move(gradient);
    m.kind_ = kind;
    m.extremum_ = std::move(extremum);
    m.extremum_value_ = extremum_value;
    return m;
  }

  Form form() const noexcept { return form_; }
  Eigen::Index dimension() const noexcept { return dimension_; }
  ExtremumKind kind() const noexcept { return kind_; }
  const std::optional<Vector>& extremum() const noexcept { return extremum_; }
  const std::optional<double>& extremum_value() const noexcept {
    return extremum_value_;
  }
  const Vector& weights() const noexcept { return weights_; }
  const Vector& center() const noexcept { return center_; }
  double offset() const noexcept { return offset_; }

  double operator()(const Vector& x) const {
    check_dimension(x);
    if (form_ == Form::quadratic) {
      return offset_ + (weights_.array() * (x - center_).array().square()).sum();
    }
    return eval_(x);
  }

  bool has_gradient() const noexcept {
    return form_ == Form::quadratic || static_cast<bool>(gradient_);
  }

  Vector gradient(const Vector& x) const {
    check_dimension(x);
    if (form_ == Form::quadratic) {
      return 2.0 * (weights_.array() * (x - center_).array()).matrix();
    }
    if (!gradient_) {
      throw CapabilityError("objective has no oracle gradient");
    }
    return gradient_(x);
  }

  /// Signal the controller descends on. Minimisation measures f itself;
  /// maximisation measures -(f - f*), with f* = 0 when undeclared.
  double seek_value(const Vector& x) const {
    const double f = (*this)(x);
    return kind_ == ExtremumKind::minimum ? f : -(f - extremum_value_.value_or(0.0));
  }

  Vector seek_gradient(const Vector& x) const {
    Vector g = gradient(x);
    return kind_ == ExtremumKind::minimum ? g : Vector(-g);
  }

  /// f - f*, the shifted objective used by the vanishing-oscillation check.
  double shifted(const Vector& x) const {
    if (!extremum_value_) {
      throw CapabilityError("objective declares no extremum value");
    }
    return (*this)(x) - *extremum_value_;
  }

 private:
  void check_dimension(const Vector& x) const {
    if (x.size() != dimension_) {
      throw ConfigError("objective evaluated with a state of wrong dimension");
    }
  }

  Form form_ = Form::custom;
  Eigen::Index dimension_ = 0;
  Vector weights_;
  Vector center_;
  double offset_ = 0.0;
  EvalFn eval_;
  GradientFn gradient_;
  ExtremumKind kind_ = ExtremumKind::minimum;
  std::optional<Vector> extremum_;
  std::optional<double> extremum_value_;
};

/// Scalar vector-field element b(f) of one channel.
///
///   affine:  gain * f + offset
///   cosine:  gain * cos(k * f)
///   sine:    gain * sin(k * f)
///   custom:  user callable, derivative optional
class FieldElement {
 public:
  using Fn = std::function<double(double)>;

  enum class Form { affine, cosine, sine, custom };

  static FieldElement affine(double gain, double offset = 0.0) {
    return FieldElement(Form::affine, gain, 0.0, offset);
  }
  static FieldElement constant(double value) { return affine(0.0, value); }
  static FieldElement cosine(double gain, double k) {
    return FieldElement(Form::cosine, gain, k, 0.0);
  }
  static FieldElement sine(double gain, double k) {
    return FieldElement(Form::sine, gain, k, 0.0);
  }
  static FieldElement custom(Fn value, Fn derivative = {}) {
    if (!value) {
      throw ConfigError("custom field element needs a callable");
    }
    FieldElement e(Form::custom, 0.0, 0.0, 0.0);
    e.value_ = std::move(value);
    e.derivative_ = std::move(derivative);
    return e;
  }

  Form form() const noexcept { return form_; }
  double gain() const noexcept { return gain_; }
  double k() const noexcept { return k_; }
  double offset() const noexcept { return offset_; }

  double operator()(double f) const {
    switch (form_) {
      case Form::affine:
        return gain_ * f + offset_;
      case Form::cosine:
        return gain_ * std::cos(k_ * f);
      case Form::sine:
        return gain_ * std::sin(k_ * f);
      case Form::custom:
        return value_(f);
    }
    return 0.0;
  }

  bool has_derivative() const noexcept {
    return form_ != Form::custom || static_cast<bool>(derivative_);
  }

  double derivative(double f) const {
    switch (form_) {
      case Form::affine:
        return gain_;
      case Form::cosine:
        return -gain_ * k_ * std::sin(k_ * f);
      case Form::sine:
        return gain_ * k_ * std::cos(k_ * f);
      case Form::custom:
        if (!derivative_) {
          throw CapabilityError("custom field element has no analytic derivative");
        }
        return derivative_(f);
    }
    return 0.0;
  }

  /// Central difference with step max(1e-6, 1e-6 |f|).
  double derivative_fd(double f) const {
    const double h = std::max(1e-6, 1e-6 * std::abs(f));
    return ((*this)(f + h) - (*this)(f - h)) / (2.0 * h);
  }

  /// Parameter equality; custom elements never compare equal.
  friend bool operator==(const FieldElement& l, const FieldElement& r) {
    return l.form_ != Form::custom && l.form_ == r.form_ && l.gain_ == r.gain_ &&
           l.k_ == r.k_ && l.offset_ == r.offset_;
  }

 private:
  FieldElement(Form form, double gain, double k, double offset)
      : form_(form), gain_(gain), k_(k), offset_(offset) {}

  Form form_;
  double gain_;
  double k_;
  double offset_;
  Fn value_;
  Fn derivative_;
};

}  // namespace lbesc
