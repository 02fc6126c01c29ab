#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace drs {

/// Dense real vector. Constructors that take values reject NaN/Inf.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0);
  Vec(std::initializer_list<double> values);
  explicit Vec(std::vector<double> values);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  operator std::span<const double>() const noexcept { return data_; }

  const std::vector<double>& values() const noexcept { return data_; }

  friend bool operator==(const Vec&, const Vec&) = default;

 private:
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);

/// A closed set together with a single-valued selection of its projection.
/// Non-convex sets resolve ties deterministically inside `project_into`.
class ProjectionSet {
 public:
  virtual ~ProjectionSet() = default;

  virtual std::size_t dimension() const = 0;

  /// Writes the selected nearest point of `x` into `out`. `x` and `out` may
  /// alias. Both spans have length `dimension()`; callers guarantee this.
  virtual void project_into(std::span<const double> x, std::span<double> out) const = 0;

  /// Checked convenience wrapper.
  Vec project(const Vec& x) const;
};

/// Wraps an arbitrary nearest-point map. Mostly used for ad-hoc sets in
/// tests and examples.
class ProjectionMap final : public ProjectionSet {
 public:
  using Fn = std::function<void(std::span<const double>, std::span<double>)>;

  ProjectionMap(std::size_t dimension, Fn fn);

  static ProjectionMap identity(std::size_t dimension);

  std::size_t dimension() const override { return dimension_; }
  void project_into(std::span<const double> x, std::span<double> out) const override;

 private:
  std::size_t dimension_;
  Fn fn_;
};

/// offset + span(basis), with `basis` orthonormal.
class AffineSubspace final : public ProjectionSet {
 public:
  /// `basis` must be orthonormal to 1e-12 and every vector must share the
  /// offset's length. Throws ContractViolation otherwise.
  AffineSubspace(std::vector<Vec> basis, Vec offset);

  /// Orthonormalises `directions` (modified Gram-Schmidt, two passes) and
  /// drops numerically dependent ones.
  static AffineSubspace from_spanning(const std::vector<Vec>& directions, Vec offset);

  /// { x : <x, normal> = rhs }.
  static AffineSubspace hyperplane(const Vec& normal, double rhs);

  static AffineSubspace whole_space(std::size_t n);
  static AffineSubspace point(Vec p);

  std::size_t dimension() const override { return offset_.size(); }
  std::size_t subspace_dimension() const noexcept { return basis_.size(); }
  const std::vector<Vec>& basis() const noexcept { return basis_; }
  const Vec& offset() const noexcept { return offset_; }

  void project_into(std::span<const double> x, std::span<double> out) const override;

 private:
  std::vector<Vec> basis_;
  Vec offset_;
};

/// Relaxation parameter of a relaxed projection, restricted to (0, 2].
class RelaxationParam {
 public:
  explicit RelaxationParam(double lambda);
  double value() const noexcept { return lambda_; }

 private:
  double lambda_;
};

/// lambda * P(x) + (1 - lambda) * x
Vec relaxed_project(const ProjectionSet& set, RelaxationParam lambda, const Vec& x);

/// 2 P(x) - x
Vec reflect(const ProjectionSet& set, const Vec& x);

/// Half the squared distance from `x` to the set.
double dist_sq(const ProjectionSet& set, const Vec& x);

}  // namespace drs
