#include "drsplit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "drsplit/errors.hpp"

namespace drs {

namespace {

void require_finite(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ContractViolation("Vec entry " + std::to_string(i) + " is not finite");
    }
  }
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ContractViolation(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
  }
}

constexpr double kOrthonormalTol = 1e-12;

}  // namespace

Vec::Vec(std::size_t n, double fill) : data_(n, fill) {
  if (!std::isfinite(fill)) throw ContractViolation("Vec fill value is not finite");
}

Vec::Vec(std::initializer_list<double> values) : data_(values) { require_finite(data_); }

Vec::Vec(std::vector<double> values) : data_(std::move(values)) { require_finite(data_); }

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Vec ProjectionSet::project(const Vec& x) const {
  require_same_size(x.size(), dimension(), "project");
  Vec out(x.size());
  project_into(x.span(), out.span());
  return out;
}

ProjectionMap::ProjectionMap(std::size_t dimension, Fn fn)
    : dimension_(dimension), fn_(std::move(fn)) {}

ProjectionMap ProjectionMap::identity(std::size_t dimension) {
  return ProjectionMap(dimension, [](std::span<const double> x, std::span<double> out) {
    std::copy(x.begin(), x.end(), out.begin());
  });
}

void ProjectionMap::project_into(std::span<const double> x, std::span<double> out) const {
  fn_(x, out);
}

AffineSubspace::AffineSubspace(std::vector<Vec> basis, Vec offset)
    : basis_(std::move(basis)), offset_(std::move(offset)) {
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    require_same_size(basis_[i].size(), offset_.size(), "AffineSubspace basis");
    for (std::size_t j = i; j < basis_.size(); ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(dot(basis_[i], basis_[j]) - expected) > kOrthonormalTol) {
        throw ContractViolation("AffineSubspace basis is not orthonormal");
      }
    }
  }
}

AffineSubspace AffineSubspace::from_spanning(const std::vector<Vec>& directions, Vec offset) {
  std::vector<Vec> basis;
  for (const Vec& d : directions) {
    require_same_size(d.size(), offset.size(), "from_spanning");
    const double scale = norm(d);
    if (scale == 0.0) continue;
    Vec v = d;
    // Two Gram-Schmidt sweeps keep the basis orthonormal to working precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& b : basis) {
        const double c = dot(v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
      }
    }
    const double len = norm(v);
    if (len <= 1e-10 * scale) continue;
    for (double& e : v) e /= len;
    basis.push_back(std::move(v));
  }
  return AffineSubspace(std::move(basis), std::move(offset));
}

AffineSubspace AffineSubspace::hyperplane(const Vec& normal, double rhs) {
  const double nn = dot(normal, normal);
  if (nn == 0.0) throw ContractViolation("hyperplane normal must be nonzero");
  Vec offset(normal.size());
  for (std::size_t i = 0; i < normal.size(); ++i) offset[i] = rhs * normal[i] / nn;

  // Complement of the normal: project each standard basis vector away from it.
  std::vector<Vec> directions;
  directions.reserve(normal.size());
  for (std::size_t i = 0; i < normal.size(); ++i) {
    Vec e(normal.size());
    e[i] = 1.0;
    const double c = normal[i] / nn;
    for (std::size_t j = 0; j < normal.size(); ++j) e[j] -= c * normal[j];
    directions.push_back(std::move(e));
  }
  return from_spanning(directions, std::move(offset));
}

AffineSubspace AffineSubspace::whole_space(std::size_t n) {
  std::vector<Vec> basis;
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n);
    e[i] = 1.0;
    basis.push_back(std::move(e));
  }
  return AffineSubspace(std::move(basis), Vec(n));
}

AffineSubspace AffineSubspace::point(Vec p) { return AffineSubspace({}, std::move(p)); }

void AffineSubspace::project_into(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = offset_.size();
  std::vector<double> coeff(basis_.size());
  for (std::size_t b = 0; b < basis_.size(); ++b) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += (x[i] - offset_[i]) * basis_[b][i];
    coeff[b] = c;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = offset_[i];
  for (std::size_t b = 0; b < basis_.size(); ++b) {
    for (std::size_t i = 0; i < n; ++i) out[i] += coeff[b] * basis_[b][i];
  }
}

RelaxationParam::RelaxationParam(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0 && lambda <= 2.0)) {
    throw ContractViolation("relaxation parameter must lie in (0, 2]");
  }
}

Vec relaxed_project(const ProjectionSet& set, RelaxationParam lambda, const Vec& x) {
  Vec out = set.project(x);
  const double l = lambda.value();
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = l * out[i] + (1.0 - l) * x[i];
  return out;
}

Vec reflect(const ProjectionSet& set, const Vec& x) {
  return relaxed_project(set, RelaxationParam(2.0), x);
}

double dist_sq(const ProjectionSet& set, const Vec& x) {
  const Vec p = set.project(x);
  const double d = distance(x, p);
  return 0.5 * d * d;
}

}  // namespace drs
