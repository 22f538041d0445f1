#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dtsp/errors.hpp"

namespace dtsp {

using Node = std::uint32_t;

// Anything that can report a node count and a symmetric distance between two
// node indices. All algorithms in this library are written against this.
template <class M>
concept DistanceOracle = requires(const M& m, Node a, Node b) {
  { m.size() } -> std::convertible_to<std::size_t>;
  { m(a, b) } -> std::convertible_to<double>;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class MetricKind {
  EuclidReal,           // plain Euclidean distance
  EuclidRoundedTSPLIB,  // EUC_2D: Euclidean distance rounded half-up to an integer
  ExplicitMatrix,       // full symmetric matrix, no coordinates
};

inline const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::EuclidReal: return "EuclidReal";
    case MetricKind::EuclidRoundedTSPLIB: return "EuclidRoundedTSPLIB";
    case MetricKind::ExplicitMatrix: return "ExplicitMatrix";
  }
  return "?";
}

// TSPLIB nint(): round half up.
inline double round_tsplib(double value) { return std::floor(value + 0.5); }

struct Metric {
  MetricKind kind = MetricKind::EuclidReal;
  // Row-major n*n, only for ExplicitMatrix.
  std::vector<double> matrix;
};

// A symmetric TSP instance. Immutable after construction.
class Instance {
 public:
  static Instance from_points(std::vector<Point> points,
                              MetricKind kind = MetricKind::EuclidReal,
                              std::string name = "instance") {
    if (kind == MetricKind::ExplicitMatrix) {
      throw ConfigError("from_points: ExplicitMatrix needs a distance matrix");
    }
    if (points.empty()) throw ConfigError("instance needs at least one node");
    for (const auto& p : points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw ConfigError("point coordinates must be finite");
      }
    }
    Instance inst;
    inst.n_ = points.size();
    inst.points_ = std::move(points);
    inst.metric_.kind = kind;
    inst.name_ = std::move(name);
    return inst;
  }

  // `values` is row-major n*n; it must be symmetric, nonnegative, finite and
  // have a zero diagonal. The triangle inequality is not checked here.
  static Instance from_matrix(std::size_t n, std::vector<double> values,
                              std::string name = "instance") {
    if (n == 0) throw ConfigError("instance needs at least one node");
    if (values.size() != n * n) {
      throw ConfigError("distance matrix must have n*n entries");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (values[i * n + i] != 0.0) {
        throw ConfigError("distance matrix diagonal must be zero");
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double v = values[i * n + j];
        if (!std::isfinite(v) || v < 0.0) {
          throw ConfigError("distance matrix entries must be finite and >= 0");
        }
        if (v != values[j * n + i]) {
          throw ConfigError("distance matrix must be symmetric");
        }
      }
    }
    Instance inst;
    inst.n_ = n;
    inst.metric_.kind = MetricKind::ExplicitMatrix;
    inst.metric_.matrix = std::move(values);
    inst.name_ = std::move(name);
    return inst;
  }

  std::size_t size() const noexcept { return n_; }
  const std::string& name() const noexcept { return name_; }
  MetricKind kind() const noexcept { return metric_.kind; }
  const Metric& metric() const noexcept { return metric_; }
  bool has_points() const noexcept { return !points_.empty(); }
  const std::vector<Point>& points() const noexcept { return points_; }

  // Unchecked distance, used on hot paths.
  double operator()(Node a, Node b) const noexcept {
    switch (metric_.kind) {
      case MetricKind::EuclidReal:
        return euclid(a, b);
      case MetricKind::EuclidRoundedTSPLIB:
        return round_tsplib(euclid(a, b));
      case MetricKind::ExplicitMatrix:
        return metric_.matrix[std::size_t{a} * n_ + b];
    }
    return 0.0;
  }

  double distance(std::size_t a, std::size_t b) const {
    if (a >= n_ || b >= n_) {
      throw std::out_of_range("node index out of range");
    }
    return (*this)(static_cast<Node>(a), static_cast<Node>(b));
  }

  // O(n^3); meant for validation of small explicit matrices.
  bool satisfies_triangle_inequality(double tolerance = 1e-9) const {
    for (Node a = 0; a < n_; ++a)
      for (Node b = 0; b < n_; ++b)
        for (Node c = 0; c < n_; ++c)
          if ((*this)(a, c) > (*this)(a, b) + (*this)(b, c) + tolerance) return false;
    return true;
  }

 private:
  Instance() = default;

  double euclid(Node a, Node b) const noexcept {
    const double dx = points_[a].x - points_[b].x;
    const double dy = points_[a].y - points_[b].y;
    return std::sqrt(dx * dx + dy * dy);
  }

  std::size_t n_ = 0;
  std::vector<Point> points_;
  Metric metric_;
  std::string name_;
};

static_assert(DistanceOracle<Instance>);

// Dense cache of an oracle's distances. Worth it when the same pairs are
// queried many times (Held-Karp ascent).
class DistanceMatrix {
 public:
  template <DistanceOracle M>
  explicit DistanceMatrix(const M& metric) : n_(metric.size()), d_(n_ * n_) {
    for (Node a = 0; a < n_; ++a)
      for (Node b = a; b < n_; ++b)
        d_[std::size_t{a} * n_ + b] = d_[std::size_t{b} * n_ + a] = metric(a, b);
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(Node a, Node b) const noexcept { return d_[std::size_t{a} * n_ + b]; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

}  // namespace dtsp
