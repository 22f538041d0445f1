#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "dtsp/errors.hpp"
#include "dtsp/instance.hpp"

namespace dtsp {

// Portable random source. std::mt19937_64 has a bit-exact output sequence
// mandated by the standard; the std distributions do not, so the transforms
// below are written out by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, bound), bound >= 1; rejects the biased tail.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via Box-Muller; one draw per call, the partner is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// n points i.i.d. uniform on [0, box]^2.
inline Instance generate_uniform(std::size_t n, std::uint64_t seed, double box = 1.0) {
  if (n < 1) throw ConfigError("generate_uniform: n must be >= 1");
  if (!(box > 0.0)) throw ConfigError("generate_uniform: box must be > 0");
  Rng rng(seed);
  std::vector<Point> points(n);
  for (auto& p : points) {
    p.x = rng.uniform(0.0, box);
    p.y = rng.uniform(0.0, box);
  }
  return Instance::from_points(std::move(points), MetricKind::EuclidReal,
                               "uniform-" + std::to_string(n) + "-" + std::to_string(seed));
}

inline double default_cluster_sigma(double box, std::size_t clusters) {
  return box / (50.0 * std::sqrt(static_cast<double>(clusters)));
}

inline std::size_t default_cluster_count(std::size_t n) { return n / 100 > 0 ? n / 100 : 1; }

// Cluster centres uniform on [0, box]^2; every point picks a centre uniformly
// and is offset by an isotropic Gaussian. sigma <= 0 selects the default
// box / (50 sqrt(clusters)).
inline Instance generate_clustered(std::size_t n, std::uint64_t seed, double box = 1.0,
                                   std::size_t clusters = 0, double sigma = 0.0) {
  if (clusters == 0) clusters = default_cluster_count(n);
  if (n < 1 || clusters < 1 || clusters > n) {
    throw ConfigError("generate_clustered: need n >= clusters >= 1");
  }
  if (!(box > 0.0)) throw ConfigError("generate_clustered: box must be > 0");
  if (!(sigma > 0.0)) sigma = default_cluster_sigma(box, clusters);

  Rng rng(seed);
  std::vector<Point> centres(clusters);
  for (auto& c : centres) {
    c.x = rng.uniform(0.0, box);
    c.y = rng.uniform(0.0, box);
  }
  std::vector<Point> points(n);
  for (auto& p : points) {
    const Point& c = centres[rng.below(clusters)];
    p.x = c.x + sigma * rng.gaussian();
    p.y = c.y + sigma * rng.gaussian();
  }
  return Instance::from_points(std::move(points), MetricKind::EuclidReal,
                               "clustered-" + std::to_string(n) + "-" + std::to_string(seed));
}

}  // namespace dtsp
