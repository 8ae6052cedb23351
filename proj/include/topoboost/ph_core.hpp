#pragma once

// Vietoris-Rips persistent homology (H0 and H1) over GF(2).

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace topoboost::ph {

using Index = std::uint32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Finite 2-D point set. Point i carries index i.
class PointCloud {
 public:
  PointCloud() = default;
  /// Throws Error(InvalidArgument) on a non-finite coordinate.
  explicit PointCloud(std::vector<Point> points);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point> points() const noexcept { return points_; }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<Point> points_;
};

/// Dense symmetric matrix of pairwise distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  /// Row-major n*n entries; no validation beyond the size.
  DistanceMatrix(std::size_t n, std::vector<double> entries);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  std::span<const double> entries() const noexcept { return d_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

DistanceMatrix pairwise_distances(const PointCloud& cloud, unsigned workers = 1);

/// Largest entry, 0 for fewer than two points.
double diameter(const DistanceMatrix& dist);

/// Simplex of dimension 0, 1 or 2 with strictly increasing vertices.
class Simplex {
 public:
  Simplex() = default;
  explicit Simplex(Index v0);
  Simplex(Index v0, Index v1);
  Simplex(Index v0, Index v1, Index v2);

  int dim() const noexcept { return static_cast<int>(size_) - 1; }
  std::size_t size() const noexcept { return size_; }
  Index operator[](std::size_t i) const { return vertices_[i]; }
  std::span<const Index> vertices() const noexcept { return {vertices_.data(), size_}; }

  friend bool operator==(const Simplex& a, const Simplex& b) {
    return a.size_ == b.size_ && std::equal(a.vertices_.begin(), a.vertices_.begin() + a.size_,
                                            b.vertices_.begin());
  }

 private:
  std::array<Index, 3> vertices_{};
  std::uint8_t size_ = 0;
};

struct FiltrationEntry {
  Simplex simplex;
  double appearance = 0.0;
};

/// Strict filtration order: appearance, then dimension, then vertices.
bool filtration_less(const FiltrationEntry& a, const FiltrationEntry& b);

struct Filtration {
  std::vector<FiltrationEntry> simplices;
  double eps_max = 0.0;
  int max_dim = 2;
};

/// Rips filtration truncated at eps_max, containing simplices up to max_dim.
/// Throws NonFiniteDistance on NaN/inf entries, InvalidArgument on a bad
/// eps_max or max_dim.
Filtration build_rips_filtration(const DistanceMatrix& dist, double eps_max, int max_dim = 2);

struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;

  bool is_infinite() const noexcept { return death == kInfinity; }
  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

struct PersistenceDiagram {
  int dim = 0;
  std::vector<PersistencePair> pairs;
};

/// Persistence diagrams for dimensions 0 .. max_dim-1. Pairs with zero
/// persistence are dropped; essential classes keep an infinite death.
/// Throws InvalidFiltration when faces are missing or out of order.
std::vector<PersistenceDiagram> compute_persistence(const Filtration& filt);

/// death - birth with an infinite death replaced by eps_max.
double persistence_value(const PersistencePair& pair, double eps_max);

}  // namespace topoboost::ph
