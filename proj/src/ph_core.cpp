#include "topoboost/ph_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "topoboost/error.hpp"
#include "topoboost/parallel.hpp"

namespace topoboost::ph {

PointCloud::PointCloud(std::vector<Point> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
      throw Error(ErrorCode::InvalidArgument,
                  "point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), d_(std::move(entries)) {
  if (d_.size() != n * n) {
    throw Error(ErrorCode::InvalidArgument, "distance matrix needs n*n entries");
  }
}

DistanceMatrix pairwise_distances(const PointCloud& cloud, unsigned workers) {
  const std::size_t n = cloud.size();
  std::vector<double> d(n * n, 0.0);
  parallel_for(n, workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // Same expression for (i,j) and (j,i) keeps the matrix exactly symmetric.
      const Point& a = cloud[std::min(i, j)];
      const Point& b = cloud[std::max(i, j)];
      const double dx = a.x - b.x;
      const double dy = a.y - b.y;
      d[i * n + j] = std::sqrt(dx * dx + dy * dy);
    }
  });
  return DistanceMatrix(n, std::move(d));
}

double diameter(const DistanceMatrix& dist) {
  double best = 0.0;
  for (double v : dist.entries()) best = std::max(best, v);
  return best;
}

Simplex::Simplex(Index v0) : vertices_{v0, 0, 0}, size_(1) {}

Simplex::Simplex(Index v0, Index v1) : vertices_{v0, v1, 0}, size_(2) {
  if (!(v0 < v1)) throw Error(ErrorCode::InvalidArgument, "simplex vertices must increase");
}

Simplex::Simplex(Index v0, Index v1, Index v2) : vertices_{v0, v1, v2}, size_(3) {
  if (!(v0 < v1 && v1 < v2)) {
    throw Error(ErrorCode::InvalidArgument, "simplex vertices must increase");
  }
}

bool filtration_less(const FiltrationEntry& a, const FiltrationEntry& b) {
  if (a.appearance != b.appearance) return a.appearance < b.appearance;
  if (a.simplex.dim() != b.simplex.dim()) return a.simplex.dim() < b.simplex.dim();
  auto va = a.simplex.vertices();
  auto vb = b.simplex.vertices();
  return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
}

Filtration build_rips_filtration(const DistanceMatrix& dist, double eps_max, int max_dim) {
  if (!(eps_max >= 0.0) || std::isnan(eps_max)) {
    throw Error(ErrorCode::InvalidArgument, "eps_max must be >= 0");
  }
  if (max_dim != 1 && max_dim != 2) {
    throw Error(ErrorCode::InvalidArgument, "max_dim must be 1 or 2");
  }
  for (double v : dist.entries()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteDistance, "distance matrix has NaN/inf");
  }

  const auto n = static_cast<Index>(dist.size());
  // Every appearance is 0 or an edge length, so simplices are bucketed by the
  // rank of their value among the distinct lengths. Generation order is
  // already (dimension, lexicographic), and a stable counting sort by rank
  // keeps it within equal appearances.
  std::vector<double> levels{0.0};
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (dist(i, j) <= eps_max) levels.push_back(dist(i, j));
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  constexpr std::uint32_t kOut = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> rank(std::size_t{n} * n, kOut);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (dist(i, j) > eps_max) continue;
      const auto r = static_cast<std::uint32_t>(std::lower_bound(levels.begin(), levels.end(), dist(i, j)) - levels.begin());
      rank[std::size_t{i} * n + j] = r;
    }
  }

  struct Ranked {
    std::uint32_t rank;
    Simplex simplex;
  };
  std::vector<Ranked> generated;
  const std::size_t m = n;
  generated.reserve(m + m * (m - 1) / 2 + (max_dim == 2 && m > 2 ? m * (m - 1) * (m - 2) / 6 : 0));
  for (Index i = 0; i < n; ++i) generated.push_back({0, Simplex(i)});
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const std::uint32_t r = rank[std::size_t{i} * n + j];
      if (r != kOut) generated.push_back({r, Simplex(i, j)});
    }
  }
  if (max_dim == 2) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const std::uint32_t rij = rank[std::size_t{i} * n + j];
        if (rij == kOut) continue;
        for (Index k = j + 1; k < n; ++k) {
          const std::uint32_t rik = rank[std::size_t{i} * n + k], rjk = rank[std::size_t{j} * n + k];
          if (rik == kOut || rjk == kOut) continue;
          generated.push_back({std::max({rij, rik, rjk}), Simplex(i, j, k)});
        }
      }
    }
  }

  std::vector<std::size_t> offset(levels.size() + 1, 0);
  for (const Ranked& g : generated) ++offset[g.rank + 1];
  for (std::size_t r = 0; r < levels.size(); ++r) offset[r + 1] += offset[r];

  Filtration filt;
  filt.eps_max = eps_max;
  filt.max_dim = max_dim;
  filt.simplices.resize(generated.size());
  for (const Ranked& g : generated) filt.simplices[offset[g.rank]++] = {g.simplex, levels[g.rank]};
  return filt;
}

namespace {

constexpr std::uint32_t kAbsent = std::numeric_limits<std::uint32_t>::max();

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidFiltration, what);
}

// Positions and ordinals of the filtration's simplices, checked against the
// filtration invariants while they are collected.
struct FiltrationIndex {
  std::size_t n = 0;
  std::vector<double> vertex_birth;        // by vertex id
  std::vector<std::uint32_t> vertex_rank;  // filtration position, by vertex id
  std::vector<std::uint32_t> edges;        // filtration positions of edges, in order
  std::vector<std::uint32_t> triangles;    // filtration positions of triangles, in order
  std::vector<std::uint32_t> edge_ordinal; // n*n lookup, kAbsent when missing

  std::uint32_t edge(Index a, Index b) const { return edge_ordinal[a * n + b]; }
};

FiltrationIndex index_filtration(const Filtration& filt) {
  if (filt.max_dim != 1 && filt.max_dim != 2) invalid("max_dim must be 1 or 2");
  const auto& s = filt.simplices;
  FiltrationIndex idx;

  std::size_t vertex_count = 0;
  Index max_vertex = 0;
  for (std::size_t p = 0; p < s.size(); ++p) {
    const double a = s[p].appearance;
    if (!std::isfinite(a) || a < 0.0) invalid("appearance must be finite and >= 0");
    if (a > filt.eps_max) invalid("appearance exceeds eps_max");
    if (s[p].simplex.size() == 0) invalid("empty simplex");
    if (s[p].simplex.dim() > filt.max_dim) invalid("simplex dimension exceeds max_dim");
    if (p > 0 && !filtration_less(s[p - 1], s[p])) {
      invalid("simplices out of filtration order at position " + std::to_string(p));
    }
    if (s[p].simplex.dim() == 0) {
      ++vertex_count;
      max_vertex = std::max(max_vertex, s[p].simplex[0]);
    }
  }
  if (vertex_count > 0 && max_vertex + 1 != vertex_count) invalid("vertex ids are not contiguous");

  idx.n = vertex_count;
  idx.vertex_birth.assign(vertex_count, 0.0);
  idx.vertex_rank.assign(vertex_count, kAbsent);
  idx.edge_ordinal.assign(vertex_count * vertex_count, kAbsent);
  std::vector<std::uint64_t> triangle_keys;

  for (std::size_t p = 0; p < s.size(); ++p) {
    const Simplex& sx = s[p].simplex;
    const double a = s[p].appearance;
    auto check_vertex = [&](Index v) {
      if (v >= vertex_count || idx.vertex_rank[v] == kAbsent) invalid("missing vertex face");
      if (idx.vertex_birth[v] > a) invalid("vertex appears after its cofacet");
    };
    switch (sx.dim()) {
      case 0:
        if (idx.vertex_rank[sx[0]] != kAbsent) invalid("duplicate vertex");
        idx.vertex_rank[sx[0]] = static_cast<std::uint32_t>(p);
        idx.vertex_birth[sx[0]] = a;
        break;
      case 1: {
        check_vertex(sx[0]);
        check_vertex(sx[1]);
        if (idx.edge(sx[0], sx[1]) != kAbsent) invalid("duplicate edge");
        idx.edge_ordinal[sx[0] * vertex_count + sx[1]] = static_cast<std::uint32_t>(idx.edges.size());
        idx.edges.push_back(static_cast<std::uint32_t>(p));
        break;
      }
      case 2: {
        const std::array<std::uint32_t, 3> faces = {idx.edge(sx[0], sx[1]), idx.edge(sx[0], sx[2]),
                                                    idx.edge(sx[1], sx[2])};
        for (std::uint32_t e : faces) {
          if (e == kAbsent) invalid("missing edge face");
          if (s[idx.edges[e]].appearance > a) invalid("edge appears after its cofacet");
        }
        const std::uint64_t key = (std::uint64_t{sx[0]} * vertex_count + sx[1]) * vertex_count + sx[2];
        triangle_keys.push_back(key);
        idx.triangles.push_back(static_cast<std::uint32_t>(p));
        break;
      }
      default:
        invalid("unsupported simplex dimension");
    }
  }
  if (vertex_count <= 256) {
    std::vector<bool> seen(vertex_count * vertex_count * vertex_count, false);
    for (std::uint64_t key : triangle_keys) {
      if (seen[key]) invalid("duplicate triangle");
      seen[key] = true;
    }
  } else {
    std::sort(triangle_keys.begin(), triangle_keys.end());
    if (std::adjacent_find(triangle_keys.begin(), triangle_keys.end()) != triangle_keys.end()) {
      invalid("duplicate triangle");
    }
  }
  return idx;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void attach(std::size_t child_root, std::size_t parent_root) { parent_[child_root] = parent_root; }

 private:
  std::vector<std::size_t> parent_;
};

void symmetric_difference_into(std::vector<std::uint32_t>& column,
                               const std::vector<std::uint32_t>& other,
                               std::vector<std::uint32_t>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(column.begin(), column.end(), other.begin(), other.end(),
                                std::back_inserter(scratch));
  column.swap(scratch);
}

}  // namespace

std::vector<PersistenceDiagram> compute_persistence(const Filtration& filt) {
  const FiltrationIndex idx = index_filtration(filt);
  const auto& s = filt.simplices;

  std::vector<PersistenceDiagram> diagrams(static_cast<std::size_t>(filt.max_dim));
  for (int k = 0; k < filt.max_dim; ++k) diagrams[k].dim = k;

  auto emit = [&](int dim, double birth, double death) {
    if (birth == death) return;
    diagrams[dim].pairs.push_back({dim, birth, death});
  };

  // H0: a merging edge kills the younger of the two components (elder rule);
  // the oldest vertex of each component is its root.
  std::vector<bool> negative_edge(idx.edges.size(), false);
  UnionFind components(idx.n);
  for (std::size_t e = 0; e < idx.edges.size(); ++e) {
    const Simplex& sx = s[idx.edges[e]].simplex;
    std::size_t ra = components.find(sx[0]);
    std::size_t rb = components.find(sx[1]);
    if (ra == rb) continue;
    if (idx.vertex_rank[ra] > idx.vertex_rank[rb]) std::swap(ra, rb);
    components.attach(rb, ra);
    negative_edge[e] = true;
    emit(0, idx.vertex_birth[rb], s[idx.edges[e]].appearance);
  }
  for (std::size_t v = 0; v < idx.n; ++v) {
    if (components.find(v) == v) emit(0, idx.vertex_birth[v], kInfinity);
  }

  if (filt.max_dim == 2) {
    // Coboundary columns of the edges, entries are triangle ordinals (ascending
    // ordinal == filtration order).
    // Coboundary columns of the edges in one flat buffer; entries are triangle
    // ordinals, so ascending ordinal is filtration order.
    std::vector<std::uint32_t> start(idx.edges.size() + 1, 0);
    auto faces = [&](std::size_t t) {
      const Simplex& sx = s[idx.triangles[t]].simplex;
      return std::array<std::uint32_t, 3>{idx.edge(sx[0], sx[1]), idx.edge(sx[0], sx[2]), idx.edge(sx[1], sx[2])};
    };
    for (std::size_t t = 0; t < idx.triangles.size(); ++t) {
      for (std::uint32_t e : faces(t)) ++start[e + 1];
    }
    for (std::size_t e = 0; e < idx.edges.size(); ++e) start[e + 1] += start[e];
    std::vector<std::uint32_t> entries(start.back());
    std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
    for (std::size_t t = 0; t < idx.triangles.size(); ++t) {
      for (std::uint32_t e : faces(t)) entries[fill[e]++] = static_cast<std::uint32_t>(t);
    }

    // Cohomology reduction in reverse filtration order. The pivot of a column
    // is its earliest triangle; edges that already killed an H0 class are
    // cleared. Pairs coincide with those of homology column reduction.
    std::vector<std::uint32_t> pivot_owner(idx.triangles.size(), kAbsent);
    std::vector<std::vector<std::uint32_t>> reduced;
    std::vector<std::uint32_t> column;
    std::vector<std::uint32_t> scratch;
    for (std::size_t e = idx.edges.size(); e-- > 0;) {
      if (negative_edge[e]) continue;
      column.assign(entries.begin() + start[e], entries.begin() + start[e + 1]);
      while (!column.empty() && pivot_owner[column.front()] != kAbsent) {
        symmetric_difference_into(column, reduced[pivot_owner[column.front()]], scratch);
      }
      const double birth = s[idx.edges[e]].appearance;
      if (column.empty()) {
        emit(1, birth, kInfinity);
      } else {
        pivot_owner[column.front()] = static_cast<std::uint32_t>(reduced.size());
        emit(1, birth, s[idx.triangles[column.front()]].appearance);
        reduced.push_back(std::move(column));
        column = {};
      }
    }
  }

  for (auto& d : diagrams) {
    std::sort(d.pairs.begin(), d.pairs.end(), [](const PersistencePair& a, const PersistencePair& b) {
      return std::tie(a.birth, a.death) < std::tie(b.birth, b.death);
    });
  }
  return diagrams;
}

double persistence_value(const PersistencePair& pair, double eps_max) {
  const double death = pair.is_infinite() ? eps_max : pair.death;
  return death - pair.birth;
}

}  // namespace topoboost::ph
