#include "oracle/persistence_oracle.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace oracle {

using topoboost::ph::Filtration;
using topoboost::ph::PersistenceDiagram;
using topoboost::ph::PersistencePair;

namespace {

using Key = std::vector<topoboost::ph::Index>;
using Column = std::vector<bool>;

// Dense boundary matrix: column j holds the faces of simplex j (row = position).
std::vector<Column> boundary_matrix(const Filtration& filt) {
  const std::size_t n = filt.simplices.size();
  std::map<Key, std::size_t> position;
  for (std::size_t p = 0; p < n; ++p) {
    auto v = filt.simplices[p].simplex.vertices();
    position[Key(v.begin(), v.end())] = p;
  }
  std::vector<Column> cols(n, Column(n, false));
  for (std::size_t p = 0; p < n; ++p) {
    auto v = filt.simplices[p].simplex.vertices();
    if (v.size() < 2) continue;
    for (std::size_t skip = 0; skip < v.size(); ++skip) {
      Key face;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i != skip) face.push_back(v[i]);
      }
      cols[p][position.at(face)] = true;
    }
  }
  return cols;
}

long low(const Column& c) {
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i]) return static_cast<long>(i);
  }
  return -1;
}

std::size_t gf2_rank(std::vector<Column> rows) {
  std::size_t rank = 0;
  const std::size_t width = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < width && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][c]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && rows[r][c]) {
        for (std::size_t i = 0; i < width; ++i) rows[r][i] = rows[r][i] != rows[rank][i];
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace

std::vector<PersistenceDiagram> naive_persistence(const Filtration& filt) {
  std::vector<Column> cols = boundary_matrix(filt);
  const std::size_t n = cols.size();
  std::vector<long> lows(n, -1);
  for (std::size_t j = 0; j < n; ++j) {
    for (;;) {
      const long l = low(cols[j]);
      if (l < 0) break;
      long other = -1;
      for (std::size_t i = 0; i < j; ++i) {
        if (lows[i] == l) other = static_cast<long>(i);
      }
      if (other < 0) break;
      for (std::size_t r = 0; r < n; ++r) cols[j][r] = cols[j][r] != cols[static_cast<std::size_t>(other)][r];
    }
    lows[j] = low(cols[j]);
  }

  std::vector<PersistenceDiagram> out(static_cast<std::size_t>(filt.max_dim));
  for (int k = 0; k < filt.max_dim; ++k) out[static_cast<std::size_t>(k)].dim = k;
  std::vector<bool> killed(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (lows[j] >= 0) killed[static_cast<std::size_t>(lows[j])] = true;
  }
  auto add = [&](int dim, double b, double d) {
    if (dim < filt.max_dim && b != d) out[static_cast<std::size_t>(dim)].pairs.push_back({dim, b, d});
  };
  for (std::size_t j = 0; j < n; ++j) {
    const auto& e = filt.simplices[j];
    if (lows[j] >= 0) {
      const auto& born = filt.simplices[static_cast<std::size_t>(lows[j])];
      add(born.simplex.dim(), born.appearance, e.appearance);
    } else if (!killed[j]) {
      add(e.simplex.dim(), e.appearance, topoboost::ph::kInfinity);
    }
  }
  for (auto& d : out) {
    std::sort(d.pairs.begin(), d.pairs.end(), [](const PersistencePair& a, const PersistencePair& b) {
      return std::tie(a.birth, a.death) < std::tie(b.birth, b.death);
    });
  }
  return out;
}

std::size_t betti_number(const Filtration& filt, int k, double t) {
  std::vector<std::size_t> kept;
  for (std::size_t p = 0; p < filt.simplices.size(); ++p) {
    if (filt.simplices[p].appearance <= t) kept.push_back(p);
  }
  const std::vector<Column> cols = boundary_matrix(filt);
  // Rows of d_j restricted to the sub-complex: one row per (j)-simplex, one
  // column per (j-1)-simplex.
  auto restricted = [&](int j) {
    std::vector<Column> rows;
    for (std::size_t p : kept) {
      if (filt.simplices[p].simplex.dim() != j) continue;
      Column row;
      for (std::size_t q : kept) {
        if (filt.simplices[q].simplex.dim() == j - 1) row.push_back(cols[p][q]);
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  std::size_t n_k = 0;
  for (std::size_t p : kept) n_k += filt.simplices[p].simplex.dim() == k ? 1 : 0;
  const std::size_t rank_k = k == 0 ? 0 : gf2_rank(restricted(k));
  const std::size_t rank_k1 = gf2_rank(restricted(k + 1));
  return n_k - rank_k - rank_k1;
}

bool same_diagrams(const std::vector<PersistenceDiagram>& a, const std::vector<PersistenceDiagram>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    auto pa = a[k].pairs;
    auto pb = b[k].pairs;
    auto key = [](const PersistencePair& p) { return std::tie(p.dim, p.birth, p.death); };
    auto less = [&](const PersistencePair& x, const PersistencePair& y) { return key(x) < key(y); };
    std::sort(pa.begin(), pa.end(), less);
    std::sort(pb.begin(), pb.end(), less);
    if (pa != pb) return false;
  }
  return true;
}

}  // namespace oracle
