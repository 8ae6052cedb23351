#include "oracle/bottleneck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using topoboost::ph::PersistenceDiagram;
using topoboost::ph::PersistencePair;

namespace {

bool has_perfect_matching(const std::vector<std::vector<double>>& cost, double limit) {
  const std::size_t n = cost.size();
  std::vector<long> match_right(n, -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t u, std::vector<bool>& seen) {
    for (std::size_t v = 0; v < n; ++v) {
      if (cost[u][v] > limit || seen[v]) continue;
      seen[v] = true;
      if (match_right[v] < 0 || augment(static_cast<std::size_t>(match_right[v]), seen)) {
        match_right[v] = static_cast<long>(u);
        return true;
      }
    }
    return false;
  };
  for (std::size_t u = 0; u < n; ++u) {
    std::vector<bool> seen(n, false);
    if (!augment(u, seen)) return false;
  }
  return true;
}

}  // namespace

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  std::vector<PersistencePair> fa, fb;
  std::vector<double> ia, ib;
  for (const auto& p : a.pairs) (p.is_infinite() ? ia.push_back(p.birth) : fa.push_back(p));
  for (const auto& p : b.pairs) (p.is_infinite() ? ib.push_back(p.birth) : fb.push_back(p));
  if (ia.size() != ib.size()) return topoboost::ph::kInfinity;

  double essential = 0.0;
  std::sort(ia.begin(), ia.end());
  std::sort(ib.begin(), ib.end());
  for (std::size_t i = 0; i < ia.size(); ++i) essential = std::max(essential, std::abs(ia[i] - ib[i]));

  // Rows: fa then one diagonal slot per fb point; columns: fb then one
  // diagonal slot per fa point.
  const std::size_t m = fa.size(), n = fb.size(), size = m + n;
  auto to_diag = [](const PersistencePair& p) { return (p.death - p.birth) / 2.0; };
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      if (i < m && j < n) {
        cost[i][j] = std::max(std::abs(fa[i].birth - fb[j].birth), std::abs(fa[i].death - fb[j].death));
      } else if (i < m) {
        cost[i][j] = to_diag(fa[i]);
      } else if (j < n) {
        cost[i][j] = to_diag(fb[j]);
      } else {
        cost[i][j] = 0.0;
      }
    }
  }
  std::vector<double> candidates{0.0};
  for (const auto& row : cost) candidates.insert(candidates.end(), row.begin(), row.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (has_perfect_matching(cost, candidates[mid])) hi = mid;
    else lo = mid + 1;
  }
  return std::max(essential, candidates[lo]);
}

}  // namespace oracle
