#include "pgjr/cluster/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pgjr/error.hpp"
#include "pgjr/numerics/parallel.hpp"

namespace pgjr {

namespace {

void check_lengths(std::span<const int> pred, std::span<const int> truth, const char* what) {
  if (pred.size() != truth.size())
    throw UsageError(std::string(what) + ": length mismatch " + std::to_string(pred.size()) +
                     " vs " + std::to_string(truth.size()));
}

std::vector<std::size_t> dense_ids(std::span<const int> labels, std::size_t& count) {
  std::map<int, std::size_t> ids;
  for (int l : labels) ids.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, id] : ids) id = next++;
  count = next;
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids.at(labels[i]);
  return out;
}

double choose2(long long v) { return 0.5 * static_cast<double>(v) * static_cast<double>(v - 1); }

}  // namespace

std::vector<std::vector<long long>> contingency(std::span<const int> pred,
                                                std::span<const int> truth) {
  check_lengths(pred, truth, "contingency");
  std::size_t rows = 0, cols = 0;
  const auto p = dense_ids(pred, rows);
  const auto t = dense_ids(truth, cols);
  std::vector<std::vector<long long>> table(rows, std::vector<long long>(cols, 0));
  for (std::size_t i = 0; i < p.size(); ++i) ++table[p[i]][t[i]];
  return table;
}

std::vector<std::size_t> hungarian(const std::vector<std::vector<long long>>& cost) {
  // Shortest augmenting path with potentials, O(n^3). 1-based internally.
  const std::size_t n = cost.size();
  for (const auto& row : cost)
    if (row.size() != n) throw UsageError("hungarian: cost matrix must be square");
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      long long delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> result(n);
  for (std::size_t j = 1; j <= n; ++j) result[match[j] - 1] = j - 1;
  return result;
}

double acc(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth, "acc");
  if (pred.empty()) throw UsageError("acc: empty labelling");
  const auto table = contingency(pred, truth);
  const std::size_t size = std::max(table.size(), table.front().size());
  std::vector<std::vector<long long>> cost(size, std::vector<long long>(size, 0));
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < table[i].size(); ++j) cost[i][j] = -table[i][j];
  const auto match = hungarian(cost);
  long long hits = 0;
  for (std::size_t i = 0; i < size; ++i) hits -= cost[i][match[i]];
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth, "nmi");
  if (pred.empty()) throw UsageError("nmi: empty labelling");
  const auto table = contingency(pred, truth);
  const double n = static_cast<double>(pred.size());
  std::vector<double> row(table.size(), 0.0), col(table.front().size(), 0.0);
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < table[i].size(); ++j) {
      row[i] += static_cast<double>(table[i][j]);
      col[j] += static_cast<double>(table[i][j]);
    }
  auto entropy = [n](const std::vector<double>& counts) {
    double h = 0.0;
    for (double c : counts)
      if (c > 0.0) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double hp = entropy(row);
  const double ht = entropy(col);
  if (row.size() == 1 && col.size() == 1) return 1.0;
  if (row.size() == 1 || col.size() == 1) return 0.0;
  double mi = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < table[i].size(); ++j) {
      if (table[i][j] == 0) continue;
      const double nij = static_cast<double>(table[i][j]);
      mi += (nij / n) * std::log(n * nij / (row[i] * col[j]));
    }
  const double v = mi / std::sqrt(hp * ht);
  return std::clamp(v, 0.0, 1.0);
}

double ari(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth, "ari");
  if (pred.empty()) throw UsageError("ari: empty labelling");
  const auto table = contingency(pred, truth);
  std::vector<long long> row(table.size(), 0), col(table.front().size(), 0);
  double index = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < table[i].size(); ++j) {
      index += choose2(table[i][j]);
      row[i] += table[i][j];
      col[j] += table[i][j];
    }
  double sum_rows = 0.0, sum_cols = 0.0;
  for (long long r : row) sum_rows += choose2(r);
  for (long long c : col) sum_cols += choose2(c);
  const double total = choose2(static_cast<long long>(pred.size()));
  const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // A zero denominator only occurs when both partitions are all-in-one or
  // all-singletons, i.e. identical.
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double silhouette(const Matrix& x, std::span<const int> labels) {
  if (labels.size() != x.rows()) throw UsageError("silhouette: label count does not match rows");
  std::size_t k = 0;
  const auto ids = dense_ids(labels, k);
  if (k < 2) throw UsageError("silhouette: need at least 2 clusters");
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t id : ids) ++sizes[id];

  const std::size_t n = x.rows();
  std::vector<double> score(n, 0.0);
  parallel_for(n, n * x.cols(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> sums(k);
    for (std::size_t i = begin; i < end; ++i) {
      if (sizes[ids[i]] == 1) continue;
      std::fill(sums.begin(), sums.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        sums[ids[j]] += std::sqrt(squared_distance(x.row(i), x.row(j)));
      }
      const double a = sums[ids[i]] / static_cast<double>(sizes[ids[i]] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c)
        if (c != ids[i]) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
      const double denom = std::max(a, b);
      score[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
  });
  double total = 0.0;
  for (double s : score) total += s;
  return total / static_cast<double>(n);
}

}  // namespace pgjr
