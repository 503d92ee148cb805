// Brute-force reference implementations used to cross-check the library.
// These operate on plain vectors and deliberately avoid every production
// code path (no RankedList, no LabelSet, no shared helpers).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

// Binary-gender labels as chars: 'M', 'F', 'N'.

inline double weight(std::size_t position) {
  return std::log(2.0) / std::log(1.0 + static_cast<double>(position));
}

inline double exposure(const std::vector<char>& labels, char group, int k) {
  const std::size_t n = std::min(labels.size(), static_cast<std::size_t>(k));
  double mass = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += weight(i + 1);
    if (labels[i] == group) mass += weight(i + 1);
  }
  return mass / total;
}

inline double delta_exposure(const std::vector<char>& labels, int k) {
  return std::fabs(exposure(labels, 'M', k) - exposure(labels, 'F', k));
}

inline double cwex(const std::vector<char>& labels, double alpha, int k) {
  return alpha * exposure(labels, 'N', k) - (1.0 - alpha) * delta_exposure(labels, k);
}

inline double fairr(const std::vector<double>& taus, int k) {
  const std::size_t n = std::min(taus.size(), static_cast<std::size_t>(k));
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += taus[i] * weight(i + 1);
  return sum;
}

inline double nfairr(const std::vector<double>& ranked_taus, std::vector<double> pool_taus,
                     int k) {
  std::sort(pool_taus.begin(), pool_taus.end(), std::greater<double>());
  const std::size_t n = std::min(pool_taus.size(), static_cast<std::size_t>(k));
  double ideal = 0.0;
  for (std::size_t i = 0; i < n; ++i) ideal += pool_taus[i] * weight(i + 1);
  if (ideal == 0.0) return 1.0;
  return fairr(ranked_taus, k) / ideal;
}

// Utility metrics over grades listed in rank order.

inline double reciprocal_rank(const std::vector<int>& ranked_grades, int k) {
  const std::size_t n = std::min(ranked_grades.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    if (ranked_grades[i] > 0) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

inline double ndcg(const std::vector<int>& ranked_grades, std::vector<int> all_relevant_grades,
                   int k) {
  const std::size_t n = std::min(ranked_grades.size(), static_cast<std::size_t>(k));
  double dcg = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    dcg += ranked_grades[i] * (std::log(2.0) / std::log(static_cast<double>(i) + 2.0));
  std::sort(all_relevant_grades.begin(), all_relevant_grades.end(), std::greater<int>());
  const std::size_t m = std::min(all_relevant_grades.size(), static_cast<std::size_t>(k));
  double idcg = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    idcg += all_relevant_grades[i] * (std::log(2.0) / std::log(static_cast<double>(i) + 2.0));
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

}  // namespace oracle
