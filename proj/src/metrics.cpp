#include "hybowave/metrics.hpp"

#include "hybowave/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace hwn {

namespace {

void require_nonempty(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) throw ContractViolation("metrics need nonempty positive and negative score lists");
}

}  // namespace

double compute_auc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  require_nonempty(pos_scores, neg_scores);
  std::vector<double> neg(neg_scores.begin(), neg_scores.end());
  std::sort(neg.begin(), neg.end());
  std::uint64_t wins = 0;
  std::uint64_t ties = 0;
  for (double p : pos_scores) {
    const auto [lo, hi] = std::equal_range(neg.begin(), neg.end(), p);
    wins += static_cast<std::uint64_t>(lo - neg.begin());
    ties += static_cast<std::uint64_t>(hi - lo);
  }
  const double pairs = static_cast<double>(pos_scores.size()) * static_cast<double>(neg_scores.size());
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) / pairs;
}

double compute_aupr(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  require_nonempty(pos_scores, neg_scores);
  std::vector<std::pair<double, bool>> ranked;
  ranked.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) ranked.emplace_back(s, true);
  for (double s : neg_scores) ranked.emplace_back(s, false);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  const double total_pos = static_cast<double>(pos_scores.size());
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  double prev_recall = 0.0;
  double ap = 0.0;
  for (std::size_t i = 0; i < ranked.size();) {
    const double threshold = ranked[i].first;
    for (; i < ranked.size() && ranked[i].first == threshold; ++i) {
      if (ranked[i].second) {
        ++tp;
      } else {
        ++fp;
      }
    }
    const double recall = static_cast<double>(tp) / total_pos;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

}  // namespace hwn
