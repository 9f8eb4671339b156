#ifndef HYBOWAVE_METRICS_HPP
#define HYBOWAVE_METRICS_HPP

#include <span>

namespace hwn {

/// Mann-Whitney AUC: (#(pos > neg) + 0.5 #(pos == neg)) / (|pos| |neg|).
double compute_auc(std::span<const double> pos_scores, std::span<const double> neg_scores);

/// Average precision: sum_k (R_k - R_{k-1}) P_k over descending distinct score
/// thresholds, tied scores forming one threshold.
double compute_aupr(std::span<const double> pos_scores, std::span<const double> neg_scores);

}  // namespace hwn

#endif  // HYBOWAVE_METRICS_HPP
