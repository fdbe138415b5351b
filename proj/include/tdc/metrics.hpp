#ifndef TDC_METRICS_HPP
#define TDC_METRICS_HPP

#include <span>
#include <vector>

namespace tdc {

enum class MetricKind : std::uint8_t { rmse, auc };

/// Root mean squared error over paired entries.
double rmse(std::span<const double> predictions, std::span<const double> targets);

/// Area under the ROC curve via the rank statistic, with tied scores handled
/// by midranks. Labels must contain both classes.
double auc(std::span<const double> scores, std::span<const int> labels);

/// True when `candidate` improves on `incumbent` for the given metric
/// (lower RMSE, higher AUC).
bool metric_improves(MetricKind kind, double candidate, double incumbent);

}  // namespace tdc

#endif
