#include "tdc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tdc/errors.hpp"

namespace tdc {

double rmse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size())
        throw std::invalid_argument("rmse: size mismatch");
    if (predictions.empty()) throw std::invalid_argument("rmse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        double d = predictions[i] - targets[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(predictions.size()));
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("auc: size mismatch");
    const std::size_t n = scores.size();
    std::size_t positives = 0;
    for (int y : labels) positives += (y != 0);
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0)
        throw DataError("auc: need both classes present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // midranks within tie groups; ranks are 1-based
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]] != 0) positive_rank_sum += midrank;
        i = j + 1;
    }
    double u = positive_rank_sum -
               static_cast<double>(positives) * (static_cast<double>(positives) + 1.0) / 2.0;
    return u / (static_cast<double>(positives) * static_cast<double>(negatives));
}

bool metric_improves(MetricKind kind, double candidate, double incumbent) {
    return kind == MetricKind::rmse ? candidate < incumbent : candidate > incumbent;
}

}  // namespace tdc
