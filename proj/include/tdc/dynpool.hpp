#ifndef TDC_DYNPOOL_HPP
#define TDC_DYNPOOL_HPP

#include <cstdint>
#include <vector>

#include "tdc/mat.hpp"

namespace tdc {

/// Half-open interval of lag offsets covered by one pooling window.
struct LagWindow {
    int begin = 0;
    int end = 0;  // exclusive
    int width() const { return end - begin; }
};

enum class PoolMode : std::uint8_t { max, mean };

/// Partition of the lag axis into windows whose width grows geometrically
/// with distance from the prediction point: window n has width
/// max(1, round(l0 * growth^n)). Windows tile [0, source_len); when
/// final_infinite is set the last window additionally absorbs any history
/// beyond source_len at pooling time, so the pooled length stays fixed for
/// arbitrarily long inputs.
struct PoolPlan {
    double initial_width = 1.0;  // l0
    double growth = 1.0;         // l
    int source_len = 0;
    bool final_infinite = false;
    std::vector<LagWindow> windows;

    int count() const { return static_cast<int>(windows.size()); }
    bool identity() const;
};

/// Pooled output plus the provenance needed for the backward pass.
struct PooledMap {
    Mat values;                               // D x P
    PoolMode mode = PoolMode::max;
    std::vector<int> argmax;                  // D x P source lag offsets (max mode)
    std::vector<std::uint8_t> empty_window;   // D x P, 1 = window had no finite entry
    std::vector<std::uint8_t> missing;        // D x L source missing mask (mean mode only)
    PoolPlan plan;
    int source_len = 0;  // actual length pooled, may exceed plan.source_len

    int windows() const { return static_cast<int>(values.cols()); }
};

PoolPlan make_plan(double initial_width, double growth, int source_len, bool final_infinite);

/// Max over the non-missing entries of each window ("missing" = cell equal to
/// sentinel). A window with no finite entry yields 0 and is flagged; ties
/// resolve to the smallest lag. Pass a NaN sentinel to disable missing
/// handling entirely.
PooledMap max_pool(const Mat& source, const PoolPlan& plan, double sentinel);

/// Mean over the non-missing entries of each window; all-missing windows
/// yield 0.
PooledMap mean_pool(const Mat& source, const PoolPlan& plan, double sentinel);

/// Routes gradients back through a pooling: max mode passes each window's
/// gradient to its argmax cell only; mean mode spreads it uniformly over the
/// window's non-missing cells. Flagged all-missing windows route nothing.
Mat pool_backward(const Mat& grad_out, const PooledMap& pooled);

}  // namespace tdc

#endif
