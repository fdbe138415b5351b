#include "tdc/dynpool.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdc {

bool PoolPlan::identity() const {
    if (source_len != count()) return false;
    for (int n = 0; n < count(); ++n)
        if (windows[n].width() != 1) return false;
    return true;
}

PoolPlan make_plan(double initial_width, double growth, int source_len, bool final_infinite) {
    if (!(initial_width >= 1.0)) throw std::invalid_argument("make_plan: initial width must be >= 1");
    if (!(growth >= 1.0)) throw std::invalid_argument("make_plan: growth rate must be >= 1");
    if (source_len < 1) throw std::invalid_argument("make_plan: source length must be >= 1");

    PoolPlan plan;
    plan.initial_width = initial_width;
    plan.growth = growth;
    plan.source_len = source_len;
    plan.final_infinite = final_infinite;

    double raw_width = initial_width;
    int begin = 0;
    while (begin < source_len) {
        // round half-up, floor of 1 cell
        int width = std::max(1, static_cast<int>(std::floor(raw_width + 0.5)));
        int end = std::min(begin + width, source_len);
        plan.windows.push_back({begin, end});
        begin = end;
        raw_width *= growth;
    }
    return plan;
}

namespace {

// Effective [begin, end) of window n against an actual source length.
inline LagWindow clip_window(const PoolPlan& plan, int n, int actual_len) {
    const LagWindow& w = plan.windows[n];
    int end = (plan.final_infinite && n == plan.count() - 1) ? actual_len : std::min(w.end, actual_len);
    return {std::min(w.begin, actual_len), std::max(end, std::min(w.begin, actual_len))};
}

void check_source(const Mat& source, const PoolPlan& plan) {
    if (plan.windows.empty()) throw std::invalid_argument("pool: empty plan");
    int len = static_cast<int>(source.cols());
    if (!plan.final_infinite && len != plan.source_len)
        throw std::invalid_argument("pool: source length does not match plan");
    if (plan.final_infinite && len < 1)
        throw std::invalid_argument("pool: empty source");
}

}  // namespace

PooledMap max_pool(const Mat& source, const PoolPlan& plan, double sentinel) {
    check_source(source, plan);
    const std::size_t rows = source.rows();
    const int p = plan.count();
    const int len = static_cast<int>(source.cols());

    PooledMap out;
    out.mode = PoolMode::max;
    out.plan = plan;
    out.source_len = len;
    out.values = Mat(rows, p);
    out.argmax.assign(rows * p, 0);
    out.empty_window.assign(rows * p, 0);

    for (std::size_t i = 0; i < rows; ++i) {
        for (int n = 0; n < p; ++n) {
            LagWindow w = clip_window(plan, n, len);
            double best = 0.0;
            int best_pos = -1;
            for (int s = w.begin; s < w.end; ++s) {
                double v = source(i, s);
                if (v == sentinel) continue;
                if (best_pos < 0 || v > best) {
                    best = v;
                    best_pos = s;
                }
            }
            std::size_t cell = i * p + n;
            if (best_pos < 0) {
                out.values(i, n) = 0.0;
                out.argmax[cell] = plan.windows[n].begin;
                out.empty_window[cell] = 1;
            } else {
                out.values(i, n) = best;
                out.argmax[cell] = best_pos;
            }
        }
    }
    return out;
}

PooledMap mean_pool(const Mat& source, const PoolPlan& plan, double sentinel) {
    check_source(source, plan);
    const std::size_t rows = source.rows();
    const int p = plan.count();
    const int len = static_cast<int>(source.cols());

    PooledMap out;
    out.mode = PoolMode::mean;
    out.plan = plan;
    out.source_len = len;
    out.values = Mat(rows, p);
    out.argmax.assign(rows * p, 0);
    out.empty_window.assign(rows * p, 0);
    out.missing.assign(rows * static_cast<std::size_t>(len), 0);

    for (std::size_t i = 0; i < rows; ++i) {
        for (int s = 0; s < len; ++s)
            if (source(i, s) == sentinel) out.missing[i * len + s] = 1;
        for (int n = 0; n < p; ++n) {
            LagWindow w = clip_window(plan, n, len);
            double sum = 0.0;
            int count = 0;
            for (int s = w.begin; s < w.end; ++s) {
                if (out.missing[i * len + s]) continue;
                sum += source(i, s);
                ++count;
            }
            std::size_t cell = i * p + n;
            if (count == 0) {
                out.values(i, n) = 0.0;
                out.argmax[cell] = plan.windows[n].begin;
                out.empty_window[cell] = 1;
            } else {
                out.values(i, n) = sum / count;
            }
        }
    }
    return out;
}

Mat pool_backward(const Mat& grad_out, const PooledMap& pooled) {
    if (!grad_out.same_shape(pooled.values))
        throw std::invalid_argument("pool_backward: gradient shape mismatch");
    const std::size_t rows = grad_out.rows();
    const int p = pooled.windows();
    const int len = pooled.source_len;

    Mat grad_in(rows, len);
    for (std::size_t i = 0; i < rows; ++i) {
        for (int n = 0; n < p; ++n) {
            std::size_t cell = i * p + n;
            if (pooled.empty_window[cell]) continue;
            if (pooled.mode == PoolMode::max) {
                grad_in(i, pooled.argmax[cell]) += grad_out(i, n);
            } else {
                LagWindow w = clip_window(pooled.plan, n, len);
                int count = 0;
                for (int s = w.begin; s < w.end; ++s)
                    if (!pooled.missing[i * len + s]) ++count;
                double share = grad_out(i, n) / count;
                for (int s = w.begin; s < w.end; ++s)
                    if (!pooled.missing[i * len + s]) grad_in(i, s) += share;
            }
        }
    }
    return grad_in;
}

}  // namespace tdc
