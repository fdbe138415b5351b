#include "tdc/seqdata.hpp"

#include <cmath>
#include <unordered_map>

#include "tdc/errors.hpp"

namespace tdc {

double AttributeStats::scale(std::size_t i) const {
    if (degenerate[i]) return 1.0;
    return mode == NormMode::standardize ? stat2[i] : stat2[i] - stat1[i];
}

SequenceMatrix ingest_events(std::span<const EventRecord> records,
                             const std::vector<std::string>& attribute_order,
                             std::int64_t t, int history_len, double sentinel) {
    if (t <= 0) throw std::invalid_argument("ingest_events: prediction point must be > 0");
    if (history_len < 1) throw std::invalid_argument("ingest_events: history length must be >= 1");

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < attribute_order.size(); ++i) index[attribute_order[i]] = i;

    SequenceMatrix out;
    out.attribute_names = attribute_order;
    out.sentinel = sentinel;
    out.values = Mat(attribute_order.size(), static_cast<std::size_t>(history_len), sentinel);

    for (const EventRecord& rec : records) {
        auto it = index.find(rec.attribute);
        if (it == index.end())
            throw DataError("ingest_events: unknown attribute '" + rec.attribute + "'");
        if (!std::isfinite(rec.value))
            throw DataError("ingest_events: non-finite value for attribute '" + rec.attribute + "'");
        std::int64_t lag = t - rec.timestamp;  // d >= 1 for events strictly before t
        if (lag < 1 || lag > history_len) continue;
        out.values(it->second, static_cast<std::size_t>(lag - 1)) = rec.value;
    }
    return out;
}

AttributeStats fit_stats(std::span<const SequenceMatrix> train, NormMode mode) {
    if (train.empty()) throw DataError("fit_stats: no training matrices");
    const std::size_t attrs = train.front().attrs();
    for (const SequenceMatrix& m : train)
        if (m.attrs() != attrs) throw std::invalid_argument("fit_stats: attribute count mismatch");

    AttributeStats stats;
    stats.mode = mode;
    stats.attributes = train.front().attribute_names;
    stats.stat1.assign(attrs, 0.0);
    stats.stat2.assign(attrs, 0.0);
    stats.degenerate.assign(attrs, 0);

    for (std::size_t i = 0; i < attrs; ++i) {
        double sum = 0.0, min = 0.0, max = 0.0;
        std::size_t count = 0;
        for (const SequenceMatrix& m : train) {
            for (std::size_t s = 0; s < m.len(); ++s) {
                if (m.is_missing(i, s)) continue;
                double v = m.values(i, s);
                if (count == 0) {
                    min = max = v;
                } else {
                    min = std::min(min, v);
                    max = std::max(max, v);
                }
                sum += v;
                ++count;
            }
        }
        if (count == 0)
            throw DataError("fit_stats: attribute '" + stats.attributes[i] + "' has no observed values");
        if (mode == NormMode::standardize) {
            double mean = sum / static_cast<double>(count);
            double sq = 0.0;
            for (const SequenceMatrix& m : train)
                for (std::size_t s = 0; s < m.len(); ++s)
                    if (!m.is_missing(i, s)) {
                        double d = m.values(i, s) - mean;
                        sq += d * d;
                    }
            double sd = std::sqrt(sq / static_cast<double>(count));  // population convention
            stats.stat1[i] = mean;
            stats.stat2[i] = sd;
            if (sd == 0.0) stats.degenerate[i] = 1;
        } else {
            stats.stat1[i] = min;
            stats.stat2[i] = max;
            if (max == min) stats.degenerate[i] = 1;
        }
    }
    return stats;
}

SequenceMatrix apply_stats(const SequenceMatrix& matrix, const AttributeStats& stats) {
    if (matrix.attrs() != stats.size())
        throw std::invalid_argument("apply_stats: attribute count mismatch");
    SequenceMatrix out = matrix;
    for (std::size_t i = 0; i < matrix.attrs(); ++i) {
        double center = stats.stat1[i];
        double scale = stats.scale(i);
        for (std::size_t s = 0; s < matrix.len(); ++s) {
            if (matrix.is_missing(i, s)) continue;
            out.values(i, s) = (matrix.values(i, s) - center) / scale;
        }
    }
    return out;
}

SequenceMatrix invert_stats(const SequenceMatrix& matrix, const AttributeStats& stats) {
    if (matrix.attrs() != stats.size())
        throw std::invalid_argument("invert_stats: attribute count mismatch");
    SequenceMatrix out = matrix;
    for (std::size_t i = 0; i < matrix.attrs(); ++i) {
        double center = stats.stat1[i];
        double scale = stats.scale(i);
        for (std::size_t s = 0; s < matrix.len(); ++s) {
            if (matrix.is_missing(i, s)) continue;
            out.values(i, s) = matrix.values(i, s) * scale + center;
        }
    }
    return out;
}

std::pair<SplitRange, SplitRange> chrono_split(int series_len, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("chrono_split: fraction must lie in (0, 1)");
    int cut = static_cast<int>(std::floor(fraction * series_len));
    if (cut < 1 || cut >= series_len)
        throw DataError("chrono_split: series too short for the requested split");
    return {SplitRange{0, cut}, SplitRange{cut, series_len}};
}

std::vector<LabeledSample> window_samples(const Mat& series,
                                          const std::vector<std::string>& attribute_names,
                                          int history, double sentinel) {
    const int n = static_cast<int>(series.cols());
    const std::size_t attrs = series.rows();
    if (history < 1) throw std::invalid_argument("window_samples: history must be >= 1");
    if (n <= history) throw DataError("window_samples: series shorter than one window");

    std::vector<LabeledSample> samples;
    samples.reserve(static_cast<std::size_t>(n - history));
    for (int t = history; t < n; ++t) {
        bool target_ok = true;
        std::vector<double> target(attrs);
        for (std::size_t i = 0; i < attrs; ++i) {
            target[i] = series(i, t);
            if (target[i] == sentinel) target_ok = false;
        }
        if (!target_ok) continue;

        LabeledSample sample;
        sample.matrix.attribute_names = attribute_names;
        sample.matrix.sentinel = sentinel;
        sample.matrix.values = Mat(attrs, static_cast<std::size_t>(history));
        for (std::size_t i = 0; i < attrs; ++i)
            for (int d = 1; d <= history; ++d)
                sample.matrix.values(i, d - 1) = series(i, t - d);
        sample.target = std::move(target);
        sample.prediction_point = t;
        samples.push_back(std::move(sample));
    }
    return samples;
}

}  // namespace tdc
