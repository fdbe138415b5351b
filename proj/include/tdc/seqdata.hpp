#ifndef TDC_SEQDATA_HPP
#define TDC_SEQDATA_HPP

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tdc/mat.hpp"

namespace tdc {

/// Missing cells are encoded as a large negative constant strictly below the
/// range of any (standardized) attribute, so max pooling skips them without
/// special-casing.
inline constexpr double kDefaultSentinel = -1.0e6;

/// One raw observation: attribute `attribute` took `value` at discrete time
/// step `timestamp`. Timestamps are pre-discretized integers; calendar
/// parsing is a front-end concern.
struct EventRecord {
    std::int64_t timestamp = 0;
    std::string attribute;
    double value = 0.0;
};

/// D x T lag-indexed history matrix: column s in [0, T) holds the observation
/// at time t - (s + 1), i.e. lag d = s + 1. Cells are either finite values or
/// exactly `sentinel`.
struct SequenceMatrix {
    Mat values;
    std::vector<std::string> attribute_names;
    double sentinel = kDefaultSentinel;

    std::size_t attrs() const { return values.rows(); }
    std::size_t len() const { return values.cols(); }
    bool is_missing(std::size_t i, std::size_t s) const { return values(i, s) == sentinel; }
};

enum class NormMode : std::uint8_t { standardize, minmax };

/// Per-attribute normalization fitted on training data only.
/// For standardize: stat1 = mean, stat2 = population sd.
/// For minmax: stat1 = min, stat2 = max.
/// Attributes whose scale collapses (sd = 0 or max = min) are flagged
/// degenerate and use scale 1.
struct AttributeStats {
    NormMode mode = NormMode::standardize;
    std::vector<std::string> attributes;
    std::vector<double> stat1;
    std::vector<double> stat2;
    std::vector<std::uint8_t> degenerate;

    std::size_t size() const { return stat1.size(); }
    double scale(std::size_t i) const;
};

/// A training/evaluation unit: the lagged history plus either the
/// autoregression target (the next observation vector) or a binary label.
struct LabeledSample {
    SequenceMatrix matrix;
    std::variant<std::vector<double>, int> target;
    std::int64_t prediction_point = -1;  // series step t for windowed samples

    const std::vector<double>& target_vector() const { return std::get<std::vector<double>>(target); }
    int label() const { return std::get<int>(target); }
};

/// Builds the D x T matrix for prediction point `t` from raw events.
/// Events outside [t - T, t - 1] are ignored; duplicate (timestamp, attribute)
/// pairs resolve last-write-wins in record order. Unknown attributes and
/// non-finite values are rejected.
SequenceMatrix ingest_events(std::span<const EventRecord> records,
                             const std::vector<std::string>& attribute_order,
                             std::int64_t t, int history_len,
                             double sentinel = kDefaultSentinel);

AttributeStats fit_stats(std::span<const SequenceMatrix> train, NormMode mode);

/// Transforms finite cells row-wise; sentinel cells pass through bit-exactly.
SequenceMatrix apply_stats(const SequenceMatrix& matrix, const AttributeStats& stats);

/// Inverse of apply_stats on finite cells.
SequenceMatrix invert_stats(const SequenceMatrix& matrix, const AttributeStats& stats);

struct SplitRange {
    int begin = 0;
    int end = 0;  // exclusive
    int size() const { return end - begin; }
};

/// Chronological split: train = [0, floor(fraction * n)), test = rest.
std::pair<SplitRange, SplitRange> chrono_split(int series_len, double fraction);

/// Slides a length-`history` window over a D x N series: one sample per
/// prediction point t in [history, N), with matrix column s = series column
/// t - (s + 1) and target = series column t. Steps whose target contains a
/// missing value are skipped.
std::vector<LabeledSample> window_samples(const Mat& series,
                                          const std::vector<std::string>& attribute_names,
                                          int history, double sentinel = kDefaultSentinel);

}  // namespace tdc

#endif
