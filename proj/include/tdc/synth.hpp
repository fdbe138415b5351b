#ifndef TDC_SYNTH_HPP
#define TDC_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tdc/mat.hpp"
#include "tdc/seqdata.hpp"

namespace tdc {

/// Event-sequence classification task standing in for private clinical data:
/// class 1 carries a fixed multi-attribute motif (bursts on motif_attrs at
/// relative offsets motif_offsets) planted at a uniformly random base lag,
/// with each burst's position jittered by +-jitter steps; class 0 carries the
/// same bursts at independent random positions, so only the joint spacing
/// discriminates. Every event cell is then dropped with probability
/// missing_rate. Background events are sparse standard-normal noise.
struct PlantedConfig {
    int attrs = 5;
    int len = 60;
    int samples = 1000;
    int jitter = 3;
    double missing_rate = 0.5;
    double amplitude = 3.0;
    double background_rate = 0.1;
    int burst = 3;  // consecutive cells per motif event
    std::vector<int> motif_attrs{1, 2, 3};
    std::vector<int> motif_offsets{0, 8, 16};
    std::uint64_t seed = 1;
};

/// One generated classification dataset as raw events (labels alternate
/// 0, 1, 0, 1, ... so classes stay balanced).
struct EventDataset {
    std::vector<std::string> attributes;
    int len = 0;  // matrix width T
    std::vector<std::vector<EventRecord>> events;  // per sample
    std::vector<int> labels;

    std::size_t size() const { return events.size(); }
};

EventDataset make_planted(const PlantedConfig& cfg);

/// Materializes dataset samples through the standard ingestion path.
std::vector<LabeledSample> to_samples(const EventDataset& dataset,
                                      double sentinel = kDefaultSentinel);

/// Stationary VAR(lag) series for regression smoke tests and oracles:
/// x_t = sum_p A_p x_{t-p} + noise, coefficients scaled to the requested
/// spectral radius.
struct VarSynthConfig {
    int attrs = 2;
    int steps = 500;
    int lag = 1;
    double noise_sd = 0.05;
    double spectral_radius = 0.7;
    std::uint64_t seed = 1;
};

struct VarSynthResult {
    Mat series;               // D x N
    std::vector<Mat> coeffs;  // lag matrices A_p, each D x D
    std::vector<std::string> attributes;
};

VarSynthResult make_var_series(const VarSynthConfig& cfg);

}  // namespace tdc

#endif
