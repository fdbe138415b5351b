#include "tdc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tdc/rng.hpp"

namespace tdc {

EventDataset make_planted(const PlantedConfig& cfg) {
    if (cfg.missing_rate >= 1.0 || cfg.missing_rate < 0.0)
        throw std::invalid_argument("planted: missing rate must lie in [0, 1)");
    if (cfg.attrs < 1 || cfg.len < 1 || cfg.samples < 1 || cfg.burst < 1)
        throw std::invalid_argument("planted: degenerate dimensions");
    if (cfg.motif_attrs.size() != cfg.motif_offsets.size())
        throw std::invalid_argument("planted: motif attrs and offsets disagree");
    for (int a : cfg.motif_attrs)
        if (a < 0 || a >= cfg.attrs) throw std::invalid_argument("planted: motif attribute out of range");

    int max_offset = 0;
    for (int off : cfg.motif_offsets) max_offset = std::max(max_offset, off);
    const int span = max_offset + cfg.burst + 2 * cfg.jitter;
    if (span >= cfg.len) throw std::invalid_argument("planted: motif span exceeds sequence length");

    Rng rng(cfg.seed);
    EventDataset dataset;
    dataset.len = cfg.len;
    for (int i = 0; i < cfg.attrs; ++i) dataset.attributes.push_back("attr" + std::to_string(i));

    for (int s = 0; s < cfg.samples; ++s) {
        const int label = s % 2;
        std::vector<EventRecord> events;

        for (int i = 0; i < cfg.attrs; ++i)
            for (int t = 0; t < cfg.len; ++t)
                if (rng.bernoulli(cfg.background_rate))
                    events.push_back({t, dataset.attributes[i], rng.normal()});

        const int base = cfg.jitter + rng.uniform_int(0, cfg.len - 1 - span);
        for (std::size_t m = 0; m < cfg.motif_attrs.size(); ++m) {
            int start;
            if (label == 1) {
                start = base + cfg.motif_offsets[m] + rng.uniform_int(-cfg.jitter, cfg.jitter);
            } else {
                start = rng.uniform_int(0, cfg.len - cfg.burst);
            }
            for (int b = 0; b < cfg.burst; ++b) {
                int t = start + b;
                if (t < 0 || t >= cfg.len) continue;
                double value = cfg.amplitude * (1.0 + 0.1 * rng.normal());
                events.push_back({t, dataset.attributes[cfg.motif_attrs[m]], value});
            }
        }

        std::vector<EventRecord> kept;
        kept.reserve(events.size());
        for (EventRecord& rec : events)
            if (!rng.bernoulli(cfg.missing_rate)) kept.push_back(std::move(rec));

        dataset.events.push_back(std::move(kept));
        dataset.labels.push_back(label);
    }
    return dataset;
}

std::vector<LabeledSample> to_samples(const EventDataset& dataset, double sentinel) {
    std::vector<LabeledSample> samples;
    samples.reserve(dataset.size());
    for (std::size_t s = 0; s < dataset.size(); ++s) {
        LabeledSample sample;
        // events carry timestamps 0..len-1; the prediction point sits just after
        sample.matrix = ingest_events(dataset.events[s], dataset.attributes,
                                      dataset.len, dataset.len, sentinel);
        sample.target = dataset.labels[s];
        sample.prediction_point = static_cast<std::int64_t>(s);
        samples.push_back(std::move(sample));
    }
    return samples;
}

VarSynthResult make_var_series(const VarSynthConfig& cfg) {
    if (cfg.attrs < 1 || cfg.lag < 1 || cfg.steps <= cfg.lag)
        throw std::invalid_argument("var synth: degenerate dimensions");

    Rng rng(cfg.seed);
    VarSynthResult result;
    for (int i = 0; i < cfg.attrs; ++i) result.attributes.push_back("x" + std::to_string(i));

    // Draw random lag matrices, then scale them all down until the companion
    // matrix's power iterates contract; spectral_radius dials the margin.
    for (int p = 0; p < cfg.lag; ++p) {
        Mat a(cfg.attrs, cfg.attrs);
        for (double& v : a.storage()) v = rng.uniform(-1.0, 1.0);
        result.coeffs.push_back(std::move(a));
    }
    double norm = 0.0;  // max absolute row sum across the stacked coefficients
    for (int i = 0; i < cfg.attrs; ++i) {
        double row_sum = 0.0;
        for (const Mat& a : result.coeffs)
            for (int j = 0; j < cfg.attrs; ++j) row_sum += std::abs(a(i, j));
        norm = std::max(norm, row_sum);
    }
    if (norm > 0.0)
        for (Mat& a : result.coeffs)
            for (double& v : a.storage()) v *= cfg.spectral_radius / norm;

    result.series = Mat(cfg.attrs, cfg.steps);
    for (int t = 0; t < cfg.steps; ++t) {
        for (int i = 0; i < cfg.attrs; ++i) {
            double value = cfg.noise_sd * rng.normal();
            for (int p = 1; p <= cfg.lag && t - p >= 0; ++p)
                for (int j = 0; j < cfg.attrs; ++j)
                    value += result.coeffs[p - 1](i, j) * result.series(j, t - p);
            result.series(i, t) = value;
        }
    }
    return result;
}

}  // namespace tdc
