#include "tdc/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "tdc/baselines.hpp"
#include "tdc/errors.hpp"

namespace tdc {

void validate_config(const ModelConfig& cfg) {
    if (cfg.attrs < 1) throw ConfigError("model: attrs must be >= 1");
    if (cfg.input_len < 1) throw ConfigError("model: input_len must be >= 1");
    if (cfg.kind != ModelKind::var && cfg.feature_maps < 2)
        throw ConfigError("model: need at least two feature maps");
    if (cfg.l1_coeff < 0.0) throw ConfigError("model: l1 coefficient must be >= 0");
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw ConfigError("model: lambda outside [0, 1]");
    if (!(cfg.mu >= 0.0 && cfg.mu <= 1.0)) throw ConfigError("model: mu outside [0, 1]");
    if (!(cfg.pool1.initial_width >= 1.0 && cfg.pool1.growth >= 1.0))
        throw ConfigError("model: pool1 window parameters must be >= 1");
    if (!(cfg.pool2.initial_width >= 1.0 && cfg.pool2.growth >= 1.0))
        throw ConfigError("model: pool2 window parameters must be >= 1");
    if (!std::isfinite(cfg.sentinel)) throw ConfigError("model: sentinel must be finite");
    if (cfg.task == Task::autoreg && cfg.outputs != cfg.attrs)
        throw ConfigError("model: autoregression needs outputs == attrs");
    if (cfg.task == Task::classify && cfg.outputs != 2)
        throw ConfigError("model: binary classification needs outputs == 2");
    if (cfg.patch_len_policy.empty()) throw ConfigError("model: empty patch length policy");
    if (cfg.var_lag < 0 || cfg.var_lag > cfg.input_len)
        throw ConfigError("model: var lag exceeds history");
}

double loss_autoreg(std::span<const double> target, std::span<const double> prediction) {
    if (target.size() != prediction.size())
        throw std::invalid_argument("loss_autoreg: dimension mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < target.size(); ++j) {
        double d = target[j] - prediction[j];
        acc += d * d;
    }
    return acc;
}

double loss_classify(std::span<const double> target_onehot, std::span<const double> probs) {
    if (target_onehot.size() != probs.size())
        throw std::invalid_argument("loss_classify: dimension mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        double p = std::clamp(probs[j], 1e-12, 1.0);
        acc -= target_onehot[j] * std::log(p);
    }
    return acc;
}

std::vector<double> softmax(std::span<const double> logits) {
    double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double total = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        out[j] = std::exp(logits[j] - top);
        total += out[j];
    }
    for (double& v : out) v /= total;
    return out;
}

double batch_objective(const Predictor& model, std::span<const LabeledSample> batch) {
    if (batch.empty()) throw std::invalid_argument("batch_objective: empty batch");
    double acc = 0.0;
    for (const LabeledSample& sample : batch) acc += model.objective(sample);
    return acc / static_cast<double>(batch.size());
}

namespace {

// The baseline kinds constrain the layer and, for dybm/cnn, drop the dynamic
// pooling (identity windows), matching how they are composed for comparison.
ModelConfig effective_config(ModelConfig cfg) {
    switch (cfg.kind) {
        case ModelKind::dybm:
            cfg.pool1 = {1.0, 1.0, cfg.pool1.final_infinite};
            cfg.pool2 = {1.0, 1.0, false};
            cfg.mu = cfg.lambda;
            cfg.patch_len_policy = {0};
            break;
        case ModelKind::cnn:
            cfg.pool1 = {1.0, 1.0, cfg.pool1.final_infinite};
            cfg.pool2 = {1.0, 1.0, false};
            cfg.mu = 1.0;
            break;
        case ModelKind::cnn_pool:
            cfg.mu = 1.0;
            break;
        default:
            break;
    }
    return cfg;
}

TdConvParams build_conv(const ModelConfig& cfg, int conv_len) {
    switch (cfg.kind) {
        case ModelKind::tdconv:
            return make_params(cfg.attrs, cfg.feature_maps, cfg.lambda, cfg.mu,
                               cfg.patch_len_policy, conv_len);
        case ModelKind::dybm: {
            std::vector<PatchForm> forms(static_cast<std::size_t>(cfg.feature_maps), PatchForm::trace);
            std::vector<int> lens(static_cast<std::size_t>(cfg.feature_maps), 0);
            return make_custom_params(cfg.attrs, forms, lens, cfg.lambda, cfg.lambda);
        }
        case ModelKind::cnn:
        case ModelKind::cnn_pool: {
            std::vector<PatchForm> forms(static_cast<std::size_t>(cfg.feature_maps), PatchForm::patch);
            std::vector<int> lens;
            for (int k = 0; k < cfg.feature_maps; ++k) {
                int len = cfg.patch_len_policy[static_cast<std::size_t>(k) % cfg.patch_len_policy.size()];
                lens.push_back(len == kFullLength ? conv_len : len);
            }
            return make_custom_params(cfg.attrs, forms, lens, cfg.lambda, 1.0);
        }
        default:
            throw ConfigError("model: VAR kind is not a Network");
    }
}

std::vector<double> onehot2(int label) {
    if (label != 0 && label != 1) throw std::invalid_argument("model: class label must be 0 or 1");
    return label == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
}

}  // namespace

Network::Network(ModelConfig cfg) : cfg_(effective_config(std::move(cfg))) {
    validate_config(cfg_);
    pool1_ = make_plan(cfg_.pool1.initial_width, cfg_.pool1.growth, cfg_.input_len,
                       cfg_.pool1.final_infinite);
    const int conv_len = pool1_.count();
    conv_ = build_conv(cfg_, conv_len);
    pool2_ = make_plan(cfg_.pool2.initial_width, cfg_.pool2.growth, conv_len,
                       cfg_.pool2.final_infinite);
    const std::size_t hidden = static_cast<std::size_t>(cfg_.feature_maps) * pool2_.count();
    head_weights_ = Mat(static_cast<std::size_t>(cfg_.outputs), hidden);
    head_bias_.assign(static_cast<std::size_t>(cfg_.outputs), 0.0);
}

std::size_t Network::param_count() const {
    return conv_.weight_count() + head_weights_.size() + head_bias_.size();
}

std::vector<ParamSegment> Network::param_segments() const {
    std::vector<ParamSegment> segments;
    std::size_t offset = 0;
    for (int k = 0; k < conv_.feature_maps(); ++k) {
        std::size_t n = conv_.forms[k] == PatchForm::trace
                            ? conv_.trace_weights.cols()
                            : conv_.patch_weights[conv_.form_ordinal[k]].size();
        segments.push_back({std::string(conv_.forms[k] == PatchForm::trace ? "U[" : "V[") +
                                std::to_string(k) + "]",
                            offset, n});
        offset += n;
    }
    segments.push_back({"b", offset, conv_.biases.size()});
    offset += conv_.biases.size();
    segments.push_back({"W_f", offset, head_weights_.size()});
    offset += head_weights_.size();
    segments.push_back({"b_f", offset, head_bias_.size()});
    return segments;
}

std::vector<double> Network::params() const {
    std::vector<double> theta;
    theta.reserve(param_count());
    for (int k = 0; k < conv_.feature_maps(); ++k) {
        if (conv_.forms[k] == PatchForm::trace) {
            auto row = conv_.trace_weights.row(conv_.form_ordinal[k]);
            theta.insert(theta.end(), row.begin(), row.end());
        } else {
            const auto& block = conv_.patch_weights[conv_.form_ordinal[k]].storage();
            theta.insert(theta.end(), block.begin(), block.end());
        }
    }
    theta.insert(theta.end(), conv_.biases.begin(), conv_.biases.end());
    theta.insert(theta.end(), head_weights_.storage().begin(), head_weights_.storage().end());
    theta.insert(theta.end(), head_bias_.begin(), head_bias_.end());
    return theta;
}

void Network::set_params(std::span<const double> theta) {
    if (theta.size() != param_count())
        throw std::invalid_argument("model: parameter vector size mismatch");
    std::size_t offset = 0;
    for (int k = 0; k < conv_.feature_maps(); ++k) {
        if (conv_.forms[k] == PatchForm::trace) {
            auto row = conv_.trace_weights.row(conv_.form_ordinal[k]);
            std::copy_n(theta.begin() + offset, row.size(), row.begin());
            offset += row.size();
        } else {
            auto& block = conv_.patch_weights[conv_.form_ordinal[k]].storage();
            std::copy_n(theta.begin() + offset, block.size(), block.begin());
            offset += block.size();
        }
    }
    std::copy_n(theta.begin() + offset, conv_.biases.size(), conv_.biases.begin());
    offset += conv_.biases.size();
    std::copy_n(theta.begin() + offset, head_weights_.size(), head_weights_.storage().begin());
    offset += head_weights_.size();
    std::copy_n(theta.begin() + offset, head_bias_.size(), head_bias_.begin());
}

void Network::init_params(Rng& rng) {
    tdc::init_params(conv_, rng);
    const double s = 1.0 / std::sqrt(static_cast<double>(head_weights_.cols()));
    for (double& w : head_weights_.storage()) w = rng.uniform(-s, s);
    std::fill(head_bias_.begin(), head_bias_.end(), 0.0);
}

ForwardTrace Network::run(const SequenceMatrix& input) const {
    if (static_cast<int>(input.attrs()) != cfg_.attrs)
        throw std::invalid_argument("model: input attribute count mismatch");
    if (input.sentinel != cfg_.sentinel)
        throw std::invalid_argument("model: input sentinel differs from configuration");

    ForwardTrace trace;
    trace.pool1 = max_pool(input.values, pool1_, cfg_.sentinel);
    for (double v : trace.pool1.values.storage())
        if (v == cfg_.sentinel)
            throw NumericError("model: sentinel survived the first pooling");

    trace.feat = forward(trace.pool1.values, conv_);
    // no missing values can exist here; NaN sentinel disables the skip logic
    trace.pool2 = max_pool(trace.feat, pool2_, std::numeric_limits<double>::quiet_NaN());

    const Mat& z = trace.pool2.values;
    trace.logits.assign(static_cast<std::size_t>(cfg_.outputs), 0.0);
    for (int j = 0; j < cfg_.outputs; ++j) {
        double acc = 0.0;
        for (std::size_t h = 0; h < z.size(); ++h) {
            double r = z.data()[h];
            if (r > 0.0) acc += head_weights_(j, h) * r;
        }
        trace.logits[j] = acc + head_bias_[j];
    }
    if (cfg_.task == Task::classify) trace.probs = softmax(trace.logits);
    return trace;
}

std::vector<double> Network::predict(const SequenceMatrix& input) const {
    ForwardTrace trace = run(input);
    return cfg_.task == Task::classify ? trace.probs : trace.logits;
}

double Network::objective(const LabeledSample& sample, std::string* kink_signature) const {
    ForwardTrace trace = run(sample.matrix);
    const Mat& z = trace.pool2.values;

    double penalty = 0.0;
    for (double v : z.storage()) penalty += std::abs(v);

    double loss;
    if (cfg_.task == Task::classify) {
        loss = loss_classify(onehot2(sample.label()), trace.probs);
    } else {
        loss = loss_autoreg(sample.target_vector(), trace.logits);
    }

    if (kink_signature) {
        std::string sig;
        sig.reserve(z.size() + trace.pool2.argmax.size() * sizeof(int));
        for (double v : z.storage()) sig.push_back(v > 0.0 ? '+' : (v < 0.0 ? '-' : '0'));
        sig.append(reinterpret_cast<const char*>(trace.pool2.argmax.data()),
                   trace.pool2.argmax.size() * sizeof(int));
        *kink_signature = std::move(sig);
    }
    return loss + cfg_.l1_coeff * penalty;
}

double Network::forward_backward(const LabeledSample& sample, std::span<double> grad) const {
    if (grad.size() != param_count())
        throw std::invalid_argument("model: gradient vector size mismatch");
    ForwardTrace trace = run(sample.matrix);
    const Mat& z = trace.pool2.values;
    const std::size_t hidden = z.size();

    double penalty = 0.0;
    for (double v : z.storage()) penalty += std::abs(v);

    // dL/df: 2(f - y) for the squared loss, (p - y) through softmax + cross entropy
    std::vector<double> dlogits(static_cast<std::size_t>(cfg_.outputs));
    double loss;
    if (cfg_.task == Task::classify) {
        std::vector<double> y = onehot2(sample.label());
        loss = loss_classify(y, trace.probs);
        for (int j = 0; j < cfg_.outputs; ++j) dlogits[j] = trace.probs[j] - y[j];
    } else {
        const std::vector<double>& y = sample.target_vector();
        loss = loss_autoreg(y, trace.logits);
        for (int j = 0; j < cfg_.outputs; ++j) dlogits[j] = 2.0 * (trace.logits[j] - y[j]);
    }

    // head gradients and dL/dz (ReLU gate plus L1 subgradient, sign(0) = 0)
    const std::size_t head_w_offset = conv_.weight_count();
    const std::size_t head_b_offset = head_w_offset + head_weights_.size();
    Mat dz(z.rows(), z.cols());
    for (int j = 0; j < cfg_.outputs; ++j) {
        grad[head_b_offset + j] += dlogits[j];
        for (std::size_t h = 0; h < hidden; ++h) {
            double r = z.data()[h];
            if (r > 0.0) {
                grad[head_w_offset + j * hidden + h] += dlogits[j] * r;
                dz.data()[h] += dlogits[j] * head_weights_(j, h);
            }
        }
    }
    for (std::size_t h = 0; h < hidden; ++h) {
        double v = z.data()[h];
        if (v > 0.0)
            dz.data()[h] += cfg_.l1_coeff;
        else if (v < 0.0)
            dz.data()[h] -= cfg_.l1_coeff;
    }

    Mat dfeat = pool_backward(dz, trace.pool2);

    TdConvGrads conv_grads = zero_grads(conv_);
    accumulate_grad_weights(trace.pool1.values, conv_, dfeat, conv_grads);

    std::size_t offset = 0;
    for (int k = 0; k < conv_.feature_maps(); ++k) {
        if (conv_.forms[k] == PatchForm::trace) {
            auto row = conv_grads.trace_weights.row(conv_.form_ordinal[k]);
            for (double v : row) grad[offset++] += v;
        } else {
            for (double v : conv_grads.patch_weights[conv_.form_ordinal[k]].storage())
                grad[offset++] += v;
        }
    }
    for (double v : conv_grads.biases) grad[offset++] += v;

    return loss + cfg_.l1_coeff * penalty;
}

std::unique_ptr<Predictor> make_model(const ModelConfig& cfg) {
    validate_config(cfg);
    if (cfg.kind == ModelKind::var) {
        int lag = cfg.var_lag > 0 ? cfg.var_lag : cfg.input_len;
        return std::make_unique<VarModel>(lag, cfg.attrs, cfg.outputs, cfg.task, cfg.sentinel);
    }
    return std::make_unique<Network>(cfg);
}

namespace {

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw DataError("checkpoint: truncated file");
    return value;
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint64_t>(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    auto n = read_pod<std::uint64_t>(in);
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    if (!in) throw DataError("checkpoint: truncated file");
    return s;
}

void write_doubles(std::ostream& out, const std::vector<double>& values) {
    write_pod<std::uint64_t>(out, values.size());
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::istream& in) {
    auto n = read_pod<std::uint64_t>(in);
    std::vector<double> values(n);
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw DataError("checkpoint: truncated file");
    return values;
}

constexpr char kCheckpointMagic[8] = {'T', 'D', 'C', 'C', 'K', 'P', 'T', '1'};

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("checkpoint: cannot open '" + path + "' for writing");
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    const ModelConfig& cfg = ckpt.config;
    write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(cfg.kind));
    write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(cfg.task));
    write_pod<std::int32_t>(out, cfg.attrs);
    write_pod<std::int32_t>(out, cfg.input_len);
    write_pod<std::int32_t>(out, cfg.outputs);
    write_pod<std::int32_t>(out, cfg.feature_maps);
    write_pod(out, cfg.lambda);
    write_pod(out, cfg.mu);
    for (const PoolSpec* pool : {&cfg.pool1, &cfg.pool2}) {
        write_pod(out, pool->initial_width);
        write_pod(out, pool->growth);
        write_pod<std::uint8_t>(out, pool->final_infinite ? 1 : 0);
    }
    write_pod<std::uint64_t>(out, cfg.patch_len_policy.size());
    for (int len : cfg.patch_len_policy) write_pod<std::int32_t>(out, len);
    write_pod(out, cfg.l1_coeff);
    write_pod(out, cfg.sentinel);
    write_pod<std::int32_t>(out, cfg.var_lag);

    write_pod<std::uint8_t>(out, ckpt.has_stats ? 1 : 0);
    if (ckpt.has_stats) {
        write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(ckpt.stats.mode));
        write_pod<std::uint64_t>(out, ckpt.stats.size());
        for (std::size_t i = 0; i < ckpt.stats.size(); ++i) {
            write_string(out, ckpt.stats.attributes[i]);
            write_pod(out, ckpt.stats.stat1[i]);
            write_pod(out, ckpt.stats.stat2[i]);
            write_pod<std::uint8_t>(out, ckpt.stats.degenerate[i]);
        }
    }
    write_doubles(out, ckpt.params);
    if (!out) throw DataError("checkpoint: write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint: cannot open '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        throw DataError("checkpoint: bad header in '" + path + "'");

    Checkpoint ckpt;
    ModelConfig& cfg = ckpt.config;
    cfg.kind = static_cast<ModelKind>(read_pod<std::uint8_t>(in));
    cfg.task = static_cast<Task>(read_pod<std::uint8_t>(in));
    cfg.attrs = read_pod<std::int32_t>(in);
    cfg.input_len = read_pod<std::int32_t>(in);
    cfg.outputs = read_pod<std::int32_t>(in);
    cfg.feature_maps = read_pod<std::int32_t>(in);
    cfg.lambda = read_pod<double>(in);
    cfg.mu = read_pod<double>(in);
    for (PoolSpec* pool : {&cfg.pool1, &cfg.pool2}) {
        pool->initial_width = read_pod<double>(in);
        pool->growth = read_pod<double>(in);
        pool->final_infinite = read_pod<std::uint8_t>(in) != 0;
    }
    cfg.patch_len_policy.clear();
    auto policy_len = read_pod<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < policy_len; ++i)
        cfg.patch_len_policy.push_back(read_pod<std::int32_t>(in));
    cfg.l1_coeff = read_pod<double>(in);
    cfg.sentinel = read_pod<double>(in);
    cfg.var_lag = read_pod<std::int32_t>(in);

    ckpt.has_stats = read_pod<std::uint8_t>(in) != 0;
    if (ckpt.has_stats) {
        ckpt.stats.mode = static_cast<NormMode>(read_pod<std::uint8_t>(in));
        auto n = read_pod<std::uint64_t>(in);
        for (std::uint64_t i = 0; i < n; ++i) {
            ckpt.stats.attributes.push_back(read_string(in));
            ckpt.stats.stat1.push_back(read_pod<double>(in));
            ckpt.stats.stat2.push_back(read_pod<double>(in));
            ckpt.stats.degenerate.push_back(read_pod<std::uint8_t>(in));
        }
    }
    ckpt.params = read_doubles(in);
    return ckpt;
}

}  // namespace tdc
