#include "tdc/tdconv.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "tdc/errors.hpp"

namespace tdc {

namespace {

void check_decay(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0))
        throw std::invalid_argument(std::string("tdconv: ") + name + " must lie in [0, 1]");
}

// powers[p] = base^p for p = 0..max_exp
std::vector<double> power_table(double base, int max_exp) {
    std::vector<double> powers(static_cast<std::size_t>(max_exp) + 1);
    powers[0] = 1.0;
    for (int p = 1; p <= max_exp; ++p) powers[p] = powers[p - 1] * base;
    return powers;
}

void check_input(const Mat& input, const TdConvParams& params) {
    if (static_cast<int>(input.rows()) != params.attrs)
        throw std::invalid_argument("tdconv: input attribute count mismatch");
    if (input.cols() == 0) throw std::invalid_argument("tdconv: empty input");
    check_decay(params.lambda, "lambda");
    check_decay(params.mu, "mu");
}

}  // namespace

std::size_t TdConvParams::weight_count() const {
    std::size_t n = trace_weights.size() + biases.size();
    for (const Mat& v : patch_weights) n += v.size();
    return n;
}

TdConvParams make_custom_params(int attrs, const std::vector<PatchForm>& forms,
                                const std::vector<int>& patch_lens, double lambda, double mu) {
    if (attrs < 1) throw std::invalid_argument("tdconv: need at least one attribute");
    if (forms.empty()) throw std::invalid_argument("tdconv: need at least one feature map");
    if (forms.size() != patch_lens.size())
        throw std::invalid_argument("tdconv: forms and patch lengths disagree");
    check_decay(lambda, "lambda");
    check_decay(mu, "mu");

    TdConvParams params;
    params.attrs = attrs;
    params.lambda = lambda;
    params.mu = mu;
    params.forms = forms;
    params.patch_lens = patch_lens;
    params.biases.assign(forms.size(), 0.0);

    int trace_seen = 0, patch_seen = 0;
    for (std::size_t k = 0; k < forms.size(); ++k) {
        if (patch_lens[k] < 0) throw std::invalid_argument("tdconv: negative patch length");
        if (forms[k] == PatchForm::trace) {
            params.form_ordinal.push_back(trace_seen++);
        } else {
            params.form_ordinal.push_back(patch_seen++);
            params.patch_weights.emplace_back(static_cast<std::size_t>(patch_lens[k]) + 1,
                                              static_cast<std::size_t>(attrs));
        }
    }
    params.trace_weights = Mat(static_cast<std::size_t>(trace_seen), static_cast<std::size_t>(attrs));
    return params;
}

TdConvParams make_params(int attrs, int feature_maps, double lambda, double mu,
                         const std::vector<int>& len_policy, int input_len) {
    if (feature_maps < 2)
        throw std::invalid_argument("tdconv: mixed-form layer needs at least two feature maps");
    if (len_policy.empty()) throw std::invalid_argument("tdconv: empty patch-length policy");

    const int trace_total = (feature_maps + 1) / 2;
    std::vector<PatchForm> forms;
    std::vector<int> lens;
    for (int k = 0; k < feature_maps; ++k) {
        int len = len_policy[static_cast<std::size_t>(k) % len_policy.size()];
        if (len == kFullLength) len = input_len;
        lens.push_back(len);
        forms.push_back(k < trace_total ? PatchForm::trace : PatchForm::patch);
    }
    return make_custom_params(attrs, forms, lens, lambda, mu);
}

void init_params(TdConvParams& params, Rng& rng) {
    for (int k = 0; k < params.feature_maps(); ++k) {
        double s = 1.0 / std::sqrt(static_cast<double>(params.attrs) * (params.patch_lens[k] + 1));
        if (params.forms[k] == PatchForm::trace) {
            auto row = params.trace_weights.row(params.form_ordinal[k]);
            for (double& w : row) w = rng.uniform(-s, s);
        } else {
            Mat& block = params.patch_weights[params.form_ordinal[k]];
            for (double& w : block.storage()) w = rng.uniform(-s, s);
        }
    }
    for (double& b : params.biases) b = 0.0;
}

Mat forward(const Mat& input, const TdConvParams& params) {
    check_input(input, params);
    const int len = static_cast<int>(input.cols());
    const int attrs = params.attrs;
    const int maps = params.feature_maps();

    int max_patch = 0;
    for (int l : params.patch_lens) max_patch = std::max(max_patch, l);
    const std::vector<double> lam = power_table(params.lambda, len + max_patch);
    const std::vector<double> mu = power_table(params.mu, len);

    Mat out(static_cast<std::size_t>(maps), static_cast<std::size_t>(len));
    for (int k = 0; k < maps; ++k) {
        const int patch_len = params.patch_lens[k];
        if (params.forms[k] == PatchForm::trace) {
            auto weights = params.trace_weights.row(params.form_ordinal[k]);
            for (int d = 1; d <= len; ++d) {
                double acc = 0.0;
                for (int i = 0; i < attrs; ++i) {
                    double s = 0.0;
                    const int tau_max = std::min(patch_len, len - d);
                    for (int tau = 0; tau <= tau_max; ++tau)
                        s += lam[d + tau] * input(i, d + tau - 1);
                    acc += weights[i] * s;
                }
                out(k, d - 1) = acc - params.biases[k];
            }
        } else {
            const Mat& weights = params.patch_weights[params.form_ordinal[k]];
            for (int d = 1; d <= len; ++d) {
                double acc = 0.0;
                const int tau_max = std::min(patch_len, len - d);
                for (int tau = 0; tau <= tau_max; ++tau)
                    for (int i = 0; i < attrs; ++i)
                        acc += weights(tau, i) * input(i, d + tau - 1);
                out(k, d - 1) = mu[d] * acc - params.biases[k];
            }
        }
    }
    return out;
}

TdConvGrads zero_grads(const TdConvParams& params) {
    TdConvGrads grads;
    grads.trace_weights = Mat(params.trace_weights.rows(), params.trace_weights.cols());
    for (const Mat& v : params.patch_weights) grads.patch_weights.emplace_back(v.rows(), v.cols());
    grads.biases.assign(params.biases.size(), 0.0);
    return grads;
}

void accumulate_grad_weights(const Mat& input, const TdConvParams& params, const Mat& upstream,
                             TdConvGrads& grads) {
    check_input(input, params);
    const int len = static_cast<int>(input.cols());
    const int attrs = params.attrs;
    const int maps = params.feature_maps();
    require_shape(upstream, static_cast<std::size_t>(maps), static_cast<std::size_t>(len),
                  "tdconv upstream");

    int max_patch = 0;
    for (int l : params.patch_lens) max_patch = std::max(max_patch, l);
    const std::vector<double> lam = power_table(params.lambda, len + max_patch);
    const std::vector<double> mu = power_table(params.mu, len);

    for (int k = 0; k < maps; ++k) {
        const int patch_len = params.patch_lens[k];
        if (params.forms[k] == PatchForm::trace) {
            auto grad_row = grads.trace_weights.row(params.form_ordinal[k]);
            for (int d = 1; d <= len; ++d) {
                const double up = upstream(k, d - 1);
                if (up == 0.0) continue;
                const int tau_max = std::min(patch_len, len - d);
                for (int i = 0; i < attrs; ++i) {
                    double s = 0.0;
                    for (int tau = 0; tau <= tau_max; ++tau)
                        s += lam[d + tau] * input(i, d + tau - 1);
                    grad_row[i] += up * s;
                }
            }
        } else {
            Mat& grad_block = grads.patch_weights[params.form_ordinal[k]];
            for (int d = 1; d <= len; ++d) {
                const double up = upstream(k, d - 1);
                if (up == 0.0) continue;
                const double scaled = up * mu[d];
                const int tau_max = std::min(patch_len, len - d);
                for (int tau = 0; tau <= tau_max; ++tau)
                    for (int i = 0; i < attrs; ++i)
                        grad_block(tau, i) += scaled * input(i, d + tau - 1);
            }
        }
        double up_sum = 0.0;
        for (int d = 0; d < len; ++d) up_sum += upstream(k, d);
        grads.biases[k] -= up_sum;
    }
}

TdConvGrads grad_weights(const Mat& input, const TdConvParams& params, const Mat& upstream) {
    TdConvGrads grads = zero_grads(params);
    accumulate_grad_weights(input, params, upstream, grads);
    return grads;
}

TdConvParams reduce_to_dybm(const TdConvParams& params) {
    TdConvParams out = params;
    for (int& len : out.patch_lens) len = 0;
    for (Mat& block : out.patch_weights) {
        Mat single(1, block.cols());
        for (std::size_t i = 0; i < block.cols(); ++i) single(0, i) = block(0, i);
        block = std::move(single);
    }
    return out;
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
    if (!in) throw DataError("tdconv: truncated parameter stream");
    return value;
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
    if (!in) throw DataError("tdconv: truncated parameter stream");
    return values;
}

constexpr std::uint32_t kParamsMagic = 0x54444331;  // "TDC1"

}  // namespace

void save_params(std::ostream& out, const TdConvParams& params) {
    write_pod(out, kParamsMagic);
    write_pod<std::int32_t>(out, params.trace_count());
    write_pod<std::int32_t>(out, params.patch_count());
    write_pod<std::int32_t>(out, params.attrs);
    write_pod(out, params.lambda);
    write_pod(out, params.mu);
    write_pod<std::uint64_t>(out, params.forms.size());
    for (int k = 0; k < params.feature_maps(); ++k) {
        write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(params.forms[k]));
        write_pod<std::int32_t>(out, params.patch_lens[k]);
    }
    write_doubles(out, params.trace_weights.storage());
    for (const Mat& block : params.patch_weights) write_doubles(out, block.storage());
    write_doubles(out, params.biases);
}

TdConvParams load_params(std::istream& in) {
    if (read_pod<std::uint32_t>(in) != kParamsMagic)
        throw DataError("tdconv: bad parameter stream header");
    TdConvParams params;
    const int trace_count = read_pod<std::int32_t>(in);
    const int patch_count = read_pod<std::int32_t>(in);
    params.attrs = read_pod<std::int32_t>(in);
    params.lambda = read_pod<double>(in);
    params.mu = read_pod<double>(in);
    const auto maps = read_pod<std::uint64_t>(in);
    int trace_seen = 0, patch_seen = 0;
    for (std::uint64_t k = 0; k < maps; ++k) {
        auto form = static_cast<PatchForm>(read_pod<std::uint8_t>(in));
        params.forms.push_back(form);
        params.patch_lens.push_back(read_pod<std::int32_t>(in));
        params.form_ordinal.push_back(form == PatchForm::trace ? trace_seen++ : patch_seen++);
    }
    if (trace_seen != trace_count || patch_seen != patch_count)
        throw DataError("tdconv: inconsistent parameter stream header");

    params.trace_weights = Mat(static_cast<std::size_t>(trace_count), static_cast<std::size_t>(params.attrs));
    params.trace_weights.storage() = read_doubles(in);
    if (params.trace_weights.storage().size() !=
        static_cast<std::size_t>(trace_count) * static_cast<std::size_t>(params.attrs))
        throw DataError("tdconv: trace weight block size mismatch");
    for (std::uint64_t k = 0; k < maps; ++k) {
        if (params.forms[k] != PatchForm::patch) continue;
        Mat block(static_cast<std::size_t>(params.patch_lens[k]) + 1, static_cast<std::size_t>(params.attrs));
        block.storage() = read_doubles(in);
        if (block.storage().size() != (static_cast<std::size_t>(params.patch_lens[k]) + 1) *
                                          static_cast<std::size_t>(params.attrs))
            throw DataError("tdconv: patch weight block size mismatch");
        params.patch_weights.push_back(std::move(block));
    }
    params.biases = read_doubles(in);
    if (params.biases.size() != maps) throw DataError("tdconv: bias block size mismatch");
    return params;
}

}  // namespace tdc
