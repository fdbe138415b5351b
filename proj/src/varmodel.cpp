#include <cmath>
#include <stdexcept>

#include "tdc/baselines.hpp"
#include "tdc/model.hpp"

namespace tdc {

VarModel::VarModel(int lag, int attrs, int outputs, Task task, double sentinel)
    : params_(make_var_params(lag, attrs, outputs)), task_(task), sentinel_(sentinel) {}

std::size_t VarModel::param_count() const {
    return params_.coeffs.size() + params_.bias.size();
}

std::vector<double> VarModel::params() const {
    std::vector<double> theta = params_.coeffs;
    theta.insert(theta.end(), params_.bias.begin(), params_.bias.end());
    return theta;
}

void VarModel::set_params(std::span<const double> theta) {
    if (theta.size() != param_count())
        throw std::invalid_argument("var model: parameter vector size mismatch");
    std::copy_n(theta.begin(), params_.coeffs.size(), params_.coeffs.begin());
    std::copy_n(theta.begin() + params_.coeffs.size(), params_.bias.size(), params_.bias.begin());
}

void VarModel::init_params(Rng& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(params_.attrs) * params_.lag);
    for (double& w : params_.coeffs) w = rng.uniform(-s, s);
    params_.bias.assign(params_.bias.size(), 0.0);
}

std::vector<ParamSegment> VarModel::param_segments() const {
    return {{"V", 0, params_.coeffs.size()}, {"b", params_.coeffs.size(), params_.bias.size()}};
}

std::vector<double> VarModel::predict(const SequenceMatrix& input) const {
    std::vector<double> out = var_predict(input.values, params_, input.sentinel);
    if (task_ == Task::classify) return softmax(out);
    return out;
}

double VarModel::objective(const LabeledSample& sample, std::string* kink_signature) const {
    if (kink_signature) kink_signature->clear();  // linear model, nothing discrete
    std::vector<double> out = predict(sample.matrix);
    if (task_ == Task::classify) {
        std::vector<double> y = sample.label() == 0 ? std::vector<double>{1.0, 0.0}
                                                    : std::vector<double>{0.0, 1.0};
        return loss_classify(y, out);
    }
    return loss_autoreg(sample.target_vector(), out);
}

double VarModel::forward_backward(const LabeledSample& sample, std::span<double> grad) const {
    if (grad.size() != param_count())
        throw std::invalid_argument("var model: gradient vector size mismatch");
    std::vector<double> out = predict(sample.matrix);

    std::vector<double> dlogits(out.size());
    double loss;
    if (task_ == Task::classify) {
        std::vector<double> y = sample.label() == 0 ? std::vector<double>{1.0, 0.0}
                                                    : std::vector<double>{0.0, 1.0};
        loss = loss_classify(y, out);
        for (std::size_t j = 0; j < out.size(); ++j) dlogits[j] = out[j] - y[j];
    } else {
        const std::vector<double>& y = sample.target_vector();
        loss = loss_autoreg(y, out);
        for (std::size_t j = 0; j < out.size(); ++j) dlogits[j] = 2.0 * (out[j] - y[j]);
    }

    const Mat& x = sample.matrix.values;
    for (int tau = 1; tau <= params_.lag; ++tau)
        for (int i = 0; i < params_.attrs; ++i) {
            double v = x(i, tau - 1);
            if (v == sentinel_) v = 0.0;
            if (v == 0.0) continue;
            std::size_t base = (static_cast<std::size_t>(tau - 1) * params_.attrs + i) *
                               params_.outputs;
            for (int j = 0; j < params_.outputs; ++j) grad[base + j] += dlogits[j] * v;
        }
    const std::size_t bias_offset = params_.coeffs.size();
    for (int j = 0; j < params_.outputs; ++j) grad[bias_offset + j] -= dlogits[j];
    return loss;
}

}  // namespace tdc
