#ifndef TDC_BASELINES_HPP
#define TDC_BASELINES_HPP

#include <span>
#include <vector>

#include "tdc/mat.hpp"
#include "tdc/predictor.hpp"
#include "tdc/seqdata.hpp"

namespace tdc {

/// Vector autoregression with lag T: f_j = sum_i sum_{tau=1..T} x_i[tau] * V[tau, i, j] - b_j.
/// The bias is per-output; use uniform_bias() for the strict scalar form.
struct VarParams {
    int lag = 0;      // T
    int attrs = 0;    // D
    int outputs = 0;  // J
    std::vector<double> coeffs;  // indexed [tau-1][i][j], tau = 1..lag
    std::vector<double> bias;    // J

    double& coeff(int tau, int i, int j) {
        return coeffs[(static_cast<std::size_t>(tau - 1) * attrs + i) * outputs + j];
    }
    double coeff(int tau, int i, int j) const {
        return coeffs[(static_cast<std::size_t>(tau - 1) * attrs + i) * outputs + j];
    }
    void uniform_bias(double b) { bias.assign(bias.size(), b); }
};

VarParams make_var_params(int lag, int attrs, int outputs);

/// Direct evaluation of the VAR predictor on a D x T' lag matrix (missing
/// cells, if any, count as zero — the post-standardization mean).
std::vector<double> var_predict(const Mat& input, const VarParams& params,
                                double sentinel = kDefaultSentinel);

/// The DyBM prediction model: eta[k, d] = sum_i x_i[d] * lambda^d * U[k, i] - b_k.
/// Feature map is fed to the same head as the main model.
struct DybmParams {
    Mat weights;                 // K x D
    std::vector<double> biases;  // K
    double lambda = 0.85;
};

Mat dybm_predict(const Mat& input, const DybmParams& params);

/// Ordinary 1D convolution (no decay): g[k, d] = sum_i sum_tau W[k, tau, i] * x_i[d + tau] - b_k.
struct ConvParams {
    std::vector<Mat> patches;    // K blocks of (T_k + 1) x D
    std::vector<double> biases;  // K
};

Mat cnn_forward(const Mat& input, const ConvParams& params);

/// Closed-form least-squares fit of the VAR coefficients over autoregression
/// samples; the oracle against which the SGD-trained VAR is validated.
/// Rank-deficient systems fall back to a ridge of 1e-8.
VarParams var_fit_ols(std::span<const LabeledSample> samples, int lag);

/// The VAR baseline as a trainable model, sharing the data pipeline, loss and
/// optimizer with the main pipeline. Parameter layout: [V | b].
class VarModel : public Predictor {
public:
    VarModel(int lag, int attrs, int outputs, Task task, double sentinel = kDefaultSentinel);

    Task task() const override { return task_; }
    std::size_t param_count() const override;
    std::vector<double> params() const override;
    void set_params(std::span<const double> theta) override;
    void init_params(Rng& rng) override;
    std::vector<ParamSegment> param_segments() const override;
    std::vector<double> predict(const SequenceMatrix& input) const override;
    double objective(const LabeledSample& sample, std::string* kink_signature = nullptr) const override;
    double forward_backward(const LabeledSample& sample, std::span<double> grad) const override;

    const VarParams& var_params() const { return params_; }
    VarParams& var_params() { return params_; }

private:
    VarParams params_;
    Task task_;
    double sentinel_;
};

}  // namespace tdc

#endif
