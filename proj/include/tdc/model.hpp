#ifndef TDC_MODEL_HPP
#define TDC_MODEL_HPP

#include <memory>
#include <span>
#include <vector>

#include "tdc/dynpool.hpp"
#include "tdc/predictor.hpp"
#include "tdc/tdconv.hpp"

namespace tdc {

enum class ModelKind : std::uint8_t { tdconv, var, dybm, cnn, cnn_pool };

struct PoolSpec {
    double initial_width = 1.0;  // l0
    double growth = 1.0;         // l
    bool final_infinite = false;
};

/// Hyperparameters of the full pipeline
///   pool1 -> time-discounting convolution -> pool2 -> FC(ReLU) [-> softmax].
/// Baseline kinds reuse the pipeline: dybm constrains the layer to trace form
/// with T_k = 0, cnn/cnn_pool to patch form without decay; dybm and cnn run
/// with identity pooling. Kind var bypasses the pipeline entirely.
struct ModelConfig {
    ModelKind kind = ModelKind::tdconv;
    Task task = Task::autoreg;
    int attrs = 1;       // D
    int input_len = 100; // nominal history length T fed to the first pooling
    int outputs = 1;     // J: = attrs for autoreg, 2 for binary classification
    int feature_maps = 4;  // K
    double lambda = 0.85;
    double mu = 0.85;
    PoolSpec pool1{1.0, 1.0, true};
    PoolSpec pool2{1.0, 1.0, false};
    std::vector<int> patch_len_policy{1, 2, 4, kFullLength};
    double l1_coeff = 0.01;  // c, applied to the second pooling's outputs
    double sentinel = kDefaultSentinel;
    int var_lag = 0;  // kind var: lag T, 0 means input_len
};

void validate_config(const ModelConfig& cfg);

/// Squared Euclidean distance between the target and the prediction.
double loss_autoreg(std::span<const double> target, std::span<const double> prediction);

/// Cross entropy of a one-hot target against probabilities clamped at 1e-12.
double loss_classify(std::span<const double> target_onehot, std::span<const double> probs);

/// Numerically stable softmax; output sums to 1.
std::vector<double> softmax(std::span<const double> logits);

/// Mean regularized objective over a batch.
double batch_objective(const Predictor& model, std::span<const LabeledSample> batch);

/// Intermediates cached by one forward pass, in pipeline order. pool2.values
/// holds the hidden units z that the L1 penalty applies to.
struct ForwardTrace {
    PooledMap pool1;
    Mat feat;         // g, K x P1
    PooledMap pool2;  // z = pool2.values, K x P2
    std::vector<double> logits;
    std::vector<double> probs;  // classification only
};

/// The composed prediction pipeline for kinds tdconv, dybm, cnn and cnn_pool.
class Network : public Predictor {
public:
    explicit Network(ModelConfig cfg);

    Task task() const override { return cfg_.task; }
    std::size_t param_count() const override;
    std::vector<double> params() const override;
    void set_params(std::span<const double> theta) override;
    void init_params(Rng& rng) override;
    std::vector<ParamSegment> param_segments() const override;
    std::vector<double> predict(const SequenceMatrix& input) const override;
    double objective(const LabeledSample& sample, std::string* kink_signature = nullptr) const override;
    double forward_backward(const LabeledSample& sample, std::span<double> grad) const override;

    ForwardTrace run(const SequenceMatrix& input) const;

    const ModelConfig& config() const { return cfg_; }
    const PoolPlan& pool1_plan() const { return pool1_; }
    const PoolPlan& pool2_plan() const { return pool2_; }
    const TdConvParams& conv() const { return conv_; }
    TdConvParams& conv() { return conv_; }
    Mat& head_weights() { return head_weights_; }
    std::vector<double>& head_bias() { return head_bias_; }

private:
    ModelConfig cfg_;
    PoolPlan pool1_;
    PoolPlan pool2_;
    TdConvParams conv_;
    Mat head_weights_;               // J x (K * P2)
    std::vector<double> head_bias_;  // J
};

/// Kind-aware factory (Network or the VAR baseline model).
std::unique_ptr<Predictor> make_model(const ModelConfig& cfg);

/// Trained model plus everything needed to reuse it: configuration,
/// normalization statistics, and the flat parameter vector. Binary format is
/// versioned and round-trips bit-exactly.
struct Checkpoint {
    ModelConfig config;
    bool has_stats = false;
    AttributeStats stats;
    std::vector<double> params;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tdc

#endif
