#ifndef TDC_OPTIM_HPP
#define TDC_OPTIM_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tdc/metrics.hpp"
#include "tdc/predictor.hpp"

namespace tdc {

/// Adam with the usual defaults and bias correction.
struct AdamConfig {
    double alpha = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class Adam {
public:
    explicit Adam(std::size_t size, AdamConfig cfg = {});

    /// One update in place. Throws NumericError on a non-finite gradient.
    void step(std::span<double> params, std::span<const double> grad);

    long steps_taken() const { return steps_; }

private:
    AdamConfig cfg_;
    std::vector<double> first_moment_;
    std::vector<double> second_moment_;
    long steps_ = 0;
};

struct TrainOptions {
    int iterations = 1000;
    int batch_size = 16;  // M
    std::uint64_t seed = 1;
    int eval_stride = 1;   // evaluate the test metric every this many iterations
    bool shuffle = false;  // default: sequential mini-batches with wrap-around
    AdamConfig adam;
};

struct TrainRecord {
    int iteration = 0;
    double objective = 0.0;
    double test_metric = std::numeric_limits<double>::quiet_NaN();
};

struct TrainLog {
    std::vector<TrainRecord> records;
    double average_metric = std::numeric_limits<double>::quiet_NaN();  // over evaluated iterations
    double best_metric = std::numeric_limits<double>::quiet_NaN();
    int best_iteration = -1;
};

/// Mean gradient of a batch, accumulated with a pairwise (binary tree)
/// reduction so results are independent of evaluation order and duplicating
/// every batch member leaves the mean bit-identical.
std::vector<double> batch_mean_gradient(const Predictor& model,
                                        std::span<const LabeledSample> batch,
                                        double* mean_objective = nullptr);

/// Mini-batch Adam over sequential wrap-around batches; seeds both parameter
/// initialization and (if enabled) the shuffle order. Identical inputs give
/// bit-identical parameters and logs.
TrainLog train(Predictor& model, std::span<const LabeledSample> train_set,
               std::span<const LabeledSample> test_set, MetricKind metric,
               const TrainOptions& options);

/// Metric of a model over a sample set (RMSE of all prediction entries, or
/// AUC of the positive-class probability).
double evaluate(const Predictor& model, std::span<const LabeledSample> samples, MetricKind metric);

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t worst_coordinate = 0;
    std::string worst_segment;
    std::size_t checked = 0;
    std::size_t skipped_ties = 0;
    double step = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Central finite differences of the per-sample objective against the
/// analytic gradient. Coordinates whose perturbation flips a pooling argmax
/// or a ReLU/L1 sign are skipped and counted. Relative error uses
/// |a - n| / max(|a|, |n|, 1e-6); the floor turns vanishing-gradient
/// coordinates into an absolute comparison at the finite-difference noise
/// level.
GradCheckReport grad_check(Predictor& model, const LabeledSample& sample,
                           double step = 1e-5, double tolerance = 1e-4);

/// Same comparison against a caller-supplied gradient (used to pinpoint
/// deliberately corrupted coordinates).
GradCheckReport grad_check_against(Predictor& model, const LabeledSample& sample,
                                   std::span<const double> analytic, double step,
                                   double tolerance);

}  // namespace tdc

#endif
