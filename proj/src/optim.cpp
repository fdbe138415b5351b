#include "tdc/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tdc/errors.hpp"
#include "tdc/rng.hpp"

namespace tdc {

Adam::Adam(std::size_t size, AdamConfig cfg)
    : cfg_(cfg), first_moment_(size, 0.0), second_moment_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != first_moment_.size() || grad.size() != first_moment_.size())
        throw std::invalid_argument("adam: size mismatch");
    ++steps_;
    const double correction1 = 1.0 - std::pow(cfg_.beta1, steps_);
    const double correction2 = 1.0 - std::pow(cfg_.beta2, steps_);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grad[i];
        if (!std::isfinite(g))
            throw NumericError("adam: non-finite gradient at coordinate " + std::to_string(i));
        first_moment_[i] = cfg_.beta1 * first_moment_[i] + (1.0 - cfg_.beta1) * g;
        second_moment_[i] = cfg_.beta2 * second_moment_[i] + (1.0 - cfg_.beta2) * g * g;
        const double m_hat = first_moment_[i] / correction1;
        const double v_hat = second_moment_[i] / correction2;
        params[i] -= cfg_.alpha * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
}

std::vector<double> batch_mean_gradient(const Predictor& model,
                                        std::span<const LabeledSample> batch,
                                        double* mean_objective) {
    if (batch.empty()) throw std::invalid_argument("batch gradient: empty batch");
    const std::size_t n = model.param_count();

    std::vector<std::vector<double>> grads(batch.size());
    std::vector<double> objectives(batch.size());
    for (std::size_t m = 0; m < batch.size(); ++m) {
        grads[m].assign(n, 0.0);
        objectives[m] = model.forward_backward(batch[m], grads[m]);
    }

    // pairwise tree reduction (gradients and objectives alike)
    std::size_t count = batch.size();
    while (count > 1) {
        std::size_t half = count / 2;
        for (std::size_t i = 0; i < half; ++i) {
            const auto& a = grads[2 * i];
            const auto& b = grads[2 * i + 1];
            std::vector<double> sum(n);
            for (std::size_t c = 0; c < n; ++c) sum[c] = a[c] + b[c];
            grads[i] = std::move(sum);
            objectives[i] = objectives[2 * i] + objectives[2 * i + 1];
        }
        if (count % 2 == 1) {
            grads[half] = std::move(grads[count - 1]);
            objectives[half] = objectives[count - 1];
            count = half + 1;
        } else {
            count = half;
        }
    }

    const double denom = static_cast<double>(batch.size());
    for (double& g : grads[0]) g /= denom;
    if (mean_objective) *mean_objective = objectives[0] / denom;
    return std::move(grads[0]);
}

double evaluate(const Predictor& model, std::span<const LabeledSample> samples, MetricKind metric) {
    if (samples.empty()) throw std::invalid_argument("evaluate: empty sample set");
    if (metric == MetricKind::rmse) {
        std::vector<double> predictions, targets;
        for (const LabeledSample& sample : samples) {
            std::vector<double> out = model.predict(sample.matrix);
            const std::vector<double>& y = sample.target_vector();
            predictions.insert(predictions.end(), out.begin(), out.end());
            targets.insert(targets.end(), y.begin(), y.end());
        }
        return rmse(predictions, targets);
    }
    std::vector<double> scores;
    std::vector<int> labels;
    for (const LabeledSample& sample : samples) {
        std::vector<double> probs = model.predict(sample.matrix);
        scores.push_back(probs.back());  // probability of class 1
        labels.push_back(sample.label());
    }
    return auc(scores, labels);
}

TrainLog train(Predictor& model, std::span<const LabeledSample> train_set,
               std::span<const LabeledSample> test_set, MetricKind metric,
               const TrainOptions& options) {
    if (train_set.empty()) throw DataError("train: empty training set");
    if (options.batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");

    Rng rng(options.seed);
    model.init_params(rng);

    TrainLog log;
    if (options.iterations <= 0) return log;

    std::vector<double> theta = model.params();
    Adam adam(theta.size(), options.adam);

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    const std::size_t batch_size =
        std::min<std::size_t>(static_cast<std::size_t>(options.batch_size), train_set.size());
    std::size_t cursor = 0;
    std::vector<LabeledSample> batch;
    batch.reserve(batch_size);

    for (int iter = 1; iter <= options.iterations; ++iter) {
        if (options.shuffle && cursor == 0) {
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng.uniform_int(0, static_cast<int>(i) - 1)]);
        }
        batch.clear();
        for (std::size_t m = 0; m < batch_size; ++m)
            batch.push_back(train_set[order[(cursor + m) % order.size()]]);
        cursor = (cursor + batch_size) % order.size();

        double objective = 0.0;
        std::vector<double> grad = batch_mean_gradient(model, batch, &objective);
        adam.step(theta, grad);
        model.set_params(theta);

        TrainRecord record;
        record.iteration = iter;
        record.objective = objective;
        if (!test_set.empty() && (iter % options.eval_stride == 0 || iter == options.iterations))
            record.test_metric = evaluate(model, test_set, metric);
        log.records.push_back(record);
    }

    double sum = 0.0;
    std::size_t evaluated = 0;
    for (const TrainRecord& record : log.records) {
        if (std::isnan(record.test_metric)) continue;
        sum += record.test_metric;
        ++evaluated;
        if (log.best_iteration < 0 || metric_improves(metric, record.test_metric, log.best_metric)) {
            log.best_metric = record.test_metric;
            log.best_iteration = record.iteration;
        }
    }
    if (evaluated > 0) log.average_metric = sum / static_cast<double>(evaluated);
    return log;
}

namespace {

GradCheckReport check_coordinates(Predictor& model, const LabeledSample& sample,
                                  std::span<const double> analytic, double step,
                                  double tolerance) {
    GradCheckReport report;
    report.step = step;
    report.tolerance = tolerance;

    std::vector<double> theta = model.params();
    const std::vector<ParamSegment> segments = model.param_segments();
    auto segment_name = [&](std::size_t coordinate) -> std::string {
        for (const ParamSegment& seg : segments)
            if (coordinate >= seg.offset && coordinate < seg.offset + seg.size)
                return seg.name + "+" + std::to_string(coordinate - seg.offset);
        return "?";
    };

    std::string sig_plus, sig_minus;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double saved = theta[i];
        theta[i] = saved + step;
        model.set_params(theta);
        const double f_plus = model.objective(sample, &sig_plus);
        theta[i] = saved - step;
        model.set_params(theta);
        const double f_minus = model.objective(sample, &sig_minus);
        theta[i] = saved;

        if (sig_plus != sig_minus) {
            ++report.skipped_ties;
            continue;
        }
        const double numeric = (f_plus - f_minus) / (2.0 * step);
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
        const double rel = std::abs(analytic[i] - numeric) / denom;
        ++report.checked;
        if (rel > report.max_rel_error) {
            report.max_rel_error = rel;
            report.worst_coordinate = i;
            report.worst_segment = segment_name(i);
        }
    }
    model.set_params(theta);
    report.passed = report.max_rel_error < tolerance;
    return report;
}

}  // namespace

GradCheckReport grad_check_against(Predictor& model, const LabeledSample& sample,
                                   std::span<const double> analytic, double step,
                                   double tolerance) {
    if (analytic.size() != model.param_count())
        throw std::invalid_argument("grad_check: gradient size mismatch");
    if (!(step > 0.0)) throw std::invalid_argument("grad_check: step must be positive");
    return check_coordinates(model, sample, analytic, step, tolerance);
}

GradCheckReport grad_check(Predictor& model, const LabeledSample& sample, double step,
                           double tolerance) {
    std::vector<double> analytic(model.param_count(), 0.0);
    model.forward_backward(sample, analytic);
    return grad_check_against(model, sample, analytic, step, tolerance);
}

}  // namespace tdc
