#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tdc/baselines.hpp"
#include "tdc/errors.hpp"
#include "tdc/model.hpp"
#include "tdc/optim.hpp"
#include "tdc/synth.hpp"

using namespace tdc;

namespace {

std::vector<LabeledSample> synthetic_autoreg(std::uint64_t seed, int attrs, int steps,
                                             int history) {
    VarSynthConfig cfg;
    cfg.attrs = attrs;
    cfg.steps = steps;
    cfg.seed = seed;
    VarSynthResult synth = make_var_series(cfg);
    return window_samples(synth.series, synth.attributes, history);
}

ModelConfig tiny_config(int attrs, int len) {
    ModelConfig cfg;
    cfg.attrs = attrs;
    cfg.input_len = len;
    cfg.outputs = attrs;
    cfg.feature_maps = 2;
    cfg.patch_len_policy = {1, 2};
    cfg.pool1 = {1.0, 1.0, false};
    cfg.pool2 = {1.0, 1.0, false};
    cfg.l1_coeff = 0.0;
    return cfg;
}

}  // namespace

TEST_SUITE("optim") {

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    std::vector<double> params{1.0, -2.0, 3.0};
    std::vector<double> grad(3, 0.0);
    Adam adam(3);
    adam.step(params, grad);
    CHECK(params == std::vector<double>{1.0, -2.0, 3.0});
}

TEST_CASE("adam: first step moves by about alpha against the gradient sign") {
    AdamConfig cfg;
    std::vector<double> params{0.0, 0.0};
    std::vector<double> grad{2.5, -0.003};
    Adam adam(2, cfg);
    adam.step(params, grad);
    // bias-corrected ratio is 1 on the first step, epsilon negligible
    CHECK(params[0] == doctest::Approx(-cfg.alpha).epsilon(1e-6));
    CHECK(params[1] == doctest::Approx(cfg.alpha).epsilon(1e-4));
}

TEST_CASE("adam: repeated identical gradients keep moving the same way") {
    std::vector<double> params{0.0};
    std::vector<double> grad{1.0};
    Adam adam(1);
    adam.step(params, grad);
    double first = params[0];
    adam.step(params, grad);
    CHECK(params[0] < first);
    CHECK(first < 0.0);
}

TEST_CASE("adam: per-coordinate step magnitude stays near alpha") {
    Rng rng(9);
    AdamConfig cfg;
    std::vector<double> params(16, 0.0);
    Adam adam(params.size(), cfg);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<double> grad(params.size());
        for (double& g : grad) g = rng.uniform(-3, 3);
        std::vector<double> before = params;
        adam.step(params, grad);
        // |step| <= alpha / (1 - beta1) covers the worst bias-corrected ratio
        for (std::size_t i = 0; i < params.size(); ++i)
            CHECK(std::abs(params[i] - before[i]) <= cfg.alpha / (1.0 - cfg.beta1) + 1e-12);
    }
}

TEST_CASE("adam: aborts on non-finite gradients") {
    std::vector<double> params{0.0};
    std::vector<double> grad{std::numeric_limits<double>::quiet_NaN()};
    Adam adam(1);
    CHECK_THROWS_AS(adam.step(params, grad), NumericError);
}

TEST_CASE("batch mean gradient: duplicating every member changes nothing") {
    ModelConfig cfg = tiny_config(1, 6);
    Network net(cfg);
    Rng rng(10);
    net.init_params(rng);

    auto samples = synthetic_autoreg(11, 1, 40, 6);
    REQUIRE(samples.size() >= 3);
    std::vector<LabeledSample> batch{samples[0], samples[1], samples[2]};
    std::vector<LabeledSample> doubled{samples[0], samples[0], samples[1],
                                       samples[1], samples[2], samples[2]};
    auto g1 = batch_mean_gradient(net, batch);
    auto g2 = batch_mean_gradient(net, doubled);
    CHECK(g1 == g2);  // bit-identical by the pairwise reduction
}

TEST_CASE("train: zero iterations returns an empty log and initialized params") {
    ModelConfig cfg = tiny_config(1, 6);
    Network net(cfg);
    auto samples = synthetic_autoreg(12, 1, 40, 6);
    TrainOptions options;
    options.iterations = 0;
    options.seed = 77;
    TrainLog log = train(net, samples, samples, MetricKind::rmse, options);
    CHECK(log.records.empty());

    Network fresh(cfg);
    Rng rng(77);
    fresh.init_params(rng);
    CHECK(net.params() == fresh.params());
}

TEST_CASE("train: identical seeds give bit-identical logs and parameters") {
    ModelConfig cfg = tiny_config(2, 8);
    auto samples = synthetic_autoreg(13, 2, 80, 8);
    std::vector<LabeledSample> train_set(samples.begin(), samples.begin() + 50);
    std::vector<LabeledSample> test_set(samples.begin() + 50, samples.end());

    TrainOptions options;
    options.iterations = 40;
    options.seed = 5;

    Network a(cfg), b(cfg);
    TrainLog log_a = train(a, train_set, test_set, MetricKind::rmse, options);
    TrainLog log_b = train(b, train_set, test_set, MetricKind::rmse, options);
    CHECK(a.params() == b.params());
    REQUIRE(log_a.records.size() == log_b.records.size());
    for (std::size_t i = 0; i < log_a.records.size(); ++i) {
        CHECK(log_a.records[i].objective == log_b.records[i].objective);
        CHECK(log_a.records[i].test_metric == log_b.records[i].test_metric);
    }
}

TEST_CASE("train: learnable synthetic task improves the test RMSE") {
    ModelConfig cfg = tiny_config(2, 8);
    cfg.feature_maps = 4;
    cfg.patch_len_policy = {1, 2, 4};
    auto samples = synthetic_autoreg(14, 2, 200, 8);
    std::vector<LabeledSample> train_set(samples.begin(), samples.begin() + 130);
    std::vector<LabeledSample> test_set(samples.begin() + 130, samples.end());

    Network net(cfg);
    Rng rng(15);
    net.init_params(rng);
    double initial = evaluate(net, test_set, MetricKind::rmse);

    TrainOptions options;
    options.iterations = 200;
    options.seed = 15;
    TrainLog log = train(net, train_set, test_set, MetricKind::rmse, options);
    double final = log.records.back().test_metric;
    CHECK(final < initial);
    CHECK(log.best_metric <= final);
    CHECK(log.best_iteration >= 1);
}

TEST_CASE("train: objective trends down over the first iterations") {
    ModelConfig cfg = tiny_config(1, 6);
    cfg.feature_maps = 4;
    cfg.patch_len_policy = {1, 2};
    auto samples = synthetic_autoreg(16, 1, 120, 6);

    Network net(cfg);
    TrainOptions options;
    options.iterations = 50;
    options.seed = 16;
    TrainLog log = train(net, samples, {}, MetricKind::rmse, options);
    double early = 0.0, late = 0.0;
    for (int i = 0; i < 10; ++i) early += log.records[i].objective;
    for (int i = 40; i < 50; ++i) late += log.records[i].objective;
    CHECK(late < early);
}

TEST_CASE("train: sgd var approaches the closed-form oracle") {
    auto samples = synthetic_autoreg(17, 2, 400, 4);
    std::vector<LabeledSample> train_set(samples.begin(), samples.begin() + 300);
    std::vector<LabeledSample> test_set(samples.begin() + 300, samples.end());

    VarParams ols = var_fit_ols(train_set, 4);
    VarModel oracle_model(4, 2, 2, Task::autoreg);
    std::vector<double> theta = ols.coeffs;
    theta.insert(theta.end(), ols.bias.begin(), ols.bias.end());
    oracle_model.set_params(theta);
    double ols_rmse = evaluate(oracle_model, test_set, MetricKind::rmse);

    VarModel sgd(4, 2, 2, Task::autoreg);
    TrainOptions options;
    options.iterations = 3000;
    options.seed = 18;
    TrainLog log = train(sgd, train_set, test_set, MetricKind::rmse, options);
    CHECK(log.records.back().test_metric <= ols_rmse * 1.02 + 1e-9);
}

TEST_CASE("grad check: quadratic head-only objective is matched to high accuracy") {
    ModelConfig cfg = tiny_config(1, 4);
    Network net(cfg);
    std::vector<double> theta(net.param_count(), 0.0);
    // weights zero except the head: the objective is exactly quadratic in W_f
    net.set_params(theta);
    net.conv().trace_weights(0, 0) = 0.4;
    net.conv().patch_weights[0](0, 0) = -0.3;

    LabeledSample sample;
    Mat x(1, 4);
    for (int s = 0; s < 4; ++s) x(0, s) = 0.3 + 0.2 * s;
    sample.matrix.values = x;
    sample.matrix.attribute_names = {"attr0"};
    sample.target = std::vector<double>{0.7};

    GradCheckReport report = grad_check(net, sample, 1e-5, 1e-4);
    CHECK(report.passed);
    CHECK(report.checked > 0);
}

TEST_CASE("grad check: corrupted coordinate is pinpointed") {
    ModelConfig cfg = tiny_config(2, 6);
    Network net(cfg);
    Rng rng(19);
    net.init_params(rng);

    auto samples = synthetic_autoreg(20, 2, 30, 6);
    std::vector<double> analytic(net.param_count(), 0.0);
    net.forward_backward(samples[0], analytic);

    // corrupt one patch-form coordinate
    auto segments = net.param_segments();
    const ParamSegment* v_segment = nullptr;
    for (const auto& seg : segments)
        if (seg.name.rfind("V[", 0) == 0) v_segment = &seg;
    REQUIRE(v_segment != nullptr);
    std::size_t corrupted = v_segment->offset + 1;
    analytic[corrupted] += 0.5;

    GradCheckReport report = grad_check_against(net, samples[0], analytic, 1e-5, 1e-4);
    CHECK_FALSE(report.passed);
    CHECK(report.worst_coordinate == corrupted);
    CHECK(report.worst_segment.rfind(v_segment->name, 0) == 0);
}

}  // TEST_SUITE
