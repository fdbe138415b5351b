#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tdc/baselines.hpp"
#include "tdc/rng.hpp"
#include "tdc/synth.hpp"

using namespace tdc;

namespace {

// random autoregression samples drawn from a synthetic VAR series
std::vector<LabeledSample> var_samples(std::uint64_t seed, int attrs, int steps, int history) {
    VarSynthConfig cfg;
    cfg.attrs = attrs;
    cfg.steps = steps;
    cfg.seed = seed;
    cfg.noise_sd = 0.0;
    VarSynthResult synth = make_var_series(cfg);
    return window_samples(synth.series, synth.attributes, history);
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("var_predict: persistence with an identity lag-1 coefficient") {
    VarParams p = make_var_params(1, 2, 2);
    p.coeff(1, 0, 0) = 1.0;
    p.coeff(1, 1, 1) = 1.0;
    Mat x(2, 3);
    x(0, 0) = 4.0;
    x(1, 0) = -2.0;
    auto out = var_predict(x, p);
    CHECK(out[0] == 4.0);
    CHECK(out[1] == -2.0);
}

TEST_CASE("var_predict: all-zero coefficients give the negated bias") {
    VarParams p = make_var_params(2, 1, 3);
    p.uniform_bias(0.5);
    Mat x(1, 2, 1.0);
    for (double v : var_predict(x, p)) CHECK(v == -0.5);
}

TEST_CASE("var_predict: matches direct summation on random instances") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        int lag = rng.uniform_int(1, 6);
        int attrs = rng.uniform_int(1, 3);
        int outputs = rng.uniform_int(1, 3);
        VarParams p = make_var_params(lag, attrs, outputs);
        for (double& v : p.coeffs) v = rng.uniform(-1, 1);
        for (double& v : p.bias) v = rng.uniform(-1, 1);
        Mat x = oracle::random_mat(rng, attrs, lag + rng.uniform_int(0, 3));

        auto out = var_predict(x, p);
        for (int j = 0; j < outputs; ++j) {
            double expect = -p.bias[j];
            for (int tau = 1; tau <= lag; ++tau)
                for (int i = 0; i < attrs; ++i) expect += x(i, tau - 1) * p.coeff(tau, i, j);
            CHECK(out[j] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("var_predict: lag beyond history is rejected") {
    VarParams p = make_var_params(5, 1, 1);
    Mat x(1, 3, 0.0);
    CHECK_THROWS_AS(var_predict(x, p), std::invalid_argument);
}

TEST_CASE("dybm_predict equals the T_k=0 trace reduction exactly") {
    Rng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        int attrs = rng.uniform_int(1, 3);
        int maps = rng.uniform_int(1, 4);
        int len = rng.uniform_int(1, 12);
        double lambda = rng.uniform(0.0, 0.99);

        std::vector<PatchForm> forms(maps, PatchForm::trace);
        std::vector<int> lens(maps, 0);
        TdConvParams conv = make_custom_params(attrs, forms, lens, lambda, lambda);
        DybmParams dybm;
        dybm.lambda = lambda;
        dybm.weights = Mat(maps, attrs);
        dybm.biases.assign(maps, 0.0);
        for (int k = 0; k < maps; ++k) {
            dybm.biases[k] = rng.uniform(-1, 1);
            conv.biases[k] = dybm.biases[k];
            for (int i = 0; i < attrs; ++i) {
                double w = rng.uniform(-1, 1);
                dybm.weights(k, i) = w;
                conv.trace_weights(k, i) = w;
            }
        }
        Mat x = oracle::random_mat(rng, attrs, len);
        Mat a = forward(x, conv);
        Mat b = dybm_predict(x, dybm);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(std::abs(a.data()[i] - b.data()[i]) <= 1e-12);
    }
}

TEST_CASE("dybm_predict: lambda=0 collapses to the negated bias") {
    DybmParams p;
    p.lambda = 0.0;
    p.weights = Mat(2, 1, 1.0);
    p.biases = {0.5, -0.25};
    Mat x(1, 4, 3.0);
    Mat out = dybm_predict(x, p);
    for (std::size_t d = 0; d < 4; ++d) {
        CHECK(out(0, d) == -0.5);
        CHECK(out(1, d) == 0.25);
    }
}

TEST_CASE("cnn_forward equals the mu=1 patch reduction exactly") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        int attrs = rng.uniform_int(1, 3);
        int maps = rng.uniform_int(1, 3);
        int len = rng.uniform_int(2, 12);

        std::vector<PatchForm> forms(maps, PatchForm::patch);
        std::vector<int> lens;
        for (int k = 0; k < maps; ++k) lens.push_back(rng.uniform_int(0, 4));
        TdConvParams conv = make_custom_params(attrs, forms, lens, 0.5, 1.0);
        ConvParams cnn;
        for (int k = 0; k < maps; ++k) {
            Mat patch(static_cast<std::size_t>(lens[k]) + 1, attrs);
            for (std::size_t r = 0; r < patch.rows(); ++r)
                for (int i = 0; i < attrs; ++i) {
                    double w = rng.uniform(-1, 1);
                    patch(r, i) = w;
                    conv.patch_weights[k](r, i) = w;
                }
            cnn.patches.push_back(std::move(patch));
            cnn.biases.push_back(rng.uniform(-1, 1));
            conv.biases[k] = cnn.biases[k];
        }
        Mat x = oracle::random_mat(rng, attrs, len);
        Mat a = forward(x, conv);
        Mat b = cnn_forward(x, cnn);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(std::abs(a.data()[i] - b.data()[i]) <= 1e-12);
    }
}

TEST_CASE("cnn_forward: single-tap identity patch") {
    ConvParams p;
    p.patches.push_back(Mat(1, 1, 1.0));
    p.biases.push_back(0.25);
    Mat x(1, 5);
    for (int s = 0; s < 5; ++s) x(0, s) = s;
    Mat out = cnn_forward(x, p);
    for (int s = 0; s < 5; ++s) CHECK(out(0, s) == s - 0.25);
}

TEST_CASE("ols: recovers a noiseless VAR exactly") {
    auto samples = var_samples(31, 2, 60, 1);
    VarSynthConfig cfg;
    cfg.attrs = 2;
    cfg.steps = 60;
    cfg.seed = 31;
    cfg.noise_sd = 0.0;
    VarSynthResult truth = make_var_series(cfg);

    VarParams fitted = var_fit_ols(samples, 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(fitted.coeff(1, i, j) ==
                  doctest::Approx(truth.coeffs[0](j, i)).scale(1).epsilon(1e-8));
    for (double b : fitted.bias) CHECK(std::abs(b) < 1e-8);
}

TEST_CASE("ols: exactly collinear attributes take the ridge fallback") {
    // attribute 1 duplicates attribute 0, so the normal equations are singular
    Mat series(2, 40);
    series(0, 0) = 1.0;
    series(0, 1) = 0.5;
    for (int t = 2; t < 40; ++t)
        series(0, t) = 0.8 * series(0, t - 1) - 0.2 * series(0, t - 2);
    for (int t = 0; t < 40; ++t) series(1, t) = series(0, t);

    auto samples = window_samples(series, {"a", "a_copy"}, 2);
    VarParams fitted = var_fit_ols(samples, 2);
    for (const LabeledSample& s : samples) {
        auto out = var_predict(s.matrix.values, fitted);
        CHECK(out[0] == doctest::Approx(s.target_vector()[0]).scale(1).epsilon(1e-5));
    }
}

TEST_CASE("ols: constant series reproduces the constant") {
    Mat series(1, 30, 2.5);
    auto samples = window_samples(series, {"x"}, 1);
    VarParams fitted = var_fit_ols(samples, 1);
    Mat x(1, 1, 2.5);
    CHECK(var_predict(x, fitted)[0] == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("ols: a single determined sample interpolates exactly") {
    LabeledSample sample;
    sample.matrix.attribute_names = {"x"};
    sample.matrix.values = Mat(1, 1, 2.0);
    sample.target = std::vector<double>{6.0};
    VarParams fitted = var_fit_ols(std::vector<LabeledSample>{sample}, 1);
    CHECK(var_predict(sample.matrix.values, fitted)[0] == doctest::Approx(6.0).epsilon(1e-8));
}

}  // TEST_SUITE
