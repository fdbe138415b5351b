#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tdc/rng.hpp"
#include "tdc/tdconv.hpp"

using namespace tdc;

namespace {

TdConvParams random_params(Rng& rng, int attrs, int feature_maps, int input_len,
                           double lambda, double mu) {
    TdConvParams p = make_params(attrs, feature_maps, lambda, mu, {1, 2, 4, kFullLength},
                                 input_len);
    init_params(p, rng);
    for (std::size_t k = 0; k < p.biases.size(); ++k) p.biases[k] = rng.uniform(-0.5, 0.5);
    return p;
}

double weighted_sum(const Mat& g, const Mat& upstream) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g.data()[i] * upstream.data()[i];
    return acc;
}

}  // namespace

TEST_SUITE("tdconv") {

TEST_CASE("make_params splits forms evenly and cycles patch lengths") {
    TdConvParams p = make_params(3, 8, 0.9, 0.8, {1, 2, 4, kFullLength}, 50);
    CHECK(p.trace_count() == 4);
    CHECK(p.patch_count() == 4);
    CHECK(p.patch_lens == std::vector<int>{1, 2, 4, 50, 1, 2, 4, 50});
    for (int k = 0; k < 4; ++k) CHECK(p.forms[k] == PatchForm::trace);
    for (int k = 4; k < 8; ++k) CHECK(p.forms[k] == PatchForm::patch);

    TdConvParams odd = make_params(2, 5, 0.9, 0.8, {1, 2}, 10);
    CHECK(odd.trace_count() == 3);
    CHECK(odd.patch_count() == 2);
}

TEST_CASE("trace spike: hand-evaluated decay") {
    // single attribute, U = 1, b = 0, lambda = 0.5, T_k = 1, spike of 1 at lag 2
    TdConvParams p = make_custom_params(1, {PatchForm::trace}, {1}, 0.5, 0.5);
    p.trace_weights(0, 0) = 1.0;
    Mat x(1, 4, 0.0);
    x(0, 1) = 1.0;  // lag 2
    Mat g = forward(x, p);
    CHECK(g(0, 0) == doctest::Approx(0.25).epsilon(1e-15));  // d=1: lambda^2 * 1
    CHECK(g(0, 1) == doctest::Approx(0.25).epsilon(1e-15));  // d=2: lambda^2 * 1
    CHECK(g(0, 2) == 0.0);
    CHECK(g(0, 3) == 0.0);
}

TEST_CASE("zero decay annihilates the trace form") {
    TdConvParams p = make_custom_params(2, {PatchForm::trace}, {3}, 0.0, 0.0);
    p.trace_weights(0, 0) = 2.0;
    p.trace_weights(0, 1) = -1.0;
    p.biases[0] = 0.75;
    Rng rng(3);
    Mat x = oracle::random_mat(rng, 2, 6);
    Mat g = forward(x, p);
    for (std::size_t d = 0; d < 6; ++d) CHECK(g(0, d) == -0.75);
}

TEST_CASE("patch form with mu=1 and T_k=0 is a plain lag-wise map") {
    TdConvParams p = make_custom_params(2, {PatchForm::patch}, {0}, 0.5, 1.0);
    p.patch_weights[0](0, 0) = 1.5;
    p.patch_weights[0](0, 1) = -2.0;
    p.biases[0] = 0.25;
    Rng rng(4);
    Mat x = oracle::random_mat(rng, 2, 5);
    Mat g = forward(x, p);
    for (std::size_t d = 0; d < 5; ++d)
        CHECK(g(0, d) == doctest::Approx(1.5 * x(0, d) - 2.0 * x(1, d) - 0.25).epsilon(1e-15));
}

TEST_CASE("forward matches the brute-force oracle") {
    Rng rng(20240812);
    for (int trial = 0; trial < 50; ++trial) {
        int attrs = rng.uniform_int(1, 3);
        int len = rng.uniform_int(2, 12);
        TdConvParams p = random_params(rng, attrs, rng.uniform_int(1, 2) * 2, len,
                                       rng.uniform(0.0, 0.95), rng.uniform(0.0, 1.0));
        Mat x = oracle::random_mat(rng, attrs, len);
        Mat ours = forward(x, p);
        Mat theirs = oracle::conv_forward(x, p);
        REQUIRE(ours.same_shape(theirs));
        for (std::size_t i = 0; i < ours.size(); ++i)
            CHECK(ours.data()[i] == doctest::Approx(theirs.data()[i]).epsilon(1e-12));
    }
}

TEST_CASE("zero upstream gives zero gradients") {
    Rng rng(5);
    TdConvParams p = random_params(rng, 2, 4, 8, 0.9, 0.8);
    Mat x = oracle::random_mat(rng, 2, 8);
    Mat upstream(4, 8, 0.0);
    TdConvGrads grads = grad_weights(x, p, upstream);
    for (double v : grads.trace_weights.storage()) CHECK(v == 0.0);
    for (const Mat& block : grads.patch_weights)
        for (double v : block.storage()) CHECK(v == 0.0);
    for (double v : grads.biases) CHECK(v == 0.0);
}

TEST_CASE("bias gradient is the negated upstream sum") {
    Rng rng(6);
    TdConvParams p = random_params(rng, 1, 2, 3, 0.9, 0.9);
    Mat x = oracle::random_mat(rng, 1, 3);
    Mat upstream(2, 3, 1.0);
    TdConvGrads grads = grad_weights(x, p, upstream);
    CHECK(grads.biases[0] == -3.0);
    CHECK(grads.biases[1] == -3.0);
}

TEST_CASE("analytic gradients match central differences") {
    // the feature map is linear in every weight, so differences are exact up
    // to rounding
    Rng rng(20240813);
    int failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int attrs = rng.uniform_int(1, 2);
        int len = rng.uniform_int(3, 8);
        TdConvParams p = random_params(rng, attrs, 2, len, rng.uniform(0.1, 0.95),
                                       rng.uniform(0.1, 0.95));
        Mat x = oracle::random_mat(rng, attrs, len);
        Mat upstream = oracle::random_mat(rng, 2, len);
        TdConvGrads grads = grad_weights(x, p, upstream);

        const double h = 1e-5;
        auto fd = [&](double* coord, double analytic) {
            double saved = *coord;
            *coord = saved + h;
            double plus = weighted_sum(forward(x, p), upstream);
            *coord = saved - h;
            double minus = weighted_sum(forward(x, p), upstream);
            *coord = saved;
            double numeric = (plus - minus) / (2 * h);
            double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
            if (std::abs(analytic - numeric) / denom > 1e-5) ++failures;
        };
        for (std::size_t i = 0; i < p.trace_weights.size(); ++i)
            fd(p.trace_weights.data() + i, grads.trace_weights.data()[i]);
        for (std::size_t b = 0; b < p.patch_weights.size(); ++b)
            for (std::size_t i = 0; i < p.patch_weights[b].size(); ++i)
                fd(p.patch_weights[b].data() + i, grads.patch_weights[b].data()[i]);
        for (std::size_t k = 0; k < p.biases.size(); ++k)
            fd(&p.biases[k], grads.biases[k]);
    }
    CHECK(failures == 0);
}

TEST_CASE("forward is linear in the input and the weights") {
    Rng rng(11);
    TdConvParams p = random_params(rng, 2, 4, 6, 0.8, 0.7);
    for (double& b : p.biases) b = 0.0;
    Mat x = oracle::random_mat(rng, 2, 6);
    Mat g1 = forward(x, p);

    Mat x2 = x;
    for (double& v : x2.storage()) v *= 3.0;
    Mat g3 = forward(x2, p);
    for (std::size_t i = 0; i < g1.size(); ++i)
        CHECK(g3.data()[i] == doctest::Approx(3.0 * g1.data()[i]).epsilon(1e-12));

    for (double& v : p.trace_weights.storage()) v *= 2.0;
    for (Mat& block : p.patch_weights)
        for (double& v : block.storage()) v *= 2.0;
    Mat g2 = forward(x, p);
    for (std::size_t i = 0; i < g1.size(); ++i)
        CHECK(g2.data()[i] == doctest::Approx(2.0 * g1.data()[i]).epsilon(1e-12));
}

TEST_CASE("decay bound: doubling the horizon changes nothing materially") {
    Rng rng(12);
    const int len = 40;
    TdConvParams p = make_custom_params(2, {PatchForm::trace, PatchForm::trace}, {2, 5},
                                        0.85, 0.85);
    init_params(p, rng);
    Mat x = oracle::random_mat(rng, 2, 2 * len);
    Mat x_short(2, len);
    for (std::size_t i = 0; i < 2; ++i)
        for (int s = 0; s < len; ++s) x_short(i, s) = x(i, s);

    Mat g_long = forward(x, p);
    Mat g_short = forward(x_short, p);

    double bound = 0.0;  // B * sum|U| * lambda^len / (1 - lambda)
    for (double v : p.trace_weights.storage()) bound += std::abs(v);
    bound *= std::pow(0.85, len) / (1.0 - 0.85);
    for (std::size_t k = 0; k < 2; ++k)
        for (int d = 0; d < len; ++d)
            CHECK(std::abs(g_long(k, d) - g_short(k, d)) <= bound + 1e-15);
}

TEST_CASE("shift covariance of the undecayed patch form") {
    Rng rng(13);
    const int len = 20;
    TdConvParams p = make_custom_params(1, {PatchForm::patch}, {3}, 0.9, 1.0);
    init_params(p, rng);
    Mat x(1, len, 0.0);
    for (int s = 5; s < 10; ++s) x(0, s) = rng.uniform(-1, 1);

    Mat shifted(1, len, 0.0);
    const int delta = 4;
    for (int s = 0; s < len - delta; ++s) shifted(0, s + delta) = x(0, s);

    Mat g = forward(x, p);
    Mat g_shifted = forward(shifted, p);
    for (int d = 1; d + delta <= len - 3; ++d)
        CHECK(g_shifted(0, d + delta - 1) == doctest::Approx(g(0, d - 1)).epsilon(1e-12));
}

TEST_CASE("reduce_to_dybm truncates every patch to one tap") {
    Rng rng(14);
    TdConvParams p = random_params(rng, 2, 4, 10, 0.9, 0.9);
    TdConvParams reduced = reduce_to_dybm(p);
    for (int len : reduced.patch_lens) CHECK(len == 0);
    for (const Mat& block : reduced.patch_weights) CHECK(block.rows() == 1);

    // single-tap feature map: g[k,d] = lambda^d * U x[d] - b (trace rows)
    Mat x = oracle::random_mat(rng, 2, 10);
    Mat g = forward(x, reduced);
    for (int d = 1; d <= 10; ++d) {
        double expect = 0.0;
        for (int i = 0; i < 2; ++i)
            expect += std::pow(0.9, d) * reduced.trace_weights(0, i) * x(i, d - 1);
        expect -= reduced.biases[0];
        CHECK(g(0, d - 1) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("parameters round-trip bit-exactly") {
    Rng rng(15);
    TdConvParams p = random_params(rng, 3, 5, 12, 0.875, 0.625);
    std::stringstream buffer;
    save_params(buffer, p);
    TdConvParams q = load_params(buffer);
    CHECK(q.forms == p.forms);
    CHECK(q.patch_lens == p.patch_lens);
    CHECK(q.lambda == p.lambda);
    CHECK(q.mu == p.mu);
    CHECK(q.trace_weights == p.trace_weights);
    CHECK(q.patch_weights.size() == p.patch_weights.size());
    for (std::size_t i = 0; i < p.patch_weights.size(); ++i)
        CHECK(q.patch_weights[i] == p.patch_weights[i]);
    CHECK(q.biases == p.biases);
}

TEST_CASE("rejects out-of-range decay") {
    CHECK_THROWS_AS(make_custom_params(1, {PatchForm::trace}, {1}, 1.5, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_custom_params(1, {PatchForm::trace}, {1}, 0.5, -0.1),
                    std::invalid_argument);
}

}  // TEST_SUITE
