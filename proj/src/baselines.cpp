#include "tdc/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "tdc/errors.hpp"

namespace tdc {

VarParams make_var_params(int lag, int attrs, int outputs) {
    if (lag < 1) throw std::invalid_argument("var: lag must be >= 1");
    if (attrs < 1 || outputs < 1) throw std::invalid_argument("var: bad dimensions");
    VarParams params;
    params.lag = lag;
    params.attrs = attrs;
    params.outputs = outputs;
    params.coeffs.assign(static_cast<std::size_t>(lag) * attrs * outputs, 0.0);
    params.bias.assign(static_cast<std::size_t>(outputs), 0.0);
    return params;
}

std::vector<double> var_predict(const Mat& input, const VarParams& params, double sentinel) {
    if (static_cast<int>(input.rows()) != params.attrs)
        throw std::invalid_argument("var_predict: attribute count mismatch");
    if (static_cast<int>(input.cols()) < params.lag)
        throw std::invalid_argument("var_predict: lag exceeds available history");

    std::vector<double> out(static_cast<std::size_t>(params.outputs));
    for (int j = 0; j < params.outputs; ++j) {
        double acc = 0.0;
        for (int tau = 1; tau <= params.lag; ++tau)
            for (int i = 0; i < params.attrs; ++i) {
                double x = input(i, tau - 1);
                if (x == sentinel) x = 0.0;
                acc += x * params.coeff(tau, i, j);
            }
        out[j] = acc - params.bias[j];
    }
    return out;
}

Mat dybm_predict(const Mat& input, const DybmParams& params) {
    if (!(params.lambda >= 0.0 && params.lambda < 1.0))
        throw std::invalid_argument("dybm_predict: lambda must lie in [0, 1)");
    if (input.rows() != params.weights.cols())
        throw std::invalid_argument("dybm_predict: attribute count mismatch");
    const int maps = static_cast<int>(params.weights.rows());
    const int len = static_cast<int>(input.cols());

    Mat out(static_cast<std::size_t>(maps), static_cast<std::size_t>(len));
    for (int k = 0; k < maps; ++k)
        for (int d = 1; d <= len; ++d) {
            double acc = 0.0;
            const double decay = std::pow(params.lambda, d);
            for (std::size_t i = 0; i < input.rows(); ++i)
                acc += input(i, d - 1) * decay * params.weights(k, i);
            out(k, d - 1) = acc - params.biases[k];
        }
    return out;
}

Mat cnn_forward(const Mat& input, const ConvParams& params) {
    const int maps = static_cast<int>(params.patches.size());
    if (maps == 0 || params.biases.size() != params.patches.size())
        throw std::invalid_argument("cnn_forward: malformed parameters");
    const int len = static_cast<int>(input.cols());

    Mat out(static_cast<std::size_t>(maps), static_cast<std::size_t>(len));
    for (int k = 0; k < maps; ++k) {
        const Mat& patch = params.patches[k];
        if (patch.cols() != input.rows())
            throw std::invalid_argument("cnn_forward: attribute count mismatch");
        for (int d = 1; d <= len; ++d) {
            double acc = 0.0;
            for (int tau = 0; tau < static_cast<int>(patch.rows()); ++tau) {
                if (d + tau > len) break;
                for (std::size_t i = 0; i < input.rows(); ++i)
                    acc += patch(tau, i) * input(i, d + tau - 1);
            }
            out(k, d - 1) = acc - params.biases[k];
        }
    }
    return out;
}

namespace {

// Solves A x = b for symmetric positive-definite A via Cholesky, in place.
// Returns false if a non-positive pivot shows up.
bool cholesky_solve(std::vector<double>& a, std::vector<std::vector<double>>& rhs, int n) {
    for (int c = 0; c < n; ++c) {
        double diag = a[static_cast<std::size_t>(c) * n + c];
        for (int r = 0; r < c; ++r) {
            double l = a[static_cast<std::size_t>(c) * n + r];
            diag -= l * l;
        }
        if (diag <= 0.0) return false;
        diag = std::sqrt(diag);
        a[static_cast<std::size_t>(c) * n + c] = diag;
        for (int r = c + 1; r < n; ++r) {
            double v = a[static_cast<std::size_t>(r) * n + c];
            for (int m = 0; m < c; ++m)
                v -= a[static_cast<std::size_t>(r) * n + m] * a[static_cast<std::size_t>(c) * n + m];
            a[static_cast<std::size_t>(r) * n + c] = v / diag;
        }
    }
    for (auto& b : rhs) {
        for (int r = 0; r < n; ++r) {  // forward: L y = b
            double v = b[r];
            for (int m = 0; m < r; ++m) v -= a[static_cast<std::size_t>(r) * n + m] * b[m];
            b[r] = v / a[static_cast<std::size_t>(r) * n + r];
        }
        for (int r = n - 1; r >= 0; --r) {  // backward: L^T x = y
            double v = b[r];
            for (int m = r + 1; m < n; ++m) v -= a[static_cast<std::size_t>(m) * n + r] * b[m];
            b[r] = v / a[static_cast<std::size_t>(r) * n + r];
        }
    }
    return true;
}

}  // namespace

VarParams var_fit_ols(std::span<const LabeledSample> samples, int lag) {
    if (samples.empty()) throw DataError("var_fit_ols: no samples");
    const int attrs = static_cast<int>(samples.front().matrix.attrs());
    const int outputs = static_cast<int>(samples.front().target_vector().size());
    const int cols = lag * attrs + 1;  // regressors plus the (negated) bias column

    // Normal equations: gram = X^T X, rhs = X^T y per output.
    std::vector<double> gram(static_cast<std::size_t>(cols) * cols, 0.0);
    std::vector<std::vector<double>> rhs(static_cast<std::size_t>(outputs),
                                         std::vector<double>(static_cast<std::size_t>(cols), 0.0));
    std::vector<double> row(static_cast<std::size_t>(cols));
    const double sentinel = samples.front().matrix.sentinel;

    for (const LabeledSample& sample : samples) {
        if (static_cast<int>(sample.matrix.len()) < lag)
            throw DataError("var_fit_ols: lag exceeds sample history");
        for (int tau = 1; tau <= lag; ++tau)
            for (int i = 0; i < attrs; ++i) {
                double x = sample.matrix.values(i, tau - 1);
                row[static_cast<std::size_t>(tau - 1) * attrs + i] = (x == sentinel) ? 0.0 : x;
            }
        row[static_cast<std::size_t>(cols) - 1] = -1.0;
        for (int r = 0; r < cols; ++r) {
            for (int c = r; c < cols; ++c)
                gram[static_cast<std::size_t>(r) * cols + c] += row[r] * row[c];
            const auto& y = sample.target_vector();
            for (int j = 0; j < outputs; ++j) rhs[j][r] += row[r] * y[j];
        }
    }
    for (int r = 0; r < cols; ++r)
        for (int c = 0; c < r; ++c)
            gram[static_cast<std::size_t>(r) * cols + c] = gram[static_cast<std::size_t>(c) * cols + r];

    std::vector<double> factor = gram;
    auto solution = rhs;
    if (!cholesky_solve(factor, solution, cols)) {
        // rank-deficient design: tiny ridge keeps the system determined
        factor = gram;
        for (int r = 0; r < cols; ++r) factor[static_cast<std::size_t>(r) * cols + r] += 1e-8;
        solution = rhs;
        if (!cholesky_solve(factor, solution, cols))
            throw NumericError("var_fit_ols: normal equations unsolvable even with ridge");
    }

    VarParams params = make_var_params(lag, attrs, outputs);
    for (int j = 0; j < outputs; ++j) {
        for (int tau = 1; tau <= lag; ++tau)
            for (int i = 0; i < attrs; ++i)
                params.coeff(tau, i, j) = solution[j][static_cast<std::size_t>(tau - 1) * attrs + i];
        params.bias[j] = solution[j][static_cast<std::size_t>(cols) - 1];
    }
    return params;
}

}  // namespace tdc
