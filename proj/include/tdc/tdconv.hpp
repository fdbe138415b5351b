#ifndef TDC_TDCONV_HPP
#define TDC_TDCONV_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tdc/mat.hpp"
#include "tdc/rng.hpp"

namespace tdc {

/// Marker in a patch-length policy meaning "the full input length".
inline constexpr int kFullLength = -1;

/// The two parameterizations of the convolutional weight tensor:
///  - trace:  W[d, tau] = lambda^(d + tau) * U[i]       one weight per
///            attribute, replicated across time like an eligibility trace
///  - patch:  W[d, tau] = mu^d * V[tau, i]              individual weights
///            per in-patch offset, decayed together with lag d
enum class PatchForm : std::uint8_t { trace, patch };

/// Parameters of the time-discounting convolution layer. Patch k covers
/// in-patch offsets tau = 0..patch_lens[k]; trace patches store one weight
/// row of U, patch-form patches store a (T_k + 1) x D weight block of V.
struct TdConvParams {
    std::vector<PatchForm> forms;   // size K
    std::vector<int> patch_lens;    // size K, resolved lengths (>= 0)
    std::vector<int> form_ordinal;  // size K: row index within its form's storage
    double lambda = 0.85;           // trace decay, in [0, 1]
    double mu = 0.85;               // patch decay, in [0, 1]
    int attrs = 0;                  // D

    Mat trace_weights;              // K_u x D
    std::vector<Mat> patch_weights; // K_v blocks of (T_k + 1) x D
    std::vector<double> biases;     // K

    int feature_maps() const { return static_cast<int>(forms.size()); }
    int trace_count() const { return static_cast<int>(trace_weights.rows()); }
    int patch_count() const { return static_cast<int>(patch_weights.size()); }
    std::size_t weight_count() const;
};

/// Gradients shaped like the corresponding parameter arrays.
struct TdConvGrads {
    Mat trace_weights;
    std::vector<Mat> patch_weights;
    std::vector<double> biases;
};

/// Builds a parameter set whose K patches split between the two forms in
/// equal proportion (|K_u - K_v| <= 1; the first ceil(K/2) patches are trace
/// form) and cycle through `len_policy` for their patch lengths, with
/// kFullLength resolving to `input_len`. Weights start at zero.
TdConvParams make_params(int attrs, int feature_maps, double lambda, double mu,
                         const std::vector<int>& len_policy, int input_len);

/// Explicit per-patch form and length assignment; used for the single-form
/// reductions (all-trace, all-patch) and by tests.
TdConvParams make_custom_params(int attrs, const std::vector<PatchForm>& forms,
                                const std::vector<int>& patch_lens, double lambda, double mu);

/// Uniform init in [-s, s] with s = 1 / sqrt(D * (T_k + 1)) per patch;
/// biases stay zero. Draw order: patches in k order, weights in storage order.
void init_params(TdConvParams& params, Rng& rng);

/// Forward pass over a dense D x T' input (lag convention: column s = lag
/// s + 1). Produces the K x T' pre-activation feature map
///   trace:  g[k, d] = sum_i U[k, i] * sum_tau lambda^(d + tau) * x_i[d + tau] - b_k
///   patch:  g[k, d] = mu^d * sum_i sum_tau V[k, tau, i] * x_i[d + tau] - b_k
/// with lags beyond T' contributing zero.
Mat forward(const Mat& input, const TdConvParams& params);

/// Analytic parameter gradients for upstream dL/dg of shape K x T':
///   dU[k, i]      = sum_d up[k, d] * sum_tau lambda^(d + tau) * x_i[d + tau]
///   dV[k, tau, i] = sum_d up[k, d] * mu^d * x_i[d + tau]
///   db[k]         = -sum_d up[k, d]
TdConvGrads grad_weights(const Mat& input, const TdConvParams& params, const Mat& upstream);

/// Accumulating variant used by the training loop.
void accumulate_grad_weights(const Mat& input, const TdConvParams& params, const Mat& upstream,
                             TdConvGrads& grads);

TdConvGrads zero_grads(const TdConvParams& params);

/// The DyBM prediction model is the T_k = 0 special case of this layer;
/// returns a copy with every patch truncated to a single tap.
TdConvParams reduce_to_dybm(const TdConvParams& params);

/// Bit-exact binary round-trip of the full parameter set.
void save_params(std::ostream& out, const TdConvParams& params);
TdConvParams load_params(std::istream& in);

}  // namespace tdc

#endif
