#ifndef TDC_PREDICTOR_HPP
#define TDC_PREDICTOR_HPP

#include <span>
#include <string>
#include <vector>

#include "tdc/rng.hpp"
#include "tdc/seqdata.hpp"

namespace tdc {

enum class Task : std::uint8_t { autoreg, classify };

/// Named slice of the flat parameter vector, for diagnostics.
struct ParamSegment {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
};

/// Anything the training loop can optimize: parameters live in one flat
/// vector with a stable layout; per-sample forward/backward is const so batch
/// members are independent.
class Predictor {
public:
    virtual ~Predictor() = default;

    virtual Task task() const = 0;
    virtual std::size_t param_count() const = 0;
    virtual std::vector<double> params() const = 0;
    virtual void set_params(std::span<const double> theta) = 0;
    virtual void init_params(Rng& rng) = 0;
    virtual std::vector<ParamSegment> param_segments() const = 0;

    /// Task output: raw predictions for autoregression, class probabilities
    /// for classification.
    virtual std::vector<double> predict(const SequenceMatrix& input) const = 0;

    /// Per-sample regularized objective. When `kink_signature` is non-null it
    /// receives an encoding of the discrete forward structure (pooling argmax
    /// choices, ReLU/L1 signs) so finite-difference checks can detect tie
    /// crossings.
    virtual double objective(const LabeledSample& sample, std::string* kink_signature = nullptr) const = 0;

    /// Computes the objective and accumulates its parameter gradient into
    /// `grad` (same layout as params(), caller zeroes it).
    virtual double forward_backward(const LabeledSample& sample, std::span<double> grad) const = 0;
};

}  // namespace tdc

#endif
