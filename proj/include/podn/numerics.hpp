#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "podn/matrix.hpp"

namespace podn {

/// Row-wise softmax with max-subtraction; every output row sums to 1.
Matrix softmax_rows(const Matrix& m);

struct CrossEntropyResult {
    double loss = 0.0;
    Matrix grad_logits;  // (probs - onehot) / S, the gradient w.r.t. pre-softmax logits
};

/// Mean negative log-likelihood of the labelled entries of a row-stochastic
/// matrix. `probs` must come out of softmax_rows (rows are distributions).
CrossEntropyResult cross_entropy_mean(const Matrix& probs, const std::vector<int>& labels);

/// Stochastic gradient descent with classic momentum:
///   v <- momentum * v - lr * scale * g
///   p <- p + v
/// One velocity buffer per parameter tensor, lazily shaped on the first step.
/// per-tensor lr scales default to 1.0 and carry the allometry mechanism.
class SgdMomentum {
public:
    SgdMomentum(double learning_rate, double momentum = 0.9);

    double learning_rate() const { return learning_rate_; }
    double momentum() const { return momentum_; }

    /// Scale for tensor `index` (sparse; unset tensors stay at 1.0).
    void set_lr_scale(std::size_t index, double scale);
    double lr_scale(std::size_t index) const;

    void step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads);

private:
    double learning_rate_;
    double momentum_;
    std::vector<Matrix> velocity_;
    std::vector<double> lr_scale_;
};

/// Central-difference gradient (L(x+h) - L(x-h)) / (2h), one coordinate at a
/// time. Test oracle; loss_fn must be deterministic.
std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& loss_fn,
                                     std::vector<double> point, double h);

/// Independent sub-seed for a salted purpose (splitmix64 mix), so one master
/// seed drives dataset, split, init, shuffle and stream RNGs reproducibly.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt);

}  // namespace podn
