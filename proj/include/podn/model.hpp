#pragma once

#include <cstdint>
#include <vector>

#include "podn/matrix.hpp"

namespace podn {

struct ModelConfig {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_dims;
    std::size_t initial_categories = 0;  // N
    std::uint64_t seed = 0;
};

struct DenseLayer {
    Matrix weights;  // in x out
    Matrix bias;     // 1 x out
};

/// Activations cached by forward_trace for the backward pass.
struct ForwardTrace {
    Matrix input;
    std::vector<Matrix> pre_acts;  // one per hidden layer
    std::vector<Matrix> acts;      // rectified pre_acts
    Matrix logits;                 // S x N
};

/// Parameter gradients aligned with ExpandableNet::parameters() order,
/// plus the gradient w.r.t. the input batch.
struct NetGradients {
    std::vector<Matrix> tensors;
    Matrix input_grad;
};

/// Feed-forward feature extractor whose head has one output column per known
/// category, so the output logits are N-dimensional. The head is stored as
/// one weight tensor per category (columns of the hidden_last x N matrix),
/// which makes output expansion append-only and lets the optimizer address a
/// single category's weights by tensor index.
class ExpandableNet {
public:
    explicit ExpandableNet(const ModelConfig& config);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t category_count() const { return head_columns_.size(); }
    std::size_t hidden_output_dim() const;  // dimension feeding the head
    const std::vector<DenseLayer>& hidden_layers() const { return hidden_; }
    const std::vector<Matrix>& head_columns() const { return head_columns_; }
    const Matrix& head_bias() const { return head_bias_; }

    Matrix forward(const Matrix& batch) const;
    ForwardTrace forward_trace(const Matrix& batch) const;

    /// Upstream is dLoss/dlogits (S x N). Callers with several loss paths into
    /// the logits sum their upstreams first; backward is linear in upstream.
    NetGradients backward(const ForwardTrace& trace, const Matrix& upstream) const;

    /// Appends one head column (and its bias). Existing logits are preserved
    /// bit-identically for any input.
    void expand_output_dim(const std::vector<double>& init_column, double init_bias);

    /// Row-argmax of forward(batch); ties break to the lowest index.
    std::vector<int> predict(const Matrix& batch) const;

    /// Mutable views of every parameter tensor, in a fixed order:
    /// hidden W0, b0, W1, b1, ..., head column 0..N-1, head bias.
    std::vector<Matrix*> parameters();
    std::vector<const Matrix*> parameters() const;

    /// Index into parameters() of head column `category`.
    std::size_t head_column_param_index(std::size_t category) const;

    NetGradients zero_gradients() const;

private:
    std::size_t input_dim_;
    std::vector<DenseLayer> hidden_;
    std::vector<Matrix> head_columns_;  // each hidden_last x 1
    Matrix head_bias_;                  // 1 x N
};

}  // namespace podn
