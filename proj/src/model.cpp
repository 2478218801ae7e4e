#include "podn/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace podn {

namespace {

void glorot_fill(Matrix& m, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    for (double& v : m.data()) {
        v = dist(rng);
    }
}

}  // namespace

ExpandableNet::ExpandableNet(const ModelConfig& config) : input_dim_(config.input_dim) {
    if (config.input_dim < 1) {
        throw std::runtime_error("ExpandableNet: input_dim must be >= 1");
    }
    if (config.initial_categories < 2) {
        throw std::runtime_error("ExpandableNet: initial_categories must be >= 2, got " +
                                 std::to_string(config.initial_categories));
    }
    for (std::size_t d : config.hidden_dims) {
        if (d < 1) {
            throw std::runtime_error("ExpandableNet: hidden dims must be >= 1");
        }
    }

    std::mt19937_64 rng(config.seed);
    std::size_t in_dim = config.input_dim;
    for (std::size_t out_dim : config.hidden_dims) {
        DenseLayer layer;
        layer.weights = Matrix(in_dim, out_dim);
        layer.bias = Matrix(1, out_dim, 0.0);
        glorot_fill(layer.weights, in_dim, out_dim, rng);
        hidden_.push_back(std::move(layer));
        in_dim = out_dim;
    }

    const std::size_t n = config.initial_categories;
    head_bias_ = Matrix(1, n, 0.0);
    head_columns_.reserve(n);
    for (std::size_t c = 0; c < n; ++c) {
        Matrix col(in_dim, 1);
        glorot_fill(col, in_dim, n, rng);
        head_columns_.push_back(std::move(col));
    }
}

std::size_t ExpandableNet::hidden_output_dim() const {
    return hidden_.empty() ? input_dim_ : hidden_.back().bias.cols();
}

ForwardTrace ExpandableNet::forward_trace(const Matrix& batch) const {
    if (batch.cols() != input_dim_) {
        throw std::runtime_error("ExpandableNet::forward: batch has " + std::to_string(batch.cols()) +
                                 " features, model expects " + std::to_string(input_dim_));
    }
    ForwardTrace trace;
    trace.input = batch;
    const Matrix* current = &trace.input;
    for (const DenseLayer& layer : hidden_) {
        Matrix z = matmul(*current, layer.weights);
        for (std::size_t i = 0; i < z.rows(); ++i) {
            for (std::size_t j = 0; j < z.cols(); ++j) {
                z(i, j) += layer.bias(0, j);
            }
        }
        Matrix h = z;
        for (double& v : h.data()) {
            v = v > 0.0 ? v : 0.0;
        }
        trace.pre_acts.push_back(std::move(z));
        trace.acts.push_back(std::move(h));
        current = &trace.acts.back();
    }

    const Matrix& features = *current;
    const std::size_t n = head_columns_.size();
    trace.logits = Matrix(batch.rows(), n);
    for (std::size_t c = 0; c < n; ++c) {
        const Matrix& col = head_columns_[c];
        for (std::size_t i = 0; i < features.rows(); ++i) {
            double sum = 0.0;
            for (std::size_t k = 0; k < features.cols(); ++k) {
                sum += features(i, k) * col(k, 0);
            }
            trace.logits(i, c) = sum + head_bias_(0, c);
        }
    }
    return trace;
}

Matrix ExpandableNet::forward(const Matrix& batch) const {
    return forward_trace(batch).logits;
}

NetGradients ExpandableNet::backward(const ForwardTrace& trace, const Matrix& upstream) const {
    const std::size_t n = head_columns_.size();
    if (upstream.rows() != trace.logits.rows() || upstream.cols() != n) {
        throw std::runtime_error("ExpandableNet::backward: upstream is " + upstream.shape_str() +
                                 ", expected " + trace.logits.shape_str());
    }

    NetGradients grads = zero_gradients();
    const Matrix& features = hidden_.empty() ? trace.input : trace.acts.back();

    const std::size_t bias_idx = grads.tensors.size() - 1;
    Matrix& grad_bias = grads.tensors[bias_idx];
    Matrix dh(features.rows(), features.cols(), 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        const Matrix& col = head_columns_[c];
        Matrix& grad_col = grads.tensors[head_column_param_index(c)];
        for (std::size_t i = 0; i < features.rows(); ++i) {
            const double u = upstream(i, c);
            grad_bias(0, c) += u;
            for (std::size_t k = 0; k < features.cols(); ++k) {
                grad_col(k, 0) += features(i, k) * u;
                dh(i, k) += u * col(k, 0);
            }
        }
    }

    for (std::size_t l = hidden_.size(); l-- > 0;) {
        const DenseLayer& layer = hidden_[l];
        const Matrix& z = trace.pre_acts[l];
        const Matrix& h_prev = (l == 0) ? trace.input : trace.acts[l - 1];

        Matrix dz = dh;
        for (std::size_t i = 0; i < dz.size(); ++i) {
            if (z.data()[i] <= 0.0) {
                dz.data()[i] = 0.0;
            }
        }

        Matrix& grad_w = grads.tensors[2 * l];
        Matrix& grad_b = grads.tensors[2 * l + 1];
        for (std::size_t i = 0; i < dz.rows(); ++i) {
            for (std::size_t j = 0; j < dz.cols(); ++j) {
                grad_b(0, j) += dz(i, j);
            }
        }
        Matrix grad_w_full = matmul(transpose(h_prev), dz);
        grad_w = std::move(grad_w_full);

        dh = matmul(dz, transpose(layer.weights));
    }

    grads.input_grad = std::move(dh);
    return grads;
}

void ExpandableNet::expand_output_dim(const std::vector<double>& init_column, double init_bias) {
    const std::size_t dim = hidden_output_dim();
    if (init_column.size() != dim) {
        throw std::runtime_error("ExpandableNet::expand_output_dim: column has " +
                                 std::to_string(init_column.size()) + " entries, head input dim is " +
                                 std::to_string(dim));
    }
    Matrix col(dim, 1);
    for (std::size_t k = 0; k < dim; ++k) {
        col(k, 0) = init_column[k];
    }
    head_columns_.push_back(std::move(col));

    Matrix bias(1, head_columns_.size());
    for (std::size_t c = 0; c + 1 < head_columns_.size(); ++c) {
        bias(0, c) = head_bias_(0, c);
    }
    bias(0, head_columns_.size() - 1) = init_bias;
    head_bias_ = std::move(bias);
}

std::vector<int> ExpandableNet::predict(const Matrix& batch) const {
    const Matrix logits = forward(batch);
    std::vector<int> labels(logits.rows());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        labels[i] = static_cast<int>(argmax(logits.row(i)));
    }
    return labels;
}

std::vector<Matrix*> ExpandableNet::parameters() {
    std::vector<Matrix*> params;
    params.reserve(2 * hidden_.size() + head_columns_.size() + 1);
    for (DenseLayer& layer : hidden_) {
        params.push_back(&layer.weights);
        params.push_back(&layer.bias);
    }
    for (Matrix& col : head_columns_) {
        params.push_back(&col);
    }
    params.push_back(&head_bias_);
    return params;
}

std::vector<const Matrix*> ExpandableNet::parameters() const {
    std::vector<const Matrix*> params;
    params.reserve(2 * hidden_.size() + head_columns_.size() + 1);
    for (const DenseLayer& layer : hidden_) {
        params.push_back(&layer.weights);
        params.push_back(&layer.bias);
    }
    for (const Matrix& col : head_columns_) {
        params.push_back(&col);
    }
    params.push_back(&head_bias_);
    return params;
}

std::size_t ExpandableNet::head_column_param_index(std::size_t category) const {
    if (category >= head_columns_.size()) {
        throw std::runtime_error("head_column_param_index: category " + std::to_string(category) +
                                 " out of range");
    }
    return 2 * hidden_.size() + category;
}

NetGradients ExpandableNet::zero_gradients() const {
    NetGradients grads;
    for (const Matrix* p : parameters()) {
        grads.tensors.emplace_back(p->rows(), p->cols(), 0.0);
    }
    return grads;
}

}  // namespace podn
