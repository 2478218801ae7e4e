#include "podn/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace podn {

Matrix softmax_rows(const Matrix& m) {
    if (m.empty()) {
        throw std::runtime_error("softmax_rows: empty matrix");
    }
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        double max_val = row[0];
        for (double v : row) {
            max_val = std::max(max_val, v);
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double e = std::exp(row[j] - max_val);
            out(i, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(i, j) /= sum;
        }
    }
    return out;
}

CrossEntropyResult cross_entropy_mean(const Matrix& probs, const std::vector<int>& labels) {
    if (labels.size() != probs.rows()) {
        throw std::runtime_error("cross_entropy_mean: " + std::to_string(labels.size()) +
                                 " labels for " + std::to_string(probs.rows()) + " rows");
    }
    const double inv_s = 1.0 / static_cast<double>(probs.rows());
    CrossEntropyResult result;
    result.grad_logits = Matrix(probs.rows(), probs.cols());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= probs.cols()) {
            throw std::runtime_error("cross_entropy_mean: label " + std::to_string(label) +
                                     " out of range for " + std::to_string(probs.cols()) + " classes");
        }
        result.loss -= std::log(probs(i, static_cast<std::size_t>(label))) * inv_s;
        for (std::size_t j = 0; j < probs.cols(); ++j) {
            const double onehot = (static_cast<std::size_t>(label) == j) ? 1.0 : 0.0;
            result.grad_logits(i, j) = (probs(i, j) - onehot) * inv_s;
        }
    }
    return result;
}

SgdMomentum::SgdMomentum(double learning_rate, double momentum)
    : learning_rate_(learning_rate), momentum_(momentum) {
    if (learning_rate <= 0.0) {
        throw std::runtime_error("SgdMomentum: learning_rate must be positive");
    }
    if (momentum < 0.0 || momentum >= 1.0) {
        throw std::runtime_error("SgdMomentum: momentum must lie in [0, 1)");
    }
}

void SgdMomentum::set_lr_scale(std::size_t index, double scale) {
    if (scale <= 0.0) {
        throw std::runtime_error("SgdMomentum: lr scale must be positive");
    }
    if (lr_scale_.size() <= index) {
        lr_scale_.resize(index + 1, 1.0);
    }
    lr_scale_[index] = scale;
}

double SgdMomentum::lr_scale(std::size_t index) const {
    return index < lr_scale_.size() ? lr_scale_[index] : 1.0;
}

void SgdMomentum::step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads) {
    if (params.size() != grads.size()) {
        throw std::runtime_error("SgdMomentum::step: " + std::to_string(params.size()) +
                                 " params vs " + std::to_string(grads.size()) + " grads");
    }
    if (velocity_.empty()) {
        velocity_.reserve(params.size());
        for (const Matrix* p : params) {
            velocity_.emplace_back(p->rows(), p->cols(), 0.0);
        }
    }
    if (velocity_.size() != params.size()) {
        throw std::runtime_error("SgdMomentum::step: tensor count changed from " +
                                 std::to_string(velocity_.size()) + " to " + std::to_string(params.size()));
    }
    for (std::size_t t = 0; t < params.size(); ++t) {
        Matrix& p = *params[t];
        const Matrix& g = *grads[t];
        Matrix& v = velocity_[t];
        if (!p.same_shape(g) || !p.same_shape(v)) {
            throw std::runtime_error("SgdMomentum::step: shape mismatch at tensor " + std::to_string(t) +
                                     ": param " + p.shape_str() + ", grad " + g.shape_str() +
                                     ", velocity " + v.shape_str());
        }
        const double scale = lr_scale(t);
        for (std::size_t i = 0; i < p.size(); ++i) {
            v.data()[i] = momentum_ * v.data()[i] - learning_rate_ * scale * g.data()[i];
            p.data()[i] += v.data()[i];
        }
    }
}

std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& loss_fn,
                                     std::vector<double> point, double h) {
    if (h <= 0.0) {
        throw std::runtime_error("finite_diff_grad: h must be positive");
    }
    std::vector<double> grad(point.size(), 0.0);
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double saved = point[i];
        point[i] = saved + h;
        const double plus = loss_fn(point);
        point[i] = saved - h;
        const double minus = loss_fn(point);
        point[i] = saved;
        grad[i] = (plus - minus) / (2.0 * h);
    }
    return grad;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t salt) {
    std::uint64_t z = master + salt * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace podn
