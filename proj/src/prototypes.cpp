#include "podn/prototypes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "podn/numerics.hpp"

namespace podn {

PrototypeBank::PrototypeBank(std::size_t categories, std::size_t feature_dim, double epsilon)
    : prototypes(categories, feature_dim, 0.0), radiuses(1, categories, 0.0), epsilon_dist(epsilon) {
    if (epsilon <= 0.0) {
        throw std::runtime_error("PrototypeBank: epsilon_dist must be positive");
    }
}

void PrototypeBank::expand(std::span<const double> new_prototype_row, double new_radius) {
    const std::size_t n = category_count();
    if (new_prototype_row.size() != feature_dim() + 1) {
        throw std::runtime_error("PrototypeBank::expand: new row has " +
                                 std::to_string(new_prototype_row.size()) + " entries, expected " +
                                 std::to_string(feature_dim() + 1));
    }
    Matrix grown(n + 1, feature_dim() + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < feature_dim(); ++j) {
            grown(i, j) = prototypes(i, j);
        }
    }
    for (std::size_t j = 0; j < new_prototype_row.size(); ++j) {
        grown(n, j) = new_prototype_row[j];
    }
    prototypes = std::move(grown);

    Matrix r(1, n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        r(0, i) = radiuses(0, i);
    }
    r(0, n) = new_radius;
    radiuses = std::move(r);
}

void PrototypeBank::clamp_radiuses() {
    const double hi = 1.0 / epsilon_dist;
    for (double& r : radiuses.data()) {
        r = std::clamp(r, 0.0, hi);
    }
}

DistanceResult distance_matrix(const Matrix& features, const PrototypeBank& bank) {
    if (features.cols() != bank.feature_dim()) {
        throw std::runtime_error("distance_matrix: features are " + features.shape_str() +
                                 " but prototypes are " + bank.prototypes.shape_str());
    }
    const std::size_t s = features.rows();
    const std::size_t n = bank.category_count();
    DistanceResult result{Matrix(s, n), Matrix(s, n)};
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double sq = squared_distance(features.row(i), bank.prototypes.row(j));
            result.squared(i, j) = sq;
            result.scores(i, j) = 1.0 / (sq + bank.epsilon_dist);
        }
    }
    return result;
}

namespace {

void check_labels(const std::vector<int>& labels, std::size_t rows, std::size_t categories,
                  const char* where) {
    if (labels.size() != rows) {
        throw std::runtime_error(std::string(where) + ": " + std::to_string(labels.size()) +
                                 " labels for " + std::to_string(rows) + " samples");
    }
    for (int label : labels) {
        if (label < 0 || static_cast<std::size_t>(label) >= categories) {
            throw std::runtime_error(std::string(where) + ": label " + std::to_string(label) +
                                     " out of range for " + std::to_string(categories) + " categories");
        }
    }
}

/// Routes a gradient on the distance scores back into features and
/// prototypes: dD/dsq = -D^2, dsq/df_i = 2(f_i - p_j), dsq/dp_j = -2(f_i - p_j).
void chain_distance_grad(const Matrix& grad_scores, const DistanceResult& dist, const Matrix& features,
                         const PrototypeBank& bank, Matrix& grad_features, Matrix& grad_prototypes) {
    for (std::size_t i = 0; i < features.rows(); ++i) {
        for (std::size_t j = 0; j < bank.category_count(); ++j) {
            const double g = grad_scores(i, j);
            if (g == 0.0) {
                continue;
            }
            const double d = dist.scores(i, j);
            const double factor = g * (-d * d) * 2.0;
            for (std::size_t k = 0; k < features.cols(); ++k) {
                const double diff = features(i, k) - bank.prototypes(j, k);
                grad_features(i, k) += factor * diff;
                grad_prototypes(j, k) -= factor * diff;
            }
        }
    }
}

}  // namespace

PairedLossResult prototype_l2_loss(const Matrix& features, const std::vector<int>& labels,
                                   const PrototypeBank& bank) {
    if (features.cols() != bank.feature_dim()) {
        throw std::runtime_error("prototype_l2_loss: features are " + features.shape_str() +
                                 " but prototypes are " + bank.prototypes.shape_str());
    }
    check_labels(labels, features.rows(), bank.category_count(), "prototype_l2_loss");

    const std::size_t s = features.rows();
    PairedLossResult result;
    result.grad_features = Matrix(features.rows(), features.cols(), 0.0);
    result.grad_prototypes = Matrix(bank.category_count(), bank.feature_dim(), 0.0);
    const double inv_s = 1.0 / static_cast<double>(s);
    for (std::size_t i = 0; i < s; ++i) {
        const auto label = static_cast<std::size_t>(labels[i]);
        for (std::size_t k = 0; k < features.cols(); ++k) {
            const double diff = features(i, k) - bank.prototypes(label, k);
            result.loss += 0.5 * diff * diff * inv_s;
            result.grad_features(i, k) += diff * inv_s;
            result.grad_prototypes(label, k) -= diff * inv_s;
        }
    }
    return result;
}

PairedLossResult distance_classification_loss(const DistanceResult& dist, const Matrix& features,
                                              const PrototypeBank& bank, const std::vector<int>& labels) {
    check_labels(labels, dist.scores.rows(), bank.category_count(), "distance_classification_loss");

    const CrossEntropyResult ce = cross_entropy_mean(softmax_rows(dist.scores), labels);
    PairedLossResult result;
    result.loss = ce.loss;
    result.grad_features = Matrix(features.rows(), features.cols(), 0.0);
    result.grad_prototypes = Matrix(bank.category_count(), bank.feature_dim(), 0.0);
    chain_distance_grad(ce.grad_logits, dist, features, bank, result.grad_features, result.grad_prototypes);
    return result;
}

RadiusLossResult radius_loss(const DistanceResult& dist, const std::vector<int>& labels,
                             const Matrix& features, const PrototypeBank& bank,
                             bool grad_to_features) {
    check_labels(labels, dist.scores.rows(), bank.category_count(), "radius_loss");

    RadiusLossResult result;
    result.grad_radiuses = Matrix(1, bank.category_count(), 0.0);
    result.has_feature_grads = grad_to_features;
    if (grad_to_features) {
        result.grad_features = Matrix(features.rows(), features.cols(), 0.0);
        result.grad_prototypes = Matrix(bank.category_count(), bank.feature_dim(), 0.0);
    }

    struct Contributor {
        std::size_t sample;
        std::size_t category;
        double gap;  // r_t - d_t
    };
    std::vector<Contributor> contributors;
    for (std::size_t i = 0; i < dist.scores.rows(); ++i) {
        const std::size_t predicted = argmax(dist.scores.row(i));
        const auto label = static_cast<std::size_t>(labels[i]);
        if (predicted != label) {
            continue;
        }
        const double gap = bank.radiuses(0, label) - dist.scores(i, predicted);
        contributors.push_back({i, label, gap});
        result.loss += 0.5 * gap * gap;
    }
    result.correct_count = contributors.size();
    if (contributors.empty()) {
        return result;  // empty-set convention: zero loss, zero grads
    }

    const double inv_t = 1.0 / static_cast<double>(contributors.size());
    result.loss *= inv_t;
    Matrix grad_scores(dist.scores.rows(), dist.scores.cols(), 0.0);
    for (const Contributor& c : contributors) {
        result.grad_radiuses(0, c.category) += c.gap * inv_t;
        grad_scores(c.sample, c.category) -= c.gap * inv_t;
    }
    if (grad_to_features) {
        chain_distance_grad(grad_scores, dist, features, bank, result.grad_features,
                            result.grad_prototypes);
    }
    return result;
}

TotalLossResult total_loss(const ExpandableNet& net, const PrototypeBank& bank, const Matrix& batch,
                           const std::vector<int>& labels, const LossWeights& weights,
                           bool radius_grad_to_features) {
    const ForwardTrace trace = net.forward_trace(batch);
    const Matrix& logits = trace.logits;

    const CrossEntropyResult ce = cross_entropy_mean(softmax_rows(logits), labels);
    const PairedLossResult l2 = prototype_l2_loss(logits, labels, bank);
    const DistanceResult dist = distance_matrix(logits, bank);
    const PairedLossResult dcl = distance_classification_loss(dist, logits, bank, labels);

    TotalLossResult result;
    result.breakdown.loss1 = ce.loss;
    result.breakdown.loss21 = l2.loss;
    result.breakdown.loss22 = dcl.loss;
    result.breakdown.loss2 = weights.omega * l2.loss + dcl.loss;

    Matrix upstream = ce.grad_logits;
    axpy_inplace(upstream, weights.w1 * weights.omega, l2.grad_features);
    axpy_inplace(upstream, weights.w1, dcl.grad_features);

    result.grad_prototypes = scaled(l2.grad_prototypes, weights.w1 * weights.omega);
    axpy_inplace(result.grad_prototypes, weights.w1, dcl.grad_prototypes);
    result.grad_radiuses = Matrix(1, bank.category_count(), 0.0);

    if (weights.w2 != 0.0) {
        const RadiusLossResult rl = radius_loss(dist, labels, logits, bank, radius_grad_to_features);
        result.breakdown.loss3 = rl.loss;
        result.breakdown.correct_count = rl.correct_count;
        axpy_inplace(result.grad_radiuses, weights.w2, rl.grad_radiuses);
        if (rl.has_feature_grads) {
            axpy_inplace(upstream, weights.w2, rl.grad_features);
            axpy_inplace(result.grad_prototypes, weights.w2, rl.grad_prototypes);
        }
    }

    result.breakdown.total = result.breakdown.loss1 + weights.w1 * result.breakdown.loss2 +
                             weights.w2 * result.breakdown.loss3;
    result.net_grads = net.backward(trace, upstream);
    return result;
}

namespace {

double accuracy_of(const ExpandableNet& net, const TrainingSet& data) {
    const std::vector<int> predicted = net.predict(data.features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == data.labels[i]) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

}  // namespace

InitialTrainResult train_initial(const TrainingSet& data, const ModelConfig& model_config,
                                 const TrainConfig& train_config) {
    if (data.features.rows() == 0) {
        throw std::runtime_error("train_initial: empty dataset");
    }
    if (data.category_count < 2) {
        throw std::runtime_error("train_initial: need at least 2 categories, got " +
                                 std::to_string(data.category_count));
    }
    check_labels(data.labels, data.features.rows(), data.category_count, "train_initial");
    std::vector<std::size_t> per_category(data.category_count, 0);
    for (int label : data.labels) {
        ++per_category[static_cast<std::size_t>(label)];
    }
    for (std::size_t c = 0; c < per_category.size(); ++c) {
        if (per_category[c] == 0) {
            throw std::runtime_error("train_initial: category " + std::to_string(c) + " has zero samples");
        }
    }
    if (model_config.initial_categories != data.category_count) {
        throw std::runtime_error("train_initial: model has " +
                                 std::to_string(model_config.initial_categories) +
                                 " categories but dataset has " + std::to_string(data.category_count));
    }

    InitialTrainResult result{ExpandableNet(model_config),
                              PrototypeBank(data.category_count, data.category_count), {}};
    ExpandableNet& net = result.net;
    PrototypeBank& bank = result.bank;

    SgdMomentum optimizer(train_config.learning_rate, train_config.momentum);
    std::mt19937_64 shuffle_rng(train_config.shuffle_seed);
    std::vector<std::size_t> order(data.features.rows());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch_size = std::max<std::size_t>(1, train_config.batch_size);

    for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t count = std::min(batch_size, order.size() - start);
            Matrix batch(count, data.features.cols());
            std::vector<int> labels(count);
            for (std::size_t b = 0; b < count; ++b) {
                const std::size_t idx = order[start + b];
                for (std::size_t k = 0; k < data.features.cols(); ++k) {
                    batch(b, k) = data.features(idx, k);
                }
                labels[b] = data.labels[idx];
            }

            TotalLossResult step = total_loss(net, bank, batch, labels, train_config.weights,
                                              train_config.radius_grad_to_features);
            std::vector<Matrix*> params = net.parameters();
            params.push_back(&bank.prototypes);
            params.push_back(&bank.radiuses);
            std::vector<const Matrix*> grads;
            grads.reserve(params.size());
            for (const Matrix& g : step.net_grads.tensors) {
                grads.push_back(&g);
            }
            grads.push_back(&step.grad_prototypes);
            grads.push_back(&step.grad_radiuses);
            optimizer.step(params, grads);
            bank.clamp_radiuses();
        }

        EpochStats stats;
        stats.losses = total_loss(net, bank, data.features, data.labels, train_config.weights,
                                  train_config.radius_grad_to_features)
                           .breakdown;
        stats.train_accuracy = accuracy_of(net, data);
        if (!std::isfinite(stats.losses.total)) {
            throw std::runtime_error("train_initial: diverged at epoch " + std::to_string(epoch + 1) +
                                     " (non-finite loss); lower the learning rate");
        }
        result.log.push_back(stats);
    }
    return result;
}

}  // namespace podn
