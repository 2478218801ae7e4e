#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "podn/matrix.hpp"
#include "podn/model.hpp"

namespace podn {

/// Learned category centers (one row per category) and per-category radius
/// scalars. Both start at zero and are trained jointly with the net.
struct PrototypeBank {
    Matrix prototypes;        // categories x feature_dim
    Matrix radiuses;          // 1 x categories
    double epsilon_dist = 1e-3;

    PrototypeBank() = default;
    PrototypeBank(std::size_t categories, std::size_t feature_dim, double epsilon = 1e-3);

    std::size_t category_count() const { return prototypes.rows(); }
    std::size_t feature_dim() const { return prototypes.cols(); }

    /// Grows to (N+1) categories: existing prototype rows gain one trailing
    /// zero coordinate, the new row and radius are appended.
    void expand(std::span<const double> new_prototype_row, double new_radius);

    /// Radiuses live in [0, 1/epsilon_dist], the range of distance scores.
    void clamp_radiuses();
};

/// Reciprocal smoothed squared distances D_ij = 1 / (||f_i - p_j||^2 + eps),
/// plus the raw squared distances needed by the gradient chains.
struct DistanceResult {
    Matrix scores;      // S x N, each entry in (0, 1/eps]
    Matrix squared;     // S x N raw squared distances
};

DistanceResult distance_matrix(const Matrix& features, const PrototypeBank& bank);

struct LossWeights {
    double omega = 1.0;  // weight of the L2 term inside the prototype loss
    double w1 = 0.1;
    double w2 = 0.01;
};

struct LossBreakdown {
    double loss1 = 0.0;   // classification cross entropy
    double loss21 = 0.0;  // prototype L2
    double loss22 = 0.0;  // distance-based classification
    double loss2 = 0.0;   // omega * loss21 + loss22
    double loss3 = 0.0;   // radius
    double total = 0.0;   // loss1 + w1 * loss2 + w2 * loss3
    std::size_t correct_count = 0;  // T, contributors to loss3
};

struct PairedLossResult {
    double loss = 0.0;
    Matrix grad_features;
    Matrix grad_prototypes;
};

/// Mean squared residual between each feature and its own category's
/// prototype: (1/2S) sum ||f_i - p_{label_i}||^2.
PairedLossResult prototype_l2_loss(const Matrix& features, const std::vector<int>& labels,
                                   const PrototypeBank& bank);

/// Cross entropy over softmaxed distance-score rows; gradients chain through
/// the distance matrix into both features and prototypes.
PairedLossResult distance_classification_loss(const DistanceResult& dist, const Matrix& features,
                                              const PrototypeBank& bank, const std::vector<int>& labels);

struct RadiusLossResult {
    double loss = 0.0;
    std::size_t correct_count = 0;
    Matrix grad_radiuses;     // 1 x N
    Matrix grad_features;     // populated when grad_to_features
    Matrix grad_prototypes;   // populated when grad_to_features
    bool has_feature_grads = false;
};

/// Mean squared gap between each correctly classified sample's top distance
/// score and its category radius: (1/2T) sum (r_t - d_t)^2. Correctness is
/// judged by distance-row argmax. With grad_to_features false (the default)
/// only the radiuses receive gradient.
RadiusLossResult radius_loss(const DistanceResult& dist, const std::vector<int>& labels,
                             const Matrix& features, const PrototypeBank& bank,
                             bool grad_to_features);

struct TotalLossResult {
    LossBreakdown breakdown;
    NetGradients net_grads;
    Matrix grad_prototypes;
    Matrix grad_radiuses;
};

/// Composes all loss terms in one pass and returns gradients for every net
/// parameter, the prototype matrix, and the radius vector. When w2 is zero
/// the radius term is skipped entirely (loss3 = 0, T = 0).
TotalLossResult total_loss(const ExpandableNet& net, const PrototypeBank& bank, const Matrix& batch,
                           const std::vector<int>& labels, const LossWeights& weights,
                           bool radius_grad_to_features = false);

struct TrainingSet {
    Matrix features;
    std::vector<int> labels;
    std::size_t category_count = 0;
};

struct TrainConfig {
    std::size_t epochs = 40;
    std::size_t batch_size = 32;
    double learning_rate = 0.05;
    double momentum = 0.9;
    LossWeights weights;
    bool radius_grad_to_features = false;
    std::uint64_t shuffle_seed = 0;
};

struct EpochStats {
    LossBreakdown losses;     // full-set loss evaluated after the epoch
    double train_accuracy = 0.0;
};

struct InitialTrainResult {
    ExpandableNet net;
    PrototypeBank bank;
    std::vector<EpochStats> log;
};

/// Joint mini-batch SGD-momentum training of net, prototypes and radiuses on
/// a known-categories-only training set. Deterministic per seed.
InitialTrainResult train_initial(const TrainingSet& data, const ModelConfig& model_config,
                                 const TrainConfig& train_config);

}  // namespace podn
