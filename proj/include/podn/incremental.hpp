#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "podn/detector.hpp"
#include "podn/labels.hpp"
#include "podn/matrix.hpp"
#include "podn/model.hpp"
#include "podn/prototypes.hpp"

namespace podn {

/// Elementwise mean of one or more distance rows, normalized to sum to 1.
std::vector<double> mean_normalized_alpha(const Matrix& distance_rows);

/// New head column as the alpha-weighted combination of the existing columns
/// scaled by 1/N: w_new = (1/N) * sum_n alpha_n * w_n.
std::vector<double> distance_weight_init(std::span<const double> alpha,
                                         const std::vector<Matrix>& head_columns);

/// Feature-score baseline init: w_new = a * (1/N) sum_n w_n + b * (1/M) sum_m w_m
/// over the M categories with the highest mean feature score.
std::vector<double> odn_weight_init(std::span<const double> feature_scores,
                                    const std::vector<Matrix>& head_columns, double alpha_param,
                                    double beta_param, std::size_t most_similar_count);

enum class WeightInitKind { distance, odn };

struct OdnInitParams {
    double alpha = 0.5;
    double beta = 0.5;
    std::size_t most_similar = 3;  // clipped to the current category count
};

/// Incorporates one new category: expands the head (distance or feature-score
/// weight init, bias = mean of existing biases), zero-extends the prototype
/// rows, seeds the new prototype row with the mean post-expansion logits of
/// the trigger samples and the new radius with the mean existing radius.
void expand_category(ExpandableNet& net, PrototypeBank& bank, CategoryRegistry& registry,
                     const std::string& new_label, const Matrix& trigger_features,
                     WeightInitKind kind, const OdnInitParams& odn_params = {});

/// K retained samples per known category, the balance-training replay set.
class MemoryBank {
public:
    explicit MemoryBank(std::size_t k) : k_(k) {}

    std::size_t k() const { return k_; }
    std::size_t category_count() const { return per_category_.size(); }
    const std::vector<Matrix>& per_category() const { return per_category_; }

    /// Stores the first k rows of `samples` for the next category index.
    void add_category(const Matrix& samples);

private:
    std::size_t k_;
    std::vector<Matrix> per_category_;
};

struct FinetuneConfig {
    double learning_rate = 0.02;
    double momentum = 0.9;
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    double allometry_factor = 10.0;
    LossWeights weights;
    bool radius_grad_to_features = false;
    std::uint64_t shuffle_seed = 0;
};

/// Balanced fine-tuning after an expansion: exactly k samples per category
/// (memory for the knowns, the trigger samples for the new category), with
/// the new head column learning at allometry_factor times the base rate.
/// Balance is a contract; unbalanced inputs are an error.
void finetune_balanced(ExpandableNet& net, PrototypeBank& bank, const MemoryBank& memory,
                       const Matrix& new_samples, const FinetuneConfig& config);

/// Ground-truth lookup standing in for manual annotation; consulted only for
/// samples the detector rejected, and it meters the label budget.
class LabelOracle {
public:
    explicit LabelOracle(std::unordered_map<std::string, std::string> truth)
        : truth_(std::move(truth)) {}

    /// Consumes one label. Unknown ids are an error.
    const std::string& annotate(const std::string& sample_id);

    std::size_t labels_consumed() const { return labels_consumed_; }
    const std::map<std::string, std::size_t>& consumption_per_category() const {
        return consumption_per_category_;
    }

private:
    std::unordered_map<std::string, std::string> truth_;
    std::size_t labels_consumed_ = 0;
    std::map<std::string, std::size_t> consumption_per_category_;
};

struct StreamSample {
    std::string id;
    std::vector<double> features;
};

struct IncrementalConfig {
    std::size_t trigger = 5;
    ScoreMode mode = ScoreMode::distance;
    WeightInitKind init = WeightInitKind::distance;
    OdnInitParams odn_params;
    double eps_mu = 0.5;  // recalibration parameters
    double rho = 0.5;
    FinetuneConfig finetune;
};

struct StreamEvent {
    std::size_t iteration = 0;  // 1-based stream position
    std::string id;
    std::string decision;  // accepted label, or "unknown"
    bool consulted_oracle = false;
    bool expanded = false;
    std::size_t category_count = 0;  // after processing this sample
};

struct IncrementalSummary {
    std::size_t expansions = 0;
    std::size_t labels_consumed = 0;
    std::map<std::string, std::size_t> labels_per_category;
    std::size_t final_category_count = 0;
    double mean_labels_per_new_category = 0.0;
};

struct IncrementalResult {
    std::vector<StreamEvent> events;
    IncrementalSummary summary;
};

/// The incremental training phase: decide each stream sample, consult the
/// oracle on rejections, buffer pending new categories, and on reaching the
/// trigger count expand + fine-tune + recalibrate thresholds. Mutates net,
/// bank, thresholds, registry and memory in place.
///
/// labeled_pool seeds the recalibration set (normally the initial training
/// set); each expansion appends its trigger samples under the new label, and
/// thresholds are recalibrated on the whole pool with the updated model.
IncrementalResult run_incremental_phase(ExpandableNet& net, PrototypeBank& bank,
                                        ThresholdSet& thresholds, CategoryRegistry& registry,
                                        MemoryBank& memory, TrainingSet labeled_pool,
                                        const std::vector<StreamSample>& stream,
                                        LabelOracle& oracle, const IncrementalConfig& config);

}  // namespace podn
