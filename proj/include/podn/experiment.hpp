#pragma once

#include <optional>
#include <string>
#include <vector>

#include "podn/dataset.hpp"
#include "podn/detector.hpp"
#include "podn/incremental.hpp"
#include "podn/labels.hpp"
#include "podn/prototypes.hpp"

namespace podn {

/// podn_radius: full loss stack, distance-space detection, distance init.
/// podn: radius loss off (w2 = 0), otherwise as podn_radius.
/// odn_baseline: classification loss only, feature-space detection, score init.
/// closed_baseline: no detection; trains on initial data plus a budget of
/// labelled stream samples and classifies everything.
enum class Method { podn_radius, podn, odn_baseline, closed_baseline };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

struct ExperimentConfig {
    // dataset: CSV when csv_path is set, otherwise synthetic
    std::string csv_path;
    SyntheticSpec synthetic{11, 16, 100, 6.0, 1.0, 0};

    std::size_t known_count = 6;
    std::size_t min_incremental_per_category = 10;

    std::vector<std::size_t> hidden_dims = {32};
    std::size_t epochs = 40;
    std::size_t batch_size = 32;
    double learning_rate = 0.05;
    double momentum = 0.9;

    LossWeights weights;  // omega = 1, w1 = 0.1, w2 = 0.01
    bool radius_to_features = false;

    double eps_mu = 0.5;
    double rho = 0.5;

    std::size_t trigger = 5;
    std::size_t memory_k = 5;
    double allometry = 10.0;
    std::size_t finetune_epochs = 30;
    double finetune_learning_rate = 0.02;
    OdnInitParams odn_params;

    Method method = Method::podn_radius;
    std::uint64_t seed = 1;
    std::optional<std::size_t> closed_label_budget;  // required for closed_baseline
};

/// Parses a config JSON document; unknown keys are an error, missing keys take
/// the defaults above.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);
std::string config_to_json_string(const ExperimentConfig& config);

struct Top1Report {
    double known_accuracy = 0.0;
    double unknown_accuracy = 0.0;
    double combined_accuracy = 0.0;
    std::size_t known_count = 0;
    std::size_t unknown_count = 0;
    std::size_t missing_label_count = 0;  // test labels absent from the head
};

/// Plain argmax classification over the full head (phase 2: no rejection).
Top1Report evaluate_top1(const ExpandableNet& net, const Matrix& test_features,
                         const std::vector<std::string>& test_labels,
                         const std::vector<bool>& test_is_unknown, const CategoryRegistry& registry);

struct SeparationStats {
    double diag_mean = 0.0;              // mean response of categories to their own prototype
    double offdiag_mean = 0.0;           // mean response to other prototypes
    double prototype_inter_row_mean = 0.0;
    double feature_inter_class_mean = 0.0;
};

/// Numeric form of the heat-map and embedding-separation analyses: distance
/// responses of per-category mean features against the bank, and mean
/// pairwise distances between prototype rows vs between mean features.
SeparationStats separation_stats(const PrototypeBank& bank, const ExpandableNet& net,
                                 const Matrix& features, const std::vector<int>& labels);

struct ExperimentReport {
    std::string method;
    std::uint64_t seed = 0;
    std::string config_json;

    bool has_detection = false;
    DetectionMetrics detection;

    Top1Report top1;

    bool has_separation = false;
    SeparationStats separation;

    IncrementalSummary incremental;
    std::size_t closed_label_budget = 0;  // closed runs only

    std::vector<EpochStats> epoch_log;
    std::vector<StreamEvent> stream_events;
    std::vector<Decision> detection_decisions;  // aligned with test rows
    std::vector<std::string> test_ids;
    std::vector<bool> test_is_unknown;
    std::vector<std::string> final_labels;
};

struct ExperimentRun {
    ExperimentReport report;
    ExpandableNet net;
    PrototypeBank bank;
    ThresholdSet thresholds;  // empty for closed_baseline
    CategoryRegistry registry;
};

/// Executes the full two-phase pipeline for the configured method. Every
/// random choice derives from config.seed, so repeated runs are bit-identical.
ExperimentRun run_experiment(const ExperimentConfig& config);

/// Writes report.json, the per-iteration CSV logs and the model/bank/threshold
/// checkpoints into out_dir (created if needed).
void write_run_files(const ExperimentRun& run, const std::string& out_dir);

std::string report_to_json_string(const ExperimentReport& report);

}  // namespace podn
