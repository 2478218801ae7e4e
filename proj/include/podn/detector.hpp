#pragma once

#include <span>
#include <string>
#include <vector>

#include "podn/model.hpp"
#include "podn/prototypes.hpp"

namespace podn {

/// Which rows the detector scores: reciprocal-distance rows against the
/// prototype bank, or raw logit rows (the feature-space baseline).
enum class ScoreMode { distance, feature };

std::string to_string(ScoreMode mode);
ScoreMode score_mode_from_string(const std::string& name);

/// Per-category accept threshold eta, reject threshold mu = eps_mu * eta, and
/// top-minus-second margin threshold delta. Immutable after calibration.
struct ThresholdSet {
    std::vector<double> eta;
    std::vector<double> mu;
    std::vector<double> delta;
    ScoreMode mode = ScoreMode::distance;
    double eps_mu = 0.5;
    double rho = 0.5;

    std::size_t category_count() const { return eta.size(); }
};

/// Calibrates the triplet per category from its correctly classified score
/// rows: eta_i = mean top value, mu_i = eps_mu * eta_i, delta_i = rho * mean
/// (top - second) gap. Every category needs at least one row.
ThresholdSet calibrate(const std::vector<Matrix>& rows_per_category, double eps_mu, double rho,
                       ScoreMode mode);

enum class Outcome { accept, unknown };

struct Decision {
    Outcome outcome = Outcome::unknown;
    std::size_t category = 0;  // argmax index, meaningful as a label only on accept
    double top_value = 0.0;
    double margin = 0.0;  // top - second
};

/// Three-branch rule: accept when the top value clears its category's eta;
/// reject as unknown when every entry sits below its mu; otherwise resolve
/// the hard sample by the delta margin test.
Decision decide(std::span<const double> score_row, const ThresholdSet& thresholds);

/// Score rows for a batch in the given mode (distance rows need the bank).
Matrix score_rows(const ExpandableNet& net, const PrototypeBank& bank, const Matrix& batch,
                  ScoreMode mode);

/// Correctly classified score rows of a labelled set, grouped by category;
/// the calibration input. Correctness is judged in the same score space.
std::vector<Matrix> collect_calibration_rows(const ExpandableNet& net, const PrototypeBank& bank,
                                             const Matrix& features, const std::vector<int>& labels,
                                             std::size_t category_count, ScoreMode mode);

struct DetectionMetrics {
    std::size_t true_positive = 0;   // unknowns rejected
    std::size_t false_positive = 0;  // knowns rejected
    std::size_t true_negative = 0;   // knowns accepted
    std::size_t false_negative = 0;  // unknowns accepted
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double known_accept_rate = 0.0;
};

struct DetectionOutcome {
    DetectionMetrics metrics;
    std::vector<Decision> decisions;  // one per test sample, in order
};

/// Runs forward + scoring + decide per sample; unknown is the positive class.
DetectionOutcome evaluate_detection(const ExpandableNet& net, const PrototypeBank& bank,
                                    const ThresholdSet& thresholds, const Matrix& test_features,
                                    const std::vector<bool>& is_unknown);

/// Metrics from precomputed decisions; used by both evaluators and tests.
DetectionMetrics detection_metrics(const std::vector<Decision>& decisions,
                                   const std::vector<bool>& is_unknown);

}  // namespace podn
