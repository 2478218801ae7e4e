#include "podn/detector.hpp"

#include <stdexcept>

namespace podn {

std::string to_string(ScoreMode mode) {
    return mode == ScoreMode::distance ? "distance" : "feature";
}

ScoreMode score_mode_from_string(const std::string& name) {
    if (name == "distance") {
        return ScoreMode::distance;
    }
    if (name == "feature") {
        return ScoreMode::feature;
    }
    throw std::runtime_error("score_mode_from_string: unknown mode '" + name + "'");
}

ThresholdSet calibrate(const std::vector<Matrix>& rows_per_category, double eps_mu, double rho,
                       ScoreMode mode) {
    if (rows_per_category.empty()) {
        throw std::runtime_error("calibrate: no categories");
    }
    ThresholdSet thresholds;
    thresholds.mode = mode;
    thresholds.eps_mu = eps_mu;
    thresholds.rho = rho;
    thresholds.eta.reserve(rows_per_category.size());
    for (std::size_t cat = 0; cat < rows_per_category.size(); ++cat) {
        const Matrix& rows = rows_per_category[cat];
        if (rows.rows() == 0) {
            throw std::runtime_error("calibrate: category " + std::to_string(cat) +
                                     " has no correctly classified rows");
        }
        double top_sum = 0.0;
        double gap_sum = 0.0;
        for (std::size_t i = 0; i < rows.rows(); ++i) {
            const TopTwo tt = top_two(rows.row(i));
            top_sum += tt.top;
            gap_sum += tt.top - tt.second;
        }
        const double inv_x = 1.0 / static_cast<double>(rows.rows());
        thresholds.eta.push_back(top_sum * inv_x);
        thresholds.mu.push_back(eps_mu * top_sum * inv_x);
        thresholds.delta.push_back(rho * gap_sum * inv_x);
    }
    return thresholds;
}

Decision decide(std::span<const double> score_row, const ThresholdSet& thresholds) {
    if (score_row.size() != thresholds.category_count()) {
        throw std::runtime_error("decide: row has " + std::to_string(score_row.size()) +
                                 " entries for " + std::to_string(thresholds.category_count()) +
                                 " categories");
    }
    const TopTwo tt = top_two(score_row);
    Decision decision;
    decision.category = tt.top_index;
    decision.top_value = tt.top;
    decision.margin = tt.top - tt.second;

    if (tt.top > thresholds.eta[tt.top_index]) {
        decision.outcome = Outcome::accept;
        return decision;
    }
    bool all_below_mu = true;
    for (std::size_t j = 0; j < score_row.size(); ++j) {
        if (score_row[j] >= thresholds.mu[j]) {
            all_below_mu = false;
            break;
        }
    }
    if (all_below_mu) {
        decision.outcome = Outcome::unknown;
        return decision;
    }
    // hard sample: between mu and eta, resolved by the margin test
    decision.outcome = decision.margin > thresholds.delta[tt.top_index] ? Outcome::accept
                                                                        : Outcome::unknown;
    return decision;
}

Matrix score_rows(const ExpandableNet& net, const PrototypeBank& bank, const Matrix& batch,
                  ScoreMode mode) {
    Matrix logits = net.forward(batch);
    if (mode == ScoreMode::feature) {
        return logits;
    }
    return distance_matrix(logits, bank).scores;
}

std::vector<Matrix> collect_calibration_rows(const ExpandableNet& net, const PrototypeBank& bank,
                                             const Matrix& features, const std::vector<int>& labels,
                                             std::size_t category_count, ScoreMode mode) {
    if (labels.size() != features.rows()) {
        throw std::runtime_error("collect_calibration_rows: " + std::to_string(labels.size()) +
                                 " labels for " + std::to_string(features.rows()) + " samples");
    }
    const Matrix rows = score_rows(net, bank, features, mode);
    std::vector<std::vector<std::vector<double>>> grouped(category_count);
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= category_count) {
            throw std::runtime_error("collect_calibration_rows: label " + std::to_string(label) +
                                     " out of range");
        }
        if (argmax(rows.row(i)) == static_cast<std::size_t>(label)) {
            grouped[static_cast<std::size_t>(label)].emplace_back(rows.row(i).begin(),
                                                                  rows.row(i).end());
        }
    }
    std::vector<Matrix> result;
    result.reserve(category_count);
    for (auto& g : grouped) {
        result.push_back(Matrix::from_rows(g));
    }
    return result;
}

DetectionMetrics detection_metrics(const std::vector<Decision>& decisions,
                                   const std::vector<bool>& is_unknown) {
    if (decisions.size() != is_unknown.size()) {
        throw std::runtime_error("detection_metrics: size mismatch");
    }
    DetectionMetrics m;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        const bool rejected = decisions[i].outcome == Outcome::unknown;
        if (is_unknown[i]) {
            rejected ? ++m.true_positive : ++m.false_negative;
        } else {
            rejected ? ++m.false_positive : ++m.true_negative;
        }
    }
    const std::size_t predicted_positive = m.true_positive + m.false_positive;
    const std::size_t actual_positive = m.true_positive + m.false_negative;
    const std::size_t knowns = m.true_negative + m.false_positive;
    m.precision = predicted_positive ? static_cast<double>(m.true_positive) / predicted_positive : 0.0;
    m.recall = actual_positive ? static_cast<double>(m.true_positive) / actual_positive : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                          : 0.0;
    m.known_accept_rate = knowns ? static_cast<double>(m.true_negative) / knowns : 0.0;
    return m;
}

DetectionOutcome evaluate_detection(const ExpandableNet& net, const PrototypeBank& bank,
                                    const ThresholdSet& thresholds, const Matrix& test_features,
                                    const std::vector<bool>& is_unknown) {
    if (test_features.rows() == 0) {
        throw std::runtime_error("evaluate_detection: empty test set");
    }
    if (is_unknown.size() != test_features.rows()) {
        throw std::runtime_error("evaluate_detection: " + std::to_string(is_unknown.size()) +
                                 " flags for " + std::to_string(test_features.rows()) + " samples");
    }
    const Matrix rows = score_rows(net, bank, test_features, thresholds.mode);
    DetectionOutcome outcome;
    outcome.decisions.reserve(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        outcome.decisions.push_back(decide(rows.row(i), thresholds));
    }
    outcome.metrics = detection_metrics(outcome.decisions, is_unknown);
    return outcome;
}

}  // namespace podn
