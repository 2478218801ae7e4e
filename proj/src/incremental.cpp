#include "podn/incremental.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "podn/numerics.hpp"

namespace podn {

int CategoryRegistry::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

std::size_t CategoryRegistry::add(const std::string& label) {
    if (index_of(label) >= 0) {
        throw std::runtime_error("CategoryRegistry: label '" + label + "' already registered");
    }
    labels_.push_back(label);
    return labels_.size() - 1;
}

std::vector<double> mean_normalized_alpha(const Matrix& distance_rows) {
    if (distance_rows.rows() == 0 || distance_rows.cols() == 0) {
        throw std::runtime_error("mean_normalized_alpha: empty input");
    }
    std::vector<double> mean_row(distance_rows.cols(), 0.0);
    for (std::size_t i = 0; i < distance_rows.rows(); ++i) {
        for (std::size_t j = 0; j < distance_rows.cols(); ++j) {
            const double v = distance_rows(i, j);
            if (!(v > 0.0)) {
                throw std::runtime_error("mean_normalized_alpha: entries must be positive");
            }
            mean_row[j] += v;
        }
    }
    double sum = 0.0;
    for (double& v : mean_row) {
        v /= static_cast<double>(distance_rows.rows());
        sum += v;
    }
    for (double& v : mean_row) {
        v /= sum;
    }
    return mean_row;
}

std::vector<double> distance_weight_init(std::span<const double> alpha,
                                         const std::vector<Matrix>& head_columns) {
    const std::size_t n = head_columns.size();
    if (alpha.size() != n) {
        throw std::runtime_error("distance_weight_init: " + std::to_string(alpha.size()) +
                                 " weights for " + std::to_string(n) + " head columns");
    }
    const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    if (std::abs(alpha_sum - 1.0) > 1e-6) {
        throw std::runtime_error("distance_weight_init: alpha sums to " + std::to_string(alpha_sum) +
                                 ", expected 1");
    }
    const std::size_t dim = head_columns.front().rows();
    std::vector<double> column(dim, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t k = 0; k < dim; ++k) {
            column[k] += inv_n * alpha[c] * head_columns[c](k, 0);
        }
    }
    return column;
}

std::vector<double> odn_weight_init(std::span<const double> feature_scores,
                                    const std::vector<Matrix>& head_columns, double alpha_param,
                                    double beta_param, std::size_t most_similar_count) {
    const std::size_t n = head_columns.size();
    if (feature_scores.size() != n) {
        throw std::runtime_error("odn_weight_init: " + std::to_string(feature_scores.size()) +
                                 " scores for " + std::to_string(n) + " head columns");
    }
    if (most_similar_count == 0 || most_similar_count > n) {
        throw std::runtime_error("odn_weight_init: similar-category count " +
                                 std::to_string(most_similar_count) + " out of range [1, " +
                                 std::to_string(n) + "]");
    }
    std::vector<std::size_t> ranking(n);
    std::iota(ranking.begin(), ranking.end(), 0);
    std::stable_sort(ranking.begin(), ranking.end(), [&](std::size_t a, std::size_t b) {
        return feature_scores[a] > feature_scores[b];
    });

    const std::size_t dim = head_columns.front().rows();
    std::vector<double> column(dim, 0.0);
    const double global_factor = alpha_param / static_cast<double>(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t k = 0; k < dim; ++k) {
            column[k] += global_factor * head_columns[c](k, 0);
        }
    }
    const double similar_factor = beta_param / static_cast<double>(most_similar_count);
    for (std::size_t r = 0; r < most_similar_count; ++r) {
        const Matrix& col = head_columns[ranking[r]];
        for (std::size_t k = 0; k < dim; ++k) {
            column[k] += similar_factor * col(k, 0);
        }
    }
    return column;
}

void expand_category(ExpandableNet& net, PrototypeBank& bank, CategoryRegistry& registry,
                     const std::string& new_label, const Matrix& trigger_features,
                     WeightInitKind kind, const OdnInitParams& odn_params) {
    if (registry.index_of(new_label) >= 0) {
        throw std::runtime_error("expand_category: label '" + new_label + "' is already known");
    }
    if (trigger_features.rows() == 0) {
        throw std::runtime_error("expand_category: no trigger samples");
    }

    const Matrix logits = net.forward(trigger_features);
    const std::size_t n = net.category_count();

    std::vector<double> column;
    if (kind == WeightInitKind::distance) {
        const DistanceResult dist = distance_matrix(logits, bank);
        const std::vector<double> alpha = mean_normalized_alpha(dist.scores);
        column = distance_weight_init(alpha, net.head_columns());
    } else {
        std::vector<double> scores(n, 0.0);
        for (std::size_t i = 0; i < logits.rows(); ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                scores[j] += logits(i, j) / static_cast<double>(logits.rows());
            }
        }
        const std::size_t m = std::min(odn_params.most_similar, n);
        column = odn_weight_init(scores, net.head_columns(), odn_params.alpha, odn_params.beta, m);
    }

    double bias = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        bias += net.head_bias()(0, c) / static_cast<double>(n);
    }
    net.expand_output_dim(column, bias);

    const Matrix expanded_logits = net.forward(trigger_features);
    std::vector<double> new_row(n + 1, 0.0);
    for (std::size_t i = 0; i < expanded_logits.rows(); ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            new_row[j] += expanded_logits(i, j) / static_cast<double>(expanded_logits.rows());
        }
    }
    double new_radius = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        new_radius += bank.radiuses(0, c) / static_cast<double>(n);
    }
    bank.expand(new_row, new_radius);
    registry.add(new_label);
}

void MemoryBank::add_category(const Matrix& samples) {
    if (samples.rows() < k_) {
        throw std::runtime_error("MemoryBank: got " + std::to_string(samples.rows()) +
                                 " samples, need " + std::to_string(k_));
    }
    Matrix kept(k_, samples.cols());
    for (std::size_t i = 0; i < k_; ++i) {
        for (std::size_t j = 0; j < samples.cols(); ++j) {
            kept(i, j) = samples(i, j);
        }
    }
    per_category_.push_back(std::move(kept));
}

void finetune_balanced(ExpandableNet& net, PrototypeBank& bank, const MemoryBank& memory,
                       const Matrix& new_samples, const FinetuneConfig& config) {
    const std::size_t known = memory.category_count();
    if (known + 1 != net.category_count()) {
        throw std::runtime_error("finetune_balanced: memory covers " + std::to_string(known) +
                                 " categories but net has " + std::to_string(net.category_count()));
    }
    const std::size_t k = memory.k();
    for (std::size_t c = 0; c < known; ++c) {
        if (memory.per_category()[c].rows() != k) {
            throw std::runtime_error("finetune_balanced: category " + std::to_string(c) + " holds " +
                                     std::to_string(memory.per_category()[c].rows()) +
                                     " memory samples, contract is " + std::to_string(k));
        }
    }
    if (new_samples.rows() != k) {
        throw std::runtime_error("finetune_balanced: " + std::to_string(new_samples.rows()) +
                                 " new-category samples, contract is " + std::to_string(k));
    }
    if (config.learning_rate == 0.0) {
        return;  // zero rate: nothing can change
    }

    const std::size_t total = (known + 1) * k;
    Matrix features(total, net.input_dim());
    std::vector<int> labels(total);
    std::size_t row = 0;
    for (std::size_t c = 0; c < known; ++c) {
        const Matrix& samples = memory.per_category()[c];
        for (std::size_t i = 0; i < k; ++i, ++row) {
            for (std::size_t j = 0; j < samples.cols(); ++j) {
                features(row, j) = samples(i, j);
            }
            labels[row] = static_cast<int>(c);
        }
    }
    for (std::size_t i = 0; i < k; ++i, ++row) {
        for (std::size_t j = 0; j < new_samples.cols(); ++j) {
            features(row, j) = new_samples(i, j);
        }
        labels[row] = static_cast<int>(known);
    }

    SgdMomentum optimizer(config.learning_rate, config.momentum);
    optimizer.set_lr_scale(net.head_column_param_index(known), config.allometry_factor);

    std::mt19937_64 shuffle_rng(config.shuffle_seed);
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch_size = std::max<std::size_t>(1, config.batch_size);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t start = 0; start < total; start += batch_size) {
            const std::size_t count = std::min(batch_size, total - start);
            Matrix batch(count, features.cols());
            std::vector<int> batch_labels(count);
            for (std::size_t b = 0; b < count; ++b) {
                const std::size_t idx = order[start + b];
                for (std::size_t j = 0; j < features.cols(); ++j) {
                    batch(b, j) = features(idx, j);
                }
                batch_labels[b] = labels[idx];
            }
            TotalLossResult step = total_loss(net, bank, batch, batch_labels, config.weights,
                                              config.radius_grad_to_features);
            if (!std::isfinite(step.breakdown.total)) {
                throw std::runtime_error("finetune_balanced: diverged at epoch " +
                                         std::to_string(epoch + 1) +
                                         " (non-finite loss); lower the learning rate");
            }
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
    }
}

const std::string& LabelOracle::annotate(const std::string& sample_id) {
    const auto it = truth_.find(sample_id);
    if (it == truth_.end()) {
        throw std::runtime_error("LabelOracle: no ground truth for sample '" + sample_id + "'");
    }
    ++labels_consumed_;
    ++consumption_per_category_[it->second];
    return it->second;
}

IncrementalResult run_incremental_phase(ExpandableNet& net, PrototypeBank& bank,
                                        ThresholdSet& thresholds, CategoryRegistry& registry,
                                        MemoryBank& memory, TrainingSet labeled_pool,
                                        const std::vector<StreamSample>& stream,
                                        LabelOracle& oracle, const IncrementalConfig& config) {
    if (config.trigger < memory.k()) {
        throw std::runtime_error("run_incremental_phase: trigger " + std::to_string(config.trigger) +
                                 " is below the memory size " + std::to_string(memory.k()));
    }
    if (registry.size() != net.category_count()) {
        throw std::runtime_error("run_incremental_phase: registry covers " +
                                 std::to_string(registry.size()) + " labels but net has " +
                                 std::to_string(net.category_count()) + " categories");
    }
    if (labeled_pool.features.rows() != labeled_pool.labels.size()) {
        throw std::runtime_error("run_incremental_phase: labeled pool features/labels disagree");
    }

    IncrementalResult result;
    std::map<std::string, std::vector<std::vector<double>>> buffers;  // pending new categories

    for (std::size_t pos = 0; pos < stream.size(); ++pos) {
        const StreamSample& sample = stream[pos];
        StreamEvent event;
        event.iteration = pos + 1;
        event.id = sample.id;

        Matrix batch = Matrix::from_rows({sample.features});
        const Matrix row = score_rows(net, bank, batch, config.mode);
        const Decision decision = decide(row.row(0), thresholds);

        if (decision.outcome == Outcome::accept) {
            event.decision = registry.label(decision.category);
        } else {
            event.decision = "unknown";
            event.consulted_oracle = true;
            const std::string truth = oracle.annotate(sample.id);
            const int truth_index = registry.index_of(truth);
            if (truth_index >= 0) {
                // annotated but already known: keep the labelled sample in the
                // pool so the next recalibration sees this blind spot
                Matrix grown(labeled_pool.features.rows() + 1, labeled_pool.features.cols());
                for (std::size_t i = 0; i < labeled_pool.features.rows(); ++i) {
                    for (std::size_t j = 0; j < grown.cols(); ++j) {
                        grown(i, j) = labeled_pool.features(i, j);
                    }
                }
                for (std::size_t j = 0; j < grown.cols(); ++j) {
                    grown(labeled_pool.features.rows(), j) = sample.features[j];
                }
                labeled_pool.features = std::move(grown);
                labeled_pool.labels.push_back(truth_index);
            } else {
                auto& buffer = buffers[truth];
                buffer.push_back(sample.features);
                if (buffer.size() >= config.trigger) {
                    const Matrix trigger_samples = Matrix::from_rows(buffer);
                    expand_category(net, bank, registry, truth, trigger_samples, config.init,
                                    config.odn_params);

                    Matrix finetune_new(memory.k(), trigger_samples.cols());
                    for (std::size_t i = 0; i < memory.k(); ++i) {
                        for (std::size_t j = 0; j < trigger_samples.cols(); ++j) {
                            finetune_new(i, j) = trigger_samples(i, j);
                        }
                    }
                    FinetuneConfig finetune = config.finetune;
                    finetune.shuffle_seed = config.finetune.shuffle_seed + result.summary.expansions;
                    finetune_balanced(net, bank, memory, finetune_new, finetune);
                    memory.add_category(finetune_new);

                    // grow the labelled pool by the trigger samples, then
                    // recalibrate every category on the pool with the updated model
                    const std::size_t new_index = registry.size() - 1;
                    Matrix pool(labeled_pool.features.rows() + trigger_samples.rows(),
                                labeled_pool.features.cols());
                    for (std::size_t i = 0; i < labeled_pool.features.rows(); ++i) {
                        for (std::size_t j = 0; j < pool.cols(); ++j) {
                            pool(i, j) = labeled_pool.features(i, j);
                        }
                    }
                    for (std::size_t i = 0; i < trigger_samples.rows(); ++i) {
                        const std::size_t r = labeled_pool.features.rows() + i;
                        for (std::size_t j = 0; j < pool.cols(); ++j) {
                            pool(r, j) = trigger_samples(i, j);
                        }
                        labeled_pool.labels.push_back(static_cast<int>(new_index));
                    }
                    labeled_pool.features = std::move(pool);
                    labeled_pool.category_count = registry.size();

                    const std::vector<Matrix> calib_rows = collect_calibration_rows(
                        net, bank, labeled_pool.features, labeled_pool.labels, registry.size(),
                        config.mode);
                    thresholds = calibrate(calib_rows, config.eps_mu, config.rho, config.mode);

                    buffers.erase(truth);
                    ++result.summary.expansions;
                    event.expanded = true;
                }
            }
        }

        event.category_count = registry.size();
        result.events.push_back(std::move(event));
    }

    result.summary.labels_consumed = oracle.labels_consumed();
    result.summary.labels_per_category = oracle.consumption_per_category();
    result.summary.final_category_count = registry.size();
    result.summary.mean_labels_per_new_category =
        result.summary.expansions
            ? static_cast<double>(result.summary.labels_consumed) /
                  static_cast<double>(result.summary.expansions)
            : 0.0;
    return result;
}

}  // namespace podn
