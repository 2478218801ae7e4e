#include "podn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "podn/numerics.hpp"
#include "podn/serialize.hpp"

namespace podn {

namespace {

using nlohmann::json;

// salts for derive_seed; one master seed drives the whole run
constexpr std::uint64_t kSaltDataset = 1;
constexpr std::uint64_t kSaltSplit = 2;
constexpr std::uint64_t kSaltModel = 3;
constexpr std::uint64_t kSaltShuffle = 4;
constexpr std::uint64_t kSaltMemory = 5;
constexpr std::uint64_t kSaltFinetune = 6;

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::podn_radius: return "podn_radius";
        case Method::podn: return "podn";
        case Method::odn_baseline: return "odn_baseline";
        case Method::closed_baseline: return "closed_baseline";
    }
    throw std::runtime_error("to_string: bad method");
}

Method method_from_string(const std::string& name) {
    if (name == "podn_radius") return Method::podn_radius;
    if (name == "podn") return Method::podn;
    if (name == "odn_baseline") return Method::odn_baseline;
    if (name == "closed_baseline") return Method::closed_baseline;
    throw std::runtime_error("unknown method '" + name +
                             "' (expected podn_radius, podn, odn_baseline or closed_baseline)");
}

namespace {

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        out = obj.at(key).get<T>();
    }
}

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw std::runtime_error("config: unknown key '" + item.key() + "' in " + where);
        }
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    const json doc = json::parse(json_text);
    check_keys(doc,
               {"dataset", "split", "model", "train", "loss", "detector", "incremental", "method",
                "seed", "closed_label_budget"},
               "top level");
    ExperimentConfig config;

    if (doc.contains("dataset")) {
        const json& ds = doc.at("dataset");
        check_keys(ds, {"kind", "path", "clusters", "dim", "per_cluster", "separation", "sigma"},
                   "dataset");
        const std::string kind = ds.value("kind", "synthetic");
        if (kind == "csv") {
            config.csv_path = ds.at("path").get<std::string>();
        } else if (kind == "synthetic") {
            read_field(ds, "clusters", config.synthetic.clusters);
            read_field(ds, "dim", config.synthetic.dim);
            read_field(ds, "per_cluster", config.synthetic.per_cluster);
            read_field(ds, "separation", config.synthetic.separation);
            read_field(ds, "sigma", config.synthetic.sigma);
        } else {
            throw std::runtime_error("config: dataset.kind must be 'synthetic' or 'csv'");
        }
    }
    if (doc.contains("split")) {
        const json& sp = doc.at("split");
        check_keys(sp, {"known_count", "min_incremental_per_category"}, "split");
        read_field(sp, "known_count", config.known_count);
        read_field(sp, "min_incremental_per_category", config.min_incremental_per_category);
    }
    if (doc.contains("model")) {
        const json& m = doc.at("model");
        check_keys(m, {"hidden_dims"}, "model");
        read_field(m, "hidden_dims", config.hidden_dims);
    }
    if (doc.contains("train")) {
        const json& t = doc.at("train");
        check_keys(t, {"epochs", "batch_size", "learning_rate", "momentum"}, "train");
        read_field(t, "epochs", config.epochs);
        read_field(t, "batch_size", config.batch_size);
        read_field(t, "learning_rate", config.learning_rate);
        read_field(t, "momentum", config.momentum);
    }
    if (doc.contains("loss")) {
        const json& l = doc.at("loss");
        check_keys(l, {"omega", "w1", "w2", "radius_to_features"}, "loss");
        read_field(l, "omega", config.weights.omega);
        read_field(l, "w1", config.weights.w1);
        read_field(l, "w2", config.weights.w2);
        read_field(l, "radius_to_features", config.radius_to_features);
    }
    if (doc.contains("detector")) {
        const json& d = doc.at("detector");
        check_keys(d, {"eps_mu", "rho"}, "detector");
        read_field(d, "eps_mu", config.eps_mu);
        read_field(d, "rho", config.rho);
    }
    if (doc.contains("incremental")) {
        const json& inc = doc.at("incremental");
        check_keys(inc,
                   {"trigger", "memory_k", "allometry", "finetune_epochs", "finetune_learning_rate",
                    "odn_alpha", "odn_beta", "odn_most_similar"},
                   "incremental");
        read_field(inc, "trigger", config.trigger);
        read_field(inc, "memory_k", config.memory_k);
        read_field(inc, "allometry", config.allometry);
        read_field(inc, "finetune_epochs", config.finetune_epochs);
        read_field(inc, "finetune_learning_rate", config.finetune_learning_rate);
        read_field(inc, "odn_alpha", config.odn_params.alpha);
        read_field(inc, "odn_beta", config.odn_params.beta);
        read_field(inc, "odn_most_similar", config.odn_params.most_similar);
    }
    if (doc.contains("method")) {
        config.method = method_from_string(doc.at("method").get<std::string>());
    }
    read_field(doc, "seed", config.seed);
    if (doc.contains("closed_label_budget") && !doc.at("closed_label_budget").is_null()) {
        config.closed_label_budget = doc.at("closed_label_budget").get<std::size_t>();
    }

    if (config.trigger < config.memory_k) {
        throw std::runtime_error("config: trigger must be >= memory_k");
    }
    if (config.memory_k < 1) {
        throw std::runtime_error("config: memory_k must be >= 1");
    }
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + path + "'");
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

namespace {

json config_to_json(const ExperimentConfig& config) {
    json doc;
    if (!config.csv_path.empty()) {
        doc["dataset"] = {{"kind", "csv"}, {"path", config.csv_path}};
    } else {
        doc["dataset"] = {{"kind", "synthetic"},
                          {"clusters", config.synthetic.clusters},
                          {"dim", config.synthetic.dim},
                          {"per_cluster", config.synthetic.per_cluster},
                          {"separation", config.synthetic.separation},
                          {"sigma", config.synthetic.sigma}};
    }
    doc["split"] = {{"known_count", config.known_count},
                    {"min_incremental_per_category", config.min_incremental_per_category}};
    doc["model"] = {{"hidden_dims", config.hidden_dims}};
    doc["train"] = {{"epochs", config.epochs},
                    {"batch_size", config.batch_size},
                    {"learning_rate", config.learning_rate},
                    {"momentum", config.momentum}};
    doc["loss"] = {{"omega", config.weights.omega},
                   {"w1", config.weights.w1},
                   {"w2", config.weights.w2},
                   {"radius_to_features", config.radius_to_features}};
    doc["detector"] = {{"eps_mu", config.eps_mu}, {"rho", config.rho}};
    doc["incremental"] = {{"trigger", config.trigger},
                          {"memory_k", config.memory_k},
                          {"allometry", config.allometry},
                          {"finetune_epochs", config.finetune_epochs},
                          {"finetune_learning_rate", config.finetune_learning_rate},
                          {"odn_alpha", config.odn_params.alpha},
                          {"odn_beta", config.odn_params.beta},
                          {"odn_most_similar", config.odn_params.most_similar}};
    doc["method"] = to_string(config.method);
    doc["seed"] = config.seed;
    if (config.closed_label_budget) {
        doc["closed_label_budget"] = *config.closed_label_budget;
    } else {
        doc["closed_label_budget"] = nullptr;
    }
    return doc;
}

}  // namespace

std::string config_to_json_string(const ExperimentConfig& config) {
    return config_to_json(config).dump(2);
}

Top1Report evaluate_top1(const ExpandableNet& net, const Matrix& test_features,
                         const std::vector<std::string>& test_labels,
                         const std::vector<bool>& test_is_unknown, const CategoryRegistry& registry) {
    if (test_features.rows() == 0) {
        throw std::runtime_error("evaluate_top1: empty test set");
    }
    if (test_labels.size() != test_features.rows() || test_is_unknown.size() != test_features.rows()) {
        throw std::runtime_error("evaluate_top1: labels/flags do not match the test set");
    }
    const std::vector<int> predicted = net.predict(test_features);
    Top1Report report;
    std::size_t known_correct = 0;
    std::size_t unknown_correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const int truth = registry.index_of(test_labels[i]);
        if (truth < 0) {
            ++report.missing_label_count;
        }
        const bool correct = truth >= 0 && predicted[i] == truth;
        if (test_is_unknown[i]) {
            ++report.unknown_count;
            unknown_correct += correct ? 1 : 0;
        } else {
            ++report.known_count;
            known_correct += correct ? 1 : 0;
        }
    }
    report.known_accuracy =
        report.known_count ? static_cast<double>(known_correct) / report.known_count : 0.0;
    report.unknown_accuracy =
        report.unknown_count ? static_cast<double>(unknown_correct) / report.unknown_count : 0.0;
    report.combined_accuracy = static_cast<double>(known_correct + unknown_correct) /
                               static_cast<double>(predicted.size());
    return report;
}

SeparationStats separation_stats(const PrototypeBank& bank, const ExpandableNet& net,
                                 const Matrix& features, const std::vector<int>& labels) {
    const std::size_t n = bank.category_count();
    const Matrix logits = net.forward(features);
    Matrix mean_features(n, logits.cols(), 0.0);
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        if (c >= n) {
            throw std::runtime_error("separation_stats: label out of range");
        }
        ++counts[c];
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            mean_features(c, j) += logits(i, j);
        }
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (counts[c] == 0) {
            throw std::runtime_error("separation_stats: category " + std::to_string(c) +
                                     " has no samples");
        }
        for (std::size_t j = 0; j < mean_features.cols(); ++j) {
            mean_features(c, j) /= static_cast<double>(counts[c]);
        }
    }

    const DistanceResult response = distance_matrix(mean_features, bank);
    SeparationStats stats;
    std::size_t off_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                stats.diag_mean += response.scores(i, j);
            } else {
                stats.offdiag_mean += response.scores(i, j);
                ++off_count;
            }
        }
    }
    stats.diag_mean /= static_cast<double>(n);
    if (off_count) {
        stats.offdiag_mean /= static_cast<double>(off_count);
    }

    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            stats.prototype_inter_row_mean +=
                std::sqrt(squared_distance(bank.prototypes.row(i), bank.prototypes.row(j)));
            stats.feature_inter_class_mean +=
                std::sqrt(squared_distance(mean_features.row(i), mean_features.row(j)));
            ++pairs;
        }
    }
    if (pairs) {
        stats.prototype_inter_row_mean /= static_cast<double>(pairs);
        stats.feature_inter_class_mean /= static_cast<double>(pairs);
    }
    return stats;
}

namespace {

Dataset make_dataset(const ExperimentConfig& config) {
    if (!config.csv_path.empty()) {
        return load_dataset(config.csv_path);
    }
    SyntheticSpec spec = config.synthetic;
    spec.seed = derive_seed(config.seed, kSaltDataset);
    return generate_synthetic(spec);
}

MemoryBank build_memory(const OpenSplit& split, std::size_t known_count, std::size_t k,
                        std::uint64_t seed) {
    MemoryBank memory(k);
    std::mt19937_64 rng(seed);
    for (std::size_t c = 0; c < known_count; ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < split.initial_labels.size(); ++i) {
            if (split.initial_labels[i] == static_cast<int>(c)) {
                rows.push_back(i);
            }
        }
        if (rows.size() < k) {
            throw std::runtime_error("memory bank: category '" + split.known_labels[c] + "' has " +
                                     std::to_string(rows.size()) + " initial samples, needs " +
                                     std::to_string(k));
        }
        std::shuffle(rows.begin(), rows.end(), rng);
        Matrix samples(k, split.initial_features.cols());
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < samples.cols(); ++j) {
                samples(i, j) = split.initial_features(rows[i], j);
            }
        }
        memory.add_category(samples);
    }
    return memory;
}

ExperimentRun run_open_method(const ExperimentConfig& config) {
    const Method method = config.method;
    Dataset dataset = make_dataset(config);
    OpenSplit split = open_split(dataset, config.known_count, config.min_incremental_per_category,
                                 derive_seed(config.seed, kSaltSplit));

    LossWeights weights = config.weights;
    if (method == Method::podn) {
        weights.w2 = 0.0;
    } else if (method == Method::odn_baseline) {
        weights.w1 = 0.0;
        weights.w2 = 0.0;
    }
    const ScoreMode mode = method == Method::odn_baseline ? ScoreMode::feature : ScoreMode::distance;

    TrainingSet initial{split.initial_features, split.initial_labels, config.known_count};
    ModelConfig model_config{dataset.feature_dim, config.hidden_dims, config.known_count,
                             derive_seed(config.seed, kSaltModel)};
    TrainConfig train_config{config.epochs,
                             config.batch_size,
                             config.learning_rate,
                             config.momentum,
                             weights,
                             config.radius_to_features,
                             derive_seed(config.seed, kSaltShuffle)};
    InitialTrainResult trained = train_initial(initial, model_config, train_config);

    const SeparationStats separation =
        separation_stats(trained.bank, trained.net, split.initial_features, split.initial_labels);

    const std::vector<Matrix> calib_rows =
        collect_calibration_rows(trained.net, trained.bank, split.initial_features,
                                 split.initial_labels, config.known_count, mode);
    ThresholdSet thresholds = calibrate(calib_rows, config.eps_mu, config.rho, mode);

    const DetectionOutcome detection = evaluate_detection(trained.net, trained.bank, thresholds,
                                                          split.test_features, split.test_is_unknown);

    MemoryBank memory =
        build_memory(split, config.known_count, config.memory_k, derive_seed(config.seed, kSaltMemory));
    CategoryRegistry registry(split.known_labels);
    LabelOracle oracle(split.oracle_truth);

    IncrementalConfig inc_config;
    inc_config.trigger = config.trigger;
    inc_config.mode = mode;
    inc_config.init = method == Method::odn_baseline ? WeightInitKind::odn : WeightInitKind::distance;
    inc_config.odn_params = config.odn_params;
    inc_config.eps_mu = config.eps_mu;
    inc_config.rho = config.rho;
    inc_config.finetune = FinetuneConfig{config.finetune_learning_rate,
                                         config.momentum,
                                         config.finetune_epochs,
                                         config.batch_size,
                                         config.allometry,
                                         weights,
                                         config.radius_to_features,
                                         derive_seed(config.seed, kSaltFinetune)};

    IncrementalResult incremental =
        run_incremental_phase(trained.net, trained.bank, thresholds, registry, memory, initial,
                              split.incremental_stream, oracle, inc_config);

    const Top1Report top1 = evaluate_top1(trained.net, split.test_features, split.test_labels,
                                          split.test_is_unknown, registry);

    ExperimentReport report;
    report.method = to_string(method);
    report.seed = config.seed;
    report.config_json = config_to_json_string(config);
    report.has_detection = true;
    report.detection = detection.metrics;
    report.top1 = top1;
    report.has_separation = true;
    report.separation = separation;
    report.incremental = incremental.summary;
    report.epoch_log = trained.log;
    report.stream_events = incremental.events;
    report.detection_decisions = detection.decisions;
    report.test_ids = split.test_ids;
    report.test_is_unknown = split.test_is_unknown;
    report.final_labels = registry.labels();

    return ExperimentRun{std::move(report), std::move(trained.net), std::move(trained.bank),
                         std::move(thresholds), std::move(registry)};
}

ExperimentRun run_closed_baseline(const ExperimentConfig& config) {
    if (!config.closed_label_budget) {
        throw std::runtime_error(
            "closed_baseline requires closed_label_budget (the labels consumed by the paired "
            "open-set run)");
    }
    Dataset dataset = make_dataset(config);
    OpenSplit split = open_split(dataset, config.known_count, config.min_incremental_per_category,
                                 derive_seed(config.seed, kSaltSplit));

    const std::size_t budget = *config.closed_label_budget;
    if (budget > split.incremental_stream.size()) {
        throw std::runtime_error("closed_baseline: budget " + std::to_string(budget) +
                                 " exceeds the stream size " +
                                 std::to_string(split.incremental_stream.size()));
    }

    // budget parity: exactly the first `budget` stream samples, fully labelled
    CategoryRegistry registry(split.known_labels);
    for (std::size_t i = 0; i < budget; ++i) {
        const std::string& label = split.stream_hidden_labels[i];
        if (registry.index_of(label) < 0) {
            registry.add(label);
        }
    }

    const std::size_t total = split.initial_features.rows() + budget;
    Matrix features(total, dataset.feature_dim);
    std::vector<int> labels(total);
    for (std::size_t i = 0; i < split.initial_features.rows(); ++i) {
        for (std::size_t j = 0; j < features.cols(); ++j) {
            features(i, j) = split.initial_features(i, j);
        }
        labels[i] = split.initial_labels[i];
    }
    for (std::size_t i = 0; i < budget; ++i) {
        const std::size_t row = split.initial_features.rows() + i;
        for (std::size_t j = 0; j < features.cols(); ++j) {
            features(row, j) = split.incremental_stream[i].features[j];
        }
        labels[row] = registry.index_of(split.stream_hidden_labels[i]);
    }

    LossWeights weights;  // plain classifier: no prototype or radius terms
    weights.w1 = 0.0;
    weights.w2 = 0.0;

    TrainingSet training{std::move(features), std::move(labels), registry.size()};
    ModelConfig model_config{dataset.feature_dim, config.hidden_dims, registry.size(),
                             derive_seed(config.seed, kSaltModel)};
    TrainConfig train_config{config.epochs,
                             config.batch_size,
                             config.learning_rate,
                             config.momentum,
                             weights,
                             false,
                             derive_seed(config.seed, kSaltShuffle)};
    InitialTrainResult trained = train_initial(training, model_config, train_config);

    const Top1Report top1 = evaluate_top1(trained.net, split.test_features, split.test_labels,
                                          split.test_is_unknown, registry);

    ExperimentReport report;
    report.method = to_string(Method::closed_baseline);
    report.seed = config.seed;
    report.config_json = config_to_json_string(config);
    report.top1 = top1;
    report.incremental.final_category_count = registry.size();
    report.closed_label_budget = budget;
    report.epoch_log = trained.log;
    report.test_ids = split.test_ids;
    report.test_is_unknown = split.test_is_unknown;
    report.final_labels = registry.labels();

    return ExperimentRun{std::move(report), std::move(trained.net), std::move(trained.bank),
                         ThresholdSet{}, std::move(registry)};
}

}  // namespace

ExperimentRun run_experiment(const ExperimentConfig& config) {
    if (config.method == Method::closed_baseline) {
        return run_closed_baseline(config);
    }
    return run_open_method(config);
}

namespace {

json metrics_to_json(const DetectionMetrics& m) {
    return {{"true_positive", m.true_positive}, {"false_positive", m.false_positive},
            {"true_negative", m.true_negative}, {"false_negative", m.false_negative},
            {"precision", m.precision},         {"recall", m.recall},
            {"f1", m.f1},                       {"known_accept_rate", m.known_accept_rate}};
}

json top1_to_json(const Top1Report& t) {
    return {{"known_accuracy", t.known_accuracy},
            {"unknown_accuracy", t.unknown_accuracy},
            {"combined_accuracy", t.combined_accuracy},
            {"known_count", t.known_count},
            {"unknown_count", t.unknown_count},
            {"missing_label_count", t.missing_label_count}};
}

json separation_to_json(const SeparationStats& s) {
    return {{"diag_mean", s.diag_mean},
            {"offdiag_mean", s.offdiag_mean},
            {"prototype_inter_row_mean", s.prototype_inter_row_mean},
            {"feature_inter_class_mean", s.feature_inter_class_mean}};
}

json incremental_to_json(const IncrementalSummary& s) {
    json per_category = json::object();
    for (const auto& [label, count] : s.labels_per_category) {
        per_category[label] = count;
    }
    return {{"expansions", s.expansions},
            {"labels_consumed", s.labels_consumed},
            {"labels_per_category", per_category},
            {"final_category_count", s.final_category_count},
            {"mean_labels_per_new_category", s.mean_labels_per_new_category}};
}

}  // namespace

std::string report_to_json_string(const ExperimentReport& report) {
    json doc;
    doc["format"] = "report-v1";
    doc["method"] = report.method;
    doc["seed"] = report.seed;
    doc["config"] = json::parse(report.config_json);
    doc["detection"] = report.has_detection ? metrics_to_json(report.detection) : json(nullptr);
    doc["top1"] = top1_to_json(report.top1);
    doc["separation"] = report.has_separation ? separation_to_json(report.separation) : json(nullptr);
    doc["incremental"] = incremental_to_json(report.incremental);
    doc["closed_label_budget"] =
        report.method == "closed_baseline" ? json(report.closed_label_budget) : json(nullptr);
    doc["final_labels"] = report.final_labels;
    return doc.dump(2);
}

namespace {

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_run_files(const ExperimentRun& run, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const ExperimentReport& report = run.report;

    write_text_file(out_dir + "/report.json", report_to_json_string(report) + "\n");

    // plot-ready loss curve: one row per epoch
    std::string loss_csv = "epoch,loss1,loss21,loss22,loss2,loss3,total,train_accuracy\n";
    for (std::size_t e = 0; e < report.epoch_log.size(); ++e) {
        const LossBreakdown& l = report.epoch_log[e].losses;
        loss_csv += std::to_string(e + 1) + "," + fmt_double(l.loss1) + "," + fmt_double(l.loss21) +
                    "," + fmt_double(l.loss22) + "," + fmt_double(l.loss2) + "," +
                    fmt_double(l.loss3) + "," + fmt_double(l.total) + "," +
                    fmt_double(report.epoch_log[e].train_accuracy) + "\n";
    }
    write_text_file(out_dir + "/loss_curve.csv", loss_csv);

    if (report.has_detection) {
        std::string det_csv = "id,truth,decision,top,margin\n";
        for (std::size_t i = 0; i < report.detection_decisions.size(); ++i) {
            const Decision& d = report.detection_decisions[i];
            const std::string decision = d.outcome == Outcome::accept
                                             ? report.final_labels.at(d.category)
                                             : std::string("unknown");
            det_csv += report.test_ids[i] + "," +
                       (report.test_is_unknown[i] ? "unknown" : "known") + "," + decision + "," +
                       fmt_double(d.top_value) + "," + fmt_double(d.margin) + "\n";
        }
        write_text_file(out_dir + "/detection.csv", det_csv);
        write_text_file(out_dir + "/detection_summary.json",
                        metrics_to_json(report.detection).dump(2) + "\n");
    }

    if (!report.stream_events.empty()) {
        std::string inc_csv = "iteration,id,decision,oracle,expansion,category_count\n";
        std::string growth_csv = "iteration,category_count\n";
        for (const StreamEvent& e : report.stream_events) {
            inc_csv += std::to_string(e.iteration) + "," + e.id + "," + e.decision + "," +
                       (e.consulted_oracle ? "1" : "0") + "," + (e.expanded ? "1" : "0") + "," +
                       std::to_string(e.category_count) + "\n";
            growth_csv += std::to_string(e.iteration) + "," + std::to_string(e.category_count) + "\n";
        }
        write_text_file(out_dir + "/incremental_log.csv", inc_csv);
        write_text_file(out_dir + "/category_growth.csv", growth_csv);
        write_text_file(out_dir + "/incremental_summary.json",
                        incremental_to_json(report.incremental).dump(2) + "\n");
    }

    save_model(run.net, run.registry.labels(), out_dir + "/model.json");
    save_bank(run.bank, run.registry.labels(), out_dir + "/bank.json");
    if (run.thresholds.category_count() > 0) {
        save_thresholds(run.thresholds, run.registry.labels(), out_dir + "/thresholds.json");
    }
}

}  // namespace podn
