#include "podn/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace podn {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty()) {
        throw std::runtime_error("checkpoint: " + what + " must be a non-empty array of rows");
    }
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const json& row = rows[i];
        if (!row.is_array() || row.size() != m.cols()) {
            throw std::runtime_error("checkpoint: " + what + " row " + std::to_string(i) +
                                     " has inconsistent length");
        }
        for (std::size_t j = 0; j < m.cols(); ++j) {
            m(i, j) = row[j].get<double>();
        }
    }
    return m;
}

void write_json_file(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw std::runtime_error("checkpoint: write to '" + path + "' failed");
    }
}

json read_json_file(const std::string& path, const char* expected_format) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("checkpoint: cannot open '" + path + "'");
    }
    json doc = json::parse(in);
    if (doc.value("format", "") != expected_format) {
        throw std::runtime_error("checkpoint: '" + path + "' is not a " + expected_format +
                                 " document");
    }
    return doc;
}

}  // namespace

void save_model(const ExpandableNet& net, const std::vector<std::string>& labels,
                const std::string& path) {
    if (labels.size() != net.category_count()) {
        throw std::runtime_error("save_model: " + std::to_string(labels.size()) + " labels for " +
                                 std::to_string(net.category_count()) + " categories");
    }
    json doc;
    doc["format"] = "model-v1";
    doc["input_dim"] = net.input_dim();
    json hidden_dims = json::array();
    json hidden = json::array();
    for (const DenseLayer& layer : net.hidden_layers()) {
        hidden_dims.push_back(layer.bias.cols());
        hidden.push_back({{"weights", matrix_to_json(layer.weights)},
                          {"bias", matrix_to_json(layer.bias)}});
    }
    doc["hidden_dims"] = std::move(hidden_dims);
    doc["labels"] = labels;
    doc["hidden"] = std::move(hidden);
    json cols = json::array();
    for (const Matrix& col : net.head_columns()) {
        cols.push_back(matrix_to_json(col));
    }
    doc["head_columns"] = std::move(cols);
    doc["head_bias"] = matrix_to_json(net.head_bias());
    write_json_file(doc, path);
}

ModelCheckpoint load_model(const std::string& path) {
    const json doc = read_json_file(path, "model-v1");
    ModelConfig config;
    config.input_dim = doc.at("input_dim").get<std::size_t>();
    config.hidden_dims = doc.at("hidden_dims").get<std::vector<std::size_t>>();
    std::vector<std::string> labels = doc.at("labels").get<std::vector<std::string>>();
    if (labels.size() < 2) {
        throw std::runtime_error("load_model: need at least 2 categories");
    }
    config.initial_categories = labels.size();
    config.seed = 0;  // weights are overwritten below

    ExpandableNet net(config);
    const json& hidden = doc.at("hidden");
    if (hidden.size() != config.hidden_dims.size()) {
        throw std::runtime_error("load_model: hidden layer count mismatch");
    }
    std::vector<Matrix*> params = net.parameters();
    std::size_t p = 0;
    for (std::size_t l = 0; l < hidden.size(); ++l) {
        Matrix weights = matrix_from_json(hidden[l].at("weights"), "hidden weights");
        Matrix bias = matrix_from_json(hidden[l].at("bias"), "hidden bias");
        if (!params[p]->same_shape(weights) || !params[p + 1]->same_shape(bias)) {
            throw std::runtime_error("load_model: hidden layer " + std::to_string(l) +
                                     " shape mismatch");
        }
        *params[p++] = std::move(weights);
        *params[p++] = std::move(bias);
    }
    const json& cols = doc.at("head_columns");
    if (cols.size() != labels.size()) {
        throw std::runtime_error("load_model: head column count mismatch");
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
        Matrix col = matrix_from_json(cols[c], "head column");
        if (!params[p]->same_shape(col)) {
            throw std::runtime_error("load_model: head column " + std::to_string(c) +
                                     " shape mismatch");
        }
        *params[p++] = std::move(col);
    }
    Matrix head_bias = matrix_from_json(doc.at("head_bias"), "head bias");
    if (!params[p]->same_shape(head_bias)) {
        throw std::runtime_error("load_model: head bias shape mismatch");
    }
    *params[p] = std::move(head_bias);
    return {std::move(net), std::move(labels)};
}

void save_bank(const PrototypeBank& bank, const std::vector<std::string>& labels,
               const std::string& path) {
    if (labels.size() != bank.category_count()) {
        throw std::runtime_error("save_bank: " + std::to_string(labels.size()) + " labels for " +
                                 std::to_string(bank.category_count()) + " categories");
    }
    json doc;
    doc["format"] = "bank-v1";
    doc["labels"] = labels;
    doc["epsilon_dist"] = bank.epsilon_dist;
    doc["prototypes"] = matrix_to_json(bank.prototypes);
    doc["radiuses"] = matrix_to_json(bank.radiuses)[0];
    write_json_file(doc, path);
}

BankCheckpoint load_bank(const std::string& path) {
    const json doc = read_json_file(path, "bank-v1");
    BankCheckpoint checkpoint;
    checkpoint.labels = doc.at("labels").get<std::vector<std::string>>();
    checkpoint.bank.epsilon_dist = doc.at("epsilon_dist").get<double>();
    checkpoint.bank.prototypes = matrix_from_json(doc.at("prototypes"), "prototypes");
    const auto radiuses = doc.at("radiuses").get<std::vector<double>>();
    checkpoint.bank.radiuses = Matrix(1, radiuses.size());
    for (std::size_t i = 0; i < radiuses.size(); ++i) {
        checkpoint.bank.radiuses(0, i) = radiuses[i];
    }
    if (checkpoint.bank.prototypes.rows() != checkpoint.labels.size() ||
        checkpoint.bank.radiuses.cols() != checkpoint.labels.size()) {
        throw std::runtime_error("load_bank: label/prototype/radius counts disagree");
    }
    return checkpoint;
}

void save_thresholds(const ThresholdSet& thresholds, const std::vector<std::string>& labels,
                     const std::string& path) {
    if (labels.size() != thresholds.category_count()) {
        throw std::runtime_error("save_thresholds: " + std::to_string(labels.size()) +
                                 " labels for " + std::to_string(thresholds.category_count()) +
                                 " categories");
    }
    json doc;
    doc["format"] = "thresholds-v1";
    doc["mode"] = to_string(thresholds.mode);
    doc["eps_mu"] = thresholds.eps_mu;
    doc["rho"] = thresholds.rho;
    doc["labels"] = labels;
    doc["eta"] = thresholds.eta;
    doc["mu"] = thresholds.mu;
    doc["delta"] = thresholds.delta;
    write_json_file(doc, path);
}

ThresholdCheckpoint load_thresholds(const std::string& path) {
    const json doc = read_json_file(path, "thresholds-v1");
    ThresholdCheckpoint checkpoint;
    checkpoint.labels = doc.at("labels").get<std::vector<std::string>>();
    checkpoint.thresholds.mode = score_mode_from_string(doc.at("mode").get<std::string>());
    checkpoint.thresholds.eps_mu = doc.at("eps_mu").get<double>();
    checkpoint.thresholds.rho = doc.at("rho").get<double>();
    checkpoint.thresholds.eta = doc.at("eta").get<std::vector<double>>();
    checkpoint.thresholds.mu = doc.at("mu").get<std::vector<double>>();
    checkpoint.thresholds.delta = doc.at("delta").get<std::vector<double>>();
    const std::size_t n = checkpoint.labels.size();
    if (checkpoint.thresholds.eta.size() != n || checkpoint.thresholds.mu.size() != n ||
        checkpoint.thresholds.delta.size() != n) {
        throw std::runtime_error("load_thresholds: triplet lengths disagree with labels");
    }
    return checkpoint;
}

}  // namespace podn
