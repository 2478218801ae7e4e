#include "podn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace podn {

std::vector<std::string> Dataset::distinct_labels() const {
    std::vector<std::string> labels;
    for (const Sample& s : samples) {
        if (std::find(labels.begin(), labels.end(), s.label) == labels.end()) {
            labels.push_back(s.label);
        }
    }
    return labels;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double_strict(const std::string& text, std::size_t line_no) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw std::runtime_error("load_dataset: line " + std::to_string(line_no) +
                                 ": malformed number '" + text + "'");
    }
    return value;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_dataset: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("load_dataset: '" + path + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "label") {
        throw std::runtime_error("load_dataset: header must be 'label,f0,...', got '" + line + "'");
    }
    const std::size_t dim = header.size() - 1;
    for (std::size_t j = 0; j < dim; ++j) {
        if (header[j + 1] != "f" + std::to_string(j)) {
            throw std::runtime_error("load_dataset: header column " + std::to_string(j + 1) +
                                     " must be 'f" + std::to_string(j) + "', got '" + header[j + 1] + "'");
        }
    }

    Dataset dataset;
    dataset.feature_dim = dim;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != dim + 1) {
            throw std::runtime_error("load_dataset: line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(dim + 1) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        Sample sample;
        char id[16];
        std::snprintf(id, sizeof(id), "row%06zu", dataset.samples.size() + 1);
        sample.id = id;
        sample.label = fields[0];
        sample.features.reserve(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            sample.features.push_back(parse_double_strict(fields[j + 1], line_no));
        }
        dataset.samples.push_back(std::move(sample));
    }
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("save_dataset: cannot open '" + path + "' for writing");
    }
    out << "label";
    for (std::size_t j = 0; j < dataset.feature_dim; ++j) {
        out << ",f" << j;
    }
    out << "\n";
    char buf[40];
    for (const Sample& s : dataset.samples) {
        out << s.label;
        for (double v : s.features) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) {
        throw std::runtime_error("save_dataset: write to '" + path + "' failed");
    }
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
    if (spec.clusters < 2) {
        throw std::runtime_error("generate_synthetic: need at least 2 clusters");
    }
    if (spec.dim < 1 || spec.per_cluster < 1) {
        throw std::runtime_error("generate_synthetic: dim and per_cluster must be >= 1");
    }
    if (spec.separation <= 0.0 || spec.sigma <= 0.0) {
        throw std::runtime_error("generate_synthetic: separation and sigma must be positive");
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gaussian(0.0, 1.0);
    const double min_dist = spec.separation * spec.sigma;

    // Greedy rejection placement on a sphere; the radius grows until the
    // packing fits. In 1-d the sphere has two points, so >2 clusters never fit.
    std::vector<std::vector<double>> centers;
    double radius = min_dist;
    bool placed = false;
    for (int round = 0; round < 40 && !placed; ++round, radius *= 1.25) {
        centers.clear();
        bool round_ok = true;
        for (std::size_t c = 0; c < spec.clusters && round_ok; ++c) {
            bool accepted = false;
            for (int attempt = 0; attempt < 200 && !accepted; ++attempt) {
                std::vector<double> candidate(spec.dim);
                double norm = 0.0;
                for (double& v : candidate) {
                    v = gaussian(rng);
                    norm += v * v;
                }
                norm = std::sqrt(norm);
                if (norm == 0.0) {
                    continue;
                }
                for (double& v : candidate) {
                    v *= radius / norm;
                }
                accepted = true;
                for (const auto& existing : centers) {
                    double sq = 0.0;
                    for (std::size_t k = 0; k < spec.dim; ++k) {
                        const double d = candidate[k] - existing[k];
                        sq += d * d;
                    }
                    if (std::sqrt(sq) < min_dist) {
                        accepted = false;
                        break;
                    }
                }
                if (accepted) {
                    centers.push_back(std::move(candidate));
                }
            }
            round_ok = accepted;
        }
        placed = round_ok;
    }
    if (!placed) {
        throw std::runtime_error("generate_synthetic: infeasible packing: " +
                                 std::to_string(spec.clusters) + " clusters in " +
                                 std::to_string(spec.dim) + " dims at separation " +
                                 std::to_string(spec.separation));
    }

    Dataset dataset;
    dataset.feature_dim = spec.dim;
    dataset.samples.reserve(spec.clusters * spec.per_cluster);
    char buf[24];
    for (std::size_t c = 0; c < spec.clusters; ++c) {
        std::snprintf(buf, sizeof(buf), "cat%02zu", c);
        const std::string label = buf;
        for (std::size_t i = 0; i < spec.per_cluster; ++i) {
            Sample sample;
            std::snprintf(buf, sizeof(buf), "g%06zu", dataset.samples.size() + 1);
            sample.id = buf;
            sample.label = label;
            sample.features.resize(spec.dim);
            for (std::size_t k = 0; k < spec.dim; ++k) {
                sample.features[k] = centers[c][k] + spec.sigma * gaussian(rng);
            }
            dataset.samples.push_back(std::move(sample));
        }
    }
    return dataset;
}

OpenSplit open_split(const Dataset& dataset, std::size_t known_count,
                     std::size_t min_incremental_per_category, std::uint64_t seed) {
    std::vector<std::string> labels = dataset.distinct_labels();
    if (known_count < 2) {
        throw std::runtime_error("open_split: need at least 2 known categories");
    }
    if (known_count >= labels.size()) {
        throw std::runtime_error("open_split: known_count " + std::to_string(known_count) +
                                 " must be below the category count " + std::to_string(labels.size()));
    }

    std::mt19937_64 rng(seed);
    std::shuffle(labels.begin(), labels.end(), rng);

    OpenSplit split;
    split.known_labels.assign(labels.begin(), labels.begin() + static_cast<long>(known_count));
    split.unknown_labels.assign(labels.begin() + static_cast<long>(known_count), labels.end());

    std::unordered_map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        by_label[dataset.samples[i].label].push_back(i);
    }

    std::vector<std::size_t> initial_rows;
    std::vector<std::size_t> stream_rows;
    std::vector<std::size_t> test_rows;

    // incremental subsets are small (exactly the per-category minimum), so the
    // stream mirrors the protocol of a few labelled samples per category
    for (std::size_t ki = 0; ki < split.known_labels.size(); ++ki) {
        auto& indices = by_label[split.known_labels[ki]];
        std::shuffle(indices.begin(), indices.end(), rng);
        const std::size_t n = indices.size();
        const std::size_t n_incr = min_incremental_per_category;
        const std::size_t n_test = std::max<std::size_t>(1, n / 4);
        if (n_incr + n_test >= n) {
            throw std::runtime_error("open_split: known category '" + split.known_labels[ki] +
                                     "' has only " + std::to_string(n) +
                                     " samples; cannot cover initial/incremental/test");
        }
        const std::size_t n_init = n - n_test - n_incr;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < n_init; ++i) {
            initial_rows.push_back(indices[pos++]);
        }
        for (std::size_t i = 0; i < n_incr; ++i) {
            stream_rows.push_back(indices[pos++]);
        }
        for (std::size_t i = 0; i < n_test; ++i) {
            test_rows.push_back(indices[pos++]);
        }
    }
    for (const std::string& label : split.unknown_labels) {
        auto& indices = by_label[label];
        std::shuffle(indices.begin(), indices.end(), rng);
        const std::size_t n = indices.size();
        const std::size_t n_incr = min_incremental_per_category;
        if (n_incr >= n) {
            throw std::runtime_error("open_split: unknown category '" + label + "' has only " +
                                     std::to_string(n) + " samples; cannot cover incremental/test");
        }
        std::size_t pos = 0;
        for (std::size_t i = 0; i < n_incr; ++i) {
            stream_rows.push_back(indices[pos++]);
        }
        for (; pos < n; ++pos) {
            test_rows.push_back(indices[pos]);
        }
    }

    std::shuffle(stream_rows.begin(), stream_rows.end(), rng);

    split.initial_features = Matrix(initial_rows.size(), dataset.feature_dim);
    split.initial_labels.resize(initial_rows.size());
    for (std::size_t i = 0; i < initial_rows.size(); ++i) {
        const Sample& s = dataset.samples[initial_rows[i]];
        for (std::size_t k = 0; k < dataset.feature_dim; ++k) {
            split.initial_features(i, k) = s.features[k];
        }
        const auto it = std::find(split.known_labels.begin(), split.known_labels.end(), s.label);
        split.initial_labels[i] = static_cast<int>(it - split.known_labels.begin());
    }

    for (std::size_t row : stream_rows) {
        const Sample& s = dataset.samples[row];
        if (!split.oracle_truth.emplace(s.id, s.label).second) {
            throw std::runtime_error("open_split: duplicate sample id '" + s.id + "'");
        }
        split.incremental_stream.push_back({s.id, s.features});
        split.stream_hidden_labels.push_back(s.label);
    }

    split.test_features = Matrix(test_rows.size(), dataset.feature_dim);
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
        const Sample& s = dataset.samples[test_rows[i]];
        for (std::size_t k = 0; k < dataset.feature_dim; ++k) {
            split.test_features(i, k) = s.features[k];
        }
        split.test_ids.push_back(s.id);
        split.test_labels.push_back(s.label);
        split.test_is_unknown.push_back(std::find(split.known_labels.begin(), split.known_labels.end(),
                                                  s.label) == split.known_labels.end());
    }
    return split;
}

}  // namespace podn
