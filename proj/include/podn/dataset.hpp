#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "podn/incremental.hpp"
#include "podn/matrix.hpp"

namespace podn {

struct Sample {
    std::string id;
    std::string label;
    std::vector<double> features;
};

struct Dataset {
    std::vector<Sample> samples;
    std::size_t feature_dim = 0;

    /// Distinct labels in first-appearance order.
    std::vector<std::string> distinct_labels() const;
};

/// CSV with header `label,f0,f1,...,f{d-1}`; ids are assigned per row.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& dataset, const std::string& path);

struct SyntheticSpec {
    std::size_t clusters = 2;      // C
    std::size_t dim = 2;           // d
    std::size_t per_cluster = 50;  // n
    double separation = 6.0;       // s, in sigmas
    double sigma = 1.0;
    std::uint64_t seed = 0;
};

/// C isotropic Gaussian clusters with centers on a sphere whose radius is
/// grown until the minimum pairwise center distance reaches separation*sigma.
Dataset generate_synthetic(const SyntheticSpec& spec);

struct OpenSplit {
    std::vector<std::string> known_labels;
    std::vector<std::string> unknown_labels;

    // initial training set: knowns only, labels indexed in known_labels order
    Matrix initial_features;
    std::vector<int> initial_labels;

    // incremental stream: features and ids only; ground truth lives in the oracle
    std::vector<StreamSample> incremental_stream;
    std::unordered_map<std::string, std::string> oracle_truth;
    std::vector<std::string> stream_hidden_labels;  // aligned with the stream; closed-baseline input

    // test set: knowns and unknowns
    Matrix test_features;
    std::vector<std::string> test_ids;
    std::vector<std::string> test_labels;
    std::vector<bool> test_is_unknown;
};

/// Seeded half-known protocol: partitions categories into knowns/unknowns and
/// each category's samples into initial/incremental/test subsets. The initial
/// set never contains an unknown-labelled sample; every category contributes
/// at least min_incremental_per_category samples to the stream.
OpenSplit open_split(const Dataset& dataset, std::size_t known_count,
                     std::size_t min_incremental_per_category, std::uint64_t seed);

}  // namespace podn
