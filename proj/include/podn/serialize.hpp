#pragma once

#include <string>
#include <vector>

#include "podn/detector.hpp"
#include "podn/labels.hpp"
#include "podn/model.hpp"
#include "podn/prototypes.hpp"

namespace podn {

/// JSON checkpoints. Doubles are written in shortest round-trip form, so a
/// save/load cycle reproduces every value bit-exactly.

struct ModelCheckpoint {
    ExpandableNet net;
    std::vector<std::string> labels;  // head-column order
};

void save_model(const ExpandableNet& net, const std::vector<std::string>& labels,
                const std::string& path);
ModelCheckpoint load_model(const std::string& path);

void save_bank(const PrototypeBank& bank, const std::vector<std::string>& labels,
               const std::string& path);
struct BankCheckpoint {
    PrototypeBank bank;
    std::vector<std::string> labels;
};
BankCheckpoint load_bank(const std::string& path);

void save_thresholds(const ThresholdSet& thresholds, const std::vector<std::string>& labels,
                     const std::string& path);
struct ThresholdCheckpoint {
    ThresholdSet thresholds;
    std::vector<std::string> labels;
};
ThresholdCheckpoint load_thresholds(const std::string& path);

}  // namespace podn
