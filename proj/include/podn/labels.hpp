#pragma once

#include <string>
#include <vector>

namespace podn {

/// Label string <-> head-column index mapping. Order matches the head columns
/// and prototype rows; new categories append.
class CategoryRegistry {
public:
    CategoryRegistry() = default;
    explicit CategoryRegistry(std::vector<std::string> labels) : labels_(std::move(labels)) {}

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t index) const { return labels_.at(index); }

    /// Index of a label, or -1 when unknown.
    int index_of(const std::string& label) const;

    std::size_t add(const std::string& label);

private:
    std::vector<std::string> labels_;
};

}  // namespace podn
