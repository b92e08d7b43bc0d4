#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "vocabulary.hpp"

namespace ppmf {

/// Dense, scaled patient matrix consumed by the classifier. Each row holds one
/// block of `block_width` cells per dynamic variable (24 time buckets, or the
/// six aggregates) followed by one cell per static variable.
class Dataset {
public:
    explicit Dataset(std::size_t block_width) : block_width_(block_width) {
        if (block_width == 0) throw Error(ErrorCode::BadConfig, "block width must be positive");
    }

    std::size_t block_width() const noexcept { return block_width_; }
    std::size_t dims() const noexcept { return kNumDynamic * block_width_ + kNumStatic; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }

    const std::string& id(std::size_t i) const { return ids_[i]; }
    int label(std::size_t i) const { return labels_[i]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dims(), dims()}; }
    std::span<double> mutable_row(std::size_t i) { return {values_.data() + i * dims(), dims()}; }

    /// Offset of the first cell of `variable` inside a row.
    std::size_t offset(std::size_t variable) const noexcept {
        return is_static(variable) ? kNumDynamic * block_width_ + (variable - kNumDynamic) : variable * block_width_;
    }
    std::size_t width(std::size_t variable) const noexcept { return is_static(variable) ? 1 : block_width_; }

    void add(std::string id, int label, std::span<const double> values) {
        if (values.size() != dims()) throw Error(ErrorCode::DimensionMismatch, "row for '" + id + "' has wrong width");
        ids_.push_back(std::move(id));
        labels_.push_back(label);
        values_.insert(values_.end(), values.begin(), values.end());
    }

    Dataset subset(std::span<const std::size_t> rows) const {
        Dataset out(block_width_);
        for (auto r : rows) out.add(ids_[r], labels_[r], row(r));
        return out;
    }

    std::size_t count_positive() const noexcept {
        std::size_t n = 0;
        for (int y : labels_) n += y == 1 ? 1 : 0;
        return n;
    }

private:
    std::size_t block_width_;
    std::vector<std::string> ids_;
    std::vector<int> labels_;
    std::vector<double> values_;
};

}  // namespace ppmf
