#include "sbmd/blocks.hpp"

#include <cmath>
#include <stdexcept>

namespace sbmd {

BlockStructure::BlockStructure(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw std::invalid_argument("block structure needs at least one block");
    offsets_.reserve(sizes_.size());
    for (int s : sizes_) {
        if (s < 1) throw std::invalid_argument("block sizes must be positive");
        offsets_.push_back(n_);
        n_ += s;
    }
}

std::shared_ptr<const BlockStructure> BlockStructure::even(int n, int b) {
    if (b < 1 || n < b) throw std::invalid_argument("need n >= b >= 1");
    std::vector<int> sizes(static_cast<std::size_t>(b), n / b);
    for (int i = 0; i < n % b; ++i) sizes[static_cast<std::size_t>(i)] += 1;
    return std::make_shared<BlockStructure>(std::move(sizes));
}

std::shared_ptr<const BlockStructure> BlockStructure::of(std::vector<int> sizes) {
    return std::make_shared<BlockStructure>(std::move(sizes));
}

BlockVector::BlockVector(std::shared_ptr<const BlockStructure> structure, std::vector<double> values)
    : structure_(std::move(structure)), values_(std::move(values)) {
    if (!structure_) throw std::invalid_argument("null block structure");
    if (static_cast<int>(values_.size()) != structure_->dim())
        throw std::invalid_argument("value length does not match block structure dimension");
    check_finite();
}

BlockVector BlockVector::zeros(std::shared_ptr<const BlockStructure> structure) {
    std::size_t n = static_cast<std::size_t>(structure->dim());
    return BlockVector(std::move(structure), std::vector<double>(n, 0.0));
}

BlockVector BlockVector::constant(std::shared_ptr<const BlockStructure> structure, double value) {
    std::size_t n = static_cast<std::size_t>(structure->dim());
    return BlockVector(std::move(structure), std::vector<double>(n, value));
}

void BlockVector::check_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) throw std::domain_error("block vector has non-finite coordinate");
}

}  // namespace sbmd
