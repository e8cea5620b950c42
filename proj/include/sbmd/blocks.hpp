#ifndef SBMD_BLOCKS_HPP
#define SBMD_BLOCKS_HPP

#include <memory>
#include <span>
#include <vector>

namespace sbmd {

// Partition of R^n into b blocks of sizes n_1..n_b. The block selectors are
// realized as offset/length views into a dense vector; no matrices are formed.
class BlockStructure {
public:
    explicit BlockStructure(std::vector<int> sizes);

    static std::shared_ptr<const BlockStructure> even(int n, int b);
    static std::shared_ptr<const BlockStructure> of(std::vector<int> sizes);

    int block_count() const { return static_cast<int>(sizes_.size()); }
    int dim() const { return n_; }
    int block_size(int i) const { return sizes_.at(static_cast<std::size_t>(i)); }
    int block_offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }
    const std::vector<int>& sizes() const { return sizes_; }
    const std::vector<int>& offsets() const { return offsets_; }

    bool operator==(const BlockStructure& other) const {
        return sizes_ == other.sizes_;
    }

private:
    std::vector<int> sizes_;
    std::vector<int> offsets_;  // offsets_[i] = n_1 + ... + n_{i-1}, starting at 0
    int n_ = 0;
};

// Dense vector addressable per block. All coordinates must stay finite.
class BlockVector {
public:
    BlockVector(std::shared_ptr<const BlockStructure> structure, std::vector<double> values);
    static BlockVector zeros(std::shared_ptr<const BlockStructure> structure);
    static BlockVector constant(std::shared_ptr<const BlockStructure> structure, double value);

    const BlockStructure& structure() const { return *structure_; }
    std::shared_ptr<const BlockStructure> structure_ptr() const { return structure_; }

    std::span<double> block(int i) {
        return {values_.data() + structure_->block_offset(i),
                static_cast<std::size_t>(structure_->block_size(i))};
    }
    std::span<const double> block(int i) const {
        return {values_.data() + structure_->block_offset(i),
                static_cast<std::size_t>(structure_->block_size(i))};
    }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    int dim() const { return structure_->dim(); }

    void check_finite() const;

private:
    std::shared_ptr<const BlockStructure> structure_;
    std::vector<double> values_;
};

}  // namespace sbmd

#endif
