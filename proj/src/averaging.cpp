#include "sbmd/averaging.hpp"

#include <stdexcept>

namespace sbmd {

AveragingState::AveragingState(std::shared_ptr<const BlockStructure> structure,
                               std::vector<double> theta)
    : structure_(std::move(structure)),
      s_(static_cast<std::size_t>(structure_->dim()), 0.0),
      u_(static_cast<std::size_t>(structure_->block_count()), 1) {
    prefix_.reserve(theta.size() + 1);
    prefix_.push_back(0.0);
    for (double t : theta) {
        if (!(t >= 0.0)) throw std::invalid_argument("averaging: weights must be nonnegative");
        prefix_.push_back(prefix_.back() + t);
    }
}

void AveragingState::update(int i_k, const BlockVector& x, int k) {
    if (finalized_) throw std::logic_error("averaging: update after finalize");
    if (i_k < 0 || i_k >= structure_->block_count())
        throw std::invalid_argument("averaging: block index out of range");
    if (k < 1 || k >= static_cast<int>(prefix_.size()))
        throw std::invalid_argument("averaging: weight index out of range");
    std::size_t ib = static_cast<std::size_t>(i_k);
    double mass = prefix_[static_cast<std::size_t>(k)] - prefix_[static_cast<std::size_t>(u_[ib] - 1)];
    auto blk = x.block(i_k);
    double* dst = s_.data() + structure_->block_offset(i_k);
    for (std::size_t j = 0; j < blk.size(); ++j) dst[j] += mass * blk[j];
    u_[ib] = k + 1;
}

BlockVector AveragingState::flush(const BlockVector& x_current, int last_k) const {
    if (last_k < 1 || last_k >= static_cast<int>(prefix_.size()))
        throw std::invalid_argument("averaging: flush index out of range");
    double total = prefix_[static_cast<std::size_t>(last_k)];
    if (!(total > 0.0)) throw std::invalid_argument("averaging: total weight must be positive");
    BlockVector out(structure_, s_);
    for (int i = 0; i < structure_->block_count(); ++i) {
        double mass = total - prefix_[static_cast<std::size_t>(u_[static_cast<std::size_t>(i)] - 1)];
        auto blk = x_current.block(i);
        auto dst = out.block(i);
        for (std::size_t j = 0; j < blk.size(); ++j) dst[j] = (dst[j] + mass * blk[j]) / total;
    }
    return out;
}

BlockVector AveragingState::finalize(const BlockVector& x_current, int last_k) {
    if (finalized_) throw std::logic_error("averaging: finalize called twice");
    BlockVector out = flush(x_current, last_k);
    finalized_ = true;
    return out;
}

BlockVector AveragingState::snapshot(const BlockVector& x_current, int last_k) const {
    return flush(x_current, last_k);
}

}  // namespace sbmd
