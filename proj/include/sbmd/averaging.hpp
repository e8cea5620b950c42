#ifndef SBMD_AVERAGING_HPP
#define SBMD_AVERAGING_HPP

#include <memory>
#include <vector>

#include "sbmd/blocks.hpp"

namespace sbmd {

// Incremental block averaging. Maintains the weighted sum s of the iterates
// while only one block changes per iteration: before block i_k is updated at
// iteration k, the block's stalled weight mass sum_{j=u_i}^{k} theta_j is
// attached to its current value, and u_i advances to k+1. finalize() flushes
// the trailing mass of every block through the last weight index and returns
// s / sum theta, which equals the direct weighted average of the trajectory.
class AveragingState {
public:
    AveragingState(std::shared_ptr<const BlockStructure> structure, std::vector<double> theta);

    // Attach block i_k of x (the iterate entering iteration k) to the sum.
    void update(int i_k, const BlockVector& x, int k);

    // Flush through weight index last_k using the current iterate and return
    // the average. May be called once.
    BlockVector finalize(const BlockVector& x_current, int last_k);

    // Same computation without mutating state; used for mid-run checkpoints.
    BlockVector snapshot(const BlockVector& x_current, int last_k) const;

    double theta_prefix(int k) const { return prefix_.at(static_cast<std::size_t>(k)); }

private:
    BlockVector flush(const BlockVector& x_current, int last_k) const;
    std::shared_ptr<const BlockStructure> structure_;
    std::vector<double> prefix_;  // prefix_[k] = theta_1 + ... + theta_k
    std::vector<double> s_;
    std::vector<int> u_;  // per block: first weight index not yet attached
    bool finalized_ = false;
};

}  // namespace sbmd

#endif
