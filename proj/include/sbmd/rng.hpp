#ifndef SBMD_RNG_HPP
#define SBMD_RNG_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace sbmd {

// SplitMix64 finalizer, used only to derive well-separated stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// xoshiro256++ with a fixed, documented seeding rule. We keep the generator
// in-repo so that byte-identical trajectories do not depend on a particular
// standard library's distribution code.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) {
            s = splitmix64(s);
            w = s;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Inverse-CDF draw from a probability vector; one uniform consumed.
    int categorical(std::span<const double> p) {
        const double u = uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < p.size(); ++i) {
            acc += p[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(p.size()) - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

// Stream roles. Block-index draws, oracle samples, and the randomized output
// index live on separate sub-streams so that changing N or the block sequence
// never shifts the sample noise of a trial.
enum class StreamRole : std::uint64_t {
    block_index = 1,
    sample = 2,
    output_index = 3,
};

// Splitting rule: trial seed = base_seed + trial, then each role stream is
// seeded with splitmix64(splitmix64(base_seed + trial) ^ role).
inline std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t trial, StreamRole role) {
    return splitmix64(splitmix64(base_seed + trial) ^ static_cast<std::uint64_t>(role));
}

struct TrialRng {
    RngStream block_index;
    RngStream sample;
    RngStream output_index;

    TrialRng(std::uint64_t base_seed, std::uint64_t trial)
        : block_index(stream_seed(base_seed, trial, StreamRole::block_index)),
          sample(stream_seed(base_seed, trial, StreamRole::sample)),
          output_index(stream_seed(base_seed, trial, StreamRole::output_index)) {}
};

}  // namespace sbmd

#endif
