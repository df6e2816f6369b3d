#pragma once

#include <cstdint>

namespace tietime {

// Counter-based randomness: the winner at step n of trial t is a pure
// function of (seed, t, n). No state is carried between steps, so trials
// can be partitioned across threads in any order and still reproduce
// bit-identical trajectories.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class WinnerStream {
  public:
    WinnerStream(std::uint64_t seed, std::uint64_t trial)
        : key_(mix64(seed ^ mix64(trial + 0x632BE59BD9B4E019ull))) {}

    // Uniform winner in [1..m] at step n (n >= 1).
    int winner(std::uint64_t step, int m) const {
        const std::uint64_t h = mix64(key_ ^ (step * 0xD6E8FEB86659FD93ull));
        // multiply-shift bounded draw; bias is m / 2^64
        return 1 + static_cast<int>((static_cast<unsigned __int128>(h) * m) >> 64);
    }

  private:
    std::uint64_t key_;
};

}  // namespace tietime
