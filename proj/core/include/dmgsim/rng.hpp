#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace dmgsim {

/// 64-bit FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a64(std::string_view text);

/// A named random stream. The engine state depends only on (run_seed, name),
/// so streams can be created in any order and extra draws on one stream
/// never perturb another.
///
/// The engine is std::mt19937_64 (bit-exact by the standard). Distribution
/// transforms are done here rather than through <random> distributions,
/// whose output is implementation-defined.
class RngStream {
public:
    RngStream(std::uint64_t run_seed, std::string name);

    const std::string& name() const { return name_; }

    /// Uniform real in [lo, hi). Throws std::invalid_argument if lo > hi.
    double uniform(double lo, double hi);

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Normal deviate via Box-Muller. Throws if sigma < 0.
    double gaussian(double mu, double sigma);

    std::uint64_t next_u64() { return engine_(); }

private:
    double unit();

    std::string name_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace dmgsim
