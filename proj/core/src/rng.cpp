#include "dmgsim/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dmgsim {

std::uint64_t fnv1a64(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::mt19937_64 make_engine(std::uint64_t run_seed, std::string_view name)
{
    const auto key = fnv1a64(name);
    std::seed_seq seq{
        static_cast<std::uint32_t>(run_seed), static_cast<std::uint32_t>(run_seed >> 32),
        static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    return std::mt19937_64(seq);
}

} // namespace

RngStream::RngStream(std::uint64_t run_seed, std::string name)
    : name_(std::move(name)), engine_(make_engine(run_seed, name_))
{
}

double RngStream::unit()
{
    // 53 random mantissa bits -> [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi)
{
    if (!(lo <= hi)) {
        throw std::invalid_argument("RngStream::uniform: lo > hi on stream " + name_);
    }
    const double u = unit();
    if (lo == hi) {
        return lo;
    }
    const double v = lo + (hi - lo) * u;
    return v < hi ? v : std::nextafter(hi, lo);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi)
{
    if (lo > hi) {
        throw std::invalid_argument("RngStream::uniform_int: lo > hi on stream " + name_);
    }
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {
        return static_cast<std::int64_t>(engine_());
    }
    // Reject the incomplete top bucket so the modulo stays unbiased.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % span + 1) % span;
    std::uint64_t x = engine_();
    while (x > limit) {
        x = engine_();
    }
    return lo + static_cast<std::int64_t>(x % span);
}

double RngStream::gaussian(double mu, double sigma)
{
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("RngStream::gaussian: negative sigma on stream " + name_);
    }
    double z{};
    if (has_spare_) {
        z = spare_;
        has_spare_ = false;
    } else {
        double u1 = unit();
        while (u1 <= 0.0) {
            u1 = unit();
        }
        const double u2 = unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        z = r * std::cos(theta);
        spare_ = r * std::sin(theta);
        has_spare_ = true;
    }
    if (sigma == 0.0) {
        return mu;
    }
    return mu + sigma * z;
}

} // namespace dmgsim
