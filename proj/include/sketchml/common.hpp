#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sketchml {

// All recoverable failures surface as Error with the originating module name,
// so the CLI can print "module: message" and map to an exit code.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

// Deterministic stream seeded from (seed, stream ids). Used for fold shuffles
// and per-epoch sample orders so that warm-started runs replay the exact
// update sequence of a cold run.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::seed_seq seq{seed, a, b};
    return std::mt19937_64(seq);
}

constexpr std::uint64_t kDefaultSeed = 42;

}  // namespace sketchml
