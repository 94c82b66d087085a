#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cachesim {

/// Raised when user-supplied configuration is malformed or inconsistent.
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a requested operating point cannot be met (e.g. a rate budget
/// too small for the demanded fidelity constraints).
class infeasible_error : public std::runtime_error {
  public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministic 64-bit PRNG (SplitMix64).  Chosen over std::mt19937_64
/// because its output sequence is fully specified by the algorithm itself,
/// trivially seedable from a single word, and cheap to fork into independent
/// streams -- all of which we rely on for byte-identical reruns across
/// platforms and thread counts.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) without modulo bias.  bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound);

  private:
    std::uint64_t state_;
};

/// Derives an independent child seed from (master, index).  Distinct indices
/// yield decorrelated streams, which lets parallel trials stay reproducible
/// regardless of scheduling order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Positive part: max(x, 0).
inline double pos(double x) { return x > 0.0 ? x : 0.0; }

/// Binomial coefficient as a double (exact for the small arguments we use).
double binomial(int n, int k);

/// Shortest round-trip decimal rendering of a double (std::to_chars), so CSV
/// output is byte-stable across runs and locales.
std::string format_double(double value);

/// FNV-1a 64-bit hash; used to fingerprint configuration blobs in run
/// metadata.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace cachesim
