#include "cachesim/common.hpp"

#include <charconv>
#include <cstring>

namespace cachesim {

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
    // Rejection sampling over the largest multiple of bound, so every value
    // in [0, bound) is exactly equally likely.
    std::uint64_t limit = bound * (UINT64_MAX / bound);
    for (;;) {
        std::uint64_t v = next();
        if (v < limit) return v % bound;
    }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 rng(master ^ (0x632be59bd9b4e019ULL * (index + 1)));
    return rng.next();
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double result = 1.0;
    for (int i = 1; i <= k; ++i) {
        result *= static_cast<double>(n - k + i);
        result /= static_cast<double>(i);
    }
    return result;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= static_cast<std::uint64_t>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace cachesim
