#include "cachesim/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cachesim {

namespace {

void validate_pmf(const std::vector<double>& pmf, int num_files,
                  const std::string& who) {
    if (static_cast<int>(pmf.size()) != num_files) {
        throw config_error(who + ": demand pmf has " +
                           std::to_string(pmf.size()) + " entries, expected " +
                           std::to_string(num_files));
    }
    double total = 0.0;
    for (double q : pmf) {
        if (q < 0.0 || !std::isfinite(q)) {
            throw config_error(who + ": demand pmf entries must be finite and >= 0");
        }
        total += q;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
        throw config_error(who + ": demand pmf sums to " +
                           std::to_string(total) + ", expected 1");
    }
}

}  // namespace

void NetworkInstance::validate() const {
    if (files.empty()) throw config_error("instance: at least one file required");
    if (receivers.empty()) throw config_error("instance: at least one receiver required");
    for (std::size_t n = 0; n < files.size(); ++n) {
        if (!(files[n].variance > 0.0) || !std::isfinite(files[n].variance)) {
            throw config_error("instance: file " + std::to_string(n) +
                               " variance must be finite and positive");
        }
    }
    if (rate_budget < 0.0 || !std::isfinite(rate_budget)) {
        throw config_error("instance: rate budget must be finite and >= 0");
    }
    for (std::size_t k = 0; k < receivers.size(); ++k) {
        const Receiver& r = receivers[k];
        if (r.cache_size < 0.0 || !std::isfinite(r.cache_size)) {
            throw config_error("instance: receiver " + std::to_string(k) +
                               " cache size must be finite and >= 0");
        }
        validate_pmf(r.demand_pmf, num_files(),
                     "instance: receiver " + std::to_string(k));
    }
}

bool NetworkInstance::symmetric_receivers() const {
    if (receivers.empty()) return true;
    const Receiver& first = receivers.front();
    for (const Receiver& r : receivers) {
        if (r.cache_size != first.cache_size) return false;
        if (r.demand_pmf != first.demand_pmf) return false;
    }
    return true;
}

bool NetworkInstance::fully_symmetric() const {
    if (!symmetric_receivers()) return false;
    for (const SourceFile& f : files) {
        if (f.variance != files.front().variance) return false;
    }
    if (receivers.empty()) return true;
    const std::vector<double>& pmf = receivers.front().demand_pmf;
    double uniform = 1.0 / static_cast<double>(num_files());
    for (double q : pmf) {
        if (std::fabs(q - uniform) > 1e-12) return false;
    }
    return true;
}

const char* scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::kLcu: return "lcu";
        case Scheme::kCcm: return "ccm";
    }
    return "unknown";
}

double gaussian_distortion(double variance, double rate) {
    if (rate < 0.0 || !std::isfinite(rate)) {
        throw std::invalid_argument("gaussian_distortion: rate must be finite and >= 0");
    }
    if (!(variance > 0.0)) {
        throw std::invalid_argument("gaussian_distortion: variance must be positive");
    }
    return variance * std::exp2(-2.0 * rate);
}

double effective_rate(double cached, double delivered) {
    return cached + delivered;
}

std::vector<double> zipf_demand(int n_files, double alpha) {
    if (n_files <= 0) {
        throw std::invalid_argument("zipf_demand: need at least one file");
    }
    std::vector<double> q(static_cast<std::size_t>(n_files));
    double total = 0.0;
    for (int i = 0; i < n_files; ++i) {
        q[static_cast<std::size_t>(i)] =
            std::pow(static_cast<double>(i + 1), -alpha);
        total += q[static_cast<std::size_t>(i)];
    }
    for (double& v : q) v /= total;
    return q;
}

Demand sample_demand(const NetworkInstance& instance, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Demand demand(static_cast<std::size_t>(instance.num_receivers()));
    for (int k = 0; k < instance.num_receivers(); ++k) {
        const std::vector<double>& pmf =
            instance.receivers[static_cast<std::size_t>(k)].demand_pmf;
        double u = rng.next_double();
        double cum = 0.0;
        int chosen = instance.num_files() - 1;
        for (int n = 0; n < instance.num_files(); ++n) {
            cum += pmf[static_cast<std::size_t>(n)];
            if (u < cum) {
                chosen = n;
                break;
            }
        }
        demand[static_cast<std::size_t>(k)] = chosen;
    }
    return demand;
}

double demand_space_size(const NetworkInstance& instance, double cap) {
    double size = 1.0;
    for (int k = 0; k < instance.num_receivers(); ++k) {
        size *= static_cast<double>(instance.num_files());
        if (size > cap) return cap + 1.0;
    }
    return size;
}

double expected_demand_distortion(
    const NetworkInstance& instance,
    const std::function<std::vector<double>(const Demand&)>& effective_rates,
    long trials, std::uint64_t seed, double exact_cap) {
    const int K = instance.num_receivers();
    const int N = instance.num_files();
    auto network_distortion = [&](const Demand& d) {
        std::vector<double> rates = effective_rates(d);
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
            int n = d[static_cast<std::size_t>(k)];
            total += gaussian_distortion(
                instance.files[static_cast<std::size_t>(n)].variance,
                rates[static_cast<std::size_t>(k)]);
        }
        return total / static_cast<double>(K);
    };

    if (demand_space_size(instance, exact_cap) <= exact_cap) {
        // Exact enumeration over the demand space with an odometer walk.
        Demand d(static_cast<std::size_t>(K), 0);
        double expected = 0.0;
        while (true) {
            double prob = 1.0;
            for (int k = 0; k < K; ++k) {
                prob *= instance.receivers[static_cast<std::size_t>(k)]
                            .demand_pmf[static_cast<std::size_t>(
                                d[static_cast<std::size_t>(k)])];
            }
            if (prob > 0.0) expected += prob * network_distortion(d);
            int pos = K - 1;
            while (pos >= 0) {
                int& v = d[static_cast<std::size_t>(pos)];
                if (++v < N) break;
                v = 0;
                --pos;
            }
            if (pos < 0) break;
        }
        return expected;
    }

    if (trials <= 0) {
        throw std::invalid_argument(
            "expected_demand_distortion: demand space too large for exact "
            "enumeration and no Monte Carlo trials requested");
    }
    double total = 0.0;
    for (long t = 0; t < trials; ++t) {
        Demand d = sample_demand(instance,
                                 derive_seed(seed, static_cast<std::uint64_t>(t)));
        total += network_distortion(d);
    }
    return total / static_cast<double>(trials);
}

}  // namespace cachesim
