#include "cachesim/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "cachesim/ccm.hpp"
#include "cachesim/common.hpp"
#include "cachesim/lcu.hpp"
#include "cachesim/rate_bounds.hpp"
#include "cachesim/rfgcc.hpp"
#include "cachesim/version.hpp"
#include "json.hpp"

namespace cachesim {

namespace {

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(value));
    return std::string(buf);
}

std::string make_metadata(const ExperimentConfig& config) {
    nlohmann::json meta;
    meta["version"] = kVersion;
    meta["config_hash"] = hex64(fnv1a64(config.raw_text));
    meta["master_seed"] = config.sim.seed;
    if (config.variances.kind == VarianceSpec::Kind::kUniform) {
        meta["variance_seed"] = config.variances.seed;
    }
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    meta["generated_at"] = stamp;
    return meta.dump(2) + "\n";
}

NetworkInstance instance_at(const ExperimentConfig& config, double cache_size,
                            double rate_budget) {
    NetworkInstance instance = build_instance(config, rate_budget);
    for (Receiver& r : instance.receivers) r.cache_size = cache_size;
    return instance;
}

/// The packet design a simulation or bound run works on: explicit from the
/// config, else the coded-scheme design at the first sweep point.
CacheDesign working_design(const ExperimentConfig& config) {
    if (config.sim.design.has_value()) {
        CacheDesign design = build_design(*config.sim.design);
        if (design.num_receivers() != config.receivers ||
            design.num_files() != config.files) {
            throw config_error(
                "$.sim.design: shape must match $.network.receivers x $.library.files");
        }
        return design;
    }
    NetworkInstance instance = instance_at(config, config.cache_sizes.front(),
                                           config.rate_budgets.front());
    const int K = instance.num_receivers();
    const int N = instance.num_files();
    const double M = instance.receivers.front().cache_size;
    if (instance.fully_symmetric()) {
        UniformDesign u = solve_uniform(K, N, instance.files.front().variance, M,
                                        instance.rate_budget);
        std::vector<double> range(static_cast<std::size_t>(N),
                                  u.m_tilde + u.r_tilde);
        std::vector<double> split(static_cast<std::size_t>(N),
                                  1.0 / static_cast<double>(N));
        return receiver_symmetric_design(range, split, M, K);
    }
    if (!instance.symmetric_receivers()) {
        throw config_error(
            "$.sim.design: required for heterogeneous receivers (the coded "
            "design solver covers symmetric receivers only)");
    }
    TwoGroupDesign d = solve_two_group(instance, instance.rate_budget);
    return to_cache_design(d, K, N, M);
}

std::string join_demand(const Demand& demand) {
    std::string out;
    for (std::size_t k = 0; k < demand.size(); ++k) {
        if (k) out += ';';
        out += std::to_string(demand[k]);
    }
    return out;
}

}  // namespace

std::string curve_csv_header() {
    return "scheme,M,R,expected_distortion,coded_rate,uncoded_rate,N_tilde,R1,R2,seed";
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = curve_csv_header() + "\n";
    for (const ResultRow& row : rows) {
        out += row.scheme;
        out += ',';
        out += format_double(row.cache_size);
        out += ',';
        out += format_double(row.rate_budget);
        out += ',';
        out += format_double(row.expected_distortion);
        out += ',';
        out += format_double(row.coded_rate);
        out += ',';
        out += format_double(row.uncoded_rate);
        out += ',';
        if (row.has_design) {
            out += std::to_string(row.n_top);
            out += ',';
            out += format_double(row.r1);
            out += ',';
            out += format_double(row.r2);
        } else {
            out += ",,";
        }
        out += ',';
        out += std::to_string(row.seed);
        out += '\n';
    }
    return out;
}

int resolve_threads(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("CACHESIM_THREADS")) {
        int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 1;
}

void parallel_for(long count, int threads,
                  const std::function<void(long)>& work) {
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (long i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<long> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&]() {
        for (;;) {
            long i = next.fetch_add(1);
            if (i >= count) return;
            try {
                work(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int spawn = static_cast<int>(std::min<long>(threads, count));
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

RunOutput run_lcu_curve(const ExperimentConfig& config, int threads) {
    const long points = static_cast<long>(config.cache_sizes.size()) *
                        static_cast<long>(config.rate_budgets.size());
    std::vector<ResultRow> rows(static_cast<std::size_t>(points));
    parallel_for(points, threads, [&](long idx) {
        const std::size_t budgets = config.rate_budgets.size();
        double M = config.cache_sizes[static_cast<std::size_t>(idx) / budgets];
        double R = config.rate_budgets[static_cast<std::size_t>(idx) % budgets];
        NetworkInstance instance = instance_at(config, M, R);
        std::uint64_t seed = derive_seed(config.sim.seed,
                                         static_cast<std::uint64_t>(idx));
        ResultRow& row = rows[static_cast<std::size_t>(idx)];
        row.scheme = scheme_name(Scheme::kLcu);
        row.cache_size = M;
        row.rate_budget = R;
        row.expected_distortion =
            lcu_expected_distortion(instance, config.sim.trials, seed);
        row.coded_rate = 0.0;
        row.uncoded_rate = R;
        row.has_design = false;
        row.seed = seed;
    });
    return RunOutput{rows_to_csv(rows), make_metadata(config)};
}

RunOutput run_ccm_curve(const ExperimentConfig& config, int threads) {
    const long points = static_cast<long>(config.cache_sizes.size()) *
                        static_cast<long>(config.rate_budgets.size());
    std::vector<ResultRow> rows(static_cast<std::size_t>(points));
    parallel_for(points, threads, [&](long idx) {
        const std::size_t budgets = config.rate_budgets.size();
        double M = config.cache_sizes[static_cast<std::size_t>(idx) / budgets];
        double R = config.rate_budgets[static_cast<std::size_t>(idx) % budgets];
        NetworkInstance instance = instance_at(config, M, R);
        std::uint64_t seed = derive_seed(config.sim.seed,
                                         static_cast<std::uint64_t>(idx));
        ResultRow& row = rows[static_cast<std::size_t>(idx)];
        row.scheme = scheme_name(Scheme::kCcm);
        row.cache_size = M;
        row.rate_budget = R;
        row.has_design = true;
        row.seed = seed;
        if (instance.fully_symmetric()) {
            UniformDesign u =
                solve_uniform(instance.num_receivers(), instance.num_files(),
                              instance.files.front().variance, M, R);
            row.expected_distortion = u.expected_distortion;
            row.coded_rate = R;
            row.uncoded_rate = 0.0;
            row.n_top = instance.num_files();
            row.r1 = u.r_tilde;
            row.r2 = 0.0;
        } else {
            TwoGroupDesign d = solve_two_group(instance, R);
            row.expected_distortion = d.expected_distortion;
            row.coded_rate = d.coded_rate;
            row.uncoded_rate = d.uncoded_rate;
            row.n_top = d.n_top;
            row.r1 = d.r1;
            row.r2 = d.r2;
        }
    });
    return RunOutput{rows_to_csv(rows), make_metadata(config)};
}

RunOutput run_simulate(const ExperimentConfig& config, int threads) {
    CacheDesign design = working_design(config);
    NetworkInstance instance = instance_at(config, config.cache_sizes.front(),
                                           config.rate_budgets.front());
    SimParams params;
    params.tau = static_cast<double>(config.sim.tau);
    params.T = static_cast<double>(config.sim.T);
    params.seed = config.sim.seed;
    const int K = config.receivers;
    const long trials = config.sim.trials;
    std::vector<std::string> lines(static_cast<std::size_t>(trials));
    parallel_for(trials, threads, [&](long t) {
        std::uint64_t trial_seed = derive_seed(config.sim.seed,
                                               static_cast<std::uint64_t>(t));
        Demand demand = config.sim.random_demand
                            ? sample_demand(instance, derive_seed(trial_seed, 1))
                            : config.sim.fixed_demand;
        TrialResult trial =
            run_delivery_trial(design, params, demand, derive_seed(trial_seed, 2));
        std::string line = std::to_string(t);
        line += ',';
        line += format_double(params.tau);
        line += ',';
        line += format_double(params.T);
        line += ',';
        line += join_demand(demand);
        line += ',';
        line += format_double(trial.rate);
        line += ',';
        line += trial.decodable ? "true" : "false";
        line += ',';
        if (K <= kExactReceiverCap) {
            double bound = demand_rate_bound(demand, design).value;
            line += format_double(bound);
            line += ',';
            line += format_double(bound - trial.rate);
        } else {
            line += ",";
        }
        line += ',';
        line += std::to_string(trial_seed);
        lines[static_cast<std::size_t>(t)] = std::move(line);
    });
    std::string csv = "trial,tau,T,demand,rate,decodable,bound,gap,seed\n";
    for (const std::string& line : lines) {
        csv += line;
        csv += '\n';
    }
    return RunOutput{std::move(csv), make_metadata(config)};
}

RunOutput run_bounds(const ExperimentConfig& config, int threads) {
    (void)threads;  // bound evaluation emits a handful of rows; no fan-out
    CacheDesign design = working_design(config);
    NetworkInstance instance = instance_at(config, config.cache_sizes.front(),
                                           config.rate_budgets.front());
    const int K = design.num_receivers();
    std::string csv = "kind,demand,label_bound,packet_bound,bound,method\n";
    auto append = [&](const std::string& kind, const std::string& demand,
                      const BoundResult& bound) {
        csv += kind;
        csv += ',';
        csv += demand;
        csv += ',';
        csv += format_double(bound.label_bound);
        csv += ',';
        csv += format_double(bound.packet_bound);
        csv += ',';
        csv += format_double(bound.value);
        csv += ',';
        csv += bound.method == BoundResult::Method::kExact ? "exact" : "monte_carlo";
        csv += '\n';
    };
    bool wrote_row = false;
    if (!config.sim.random_demand && K <= kExactReceiverCap) {
        append("demand", join_demand(config.sim.fixed_demand),
               demand_rate_bound(config.sim.fixed_demand, design));
        wrote_row = true;
    }
    if (K <= kExactReceiverCap) {
        append("expected", "", expected_rate_bound(instance, design));
        wrote_row = true;
    }
    if (instance.symmetric_receivers()) {
        bool rows_equal = true;
        for (int k = 1; k < K && rows_equal; ++k) {
            rows_equal = design.storing_range[static_cast<std::size_t>(k)] ==
                             design.storing_range[0] &&
                         design.cache_split[static_cast<std::size_t>(k)] ==
                             design.cache_split[0] &&
                         design.cache_size[static_cast<std::size_t>(k)] ==
                             design.cache_size[0];
        }
        if (rows_equal) {
            SymmetricExpectedBound sym = receiver_symmetric_expected_bound(
                instance.receivers.front().demand_pmf, design.cache_size[0],
                design.cache_split[0], design.storing_range[0], K);
            append("receiver_symmetric", "", sym.bound);
            wrote_row = true;
        }
    }
    if (!wrote_row) {
        throw config_error(
            "$.network.receivers: exact subset enumeration is capped at " +
            std::to_string(kExactReceiverCap) +
            " receivers and the design is not receiver-symmetric; no bound "
            "evaluator applies");
    }
    return RunOutput{std::move(csv), make_metadata(config)};
}

void write_output(const ExperimentConfig& config, const RunOutput& output) {
    if (config.csv_path.empty()) {
        std::cout << output.csv;
        if (!config.metadata_path.empty()) {
            std::ofstream meta(config.metadata_path, std::ios::binary);
            if (!meta) throw config_error("cannot write metadata file: " + config.metadata_path);
            meta << output.metadata_json;
        }
        return;
    }
    std::ofstream csv(config.csv_path, std::ios::binary);
    if (!csv) throw config_error("cannot write output file: " + config.csv_path);
    csv << output.csv;
    std::string meta_path = config.metadata_path.empty()
                                ? config.csv_path + ".meta.json"
                                : config.metadata_path;
    std::ofstream meta(meta_path, std::ios::binary);
    if (!meta) throw config_error("cannot write metadata file: " + meta_path);
    meta << output.metadata_json;
}

std::string config_hash_hex(const std::string& config_text) {
    return hex64(fnv1a64(config_text));
}

}  // namespace cachesim
