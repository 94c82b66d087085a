#include "cachesim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cachesim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw config_error(path + ": " + what);
}

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing");
    return *it;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
    }
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

std::uint64_t as_seed(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !j.is_number_integer()) {
        fail(path, "expected an unsigned integer seed");
    }
    if (j.is_number_integer() && j.get<long long>() < 0) {
        fail(path, "seed must be >= 0");
    }
    return j.get<std::uint64_t>();
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<double> parse_sweep(const json& j, const std::string& path) {
    if (j.is_array()) return as_number_list(j, path);
    if (j.is_object()) {
        reject_unknown(j, {"from", "to", "step"}, path);
        double from = as_number(require(j, "from", path), path + ".from");
        double to = as_number(require(j, "to", path), path + ".to");
        double step = as_number(require(j, "step", path), path + ".step");
        if (step <= 0.0 || to < from) fail(path, "need step > 0 and to >= from");
        std::vector<double> out;
        for (double v = from; v <= to + 1e-9; v += step) out.push_back(v);
        return out;
    }
    fail(path, "expected an array or a {from, to, step} object");
}

VarianceSpec parse_variances(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    VarianceSpec spec;
    std::string kind = require(j, "kind", path).get<std::string>();
    if (kind == "list") {
        reject_unknown(j, {"kind", "values"}, path);
        spec.kind = VarianceSpec::Kind::kList;
        spec.values = as_number_list(require(j, "values", path), path + ".values");
    } else if (kind == "constant") {
        reject_unknown(j, {"kind", "value"}, path);
        spec.kind = VarianceSpec::Kind::kConstant;
        spec.value = as_number(require(j, "value", path), path + ".value");
    } else if (kind == "uniform") {
        reject_unknown(j, {"kind", "low", "high", "seed"}, path);
        spec.kind = VarianceSpec::Kind::kUniform;
        spec.low = as_number(require(j, "low", path), path + ".low");
        spec.high = as_number(require(j, "high", path), path + ".high");
        spec.seed = as_seed(require(j, "seed", path), path + ".seed");
        if (spec.low <= 0.0 || spec.high < spec.low) {
            fail(path, "need 0 < low <= high");
        }
    } else {
        fail(path + ".kind", "expected list, constant, or uniform");
    }
    return spec;
}

DemandSpec parse_demand(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    DemandSpec spec;
    if (j.contains("pmf")) {
        reject_unknown(j, {"pmf"}, path);
        spec.kind = DemandSpec::Kind::kPmf;
        spec.pmf = as_number_list(j["pmf"], path + ".pmf");
        return spec;
    }
    reject_unknown(j, {"zipf_alpha"}, path);
    const json& alpha = require(j, "zipf_alpha", path);
    if (alpha.is_array()) {
        spec.kind = DemandSpec::Kind::kZipfPerReceiver;
        spec.zipf_alphas = as_number_list(alpha, path + ".zipf_alpha");
    } else {
        spec.kind = DemandSpec::Kind::kZipf;
        spec.zipf_alpha = as_number(alpha, path + ".zipf_alpha");
    }
    return spec;
}

std::vector<std::vector<double>> as_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(as_number_list(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

DesignSpec parse_design(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown(j, {"storing_range", "cache_split", "cache_size"}, path);
    DesignSpec spec;
    spec.storing_range = as_matrix(require(j, "storing_range", path), path + ".storing_range");
    spec.cache_split = as_matrix(require(j, "cache_split", path), path + ".cache_split");
    spec.cache_size = as_number_list(require(j, "cache_size", path), path + ".cache_size");
    return spec;
}

SimSpec parse_sim(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown(j, {"tau", "T", "trials", "seed", "demand", "design"}, path);
    SimSpec spec;
    if (j.contains("tau")) spec.tau = static_cast<long>(as_number(j["tau"], path + ".tau"));
    if (j.contains("T")) spec.T = static_cast<long>(as_number(j["T"], path + ".T"));
    if (spec.tau < 1 || spec.T < 1 || spec.tau < spec.T) {
        fail(path, "need tau >= T >= 1");
    }
    if (j.contains("trials")) {
        spec.trials = as_int(j["trials"], path + ".trials");
        if (spec.trials < 1) fail(path + ".trials", "need at least one trial");
    }
    if (j.contains("seed")) spec.seed = as_seed(j["seed"], path + ".seed");
    if (j.contains("demand")) {
        const json& d = j["demand"];
        if (d.is_string()) {
            if (d.get<std::string>() != "random") {
                fail(path + ".demand", "expected \"random\" or an array of file indices");
            }
            spec.random_demand = true;
        } else if (d.is_array()) {
            spec.random_demand = false;
            for (std::size_t i = 0; i < d.size(); ++i) {
                spec.fixed_demand.push_back(
                    as_int(d[i], path + ".demand[" + std::to_string(i) + "]"));
            }
        } else {
            fail(path + ".demand", "expected \"random\" or an array of file indices");
        }
    }
    if (j.contains("design")) {
        spec.design = parse_design(j["design"], path + ".design");
    }
    return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("$: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw config_error("$: expected a JSON object");
    reject_unknown(root, {"network", "library", "demand", "budget", "sim", "output"}, "$");

    ExperimentConfig config;
    config.raw_text = json_text;

    const json& network = require(root, "network", "$");
    if (!network.is_object()) throw config_error("$.network: expected an object");
    reject_unknown(network, {"receivers", "cache_sizes"}, "$.network");
    config.receivers = as_int(require(network, "receivers", "$.network"),
                              "$.network.receivers");
    if (config.receivers < 1) throw config_error("$.network.receivers: need at least 1");
    config.cache_sizes = parse_sweep(require(network, "cache_sizes", "$.network"),
                                     "$.network.cache_sizes");
    for (double m : config.cache_sizes) {
        if (m < 0.0) throw config_error("$.network.cache_sizes: entries must be >= 0");
    }

    const json& library = require(root, "library", "$");
    if (!library.is_object()) throw config_error("$.library: expected an object");
    reject_unknown(library, {"files", "variances"}, "$.library");
    config.files = as_int(require(library, "files", "$.library"), "$.library.files");
    if (config.files < 1) throw config_error("$.library.files: need at least 1");
    config.variances = parse_variances(require(library, "variances", "$.library"),
                                       "$.library.variances");
    if (config.variances.kind == VarianceSpec::Kind::kList &&
        static_cast<int>(config.variances.values.size()) != config.files) {
        throw config_error("$.library.variances.values: length must equal $.library.files");
    }

    config.demand = parse_demand(require(root, "demand", "$"), "$.demand");
    if (config.demand.kind == DemandSpec::Kind::kZipfPerReceiver &&
        static_cast<int>(config.demand.zipf_alphas.size()) != config.receivers) {
        throw config_error("$.demand.zipf_alpha: length must equal $.network.receivers");
    }
    if (config.demand.kind == DemandSpec::Kind::kPmf &&
        static_cast<int>(config.demand.pmf.size()) != config.files) {
        throw config_error("$.demand.pmf: length must equal $.library.files");
    }

    const json& budget = require(root, "budget", "$");
    if (!budget.is_object()) throw config_error("$.budget: expected an object");
    reject_unknown(budget, {"rates"}, "$.budget");
    config.rate_budgets = parse_sweep(require(budget, "rates", "$.budget"),
                                      "$.budget.rates");
    for (double r : config.rate_budgets) {
        if (r < 0.0) throw config_error("$.budget.rates: entries must be >= 0");
    }

    if (root.contains("sim")) config.sim = parse_sim(root["sim"], "$.sim");
    if (!config.sim.random_demand &&
        static_cast<int>(config.sim.fixed_demand.size()) != config.receivers) {
        throw config_error("$.sim.demand: length must equal $.network.receivers");
    }
    for (int d : config.sim.fixed_demand) {
        if (d < 0 || d >= config.files) {
            throw config_error("$.sim.demand: file indices are 0-based and must be < $.library.files");
        }
    }

    if (root.contains("output")) {
        const json& output = root["output"];
        if (!output.is_object()) throw config_error("$.output: expected an object");
        reject_unknown(output, {"csv", "metadata"}, "$.output");
        if (output.contains("csv")) config.csv_path = output["csv"].get<std::string>();
        if (output.contains("metadata")) {
            config.metadata_path = output["metadata"].get<std::string>();
        }
    }
    return config;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<double> realized_variances(const VarianceSpec& spec, int num_files) {
    std::vector<double> out(static_cast<std::size_t>(num_files));
    switch (spec.kind) {
        case VarianceSpec::Kind::kList:
            if (static_cast<int>(spec.values.size()) != num_files) {
                throw config_error("variance list length must equal the file count");
            }
            return spec.values;
        case VarianceSpec::Kind::kConstant:
            for (double& v : out) v = spec.value;
            return out;
        case VarianceSpec::Kind::kUniform: {
            SplitMix64 rng(spec.seed);
            for (double& v : out) {
                v = spec.low + (spec.high - spec.low) * rng.next_double();
            }
            return out;
        }
    }
    return out;
}

NetworkInstance build_instance(const ExperimentConfig& config, double rate_budget) {
    NetworkInstance instance;
    std::vector<double> variances = realized_variances(config.variances, config.files);
    instance.files.reserve(variances.size());
    for (double v : variances) instance.files.push_back(SourceFile{v});

    std::vector<std::vector<double>> pmfs;
    switch (config.demand.kind) {
        case DemandSpec::Kind::kZipf:
            pmfs.assign(static_cast<std::size_t>(config.receivers),
                        zipf_demand(config.files, config.demand.zipf_alpha));
            break;
        case DemandSpec::Kind::kZipfPerReceiver:
            for (double alpha : config.demand.zipf_alphas) {
                pmfs.push_back(zipf_demand(config.files, alpha));
            }
            break;
        case DemandSpec::Kind::kPmf: {
            double total = 0.0;
            for (double q : config.demand.pmf) total += q;
            if (total <= 0.0) throw config_error("$.demand.pmf: must have positive mass");
            std::vector<double> pmf = config.demand.pmf;
            for (double& q : pmf) q /= total;
            pmfs.assign(static_cast<std::size_t>(config.receivers), pmf);
            break;
        }
    }
    double first_cache = config.cache_sizes.front();
    for (int k = 0; k < config.receivers; ++k) {
        instance.receivers.push_back(Receiver{first_cache, pmfs[static_cast<std::size_t>(k)]});
    }
    instance.rate_budget = rate_budget;
    instance.validate();
    return instance;
}

CacheDesign build_design(const DesignSpec& spec) {
    CacheDesign design;
    design.storing_range = spec.storing_range;
    design.cache_split = spec.cache_split;
    design.cache_size = spec.cache_size;
    design.validate();
    return design;
}

}  // namespace cachesim
