#include "cachesim/rfgcc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cachesim/common.hpp"

namespace cachesim {

long packet_count(double rate, const SimParams& params) {
    if (params.packets_per_unit_rate() < 1.0) {
        throw std::invalid_argument(
            "packet_count: tau/T must be at least 1 packet per unit rate");
    }
    if (rate <= 0.0) return 0;
    return static_cast<long>(std::floor(rate * params.packets_per_unit_rate() + 0.5));
}

std::vector<std::vector<long>> packetize(
    const std::vector<std::vector<double>>& storing_ranges,
    const SimParams& params) {
    std::vector<std::vector<long>> counts(storing_ranges.size());
    for (std::size_t k = 0; k < storing_ranges.size(); ++k) {
        counts[k].reserve(storing_ranges[k].size());
        for (double range : storing_ranges[k]) {
            counts[k].push_back(packet_count(range, params));
        }
    }
    return counts;
}

bool CacheConfiguration::holds(int k, int n, long position) const {
    const std::vector<long>& list =
        positions[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
    return std::binary_search(list.begin(), list.end(), position);
}

CacheConfiguration random_fill_caches(const CacheDesign& design,
                                      const SimParams& params,
                                      std::uint64_t seed) {
    const int K = design.num_receivers();
    const int N = design.num_files();
    CacheConfiguration caches;
    caches.positions.assign(static_cast<std::size_t>(K), {});
    for (int k = 0; k < K; ++k) {
        caches.positions[static_cast<std::size_t>(k)].assign(
            static_cast<std::size_t>(N), {});
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
        for (int n = 0; n < N; ++n) {
            double range = design.storing_range[static_cast<std::size_t>(k)]
                                               [static_cast<std::size_t>(n)];
            double cached = design.cached_bits(k, n);
            if (cached > range + 1e-9) {
                throw infeasible_error(
                    "random_fill_caches: receiver " + std::to_string(k) +
                    " asks to cache more of file " + std::to_string(n) +
                    " than its storing range");
            }
            long version = packet_count(range, params);
            long want = std::min(packet_count(cached, params), version);
            if (want <= 0) continue;
            // Partial Fisher-Yates: first `want` slots of a shuffled 1..version.
            std::vector<long> pool(static_cast<std::size_t>(version));
            std::iota(pool.begin(), pool.end(), 1L);
            for (long i = 0; i < want; ++i) {
                long j = i + static_cast<long>(rng.next_below(
                                 static_cast<std::uint64_t>(version - i)));
                std::swap(pool[static_cast<std::size_t>(i)],
                          pool[static_cast<std::size_t>(j)]);
            }
            std::vector<long>& out =
                caches.positions[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
            out.assign(pool.begin(), pool.begin() + want);
            std::sort(out.begin(), out.end());
        }
    }
    return caches;
}

PacketDemand packet_demand(const CacheDesign& design,
                           const CacheConfiguration& caches,
                           const Demand& demand, const SimParams& params) {
    const int K = design.num_receivers();
    if (static_cast<int>(demand.size()) != K) {
        throw std::invalid_argument("packet_demand: demand length must match receivers");
    }
    PacketDemand result;
    result.demand = demand;
    result.missing.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        int n = demand[static_cast<std::size_t>(k)];
        if (n < 0 || n >= design.num_files()) {
            throw std::invalid_argument("packet_demand: demand index out of range");
        }
        long version = packet_count(
            design.storing_range[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)],
            params);
        const std::vector<long>& held =
            caches.positions[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
        std::vector<long>& missing = result.missing[static_cast<std::size_t>(k)];
        missing.reserve(static_cast<std::size_t>(version) - held.size());
        std::size_t h = 0;
        for (long pos = 1; pos <= version; ++pos) {
            while (h < held.size() && held[h] < pos) ++h;
            if (h < held.size() && held[h] == pos) continue;
            missing.push_back(pos);
        }
    }
    return result;
}

ConflictGraph build_conflict_graph(const CacheConfiguration& caches,
                                   const PacketDemand& demand) {
    const int K = static_cast<int>(demand.demand.size());
    if (K > 32) {
        throw std::invalid_argument(
            "build_conflict_graph: at most 32 receivers (bitmask labels)");
    }
    // Per requested file, mark which receivers cache each position so vertex
    // labels come from one linear pass instead of per-vertex membership tests.
    std::map<int, std::vector<std::uint32_t>> cachers_by_file;
    for (int k = 0; k < K; ++k) {
        int n = demand.demand[static_cast<std::size_t>(k)];
        if (cachers_by_file.count(n)) continue;
        long max_position = 0;
        for (int u = 0; u < K; ++u) {
            if (demand.demand[static_cast<std::size_t>(u)] == n &&
                !demand.missing[static_cast<std::size_t>(u)].empty()) {
                max_position = std::max(
                    max_position, demand.missing[static_cast<std::size_t>(u)].back());
            }
        }
        std::vector<std::uint32_t> mask(static_cast<std::size_t>(max_position) + 1, 0);
        for (int u = 0; u < K; ++u) {
            for (long p : caches.positions[static_cast<std::size_t>(u)]
                                          [static_cast<std::size_t>(n)]) {
                if (p > max_position) break;
                mask[static_cast<std::size_t>(p)] |= 1u << static_cast<unsigned>(u);
            }
        }
        cachers_by_file.emplace(n, std::move(mask));
    }

    ConflictGraph graph;
    std::size_t total = 0;
    for (int k = 0; k < K; ++k) total += demand.missing[static_cast<std::size_t>(k)].size();
    graph.vertices.reserve(total);
    for (int k = 0; k < K; ++k) {
        int n = demand.demand[static_cast<std::size_t>(k)];
        const std::vector<std::uint32_t>& mask = cachers_by_file.at(n);
        for (long p : demand.missing[static_cast<std::size_t>(k)]) {
            ConflictVertex v;
            v.alpha = PacketId{n, p};
            v.beta = k;
            v.eta = mask[static_cast<std::size_t>(p)];
            graph.vertices.push_back(v);
        }
    }
    return graph;
}

Coloring label_grouped_coloring(const ConflictGraph& graph) {
    // Group vertices by receiver label; within a group, zip the per-receiver
    // queues so each class takes at most one vertex per receiver.
    std::map<std::uint32_t, std::map<int, std::vector<std::size_t>>> groups;
    for (std::size_t v = 0; v < graph.size(); ++v) {
        const ConflictVertex& vertex = graph.vertices[v];
        groups[vertex.label()][vertex.beta].push_back(v);
    }
    Coloring coloring;
    coloring.origin = Coloring::Origin::kLabelGrouped;
    for (auto& [label, queues] : groups) {
        (void)label;
        std::size_t depth = 0;
        for (auto& [beta, queue] : queues) {
            (void)beta;
            // Vertices arrive in (file, position) order per receiver already;
            // sort anyway so the grouping is insensitive to graph vertex order.
            std::sort(queue.begin(), queue.end(), [&](std::size_t a, std::size_t b) {
                return graph.vertices[a].alpha < graph.vertices[b].alpha;
            });
            depth = std::max(depth, queue.size());
        }
        for (std::size_t j = 0; j < depth; ++j) {
            std::vector<std::size_t> klass;
            for (const auto& [beta, queue] : queues) {
                (void)beta;
                if (j < queue.size()) klass.push_back(queue[j]);
            }
            for (std::size_t a = 0; a < klass.size(); ++a) {
                for (std::size_t b = a + 1; b < klass.size(); ++b) {
                    if (graph.adjacent(klass[a], klass[b])) {
                        throw std::logic_error(
                            "label_grouped_coloring: produced a dependent class");
                    }
                }
            }
            coloring.classes.push_back(std::move(klass));
        }
    }
    return coloring;
}

Coloring per_packet_coloring(const ConflictGraph& graph) {
    std::map<PacketId, std::vector<std::size_t>> by_packet;
    for (std::size_t v = 0; v < graph.size(); ++v) {
        by_packet[graph.vertices[v].alpha].push_back(v);
    }
    Coloring coloring;
    coloring.origin = Coloring::Origin::kPerPacket;
    coloring.classes.reserve(by_packet.size());
    for (auto& [packet, members] : by_packet) {
        (void)packet;
        coloring.classes.push_back(std::move(members));
    }
    return coloring;
}

bool coloring_valid(const ConflictGraph& graph, const Coloring& coloring) {
    std::vector<char> seen(graph.size(), 0);
    std::size_t covered = 0;
    for (const std::vector<std::size_t>& klass : coloring.classes) {
        for (std::size_t a = 0; a < klass.size(); ++a) {
            std::size_t v = klass[a];
            if (v >= graph.size() || seen[v]) return false;
            seen[v] = 1;
            ++covered;
            for (std::size_t b = a + 1; b < klass.size(); ++b) {
                if (graph.adjacent(v, klass[b])) return false;
            }
        }
    }
    return covered == graph.size();
}

DeliveryResult gcc_delivery(const CacheConfiguration& caches,
                            const PacketDemand& demand,
                            const SimParams& params) {
    ConflictGraph graph = build_conflict_graph(caches, demand);
    Coloring grouped = label_grouped_coloring(graph);
    Coloring per_packet = per_packet_coloring(graph);
    DeliveryResult result;
    result.label_grouped_colors = grouped.colors();
    result.per_packet_colors = per_packet.colors();
    result.coloring = grouped.colors() <= per_packet.colors() ? std::move(grouped)
                                                              : std::move(per_packet);
    result.rate = static_cast<double>(result.coloring.colors()) /
                  params.packets_per_unit_rate();
    result.codeword.reserve(result.coloring.classes.size());
    for (const std::vector<std::size_t>& klass : result.coloring.classes) {
        std::vector<PacketId> block;
        block.reserve(klass.size());
        for (std::size_t v : klass) block.push_back(graph.vertices[v].alpha);
        std::sort(block.begin(), block.end());
        block.erase(std::unique(block.begin(), block.end()), block.end());
        result.codeword.push_back(std::move(block));
    }
    return result;
}

bool verify_decodable(const CacheConfiguration& caches,
                      const PacketDemand& demand,
                      const std::vector<std::vector<PacketId>>& codeword) {
    // Index blocks by the packets they contain.
    std::map<PacketId, std::vector<std::size_t>> blocks_with;
    for (std::size_t b = 0; b < codeword.size(); ++b) {
        for (const PacketId& packet : codeword[b]) {
            blocks_with[packet].push_back(b);
        }
    }
    const int K = static_cast<int>(demand.demand.size());
    for (int k = 0; k < K; ++k) {
        int n = demand.demand[static_cast<std::size_t>(k)];
        for (long p : demand.missing[static_cast<std::size_t>(k)]) {
            PacketId wanted{n, p};
            auto it = blocks_with.find(wanted);
            if (it == blocks_with.end()) return false;
            bool recovered = false;
            for (std::size_t b : it->second) {
                bool peelable = true;
                for (const PacketId& other : codeword[b]) {
                    if (other == wanted) continue;
                    if (!caches.holds(k, other.file, other.position)) {
                        peelable = false;
                        break;
                    }
                }
                if (peelable) {
                    recovered = true;
                    break;
                }
            }
            if (!recovered) return false;
        }
    }
    return true;
}

TrialResult run_delivery_trial(const CacheDesign& design,
                               const SimParams& params, const Demand& demand,
                               std::uint64_t seed) {
    CacheConfiguration caches = random_fill_caches(design, params, seed);
    PacketDemand pd = packet_demand(design, caches, demand, params);
    DeliveryResult delivery = gcc_delivery(caches, pd, params);
    TrialResult result;
    result.rate = delivery.rate;
    result.decodable = verify_decodable(caches, pd, delivery.codeword);
    std::size_t vertices = 0;
    for (const std::vector<long>& m : pd.missing) vertices += m.size();
    result.vertices = static_cast<long>(vertices);
    result.label_grouped_colors = delivery.label_grouped_colors;
    result.per_packet_colors = delivery.per_packet_colors;
    return result;
}

}  // namespace cachesim
