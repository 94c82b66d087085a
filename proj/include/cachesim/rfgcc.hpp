#pragma once

#include <cstdint>
#include <vector>

#include "cachesim/design.hpp"
#include "cachesim/model.hpp"

namespace cachesim {

/// Packet-level simulation parameters.  Rates only depend on the ratio
/// tau/T (packets per unit rate); both values are kept so configurations
/// mirror the physical story: files of tau bits split into T-bit packets.
struct SimParams {
    double tau = 1000.0;      // file length (bits)
    double T = 1.0;           // packet size (bits)
    std::uint64_t seed = 0;   // master seed for cache fills
    double packets_per_unit_rate() const { return tau / T; }
};

/// Number of T-bit packets in a prefix of `rate` bits/sample: round to
/// nearest, ties upward.  The asymptotic theory is rounding-free; one fixed
/// rule keeps finite trials reproducible.  Throws std::invalid_argument when
/// tau/T < 1.
long packet_count(double rate, const SimParams& params);

/// Version lengths in packets for a whole design.
std::vector<std::vector<long>> packetize(
    const std::vector<std::vector<double>>& storing_ranges,
    const SimParams& params);

/// One packet: (file, 1-based position inside the file's layered prefix).
/// Versions are nested prefixes, so position j names the same bits for every
/// receiver whose version is at least j packets long.
struct PacketId {
    int file = 0;
    long position = 0;
    friend bool operator==(const PacketId& a, const PacketId& b) {
        return a.file == b.file && a.position == b.position;
    }
    friend bool operator<(const PacketId& a, const PacketId& b) {
        return a.file != b.file ? a.file < b.file : a.position < b.position;
    }
};

/// Which packet positions each receiver holds: positions[k][n] is a sorted
/// list of 1-based positions of file n cached by receiver k.
struct CacheConfiguration {
    std::vector<std::vector<std::vector<long>>> positions;
    bool holds(int k, int n, long position) const;
};

/// Fills caches uniformly at random without replacement: receiver k draws
/// round(cache_split[k][n] * cache_size[k] * tau/T) positions among the
/// round(storing_range[k][n] * tau/T) packets of its version of file n (the
/// draw count clamped to the version length).  Throws infeasible_error when
/// a design asks to cache more than its storing range.
CacheConfiguration random_fill_caches(const CacheDesign& design,
                                      const SimParams& params,
                                      std::uint64_t seed);

/// Per-receiver missing packets: the positions of the requested version not
/// present in the receiver's cache.
struct PacketDemand {
    Demand demand;                           // demand[k] = requested file
    std::vector<std::vector<long>> missing;  // missing[k]: sorted positions
};
PacketDemand packet_demand(const CacheDesign& design,
                           const CacheConfiguration& caches,
                           const Demand& demand, const SimParams& params);

/// One conflict-graph vertex: packet `alpha` requested by receiver `beta`;
/// `eta` is the bitmask of receivers caching alpha.
struct ConflictVertex {
    PacketId alpha;
    int beta = 0;
    std::uint32_t eta = 0;
    /// The receiver label: requester plus cachers.
    std::uint32_t label() const { return eta | (1u << static_cast<unsigned>(beta)); }
};

/// Conflict graph over requested packets.  Adjacency is a pure predicate on
/// vertex labels and is computed lazily — vertex counts reach ~1e6 at
/// tau/T = 1e4, so edges are never materialized.
class ConflictGraph {
  public:
    std::vector<ConflictVertex> vertices;

    std::size_t size() const { return vertices.size(); }

    /// Two distinct requested packets interfere unless each requester caches
    /// the other's packet; vertices for the same packet never interfere.
    bool adjacent(std::size_t a, std::size_t b) const {
        const ConflictVertex& va = vertices[a];
        const ConflictVertex& vb = vertices[b];
        if (va.alpha == vb.alpha) return false;
        bool b_holds_a = (va.eta >> static_cast<unsigned>(vb.beta)) & 1u;
        bool a_holds_b = (vb.eta >> static_cast<unsigned>(va.beta)) & 1u;
        return !(b_holds_a && a_holds_b);
    }
};

/// One vertex per missing packet per requester; eta computed from the cache
/// configuration.  Requires at most 32 receivers (bitmask labels).
ConflictGraph build_conflict_graph(const CacheConfiguration& caches,
                                   const PacketDemand& demand);

/// A vertex coloring: partition of vertex indices into color classes.
struct Coloring {
    enum class Origin { kLabelGrouped, kPerPacket, kExternal };
    Origin origin = Origin::kExternal;
    std::vector<std::vector<std::size_t>> classes;
    long colors() const { return static_cast<long>(classes.size()); }
};

/// Label-grouped greedy coloring: vertices are grouped by their receiver
/// label; within a group the per-receiver queues are zipped, the j-th class
/// taking the j-th vertex of each queue (receivers in ascending order), so a
/// group costs as many colors as its longest queue.  Throws std::logic_error
/// if a produced class is not an independent set.
Coloring label_grouped_coloring(const ConflictGraph& graph);

/// One color per distinct requested packet (uncoded multicast).
Coloring per_packet_coloring(const ConflictGraph& graph);

/// True iff the classes partition the vertex set and every class is an
/// independent set.
bool coloring_valid(const ConflictGraph& graph, const Coloring& coloring);

/// Outcome of one delivery round.
struct DeliveryResult {
    Coloring coloring;  // the cheaper of the two greedy colorings
    long label_grouped_colors = 0;
    long per_packet_colors = 0;
    double rate = 0.0;  // colors * T / tau (bits/sample)
    /// One XOR block per color: the distinct packets combined into that
    /// transmission.  Structural only — payload bits carry no information at
    /// this abstraction level.
    std::vector<std::vector<PacketId>> codeword;
};

/// Builds the conflict graph, runs both greedy colorings, keeps the cheaper
/// one, and assembles the codeword.
DeliveryResult gcc_delivery(const CacheConfiguration& caches,
                            const PacketDemand& demand,
                            const SimParams& params);

/// Semantic decodability witness: true iff every missing packet of every
/// receiver appears in some codeword block whose other packets are all in
/// that receiver's cache (XOR peel-off with side information).
bool verify_decodable(const CacheConfiguration& caches,
                      const PacketDemand& demand,
                      const std::vector<std::vector<PacketId>>& codeword);

/// One full simulated trial: fill caches, build the graph, color, verify.
struct TrialResult {
    double rate = 0.0;
    bool decodable = false;
    long vertices = 0;
    long label_grouped_colors = 0;
    long per_packet_colors = 0;
};
TrialResult run_delivery_trial(const CacheDesign& design,
                               const SimParams& params, const Demand& demand,
                               std::uint64_t seed);

}  // namespace cachesim
