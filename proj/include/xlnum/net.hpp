#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "xlnum/common.hpp"

namespace xlnum {

using NodeId = int;
using LinkId = int;

struct Link {
    NodeId from = 0;
    NodeId to = 0;
    double bandwidth_hz = 1e6;
};

enum class InterferenceModel { node_exclusive, two_hop };

// Static multihop network: directed links plus the physical constants the
// optimization needs. Immutable once built; safe to share across threads.
struct Network {
    int num_nodes = 0;
    std::vector<Link> links;

    double noise_w = 0.1;                    // N0
    std::vector<double> node_power_budget;   // W*s over [s,T], per node
    double power_max_w = 3.0;
    double power_min_w = 0.0;                // transmit range lower edge
    double rate_max = 5.0;                   // R_max, bits/s
    double lambda_max = 5.0;                 // bits/s

    std::vector<std::vector<LinkId>> conflicts;  // I_ij, symmetric

    // derived topology
    std::vector<std::vector<LinkId>> out_links, in_links;
    std::vector<std::vector<NodeId>> neighbors;  // undirected adjacency

    static Network from_links(int num_nodes, std::vector<Link> links);

    int num_links() const { return static_cast<int>(links.size()); }
    bool adjacent(NodeId a, NodeId b) const;
    LinkId link_between(NodeId a, NodeId b) const;  // -1 when absent
};

// rows x cols lattice with a directed link pair per adjacent node pair.
Network build_grid(int rows, int cols);

// Protocol-model conflict sets. node_exclusive: links sharing an endpoint.
// two_hop: additionally links whose endpoints are adjacent in the topology.
std::vector<std::vector<LinkId>> conflict_sets(const Network& net,
                                               InterferenceModel model);

struct IndependentSetFamily {
    std::vector<std::vector<LinkId>> sets;    // canonical (lexicographic) order
    std::vector<std::vector<int>> member_of;  // per link -> set indices
};

// All maximal independent sets of the conflict graph, via pivoting clique
// enumeration on the complement. Throws when the family would exceed cap.
IndependentSetFamily enumerate_maximal_independent_sets(
    const std::vector<std::vector<LinkId>>& conflicts, std::size_t cap = 1000000);

inline double capacity_orthogonal(double bandwidth_hz, double gain, double power_w,
                                  double noise_w) {
    return bandwidth_hz * std::log2(1.0 + gain * power_w / noise_w);
}

// Ordered (tx, rx) channel pairs appearing in any SINR expression: the
// direct pair of every link (slot == link id) plus interferer-to-receiver
// cross pairs. Two links sharing a physical (tx, rx) pair share the slot.
struct PairIndex {
    std::vector<std::pair<NodeId, NodeId>> pairs;
    // interferer_slot[e][k] is the gain slot for conflicts[e][k]'s
    // transmitter heard at e's receiver.
    std::vector<std::vector<int>> interferer_slot;

    int num_pairs() const { return static_cast<int>(pairs.size()); }
};

PairIndex build_pair_index(const Network& net);

// SINR capacity of `link` under simultaneous transmissions `power_w`.
// `pair_gain` is indexed by PairIndex slots.
double capacity_nonorthogonal(const Network& net, const PairIndex& pairs,
                              std::span<const double> pair_gain,
                              std::span<const double> power_w, LinkId link);

struct FlowSet {
    std::vector<std::pair<NodeId, NodeId>> flows;  // (source, destination)
    std::vector<NodeId> destinations;              // sorted unique
    std::vector<NodeId> skipped;                   // sources with no candidate

    int num_flows() const { return static_cast<int>(flows.size()); }
    int num_destinations() const { return static_cast<int>(destinations.size()); }
    int dest_pos(NodeId d) const;  // -1 when not a destination
};

// Every node picks a uniformly random destination among the nodes it is
// not physically connected to; nodes with no candidate are skipped.
FlowSet assign_random_flows(const Network& net, std::uint64_t seed);

// Explicit flow list (validated: no self flows).
FlowSet make_flows(const Network& net,
                   std::vector<std::pair<NodeId, NodeId>> flows);

}  // namespace xlnum
