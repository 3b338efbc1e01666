#include "xlnum/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "xlnum/rng.hpp"

namespace xlnum {

Network Network::from_links(int num_nodes, std::vector<Link> links) {
    Network net;
    net.num_nodes = num_nodes;
    net.links = std::move(links);
    net.node_power_budget.assign(num_nodes, 3.0);
    net.out_links.resize(num_nodes);
    net.in_links.resize(num_nodes);
    net.neighbors.resize(num_nodes);
    for (int e = 0; e < net.num_links(); ++e) {
        const auto& l = net.links[e];
        require(l.from != l.to, "network: self-links are not allowed");
        require(l.from >= 0 && l.from < num_nodes && l.to >= 0 && l.to < num_nodes,
                "network: link endpoint out of range");
        net.out_links[l.from].push_back(e);
        net.in_links[l.to].push_back(e);
    }
    for (const auto& l : net.links) {
        auto& a = net.neighbors[l.from];
        auto& b = net.neighbors[l.to];
        if (std::find(a.begin(), a.end(), l.to) == a.end()) a.push_back(l.to);
        if (std::find(b.begin(), b.end(), l.from) == b.end()) b.push_back(l.from);
    }
    for (auto& nb : net.neighbors) std::sort(nb.begin(), nb.end());
    return net;
}

bool Network::adjacent(NodeId a, NodeId b) const {
    const auto& nb = neighbors[a];
    return std::binary_search(nb.begin(), nb.end(), b);
}

LinkId Network::link_between(NodeId a, NodeId b) const {
    for (LinkId e : out_links[a])
        if (links[e].to == b) return e;
    return -1;
}

Network build_grid(int rows, int cols) {
    require(rows >= 1 && cols >= 1, "build_grid: rows and cols must be >= 1");
    auto id = [cols](int r, int c) { return r * cols + c; };
    std::vector<Link> links;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                links.push_back({id(r, c), id(r, c + 1)});
                links.push_back({id(r, c + 1), id(r, c)});
            }
            if (r + 1 < rows) {
                links.push_back({id(r, c), id(r + 1, c)});
                links.push_back({id(r + 1, c), id(r, c)});
            }
        }
    return Network::from_links(rows * cols, std::move(links));
}

std::vector<std::vector<LinkId>> conflict_sets(const Network& net,
                                               InterferenceModel model) {
    const int E = net.num_links();
    std::vector<std::vector<LinkId>> conf(E);
    auto shares_endpoint = [&](const Link& a, const Link& b) {
        return a.from == b.from || a.from == b.to || a.to == b.from || a.to == b.to;
    };
    auto endpoints_adjacent = [&](const Link& a, const Link& b) {
        return net.adjacent(a.from, b.from) || net.adjacent(a.from, b.to) ||
               net.adjacent(a.to, b.from) || net.adjacent(a.to, b.to);
    };
    for (int e = 0; e < E; ++e)
        for (int f = e + 1; f < E; ++f) {
            bool clash = shares_endpoint(net.links[e], net.links[f]);
            if (!clash && model == InterferenceModel::two_hop)
                clash = endpoints_adjacent(net.links[e], net.links[f]);
            if (clash) {
                conf[e].push_back(f);
                conf[f].push_back(e);
            }
        }
    return conf;
}

namespace {

// Bit-set adjacency over links; Bron-Kerbosch with pivoting on the
// complement graph enumerates maximal independent sets of the conflict
// graph directly.
struct BitGraph {
    int n;
    int words;
    std::vector<std::uint64_t> adj;  // complement adjacency, row-major

    bool get(const std::uint64_t* row, int v) const {
        return (row[v >> 6] >> (v & 63)) & 1u;
    }
};

void bron_kerbosch(const BitGraph& g, std::vector<std::uint64_t>& r_members,
                   std::vector<std::uint64_t> p, std::vector<std::uint64_t> x,
                   std::vector<std::vector<LinkId>>& out, std::size_t cap) {
    auto none = [&](const std::vector<std::uint64_t>& s) {
        for (auto w : s)
            if (w) return false;
        return true;
    };
    if (none(p) && none(x)) {
        std::vector<LinkId> set;
        for (int v = 0; v < g.n; ++v)
            if ((r_members[v >> 6] >> (v & 63)) & 1u) set.push_back(v);
        out.push_back(std::move(set));
        require(out.size() <= cap,
                "independent-set enumeration exceeded the configured cap");
        return;
    }
    // pivot: vertex of P|X with most complement-neighbors inside P
    int pivot = -1, best = -1;
    for (int v = 0; v < g.n; ++v) {
        const bool in_px = ((p[v >> 6] | x[v >> 6]) >> (v & 63)) & 1u;
        if (!in_px) continue;
        const auto* row = g.adj.data() + static_cast<std::size_t>(v) * g.words;
        int cnt = 0;
        for (int w = 0; w < g.words; ++w) cnt += std::popcount(p[w] & row[w]);
        if (cnt > best) {
            best = cnt;
            pivot = v;
        }
    }
    const auto* prow = g.adj.data() + static_cast<std::size_t>(pivot) * g.words;
    std::vector<std::uint64_t> candidates(g.words);
    for (int w = 0; w < g.words; ++w) candidates[w] = p[w] & ~prow[w];

    for (int v = 0; v < g.n; ++v) {
        if (!((candidates[v >> 6] >> (v & 63)) & 1u)) continue;
        const auto* row = g.adj.data() + static_cast<std::size_t>(v) * g.words;
        std::vector<std::uint64_t> np(g.words), nx(g.words);
        for (int w = 0; w < g.words; ++w) {
            np[w] = p[w] & row[w];
            nx[w] = x[w] & row[w];
        }
        r_members[v >> 6] |= 1ull << (v & 63);
        bron_kerbosch(g, r_members, std::move(np), std::move(nx), out, cap);
        r_members[v >> 6] &= ~(1ull << (v & 63));
        p[v >> 6] &= ~(1ull << (v & 63));
        x[v >> 6] |= 1ull << (v & 63);
    }
}

}  // namespace

IndependentSetFamily enumerate_maximal_independent_sets(
    const std::vector<std::vector<LinkId>>& conflicts, std::size_t cap) {
    const int n = static_cast<int>(conflicts.size());
    require(n > 0, "independent-set enumeration: empty link set");
    BitGraph g;
    g.n = n;
    g.words = (n + 63) / 64;
    g.adj.assign(static_cast<std::size_t>(n) * g.words, 0);
    for (int v = 0; v < n; ++v) {
        auto* row = g.adj.data() + static_cast<std::size_t>(v) * g.words;
        for (int u = 0; u < n; ++u)
            if (u != v) row[u >> 6] |= 1ull << (u & 63);  // complement: all but self
        for (int u : conflicts[v]) row[u >> 6] &= ~(1ull << (u & 63));
    }
    std::vector<std::uint64_t> r(g.words, 0), p(g.words, 0), x(g.words, 0);
    for (int v = 0; v < n; ++v) p[v >> 6] |= 1ull << (v & 63);

    IndependentSetFamily fam;
    bron_kerbosch(g, r, std::move(p), std::move(x), fam.sets, cap);
    for (auto& s : fam.sets) std::sort(s.begin(), s.end());
    std::sort(fam.sets.begin(), fam.sets.end());
    fam.member_of.resize(n);
    for (int s = 0; s < static_cast<int>(fam.sets.size()); ++s)
        for (LinkId e : fam.sets[s]) fam.member_of[e].push_back(s);
    return fam;
}

PairIndex build_pair_index(const Network& net) {
    PairIndex idx;
    std::map<std::pair<NodeId, NodeId>, int> slot_of;
    for (int e = 0; e < net.num_links(); ++e) {
        idx.pairs.emplace_back(net.links[e].from, net.links[e].to);
        slot_of[{net.links[e].from, net.links[e].to}] = e;
    }
    idx.interferer_slot.resize(net.num_links());
    for (int e = 0; e < net.num_links(); ++e) {
        const NodeId rx = net.links[e].to;
        for (LinkId f : net.conflicts[e]) {
            const NodeId tx = net.links[f].from;
            auto key = std::make_pair(tx, rx);
            auto it = slot_of.find(key);
            if (it == slot_of.end()) {
                it = slot_of.emplace(key, static_cast<int>(idx.pairs.size())).first;
                idx.pairs.push_back(key);
            }
            idx.interferer_slot[e].push_back(it->second);
        }
    }
    return idx;
}

double capacity_nonorthogonal(const Network& net, const PairIndex& pairs,
                              std::span<const double> pair_gain,
                              std::span<const double> power_w, LinkId link) {
    double interference = 0.0;
    const auto& confs = net.conflicts[link];
    for (std::size_t k = 0; k < confs.size(); ++k)
        interference += pair_gain[pairs.interferer_slot[link][k]] * power_w[confs[k]];
    const double sinr = pair_gain[link] * power_w[link] / (net.noise_w + interference);
    return net.links[link].bandwidth_hz * std::log2(1.0 + sinr);
}

int FlowSet::dest_pos(NodeId d) const {
    const auto it = std::lower_bound(destinations.begin(), destinations.end(), d);
    if (it == destinations.end() || *it != d) return -1;
    return static_cast<int>(it - destinations.begin());
}

namespace {

void finalize_destinations(FlowSet& fs) {
    fs.destinations.clear();
    for (const auto& [src, dst] : fs.flows) fs.destinations.push_back(dst);
    std::sort(fs.destinations.begin(), fs.destinations.end());
    fs.destinations.erase(
        std::unique(fs.destinations.begin(), fs.destinations.end()),
        fs.destinations.end());
}

}  // namespace

FlowSet assign_random_flows(const Network& net, std::uint64_t seed) {
    FlowSet fs;
    for (NodeId i = 0; i < net.num_nodes; ++i) {
        std::vector<NodeId> candidates;
        for (NodeId d = 0; d < net.num_nodes; ++d)
            if (d != i && !net.adjacent(i, d)) candidates.push_back(d);
        if (candidates.empty()) {
            fs.skipped.push_back(i);
            continue;
        }
        const auto pick = rng::uniform_index(
            {seed, static_cast<std::uint32_t>(i), 0, 0, 2}, candidates.size());
        fs.flows.emplace_back(i, candidates[pick]);
    }
    finalize_destinations(fs);
    return fs;
}

FlowSet make_flows(const Network& net,
                   std::vector<std::pair<NodeId, NodeId>> flows) {
    FlowSet fs;
    for (const auto& [src, dst] : flows) {
        require(src != dst, "flows: source equals destination");
        require(src >= 0 && src < net.num_nodes && dst >= 0 && dst < net.num_nodes,
                "flows: node id out of range");
    }
    fs.flows = std::move(flows);
    finalize_destinations(fs);
    return fs;
}

}  // namespace xlnum
