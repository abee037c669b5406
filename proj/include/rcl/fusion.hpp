// Knowledge fusion: blend the agreement of a network's peer selections with a
// scheduled quota of disagreement.
//
//   agree     = intersection of the peer sets
//   potential = union of the peer sets
//   uncertain = potential - agree
//   n_in      = floor(r * |uncertain|)
//   admitted  = uniform sample of n_in uncertain positions, no replacement
//   fused     = agree + admitted
//
// When the peers agree exactly (agree == potential) fusion returns the agreed
// set without touching the random stream. With a single peer (K = 2) that is
// always the case, so fusion reduces to co-teaching's plain exchange.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcl/curriculum.hpp"
#include "rcl/rng.hpp"

namespace rcl {

struct FusionOutcome {
    SelectionSet agree;
    SelectionSet uncertain;
    SelectionSet admitted;  // random subset of uncertain
    SelectionSet fused;     // agree + admitted
    std::size_t n_in = 0;
};

namespace detail {

inline std::vector<int> sorted_intersection(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline void check_selection(const SelectionSet& s, std::size_t batch_size) {
    for (std::size_t i = 0; i < s.indices.size(); ++i) {
        const int v = s.indices[i];
        if (v < 0 || static_cast<std::size_t>(v) >= batch_size) {
            throw std::invalid_argument("fusion: index " + std::to_string(v) +
                                        " out of batch range [0, " + std::to_string(batch_size) + ")");
        }
        if (i > 0 && s.indices[i - 1] >= v) {
            throw std::invalid_argument("fusion: selection indices must be strictly increasing");
        }
    }
}

}  // namespace detail

inline FusionOutcome knowledge_fusion(const std::vector<SelectionSet>& peers, double rate,
                                      Rng& rng, std::size_t batch_size) {
    if (peers.empty()) throw std::invalid_argument("knowledge_fusion: empty peer list");
    if (rate < 0.0 || rate > 1.0) {
        throw std::invalid_argument("knowledge_fusion: fusion rate must be in [0, 1]");
    }
    for (const auto& p : peers) detail::check_selection(p, batch_size);

    FusionOutcome out;
    out.agree.indices = peers.front().indices;
    SelectionSet potential;
    potential.indices = peers.front().indices;
    for (std::size_t k = 1; k < peers.size(); ++k) {
        out.agree.indices = detail::sorted_intersection(out.agree.indices, peers[k].indices);
        potential.indices = detail::sorted_union(potential.indices, peers[k].indices);
    }

    if (out.agree.indices == potential.indices) {
        out.fused = out.agree;
        return out;
    }

    std::set_difference(potential.indices.begin(), potential.indices.end(),
                        out.agree.indices.begin(), out.agree.indices.end(),
                        std::back_inserter(out.uncertain.indices));
    out.n_in = scaled_count(rate, out.uncertain.indices.size());
    out.admitted.indices = rng.sample_without_replacement(out.uncertain.indices, out.n_in);
    out.fused.indices = detail::sorted_union(out.agree.indices, out.admitted.indices);
    return out;
}

// Per-network fusion loop: entry k fuses the selections of every network
// except k, drawing from that network's own pre-split stream, so the K
// fusions are independent and may run in any order.
inline std::vector<SelectionSet> fuse_all(const std::vector<SelectionSet>& selections, double rate,
                                          const std::vector<std::uint64_t>& stream_seeds,
                                          std::size_t batch_size) {
    if (selections.size() < 2) throw std::invalid_argument("fuse_all: need at least 2 networks");
    if (stream_seeds.size() != selections.size()) {
        throw std::invalid_argument("fuse_all: need one stream seed per network");
    }
    std::vector<SelectionSet> fused(selections.size());
    for (std::size_t k = 0; k < selections.size(); ++k) {
        std::vector<SelectionSet> peers;
        peers.reserve(selections.size() - 1);
        for (std::size_t j = 0; j < selections.size(); ++j) {
            if (j != k) peers.push_back(selections[j]);
        }
        Rng rng(stream_seeds[k]);
        fused[k] = knowledge_fusion(peers, rate, rng, batch_size).fused;
    }
    return fused;
}

}  // namespace rcl
