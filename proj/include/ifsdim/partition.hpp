#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ifsdim/ifs_system.hpp"

namespace ifsdim {

// Partition of the q-words into groups whose cylinder images are pairwise
// separated across groups (images inside one group may intersect freely).
// Words are stored by row-major index into I^q.
struct PartitionScheme {
    std::size_t q = 1;
    std::vector<std::vector<std::size_t>> groups;

    std::vector<std::size_t> cardinalities() const {
        std::vector<std::size_t> m;
        m.reserve(groups.size());
        for (const auto& g : groups) m.push_back(g.size());
        return m;
    }

    // group id by q-word index; validates the exact-cover precondition.
    std::vector<std::size_t> group_of_word(std::size_t word_count) const {
        std::vector<std::size_t> owner(word_count, SIZE_MAX);
        for (std::size_t g = 0; g < groups.size(); ++g)
            for (std::size_t w : groups[g]) {
                if (w >= word_count || owner[w] != SIZE_MAX)
                    throw std::invalid_argument("partition does not cover I^q exactly once");
                owner[w] = g;
            }
        for (std::size_t o : owner)
            if (o == SIZE_MAX)
                throw std::invalid_argument("partition does not cover I^q exactly once");
        return owner;
    }
};

struct PartitionCheck {
    bool accepted = false;
    // q-word index pairs from different groups whose enclosures overlap
    std::vector<std::pair<std::size_t, std::size_t>> violations;
};

namespace detail {

// Positive-measure overlap test; touching within eta counts as disjoint
// (the separation requirement concerns images of an open set).
inline bool boxes_overlap(const Box& a, const Box& b, double eta, int dim) {
    if (a.x.overlap_len(b.x) <= eta) return false;
    if (dim == 2 && a.y.overlap_len(b.y) <= eta) return false;
    return true;
}

} // namespace detail

inline std::size_t word_count_pow(std::size_t m, std::size_t q, std::size_t cap) {
    double total = 1.0;
    for (std::size_t i = 0; i < q; ++i) {
        total *= static_cast<double>(m);
        if (total > static_cast<double>(cap))
            throw std::length_error("q-word enumeration exceeds cap");
    }
    return static_cast<std::size_t>(total);
}

// Checks cross-group disjointness of the q-cylinder enclosures.
inline PartitionCheck verify_partition(const IfsSystem& sys, const PartitionScheme& scheme,
                                       std::size_t cap = 100'000) {
    if (scheme.q == 0) throw std::invalid_argument("partition needs q >= 1");
    const std::size_t count = word_count_pow(sys.alphabet_size(), scheme.q, cap);
    auto owner = scheme.group_of_word(count);
    const double eta = 1e-12 * sys.seed().diam();

    std::vector<Box> boxes(count);
    for (std::size_t w = 0; w < count; ++w)
        boxes[w] = enclosure(sys, word_from_index(w, sys.alphabet_size(), scheme.q));

    PartitionCheck out;
    out.accepted = true;
    for (std::size_t a = 0; a < count; ++a)
        for (std::size_t b = a + 1; b < count; ++b) {
            if (owner[a] == owner[b]) continue;
            if (detail::boxes_overlap(boxes[a], boxes[b], eta, sys.ambient_dim())) {
                out.accepted = false;
                out.violations.emplace_back(a, b);
            }
        }
    return out;
}

// Finest partition compatible with the enclosure-intersection graph:
// connected components of "images overlap with positive measure".
inline PartitionScheme default_partition(const IfsSystem& sys, std::size_t q,
                                         std::size_t cap = 100'000) {
    if (q == 0) throw std::invalid_argument("partition needs q >= 1");
    const std::size_t count = word_count_pow(sys.alphabet_size(), q, cap);
    const double eta = 1e-12 * sys.seed().diam();

    std::vector<Box> boxes(count);
    for (std::size_t w = 0; w < count; ++w)
        boxes[w] = enclosure(sys, word_from_index(w, sys.alphabet_size(), q));

    std::vector<std::size_t> parent(count);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) { parent[v] = parent[parent[v]]; v = parent[v]; }
        return v;
    };
    for (std::size_t a = 0; a < count; ++a)
        for (std::size_t b = a + 1; b < count; ++b)
            if (detail::boxes_overlap(boxes[a], boxes[b], eta, sys.ambient_dim()))
                parent[find(a)] = find(b);

    std::vector<std::vector<std::size_t>> comp(count);
    for (std::size_t w = 0; w < count; ++w) comp[find(w)].push_back(w);

    PartitionScheme scheme;
    scheme.q = q;
    for (auto& c : comp)
        if (!c.empty()) scheme.groups.push_back(std::move(c));
    return scheme;
}

} // namespace ifsdim
