#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "kfactor/vertex_set.hpp"

namespace kfactor {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent sub-seeds.
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::vector<int> shuffled(const VertexSet& s, Rng& rng) {
    std::vector<int> v = s.items();
    std::shuffle(v.begin(), v.end(), rng);
    return v;
}

inline VertexSet random_subset(const VertexSet& s, int size, Rng& rng) {
    std::vector<int> v = shuffled(s, rng);
    v.resize(static_cast<size_t>(std::clamp(size, 0, s.size())));
    return VertexSet(std::move(v));
}

inline VertexSet bernoulli_subset(const VertexSet& s, double prob, Rng& rng) {
    std::bernoulli_distribution keep(std::clamp(prob, 0.0, 1.0));
    std::vector<int> v;
    for (int x : s)
        if (keep(rng)) v.push_back(x);
    return VertexSet(std::move(v));
}

}  // namespace kfactor
