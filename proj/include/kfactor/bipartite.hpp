#pragma once

#include <vector>

namespace kfactor {

// Maximum matching by augmenting paths. adj[l] lists right vertices of left vertex l.
// Returns match_of_left (-1 where unmatched).
std::vector<int> max_bipartite_matching(int left, int right, const std::vector<std::vector<int>>& adj);

int matching_size(const std::vector<int>& match_of_left);

}  // namespace kfactor
