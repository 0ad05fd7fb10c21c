#include "kfactor/bipartite.hpp"

#include <functional>

namespace kfactor {

std::vector<int> max_bipartite_matching(int left, int right, const std::vector<std::vector<int>>& adj) {
    std::vector<int> match_l(static_cast<size_t>(left), -1), match_r(static_cast<size_t>(right), -1);
    std::vector<int> seen(static_cast<size_t>(right), -1);
    std::function<bool(int, int)> augment = [&](int l, int stamp) -> bool {
        for (int r : adj[static_cast<size_t>(l)]) {
            if (seen[static_cast<size_t>(r)] == stamp) continue;
            seen[static_cast<size_t>(r)] = stamp;
            if (match_r[static_cast<size_t>(r)] < 0 || augment(match_r[static_cast<size_t>(r)], stamp)) {
                match_l[static_cast<size_t>(l)] = r;
                match_r[static_cast<size_t>(r)] = l;
                return true;
            }
        }
        return false;
    };
    for (int l = 0; l < left; ++l) augment(l, l);
    return match_l;
}

int matching_size(const std::vector<int>& match_of_left) {
    int c = 0;
    for (int r : match_of_left) c += r >= 0;
    return c;
}

}  // namespace kfactor
