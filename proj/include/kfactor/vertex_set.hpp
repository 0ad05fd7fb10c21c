#pragma once

#include <algorithm>
#include <initializer_list>
#include <vector>

namespace kfactor {

// Sorted, duplicate-free list of vertex ids. Set algebra is linear merging.
class VertexSet {
public:
    VertexSet() = default;
    VertexSet(std::initializer_list<int> init) : items_(init) { normalize(); }
    explicit VertexSet(std::vector<int> items) : items_(std::move(items)) { normalize(); }

    static VertexSet range(int lo, int hi) {
        std::vector<int> v;
        for (int i = lo; i < hi; ++i) v.push_back(i);
        return VertexSet(std::move(v));
    }

    bool contains(int v) const { return std::binary_search(items_.begin(), items_.end(), v); }
    int size() const { return static_cast<int>(items_.size()); }
    bool empty() const { return items_.empty(); }
    int front() const { return items_.front(); }
    int operator[](int i) const { return items_[static_cast<size_t>(i)]; }

    void insert(int v) {
        auto it = std::lower_bound(items_.begin(), items_.end(), v);
        if (it == items_.end() || *it != v) items_.insert(it, v);
    }
    void erase(int v) {
        auto it = std::lower_bound(items_.begin(), items_.end(), v);
        if (it != items_.end() && *it == v) items_.erase(it);
    }

    VertexSet unite(const VertexSet& o) const {
        std::vector<int> out;
        std::set_union(items_.begin(), items_.end(), o.items_.begin(), o.items_.end(),
                       std::back_inserter(out));
        return from_sorted(std::move(out));
    }
    VertexSet intersect(const VertexSet& o) const {
        std::vector<int> out;
        std::set_intersection(items_.begin(), items_.end(), o.items_.begin(), o.items_.end(),
                              std::back_inserter(out));
        return from_sorted(std::move(out));
    }
    VertexSet minus(const VertexSet& o) const {
        std::vector<int> out;
        std::set_difference(items_.begin(), items_.end(), o.items_.begin(), o.items_.end(),
                            std::back_inserter(out));
        return from_sorted(std::move(out));
    }
    bool disjoint(const VertexSet& o) const {
        auto a = items_.begin(), b = o.items_.begin();
        while (a != items_.end() && b != o.items_.end()) {
            if (*a == *b) return false;
            if (*a < *b) ++a; else ++b;
        }
        return true;
    }
    bool subset_of(const VertexSet& o) const {
        return std::includes(o.items_.begin(), o.items_.end(), items_.begin(), items_.end());
    }

    VertexSet prefix(int count) const {
        count = std::min(count, size());
        return from_sorted(std::vector<int>(items_.begin(), items_.begin() + count));
    }

    const std::vector<int>& items() const { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    friend bool operator==(const VertexSet&, const VertexSet&) = default;
    friend auto operator<=>(const VertexSet& a, const VertexSet& b) { return a.items_ <=> b.items_; }

private:
    static VertexSet from_sorted(std::vector<int> v) {
        VertexSet s;
        s.items_ = std::move(v);
        return s;
    }
    void normalize() {
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    }

    std::vector<int> items_;
};

}  // namespace kfactor
