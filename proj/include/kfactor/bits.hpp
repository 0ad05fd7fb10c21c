#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "kfactor/vertex_set.hpp"

namespace kfactor {

// Fixed-width bit row over [0, n); used for adjacency and fast common-neighbour counts.
class Bits {
public:
    Bits() = default;
    explicit Bits(int n) : n_(n), words_(static_cast<size_t>((n + 63) / 64), 0) {}
    Bits(int n, const VertexSet& s) : Bits(n) {
        for (int v : s) set(v);
    }

    int universe() const { return n_; }
    void set(int v) { words_[v >> 6] |= (uint64_t{1} << (v & 63)); }
    void reset(int v) { words_[v >> 6] &= ~(uint64_t{1} << (v & 63)); }
    bool test(int v) const { return (words_[v >> 6] >> (v & 63)) & 1u; }

    int count() const {
        int c = 0;
        for (uint64_t w : words_) c += std::popcount(w);
        return c;
    }
    bool any() const {
        for (uint64_t w : words_) if (w) return true;
        return false;
    }

    Bits& operator&=(const Bits& o) {
        for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    Bits& operator|=(const Bits& o) {
        for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    Bits& subtract(const Bits& o) {
        for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    friend Bits operator&(Bits a, const Bits& b) { return a &= b; }

    // |a & b| and |a & b & c| without materializing the intersection.
    static int and_count(const Bits& a, const Bits& b) {
        int c = 0;
        for (size_t i = 0; i < a.words_.size(); ++i) c += std::popcount(a.words_[i] & b.words_[i]);
        return c;
    }
    static int and_count(const Bits& a, const Bits& b, const Bits& d) {
        int c = 0;
        for (size_t i = 0; i < a.words_.size(); ++i)
            c += std::popcount(a.words_[i] & b.words_[i] & d.words_[i]);
        return c;
    }

    VertexSet to_set() const {
        std::vector<int> out;
        for (size_t i = 0; i < words_.size(); ++i) {
            uint64_t w = words_[i];
            while (w) {
                int b = std::countr_zero(w);
                out.push_back(static_cast<int>(i * 64) + b);
                w &= w - 1;
            }
        }
        return VertexSet(std::move(out));
    }

    friend bool operator==(const Bits&, const Bits&) = default;

private:
    int n_ = 0;
    std::vector<uint64_t> words_;
};

}  // namespace kfactor
