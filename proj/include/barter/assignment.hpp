// Exact maximum-weight perfect matching on bipartite graphs with
// arbitrary-precision integer weights, plus a small-instance enumerator.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "barter/model.hpp"

namespace barter {

// Weights are exact integers. The perturbed edge graph pre-scales its
// weights by 2^(n*m), which overflows any fixed-width type almost
// immediately, hence the big integer.
using Weight = boost::multiprecision::cpp_int;

class BipartiteWeightedGraph {
public:
    BipartiteWeightedGraph() = default;
    explicit BipartiteWeightedGraph(int n) : n_(n), adj_(n) {}

    int size() const { return n_; }

    void add_edge(int left, int right, Weight w) {
        adj_[left].emplace_back(right, std::move(w));
    }

    // Edges of one left node, in insertion (canonical) order.
    const std::vector<std::pair<int, Weight>>& edges(int left) const {
        return adj_[left];
    }

    const Weight* weight(int left, int right) const {
        for (const auto& [r, w] : adj_[left])
            if (r == right) return &w;
        return nullptr;
    }

private:
    int n_ = 0;
    std::vector<std::vector<std::pair<int, Weight>>> adj_;
};

struct Matching {
    std::vector<int> right_of;  // right_of[left] = matched right node
    Weight weight{0};
};

// Hungarian method with potentials, O(V^3). Maximization is run as
// minimization of (top - w); missing edges get a cost too large to ever be
// profitable, and picking one anyway means no perfect matching exists.
inline Matching max_weight_perfect_matching(const BipartiteWeightedGraph& g) {
    const int n = g.size();
    Matching result;
    result.right_of.assign(n, -1);
    if (n == 0) return result;

    Weight top{0};
    for (int i = 0; i < n; ++i)
        for (const auto& [j, w] : g.edges(i))
            if (w > top) top = w;
    ++top;
    const Weight forbidden = top * (n + 1);

    std::vector<std::vector<Weight>> cost(n, std::vector<Weight>(n, forbidden));
    for (int i = 0; i < n; ++i)
        for (const auto& [j, w] : g.edges(i))
            if (top - w < cost[i][j]) cost[i][j] = top - w;

    const Weight inf = forbidden * (n + 2);
    std::vector<Weight> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> match(n + 1, 0);  // 1-based: match[j] = row assigned to column j
    std::vector<int> way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<Weight> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = match[j0], j1 = 0;
            Weight delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                Weight cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    for (int j = 1; j <= n; ++j) {
        int i = match[j] - 1;
        const Weight* w = g.weight(i, j - 1);
        if (w == nullptr)
            throw NoPerfectMatching("bipartite graph has no perfect matching");
        result.right_of[i] = j - 1;
        result.weight += *w;
    }
    return result;
}

// All perfect matchings, in lexicographic order of the assignment vector.
// Throws once more than `cap` matchings exist.
inline std::vector<Matching> enumerate_perfect_matchings(
    const BipartiteWeightedGraph& g, std::size_t cap) {
    const int n = g.size();
    std::vector<Matching> out;
    std::vector<int> right_of(n, -1);
    std::vector<char> used(n, 0);
    Weight weight{0};

    auto rec = [&](auto&& self, int left) -> void {
        if (left == n) {
            if (out.size() >= cap)
                throw CapExceeded("more than " + std::to_string(cap) +
                                  " perfect matchings");
            out.push_back({right_of, weight});
            return;
        }
        for (const auto& [j, w] : g.edges(left)) {
            if (used[j]) continue;
            used[j] = 1;
            right_of[left] = j;
            weight += w;
            self(self, left + 1);
            weight -= w;
            right_of[left] = -1;
            used[j] = 0;
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace barter
