#pragma once

/**
 * @file trees.hpp
 * @brief Trees, marked trees, stratum classes and the sum over marked trees.
 *
 * The generating function
 *
 *   Phi_W(t, z) = sum_{tau / iso} 1/|Aut tau| sum_{v -> (beta_v, k_v)} [W]
 *                 prod_v t^{k_v}/k_v! z^{beta_v} eps(beta_v, |v| + k_v) N(W, beta_v) (u+1)_{|v| + k_v}
 *
 * is evaluated here term by term, where (u+1)_m is the falling factorial of
 * [P^1] = u + 1 and eps(beta, m) = 0 exactly when beta = 0 and m <= 2.
 */

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qfield.hpp"
#include "series.hpp"
#include "target.hpp"

namespace stablemaps {

struct Tree {
    int vcount = 1;
    std::vector<std::pair<int, int>> edges;
    std::string canonical_code;

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(vcount));
        for (auto [a, b] : edges) {
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
        }
        return adj;
    }
    std::vector<int> valencies() const {
        std::vector<int> val(static_cast<std::size_t>(vcount), 0);
        for (auto [a, b] : edges) {
            ++val[static_cast<std::size_t>(a)];
            ++val[static_cast<std::size_t>(b)];
        }
        return val;
    }
};

struct Canonical {
    std::string code;
    std::uint64_t aut = 1;
};

namespace detail {

inline Canonical encode_rooted(const std::vector<std::vector<int>>& adj, const std::vector<std::string>& colors,
                               int v, int parent) {
    std::vector<Canonical> kids;
    for (int c : adj[static_cast<std::size_t>(v)])
        if (c != parent) kids.push_back(encode_rooted(adj, colors, c, v));
    std::sort(kids.begin(), kids.end(), [](const Canonical& a, const Canonical& b) { return a.code < b.code; });
    Canonical out;
    out.code = "(";
    if (!colors.empty() && !colors[static_cast<std::size_t>(v)].empty())
        out.code += "[" + colors[static_cast<std::size_t>(v)] + "]";
    std::size_t run = 0;
    for (std::size_t i = 0; i < kids.size(); ++i) {
        out.code += kids[i].code;
        out.aut *= kids[i].aut;
        run = (i > 0 && kids[i].code == kids[i - 1].code) ? run + 1 : 1;
        out.aut *= run;
    }
    out.code += ")";
    return out;
}

/// One or two central vertices, found by stripping leaves.
inline std::vector<int> centers(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> deg(adj.size());
    std::vector<int> layer;
    for (int v = 0; v < n; ++v) {
        deg[static_cast<std::size_t>(v)] = static_cast<int>(adj[static_cast<std::size_t>(v)].size());
        if (deg[static_cast<std::size_t>(v)] <= 1) layer.push_back(v);
    }
    int remaining = n;
    while (remaining > 2) {
        remaining -= static_cast<int>(layer.size());
        std::vector<int> next;
        for (int v : layer)
            for (int w : adj[static_cast<std::size_t>(v)])
                if (--deg[static_cast<std::size_t>(w)] == 1) next.push_back(w);
        layer = std::move(next);
    }
    std::sort(layer.begin(), layer.end());
    return layer;
}

}  // namespace detail

/// AHU code of the tree rooted at its center (or central edge) and the order
/// of its automorphism group. Optional per-vertex colors must be preserved by
/// automorphisms and must not contain brackets.
inline Canonical canonicalize(const Tree& tree, const std::vector<std::string>& colors = {}) {
    const auto adj = tree.adjacency();
    const auto c = detail::centers(adj);
    if (c.size() == 1) return detail::encode_rooted(adj, colors, c[0], -1);
    Canonical a = detail::encode_rooted(adj, colors, c[0], c[1]);
    Canonical b = detail::encode_rooted(adj, colors, c[1], c[0]);
    if (b.code < a.code) std::swap(a, b);
    return Canonical{"E" + a.code + b.code, a.aut * b.aut * (a.code == b.code ? 2 : 1)};
}

inline Tree make_tree(int vcount, std::vector<std::pair<int, int>> edges) {
    if (vcount < 1) throw Error("a tree needs at least one vertex");
    if (static_cast<int>(edges.size()) != vcount - 1) throw Error("a tree on n vertices has n - 1 edges");
    Tree t{vcount, std::move(edges), {}};
    // connectivity
    std::vector<int> parent(static_cast<std::size_t>(vcount));
    for (int i = 0; i < vcount; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    for (auto [a, b] : t.edges) {
        if (a < 0 || b < 0 || a >= vcount || b >= vcount || a == b) throw Error("bad edge");
        const int ra = find(a), rb = find(b);
        if (ra == rb) throw Error("edges contain a cycle");
        parent[static_cast<std::size_t>(ra)] = rb;
    }
    t.canonical_code = canonicalize(t).code;
    return t;
}

struct TreeClass {
    Tree tree;
    std::uint64_t aut_order = 1;
};

/// One representative per isomorphism class for every vertex count 1..vmax,
/// ordered by vertex count then canonical code.
inline std::vector<TreeClass> enum_trees(int vmax) {
    if (vmax < 1) throw Error("vmax must be >= 1");
    std::vector<TreeClass> out;
    std::map<std::string, TreeClass> level;
    Tree single = make_tree(1, {});
    level.emplace(single.canonical_code, TreeClass{single, 1});
    for (int n = 1;; ++n) {
        for (auto& [code, tc] : level) out.push_back(tc);
        if (n == vmax) break;
        std::map<std::string, TreeClass> next;
        for (const auto& [code, tc] : level) {
            for (int v = 0; v < n; ++v) {
                auto edges = tc.tree.edges;
                edges.emplace_back(v, n);
                Tree grown{n + 1, std::move(edges), {}};
                Canonical c = canonicalize(grown);
                if (next.count(c.code)) continue;
                grown.canonical_code = c.code;
                next.emplace(c.code, TreeClass{std::move(grown), c.aut});
            }
        }
        level = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Marked trees

/// Stability factor: zero for a contracted component with fewer than three special points.
inline bool epsilon(const Degree& beta, int special_points) { return total_degree(beta) != 0 || special_points >= 3; }

struct MarkedTree {
    Tree tree;
    std::vector<Degree> beta;             ///< per vertex
    std::vector<std::vector<int>> labels; ///< per vertex, subsets of 1..k

    int k() const {
        int s = 0;
        for (const auto& l : labels) s += static_cast<int>(l.size());
        return s;
    }

    /// Labels partition 1..k and contracted components are stable.
    bool admissible() const {
        const int kk = k();
        std::vector<int> seen(static_cast<std::size_t>(kk) + 1, 0);
        for (const auto& l : labels)
            for (int x : l) {
                if (x < 1 || x > kk || seen[static_cast<std::size_t>(x)]++) return false;
            }
        const auto val = tree.valencies();
        for (int v = 0; v < tree.vcount; ++v) {
            const auto i = static_cast<std::size_t>(v);
            if (!epsilon(beta[i], val[i] + static_cast<int>(labels[i].size()))) return false;
        }
        return true;
    }

    std::vector<std::string> colors() const {
        std::vector<std::string> out;
        for (int v = 0; v < tree.vcount; ++v) {
            std::string c = "b";
            for (int x : beta[static_cast<std::size_t>(v)]) c += std::to_string(x) + ",";
            c += "s";
            for (int x : labels[static_cast<std::size_t>(v)]) c += std::to_string(x) + ",";
            out.push_back(std::move(c));
        }
        return out;
    }
};

namespace detail {

/// Every way to write `total` as an ordered sum of `parts` degree vectors.
inline void degree_compositions(const Degree& total, int parts, std::vector<Degree>& cur,
                                std::vector<std::vector<Degree>>& out) {
    if (static_cast<int>(cur.size()) == parts - 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (const auto& d : degrees_in_box(total)) {
        Degree rest(total.size());
        for (std::size_t i = 0; i < total.size(); ++i) rest[i] = total[i] - d[i];
        cur.push_back(d);
        degree_compositions(rest, parts, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

/// All admissible markings of a labelled tree with k marked points and total degree beta_total.
inline std::vector<MarkedTree> enum_marked(const Tree& tree, int k, const Degree& beta_total) {
    std::vector<MarkedTree> out;
    if (k < 0) return out;
    const auto val = tree.valencies();
    std::vector<std::vector<Degree>> splits;
    std::vector<Degree> cur;
    detail::degree_compositions(beta_total, tree.vcount, cur, splits);
    for (const auto& split : splits) {
        int deficit = 0;
        for (int v = 0; v < tree.vcount; ++v)
            if (total_degree(split[static_cast<std::size_t>(v)]) == 0)
                deficit += std::max(0, 3 - val[static_cast<std::size_t>(v)]);
        if (deficit > k) continue;
        // label x goes to vertex owner[x-1]
        std::vector<int> owner(static_cast<std::size_t>(k), 0);
        while (true) {
            MarkedTree m{tree, split, std::vector<std::vector<int>>(static_cast<std::size_t>(tree.vcount))};
            for (int x = 1; x <= k; ++x) m.labels[static_cast<std::size_t>(owner[static_cast<std::size_t>(x - 1)])].push_back(x);
            if (m.admissible()) out.push_back(std::move(m));
            std::size_t pos = 0;
            while (pos < owner.size() && ++owner[pos] == tree.vcount) owner[pos++] = 0;
            if (pos == owner.size()) break;
        }
    }
    return out;
}

/// Virtual class of the stratum of maps of the given combinatorial type:
/// [W] prod_v eps(beta_v, |v| + k_v) N(W, beta_v) (u+1)_{|v| + k_v}.
inline RatFunc stratum_class(const TargetSpace& w, const MarkedTree& m) {
    const auto val = m.tree.valencies();
    RatFunc acc(w.pw());
    for (int v = 0; v < m.tree.vcount; ++v) {
        const auto i = static_cast<std::size_t>(v);
        const int special = val[i] + static_cast<int>(m.labels[i].size());
        if (!epsilon(m.beta[i], special)) return RatFunc();
        acc *= nclass(w, m.beta[i]) * RatFunc(falling_p1(special));
    }
    return acc;
}

/// Largest vertex count of a tree carrying an admissible marking with at most
/// kmax points and total degree at most |dmax|_1.
inline int tree_vertex_bound(int kmax, const Degree& dmax) { return std::max(1, 3 * total_degree(dmax) + kmax - 2); }

/// [M_{0,k}(W, beta)] as a sum over isomorphism classes of marked trees of
/// stratum_class / |Aut(tau, mu)|. Markings are deduplicated by canonical code.
inline RatFunc marked_strata_class(const TargetSpace& w, int k, const Degree& beta) {
    const int vmax = tree_vertex_bound(k, beta);
    RatFunc total;
    for (const auto& tc : enum_trees(vmax)) {
        std::map<std::string, RatFunc> classes;
        for (const auto& m : enum_marked(tc.tree, k, beta)) {
            Canonical c = canonicalize(m.tree, m.colors());
            if (classes.count(c.code)) continue;
            classes.emplace(c.code, stratum_class(w, m) * RatFunc(make_rat(1, static_cast<long>(c.aut))));
        }
        std::vector<RatFunc> parts;
        for (auto& [code, cls] : classes) parts.push_back(cls);
        total += MultiSeries::sum_of(parts);
    }
    return total;
}

namespace detail {

/// Per-cell accumulator that sums numerators sharing a denominator.
class LazySum {
public:
    void add(const Exponent& e, const RatFunc& x) {
        if (x.is_zero()) return;
        auto& cell = cells_[e];
        auto [it, fresh] = cell.try_emplace(x.den(), x.num());
        if (!fresh) it->second += x.num();
    }
    void merge(const LazySum& o) {
        for (const auto& [e, cell] : o.cells_)
            for (const auto& [den, num] : cell) add(e, RatFunc(num, den));
    }
    void write_to(MultiSeries& s, const RatFunc& scale) const {
        for (const auto& [e, cell] : cells_) {
            RatFunc acc;
            for (const auto& [den, num] : cell) acc += RatFunc(num, den);
            s.set(e.k, e.d, acc * scale);
        }
    }

private:
    struct PolyLess {
        bool operator()(const UPoly& a, const UPoly& b) const { return less_by_coeffs(a, b); }
    };
    std::map<Exponent, std::map<UPoly, UPoly, PolyLess>> cells_;
};

struct VertexWeights {
    int kmax;
    std::vector<Degree> degrees;  // all degrees in the box, index = position
    std::map<Degree, std::size_t> index;
    // weight[val][deg index][k]
    std::vector<std::vector<std::vector<RatFunc>>> weight;

    VertexWeights(const TargetSpace& w, int max_val, int kmax_, const Degree& dmax) : kmax(kmax_) {
        degrees = degrees_in_box(dmax);
        for (std::size_t i = 0; i < degrees.size(); ++i) index.emplace(degrees[i], i);
        std::vector<RatFunc> n_of;
        for (const auto& d : degrees) n_of.push_back(nclass(w, d));
        weight.resize(static_cast<std::size_t>(max_val) + 1);
        for (int val = 0; val <= max_val; ++val) {
            auto& wv = weight[static_cast<std::size_t>(val)];
            wv.resize(degrees.size());
            for (std::size_t i = 0; i < degrees.size(); ++i) {
                for (int k = 0; k <= kmax; ++k) {
                    const int special = val + k;
                    if (!epsilon(degrees[i], special) || n_of[i].is_zero()) {
                        wv[i].emplace_back();
                        continue;
                    }
                    wv[i].push_back(n_of[i] * RatFunc(falling_p1(special)) *
                                    RatFunc(BigRat(1) / BigRat(factorial(static_cast<unsigned>(k)))));
                }
            }
        }
    }
};

class TreeSumWalker {
public:
    TreeSumWalker(const VertexWeights& weights, const TreeClass& tc, const Degree& dmax, LazySum& sink)
        : w_(weights), sink_(sink), dmax_(dmax), val_(tc.tree.valencies()) {
        const std::size_t n = val_.size();
        need_count_.assign(n + 1, 0);
        need_sum_.assign(n + 1, 0);
        for (std::size_t i = n; i-- > 0;) {
            const int need = std::max(0, 3 - val_[i]);
            need_count_[i] = need_count_[i + 1] + (need > 0 ? 1 : 0);
            need_sum_[i] = need_sum_[i + 1] + need;
        }
        k_used_ = 0;
        d_used_.assign(dmax.size(), 0);
        start_ = RatFunc(make_rat(1, static_cast<long>(tc.aut_order)));
    }

    void run() { walk(0, start_); }

private:
    void walk(std::size_t v, const RatFunc& product) {
        const int k_rem = w_.kmax - k_used_;
        Degree d_rem(dmax_.size());
        int b_rem = 0;
        for (std::size_t i = 0; i < dmax_.size(); ++i) {
            d_rem[i] = dmax_[i] - d_used_[i];
            b_rem += d_rem[i];
        }
        if (need_count_[v] > k_rem + b_rem || need_sum_[v] > k_rem + 3 * b_rem) return;
        if (v == val_.size()) {
            sink_.add(Exponent{k_used_, d_used_}, product);
            return;
        }
        const auto& wv = w_.weight[static_cast<std::size_t>(val_[v])];
        for (const auto& d : degrees_in_box(d_rem)) {
            const auto& wd = wv[w_.index.at(d)];
            for (std::size_t i = 0; i < d.size(); ++i) d_used_[i] += d[i];
            for (int k = 0; k <= k_rem; ++k) {
                const RatFunc& wt = wd[static_cast<std::size_t>(k)];
                if (wt.is_zero()) continue;
                k_used_ += k;
                walk(v + 1, product * wt);
                k_used_ -= k;
            }
            for (std::size_t i = 0; i < d.size(); ++i) d_used_[i] -= d[i];
        }
    }

    const VertexWeights& w_;
    LazySum& sink_;
    Degree dmax_;
    std::vector<int> val_;
    std::vector<int> need_count_;
    std::vector<int> need_sum_;
    int k_used_ = 0;
    Degree d_used_;
    RatFunc start_;
};

}  // namespace detail

/// Phi_W truncated to k <= kmax, d <= dmax, by direct summation over marked trees.
inline MultiSeries tree_sum_potential(const TargetSpace& w, int kmax, const Degree& dmax, unsigned workers = 1) {
    if (kmax < 0) throw Error("kmax must be >= 0");
    if (dmax.size() != w.rank()) throw DataError("dmax length does not match target rank");
    const int vmax = tree_vertex_bound(kmax, dmax);
    const auto trees = enum_trees(vmax);
    const detail::VertexWeights weights(w, vmax - 1, kmax, dmax);

    workers = std::max(1u, workers);
    std::vector<detail::LazySum> partial(workers);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < workers; ++id) {
        pool.emplace_back([&, id] {
            for (std::size_t i = next++; i < trees.size(); i = next++)
                detail::TreeSumWalker(weights, trees[i], dmax, partial[id]).run();
        });
    }
    for (auto& th : pool) th.join();
    for (unsigned id = 1; id < workers; ++id) partial[0].merge(partial[id]);

    MultiSeries out(w.grading(), kmax, dmax);
    partial[0].write_to(out, RatFunc(w.pw()));
    return out;
}

}  // namespace stablemaps
