#pragma once

/**
 * @file target.hpp
 * @brief Target spaces W and their Eisenstein series E(W, z).
 *
 * A target is described by its class [W] = P_W(u) and the classes
 * [Map_beta(P^1, W)] of degree-beta maps from P^1, beta in Z_+^r. The builtin
 * projective spaces use the closed form
 *
 *   E(P^n, z) = [P^n] (1 - u z) / (1 - u^{n+1} z),
 *
 * i.e. [Map_d] = [P^n] u^{(n+1)(d-1)} (u^{n+1} - u) for d >= 1.
 */

#include <atomic>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qfield.hpp"
#include "series.hpp"

namespace stablemaps {

/// [PGL(2)] = u (u^2 - 1).
inline UPoly pgl2_class() { return UPoly{0, -1, 0, 1}; }

/// [P^1] = u + 1.
inline UPoly p1_class() { return UPoly{1, 1}; }

/// [P^n] = 1 + u + ... + u^n.
inline UPoly pn_class(int n) { return UPoly(std::vector<BigRat>(static_cast<std::size_t>(n) + 1, BigRat(1))); }

class TargetSpace {
public:
    using ClassSource = std::function<std::optional<RatFunc>(const Degree&)>;

    TargetSpace(std::string name, Grading grading, UPoly pw, ClassSource source, bool builtin)
        : name_(std::move(name)), grading_(std::move(grading)), pw_(std::move(pw)), source_(std::move(source)),
          builtin_(builtin) {
        if (pw_.is_zero()) throw DataError("target class [W] must be nonzero");
        if (grading_.rank() < 1) throw DataError("target rank must be >= 1");
    }

    const std::string& name() const { return name_; }
    const Grading& grading() const { return grading_; }
    std::size_t rank() const { return grading_.rank(); }
    const UPoly& pw() const { return pw_; }
    bool builtin() const { return builtin_; }
    /// n for the builtin P^n, 0 for the point, nullopt for file targets.
    std::optional<int> projective_dim() const { return pn_dim_; }

    /// [Map_beta(P^1, W)]; beta = 0 gives [W].
    RatFunc map_class(const Degree& beta) const {
        if (beta.size() != rank()) throw DataError("degree vector has wrong rank for target " + name_);
        if (total_degree(beta) == 0) return RatFunc(pw_);
        auto v = source_(beta);
        if (!v) throw DataError("target data incomplete");
        return *v;
    }

    friend TargetSpace projective_space(int n);
    friend TargetSpace point_target();

private:
    std::string name_;
    Grading grading_;
    UPoly pw_;
    ClassSource source_;
    bool builtin_;
    std::optional<int> pn_dim_;
};

/// Closed-form [Map_d(P^1, P^n)], d >= 1.
inline UPoly map_class_pn(int n, int d) {
    const auto n1 = static_cast<std::size_t>(n + 1);
    return pn_class(n) * UPoly::monomial(1, n1 * static_cast<std::size_t>(d - 1)) *
           (UPoly::monomial(1, n1) - UPoly::u());
}

inline TargetSpace projective_space(int n) {
    if (n < 1) throw DataError("projective space needs n >= 1");
    TargetSpace w("P" + std::to_string(n), Grading::of_rank(1), pn_class(n),
                  [n](const Degree& beta) -> std::optional<RatFunc> { return RatFunc(map_class_pn(n, beta[0])); },
                  true);
    w.pn_dim_ = n;
    return w;
}

/// W = point: [W] = 1 and no non-constant maps.
inline TargetSpace point_target() {
    TargetSpace w("point", Grading::of_rank(1), UPoly(1),
                  [](const Degree&) -> std::optional<RatFunc> { return RatFunc(); }, true);
    w.pn_dim_ = 0;
    return w;
}

/// E(W, z) truncated at dmax, as a series with kmax = 0.
inline MultiSeries eisenstein_series(const TargetSpace& w, const Degree& dmax) {
    MultiSeries e(w.grading(), 0, dmax);
    for (const auto& d : degrees_in_box(dmax)) e.set(0, d, w.map_class(d));
    return e;
}

/// N(W, beta) = [Map_beta] / ([W] [PGL(2)]), with [Map_0] = [W].
inline RatFunc nclass(const TargetSpace& w, const Degree& beta) {
    return w.map_class(beta) / RatFunc(w.pw() * pgl2_class());
}

/// Checks sum_{k=0}^{d} [Map_{d-k}] (u^{k+1} - 1) = u^{(n+1)(d+1)} - 1 for all d <= dmax.
inline bool verify_recurrence(int n, int dmax) {
    const TargetSpace w = projective_space(n);
    for (int d = 0; d <= dmax; ++d) {
        RatFunc lhs;
        for (int k = 0; k <= d; ++k)
            lhs += w.map_class({d - k}) * RatFunc(UPoly::monomial(1, static_cast<std::size_t>(k + 1)) - UPoly(1));
        const RatFunc rhs(UPoly::monomial(1, static_cast<std::size_t>((n + 1) * (d + 1))) - UPoly(1));
        if (lhs != rhs) return false;
    }
    return true;
}

namespace detail {

/// Degree of a univariate polynomial over F_p stored low-to-high; -1 for zero.
inline int fp_degree(const std::vector<int>& a) {
    for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
        if (a[static_cast<std::size_t>(i)] != 0) return i;
    return -1;
}

inline int fp_inverse(int a, int p) {
    int r = 1;
    for (int e = p - 2; e > 0; --e) r = r * a % p;
    return r;
}

/// gcd over F_p, not normalised.
inline std::vector<int> fp_gcd(std::vector<int> a, std::vector<int> b, int p) {
    int db = fp_degree(b);
    while (db >= 0) {
        int da = fp_degree(a);
        const int inv = fp_inverse(b[static_cast<std::size_t>(db)], p);
        while (da >= db) {
            const int q = a[static_cast<std::size_t>(da)] * inv % p;
            for (int j = 0; j <= db; ++j) {
                auto& x = a[static_cast<std::size_t>(da - db + j)];
                x = ((x - q * b[static_cast<std::size_t>(j)]) % p + p) % p;
            }
            da = fp_degree(a);
        }
        std::swap(a, b);
        db = fp_degree(b);
    }
    return a;
}

}  // namespace detail

/// Number of degree-d maps P^1 -> P^n over F_p, by enumerating (n+1)-tuples of
/// binary forms of degree d and keeping those without a common zero.
///
/// A form sum_j a_j x^j y^{d-j} is stored as the coefficient vector of its
/// dehomogenisation at y = 1. The tuple has a common zero at [1:0] iff every
/// a_d vanishes, and a common affine zero iff the dehomogenisations share a
/// factor.
inline BigInt count_maps_bruteforce(int n, int d, int p, unsigned workers = 1) {
    if (n < 1 || d < 0) throw DataError("count-ff needs n >= 1 and d >= 0");
    if (p < 2) throw DataError("p must be prime");
    for (int q = 2; q * q <= p; ++q)
        if (p % q == 0) throw DataError("p must be prime");
    const int coeffs_per_form = d + 1;
    const int forms = n + 1;
    double total = 1;
    for (int i = 0; i < coeffs_per_form * forms; ++i) total *= p;
    if (total > 1e9) throw DataError("too large");

    std::int64_t form_count = 1;
    for (int i = 0; i < coeffs_per_form; ++i) form_count *= p;
    std::vector<std::vector<int>> table(static_cast<std::size_t>(form_count));
    for (std::int64_t f = 0; f < form_count; ++f) {
        std::vector<int> c(static_cast<std::size_t>(coeffs_per_form));
        std::int64_t x = f;
        for (auto& ci : c) {
            ci = static_cast<int>(x % p);
            x /= p;
        }
        table[static_cast<std::size_t>(f)] = std::move(c);
    }

    // Tuples with the first form fixed; the remaining forms run through all choices.
    auto count_with_first = [&](std::int64_t first) {
        std::uint64_t good = 0;
        std::vector<std::int64_t> idx(static_cast<std::size_t>(forms), 0);
        idx[0] = first;
        while (true) {
            bool top_nonzero = false;
            for (auto i : idx) top_nonzero = top_nonzero || table[static_cast<std::size_t>(i)].back() != 0;
            if (top_nonzero) {
                std::vector<int> g = table[static_cast<std::size_t>(idx[0])];
                int deg = detail::fp_degree(g);
                for (std::size_t i = 1; i < idx.size() && deg != 0; ++i) {
                    const auto& f = table[static_cast<std::size_t>(idx[i])];
                    if (detail::fp_degree(f) < 0) continue;
                    if (deg < 0) {
                        g = f;
                        deg = detail::fp_degree(g);
                        continue;
                    }
                    g = detail::fp_gcd(std::move(g), f, p);
                    deg = detail::fp_degree(g);
                }
                if (deg == 0) ++good;
            }
            std::size_t pos = 1;
            while (pos < idx.size() && ++idx[pos] == form_count) idx[pos++] = 0;
            if (pos == idx.size()) break;
        }
        return good;
    };

    workers = std::max(1u, workers);
    std::vector<std::uint64_t> partial(workers, 0);
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::int64_t f = next++; f < form_count; f = next++) partial[w] += count_with_first(f);
        });
    }
    for (auto& th : pool) th.join();
    std::uint64_t good = 0;
    for (auto c : partial) good += c;
    if (good % static_cast<std::uint64_t>(p - 1) != 0) throw Error("tuple count not divisible by p - 1");
    return BigInt(static_cast<unsigned long>(good / static_cast<std::uint64_t>(p - 1)));
}

/// Reads a target description:
/// {"name": ..., "rank": r, "pw": UPoly, "classes": [{"beta": [...], "value": RatFunc}, ...]}
inline TargetSpace target_from_json(const nlohmann::json& j) {
    try {
        const std::string name = j.at("name").get<std::string>();
        const int rank = j.at("rank").get<int>();
        if (rank < 1) throw DataError("rank must be >= 1");
        UPoly pw = upoly_from_json(j.at("pw"));
        if (pw.is_zero()) throw DataError("pw must be nonzero");
        auto table = std::make_shared<std::map<Degree, RatFunc>>();
        for (const auto& entry : j.at("classes")) {
            Degree beta = entry.at("beta").get<Degree>();
            if (static_cast<int>(beta.size()) != rank)
                throw DataError("rank mismatch: beta of length " + std::to_string(beta.size()) + " for rank " +
                                std::to_string(rank));
            for (int b : beta)
                if (b < 0) throw DataError("negative degree in beta");
            if (total_degree(beta) == 0) throw DataError("beta = 0 is implied by pw and must not be listed");
            RatFunc value = ratfunc_from_json(entry.at("value"));
            if (value.den().eval(1) == 0) throw DataError("class for beta has a pole at u = 1");
            if (!table->emplace(beta, value).second) throw DataError("duplicate beta entry");
        }
        return TargetSpace(
            name, Grading::of_rank(static_cast<std::size_t>(rank)), std::move(pw),
            [table](const Degree& beta) -> std::optional<RatFunc> {
                auto it = table->find(beta);
                if (it == table->end()) return std::nullopt;
                return it->second;
            },
            false);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed target file: ") + e.what());
    }
}

inline TargetSpace load_target(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open target file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed target file: ") + e.what());
    }
    return target_from_json(j);
}

/// Writes the builtin target as a file-format JSON up to dmax.
inline nlohmann::json target_to_json(const TargetSpace& w, const Degree& dmax) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& d : degrees_in_box(dmax)) {
        if (total_degree(d) == 0) continue;
        classes.push_back({{"beta", d}, {"value", to_json(w.map_class(d))}});
    }
    return {{"name", w.name()}, {"rank", w.rank()}, {"pw", to_json(w.pw())}, {"classes", classes}};
}

/// "point", "pn:N" or "file:PATH".
inline TargetSpace parse_target(const std::string& spec) {
    if (spec == "point") return point_target();
    if (spec.rfind("pn:", 0) == 0) {
        try {
            std::size_t used = 0;
            int n = std::stoi(spec.substr(3), &used);
            if (used != spec.size() - 3) throw DataError("bad target " + spec);
            return projective_space(n);
        } catch (const std::logic_error&) {
            throw DataError("bad target " + spec);
        }
    }
    if (spec.rfind("file:", 0) == 0) return load_target(spec.substr(5));
    throw DataError("unknown target \"" + spec + "\" (expected point, pn:N or file:PATH)");
}

}  // namespace stablemaps
