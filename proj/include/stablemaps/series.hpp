#pragma once

/**
 * @file series.hpp
 * @brief Truncated power series in t and z = (z_1..z_r) over Q(u).
 *
 * A series carries a truncation box k <= kmax, d <= dmax (componentwise).
 * Products truncate to the box; keys outside it are never stored.
 */

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qfield.hpp"

namespace stablemaps {

using Degree = std::vector<int>;

struct Grading {
    std::vector<std::string> names;

    static Grading of_rank(std::size_t r) {
        Grading g;
        for (std::size_t i = 1; i <= r; ++i) g.names.push_back(r == 1 ? "z" : "z" + std::to_string(i));
        return g;
    }
    std::size_t rank() const { return names.size(); }
    friend bool operator==(const Grading& a, const Grading& b) { return a.rank() == b.rank(); }
};

struct Exponent {
    int k = 0;
    Degree d;
    friend auto operator<=>(const Exponent&, const Exponent&) = default;
    friend bool operator==(const Exponent&, const Exponent&) = default;
};

inline int total_degree(const Degree& d) { return std::accumulate(d.begin(), d.end(), 0); }

inline bool dominated(const Degree& d, const Degree& box) {
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] < 0 || d[i] > box[i]) return false;
    return true;
}

/// Every degree vector 0 <= d <= box, in lexicographic order.
inline std::vector<Degree> degrees_in_box(const Degree& box) {
    std::vector<Degree> out;
    Degree d(box.size(), 0);
    while (true) {
        out.push_back(d);
        std::size_t i = d.size();
        while (i > 0 && d[i - 1] == box[i - 1]) --i;
        if (i == 0) return out;
        ++d[i - 1];
        std::fill(d.begin() + static_cast<std::ptrdiff_t>(i), d.end(), 0);
    }
}

class MultiSeries {
public:
    MultiSeries(Grading grading, int kmax, Degree dmax)
        : grading_(std::move(grading)), kmax_(kmax), dmax_(std::move(dmax)) {
        if (grading_.rank() < 1) throw Error("grading rank must be >= 1");
        if (dmax_.size() != grading_.rank()) throw Error("dmax length does not match grading rank");
        if (kmax_ < 0 || std::any_of(dmax_.begin(), dmax_.end(), [](int x) { return x < 0; }))
            throw Error("negative truncation order");
    }

    static MultiSeries constant(const Grading& g, int kmax, const Degree& dmax, const RatFunc& c) {
        MultiSeries s(g, kmax, dmax);
        s.set(0, Degree(g.rank(), 0), c);
        return s;
    }
    /// The series t (zero when kmax = 0).
    static MultiSeries t(const Grading& g, int kmax, const Degree& dmax) {
        MultiSeries s(g, kmax, dmax);
        if (kmax >= 1) s.set(1, Degree(g.rank(), 0), RatFunc(1));
        return s;
    }
    static MultiSeries z(const Grading& g, int kmax, const Degree& dmax, std::size_t component) {
        MultiSeries s(g, kmax, dmax);
        Degree d(g.rank(), 0);
        d.at(component) = 1;
        if (dominated(d, dmax)) s.set(0, d, RatFunc(1));
        return s;
    }

    const Grading& grading() const { return grading_; }
    int kmax() const { return kmax_; }
    const Degree& dmax() const { return dmax_; }
    const std::map<Exponent, RatFunc>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool in_box(int k, const Degree& d) const {
        return k >= 0 && k <= kmax_ && d.size() == dmax_.size() && dominated(d, dmax_);
    }

    RatFunc coeff(int k, const Degree& d) const {
        if (!in_box(k, d)) throw Error("beyond truncation");
        auto it = terms_.find(Exponent{k, d});
        return it == terms_.end() ? RatFunc() : it->second;
    }

    void set(int k, const Degree& d, const RatFunc& c) {
        if (!in_box(k, d)) throw Error("beyond truncation");
        if (c.is_zero()) {
            terms_.erase(Exponent{k, d});
        } else {
            terms_[Exponent{k, d}] = c;
        }
    }
    void add_to(int k, const Degree& d, const RatFunc& c) {
        if (c.is_zero()) return;
        set(k, d, coeff(k, d) + c);
    }

    /// Restriction to a smaller box.
    MultiSeries truncated(int kmax, const Degree& dmax) const {
        MultiSeries out(grading_, std::min(kmax, kmax_), min_box(dmax_, dmax));
        for (const auto& [e, c] : terms_)
            if (out.in_box(e.k, e.d)) out.terms_.emplace(e, c);
        return out;
    }

    /// Terms with k + |d| == order.
    MultiSeries homogeneous_part(int order) const {
        MultiSeries out(grading_, kmax_, dmax_);
        for (const auto& [e, c] : terms_)
            if (e.k + total_degree(e.d) == order) out.terms_.emplace(e, c);
        return out;
    }

    /// Largest k + |d| inside the box.
    int max_total_order() const { return kmax_ + total_degree(dmax_); }

    MultiSeries& operator*=(const RatFunc& c) {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, v] : terms_) v *= c;
        return *this;
    }

    friend MultiSeries operator+(const MultiSeries& a, const MultiSeries& b) { return combine(a, b, false); }
    friend MultiSeries operator-(const MultiSeries& a, const MultiSeries& b) { return combine(a, b, true); }
    friend MultiSeries operator-(MultiSeries a) {
        for (auto& [e, v] : a.terms_) v = -v;
        return a;
    }
    friend MultiSeries operator*(MultiSeries a, const RatFunc& c) { return a *= c; }
    friend MultiSeries operator*(const RatFunc& c, MultiSeries a) { return a *= c; }

    friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
        check_compatible(a, b);
        MultiSeries out(a.grading_, std::min(a.kmax_, b.kmax_), min_box(a.dmax_, b.dmax_));
        std::map<Exponent, std::vector<RatFunc>> parts;
        Exponent e;
        e.d.resize(out.dmax_.size());
        for (const auto& [ea, ca] : a.terms_) {
            if (!out.in_box(ea.k, ea.d)) continue;
            for (const auto& [eb, cb] : b.terms_) {
                e.k = ea.k + eb.k;
                if (e.k > out.kmax_) continue;
                bool ok = true;
                for (std::size_t i = 0; i < e.d.size(); ++i) {
                    e.d[i] = ea.d[i] + eb.d[i];
                    if (e.d[i] > out.dmax_[i]) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                parts[e].push_back(ca * cb);
            }
        }
        for (auto& [ex, ps] : parts) {
            RatFunc sum = sum_of(ps);
            if (!sum.is_zero()) out.terms_.emplace(ex, std::move(sum));
        }
        return out;
    }

    MultiSeries& operator+=(const MultiSeries& o) { return *this = *this + o; }
    MultiSeries& operator-=(const MultiSeries& o) { return *this = *this - o; }
    MultiSeries& operator*=(const MultiSeries& o) { return *this = *this * o; }

    /// Exact equality of truncation box and every coefficient.
    friend bool operator==(const MultiSeries& a, const MultiSeries& b) {
        return a.grading_ == b.grading_ && a.kmax_ == b.kmax_ && a.dmax_ == b.dmax_ && a.terms_ == b.terms_;
    }

    /// Adds a list of rational functions grouping by denominator first, which
    /// keeps most additions polynomial.
    static RatFunc sum_of(const std::vector<RatFunc>& xs) {
        if (xs.size() == 1) return xs.front();
        auto cmp = [](const UPoly& x, const UPoly& y) { return less_by_coeffs(x, y); };
        std::map<UPoly, UPoly, decltype(cmp)> by_den(cmp);
        for (const auto& x : xs) {
            if (x.is_zero()) continue;
            auto [it, fresh] = by_den.try_emplace(x.den(), x.num());
            if (!fresh) it->second += x.num();
        }
        RatFunc acc;
        for (const auto& [den, num] : by_den) acc += RatFunc(num, den);
        return acc;
    }

    static Degree min_box(const Degree& a, const Degree& b) {
        if (a.size() != b.size()) throw Error("grading mismatch");
        Degree out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::min(a[i], b[i]);
        return out;
    }

private:
    static void check_compatible(const MultiSeries& a, const MultiSeries& b) {
        if (!(a.grading_ == b.grading_)) throw Error("grading mismatch");
    }

    static MultiSeries combine(const MultiSeries& a, const MultiSeries& b, bool subtract) {
        check_compatible(a, b);
        MultiSeries out(a.grading_, std::min(a.kmax_, b.kmax_), min_box(a.dmax_, b.dmax_));
        for (const auto& [e, c] : a.terms_)
            if (out.in_box(e.k, e.d)) out.terms_.emplace(e, c);
        for (const auto& [e, c] : b.terms_) {
            if (!out.in_box(e.k, e.d)) continue;
            RatFunc v = out.coeff(e.k, e.d) + (subtract ? -c : c);
            out.set(e.k, e.d, v);
        }
        return out;
    }

    Grading grading_;
    int kmax_;
    Degree dmax_;
    std::map<Exponent, RatFunc> terms_;
};

inline RatFunc coeff(const MultiSeries& a, int k, const Degree& d) { return a.coeff(k, d); }

inline void require_nilpotent(const MultiSeries& g, const char* what) {
    if (!g.coeff(0, Degree(g.grading().rank(), 0)).is_zero()) throw Error(what);
}

/// (1 + g)^alpha = sum_k C(alpha, k) g^k for g without constant term.
inline MultiSeries series_pow_binomial(const MultiSeries& g, const RatFunc& alpha) {
    require_nilpotent(g, "binomial base must be 1 + nilpotent part");
    const Grading& gr = g.grading();
    MultiSeries result = MultiSeries::constant(gr, g.kmax(), g.dmax(), RatFunc(1));
    MultiSeries power = MultiSeries::constant(gr, g.kmax(), g.dmax(), RatFunc(1));
    RatFunc binom(1);
    for (int k = 1; k <= g.max_total_order(); ++k) {
        power = power * g;
        if (power.is_zero()) break;
        binom = binom * (alpha - RatFunc(k - 1)) * RatFunc(make_rat(1, k));
        if (binom.is_zero()) break;
        result += power * binom;
    }
    return result;
}

/// log(1 + g) = sum_{k>=1} (-1)^{k+1} g^k / k for g without constant term.
inline MultiSeries series_log1p(const MultiSeries& g) {
    require_nilpotent(g, "logarithm base must be 1 + nilpotent part");
    MultiSeries result(g.grading(), g.kmax(), g.dmax());
    MultiSeries power = MultiSeries::constant(g.grading(), g.kmax(), g.dmax(), RatFunc(1));
    for (int k = 1; k <= g.max_total_order(); ++k) {
        power = power * g;
        if (power.is_zero()) break;
        result += power * RatFunc(make_rat(k % 2 == 1 ? 1 : -1, k));
    }
    return result;
}

/// exp(g) = sum g^k / k! for g without constant term.
inline MultiSeries series_exp(const MultiSeries& g) {
    require_nilpotent(g, "exponential argument must be nilpotent");
    MultiSeries result = MultiSeries::constant(g.grading(), g.kmax(), g.dmax(), RatFunc(1));
    MultiSeries power = result;
    for (int k = 1; k <= g.max_total_order(); ++k) {
        power = power * g * RatFunc(make_rat(1, k));
        if (power.is_zero()) break;
        result += power;
    }
    return result;
}

/// Partial derivative in t; the result has kmax reduced by one.
inline MultiSeries series_dt(const MultiSeries& a) {
    if (a.kmax() < 1) throw Error("t-derivative needs kmax >= 1");
    MultiSeries out(a.grading(), a.kmax() - 1, a.dmax());
    for (const auto& [e, c] : a.terms())
        if (e.k >= 1) out.set(e.k - 1, e.d, c * RatFunc(e.k));
    return out;
}

inline nlohmann::json to_json(const MultiSeries& s) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, c] : s.terms()) terms.push_back({{"k", e.k}, {"d", e.d}, {"coeff", to_json(c)}});
    return {{"kmax", s.kmax()}, {"dmax", s.dmax()}, {"terms", terms}};
}

inline MultiSeries multiseries_from_json(const nlohmann::json& j) {
    try {
        Degree dmax = j.at("dmax").get<Degree>();
        MultiSeries s(Grading::of_rank(dmax.size()), j.at("kmax").get<int>(), dmax);
        for (const auto& t : j.at("terms"))
            s.set(t.at("k").get<int>(), t.at("d").get<Degree>(), ratfunc_from_json(t.at("coeff")));
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed series JSON: ") + e.what());
    }
}

}  // namespace stablemaps
