#pragma once

/**
 * @file qfield.hpp
 * @brief Exact coefficient field Q(u).
 *
 * Every class handled by the library lives in Q(u) with u = q^2. The tower is
 *
 *   BigRat   -- GMP rational, always canonical
 *   UPoly    -- dense polynomial in u, trailing zeros trimmed
 *   RatFunc  -- num/den with gcd(num, den) = 1 and den monic; zero is 0/1
 */

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace stablemaps {

using BigInt = mpz_class;
using BigRat = mpq_class;

/// Base class for everything the library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user input (malformed file, incomplete target data, bad arguments).
struct DataError : Error {
    using Error::Error;
};

inline BigRat make_rat(long num, long den = 1) {
    BigRat r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "p", "-p" or "p/q".
inline BigRat parse_rat(const std::string& s) {
    BigRat r;
    if (r.set_str(s, 10) != 0 || r.get_den() == 0) {
        throw DataError("malformed rational \"" + s + "\"");
    }
    r.canonicalize();
    return r;
}

inline std::string to_string(const BigRat& r) { return r.get_str(); }

inline BigInt factorial(unsigned n) {
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return f;
}

class UPoly {
public:
    UPoly() = default;
    UPoly(const BigRat& c) {  // NOLINT: constants promote implicitly
        if (c != 0) coeffs_.push_back(c);
    }
    UPoly(long c) : UPoly(BigRat(c)) {}  // NOLINT
    UPoly(std::initializer_list<long> cs) {
        for (long c : cs) coeffs_.emplace_back(c);
        trim();
    }
    explicit UPoly(std::vector<BigRat> cs) : coeffs_(std::move(cs)) { trim(); }

    static UPoly monomial(const BigRat& c, std::size_t deg) {
        std::vector<BigRat> cs(deg + 1);
        cs[deg] = c;
        return UPoly(std::move(cs));
    }
    static UPoly u() { return monomial(1, 1); }

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    bool is_constant() const { return coeffs_.size() <= 1; }
    const std::vector<BigRat>& coeffs() const { return coeffs_; }

    BigRat operator[](std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : BigRat(0); }
    const BigRat& lead() const {
        if (is_zero()) throw Error("leading coefficient of zero polynomial");
        return coeffs_.back();
    }

    BigRat eval(const BigRat& x) const {
        BigRat acc = 0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    UPoly monic() const {
        if (is_zero()) return {};
        return *this * BigRat(1 / lead());
    }

    /// Coefficients of p(1 + e) in powers of e.
    UPoly shifted_to_one() const {
        std::vector<BigRat> out(coeffs_.size());
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            BigInt binom = 1;
            for (std::size_t j = 0; j <= i; ++j) {
                out[j] += coeffs_[i] * binom;
                binom = binom * BigInt(static_cast<unsigned long>(i - j)) / BigInt(static_cast<unsigned long>(j + 1));
            }
        }
        return UPoly(std::move(out));
    }

    UPoly& operator+=(const UPoly& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        trim();
        return *this;
    }
    UPoly& operator-=(const UPoly& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        trim();
        return *this;
    }
    UPoly& operator*=(const BigRat& c) {
        if (c == 0) {
            coeffs_.clear();
            return *this;
        }
        for (auto& x : coeffs_) x *= c;
        return *this;
    }

    friend UPoly operator+(UPoly a, const UPoly& b) { return a += b; }
    friend UPoly operator-(UPoly a, const UPoly& b) { return a -= b; }
    friend UPoly operator-(UPoly a) {
        for (auto& x : a.coeffs_) x = -x;
        return a;
    }
    friend UPoly operator*(UPoly a, const BigRat& c) { return a *= c; }
    friend UPoly operator*(const BigRat& c, UPoly a) { return a *= c; }
    friend UPoly operator*(const UPoly& a, const UPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<BigRat> out(a.coeffs_.size() + b.coeffs_.size() - 1);
        BigRat tmp;
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (a.coeffs_[i] == 0) continue;
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
                mpq_mul(tmp.get_mpq_t(), a.coeffs_[i].get_mpq_t(), b.coeffs_[j].get_mpq_t());
                out[i + j] += tmp;
            }
        }
        return UPoly(std::move(out));
    }
    UPoly& operator*=(const UPoly& o) { return *this = *this * o; }

    friend bool operator==(const UPoly&, const UPoly&) = default;

    /// Total order used only for keying containers.
    friend bool less_by_coeffs(const UPoly& a, const UPoly& b) {
        if (a.coeffs_.size() != b.coeffs_.size()) return a.coeffs_.size() < b.coeffs_.size();
        for (std::size_t i = a.coeffs_.size(); i-- > 0;) {
            int c = cmp(a.coeffs_[i], b.coeffs_[i]);
            if (c != 0) return c < 0;
        }
        return false;
    }

    std::string to_string(const std::string& var = "u") const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (std::size_t i = coeffs_.size(); i-- > 0;) {
            const BigRat& c = coeffs_[i];
            if (c == 0) continue;
            BigRat mag = abs(c);
            if (first) {
                if (c < 0) os << "-";
            } else {
                os << (c < 0 ? " - " : " + ");
            }
            first = false;
            if (i == 0 || mag != 1) os << mag.get_str();
            if (i > 0) {
                if (mag != 1) os << "*";
                os << var;
                if (i > 1) os << "^" << i;
            }
        }
        return os.str();
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }

    std::vector<BigRat> coeffs_;
};

inline std::ostream& operator<<(std::ostream& os, const UPoly& p) { return os << p.to_string(); }

/// Long division; throws on a zero divisor.
inline std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
    if (b.is_zero()) throw Error("division by zero");
    std::vector<BigRat> rem = a.coeffs();
    const int db = b.degree();
    const int da = a.degree();
    if (da < db) return {UPoly{}, a};
    std::vector<BigRat> quot(static_cast<std::size_t>(da - db + 1));
    const BigRat inv_lead = 1 / b.lead();
    BigRat tmp;
    for (int i = da; i >= db; --i) {
        const BigRat q = rem[static_cast<std::size_t>(i)] * inv_lead;
        if (q == 0) continue;
        quot[static_cast<std::size_t>(i - db)] = q;
        for (int j = 0; j <= db; ++j) {
            mpq_mul(tmp.get_mpq_t(), q.get_mpq_t(), b.coeffs()[static_cast<std::size_t>(j)].get_mpq_t());
            rem[static_cast<std::size_t>(i - db + j)] -= tmp;
        }
    }
    return {UPoly(std::move(quot)), UPoly(std::move(rem))};
}

/// Monic gcd by the Euclidean algorithm over Q, keeping remainders monic.
inline UPoly gcd(const UPoly& a, const UPoly& b) {
    if (a.is_zero() && b.is_zero()) throw Error("gcd of two zero polynomials");
    UPoly x = a.monic();
    UPoly y = b.monic();
    while (!y.is_zero()) {
        UPoly r = divmod(x, y).second.monic();
        x = std::move(y);
        y = std::move(r);
    }
    return x;
}

class RatFunc {
public:
    RatFunc() : den_(1) {}
    RatFunc(const BigRat& c) : num_(c), den_(1) {}  // NOLINT
    RatFunc(long c) : num_(c), den_(1) {}           // NOLINT
    RatFunc(UPoly num) : num_(std::move(num)), den_(1) {}  // NOLINT
    RatFunc(UPoly num, UPoly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

    static RatFunc u() { return RatFunc(UPoly::u()); }

    const UPoly& num() const { return num_; }
    const UPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.degree() == 0; }
    /// True when both num and den have degree <= 0.
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    BigRat constant_value() const {
        if (!is_constant()) throw Error("not a constant: " + to_string());
        return num_[0];
    }

    BigRat eval(const BigRat& x) const {
        BigRat d = den_.eval(x);
        if (d == 0) throw Error("pole at u = " + x.get_str());
        return num_.eval(x) / d;
    }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
        if (a.is_polynomial()) return RatFunc(a.num_ * b.den_ + b.num_, b.den_);
        if (b.is_polynomial()) return RatFunc(a.num_ + b.num_ * a.den_, a.den_);
        UPoly g = gcd(a.den_, b.den_);
        UPoly bq = divmod(b.den_, g).first;
        UPoly aq = divmod(a.den_, g).first;
        return RatFunc(a.num_ * bq + b.num_ * aq, a.den_ * bq);
    }
    friend RatFunc operator-(const RatFunc& a) {
        RatFunc r = a;
        r.num_ = -r.num_;
        return r;
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero() || b.is_zero()) return {};
        if (a.is_polynomial() && b.is_polynomial()) return RatFunc(a.num_ * b.num_);
        UPoly g1 = gcd(a.num_, b.den_);
        UPoly g2 = gcd(b.num_, a.den_);
        RatFunc r;
        r.num_ = divmod(a.num_, g1).first * divmod(b.num_, g2).first;
        r.den_ = divmod(a.den_, g2).first * divmod(b.den_, g1).first;
        r.make_den_monic();
        return r;
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw Error("division by zero");
        return a * b.inverse();
    }
    RatFunc inverse() const {
        if (is_zero()) throw Error("division by zero");
        RatFunc r;
        r.num_ = den_;
        r.den_ = num_;
        r.make_den_monic();
        return r;
    }
    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

    friend bool operator==(const RatFunc&, const RatFunc&) = default;

    std::string to_string(const std::string& var = "u") const {
        if (is_polynomial()) return num_.to_string(var);
        return "(" + num_.to_string(var) + ")/(" + den_.to_string(var) + ")";
    }

private:
    void normalize() {
        if (den_.is_zero()) throw Error("division by zero");
        if (num_.is_zero()) {
            den_ = UPoly(1);
            return;
        }
        if (den_.degree() > 0) {
            UPoly g = gcd(num_, den_);
            if (g.degree() > 0) {
                num_ = divmod(num_, g).first;
                den_ = divmod(den_, g).first;
            }
        }
        make_den_monic();
    }
    void make_den_monic() {
        const BigRat lc = den_.lead();
        if (lc != 1) {
            const BigRat inv = 1 / lc;
            num_ *= inv;
            den_ *= inv;
        }
    }

    UPoly num_;
    UPoly den_;
};

inline std::ostream& operator<<(std::ostream& os, const RatFunc& f) { return os << f.to_string(); }

/// f evaluated at a rational point; throws "pole" when the denominator vanishes.
inline BigRat eval_at(const RatFunc& f, const BigRat& s) {
    if (f.den().eval(s) == 0) throw Error("pole");
    return f.num().eval(s) / f.den().eval(s);
}

/// Taylor coefficients c_0..c_order of f around u = 1.
inline std::vector<BigRat> expand_at_one(const RatFunc& f, int order) {
    if (order < 0) throw Error("negative expansion order");
    const UPoly num = f.num().shifted_to_one();
    const UPoly den = f.den().shifted_to_one();
    if (den[0] == 0) throw Error("pole at unity");
    const BigRat inv0 = 1 / den[0];
    std::vector<BigRat> out(static_cast<std::size_t>(order) + 1);
    for (int j = 0; j <= order; ++j) {
        BigRat acc = num[static_cast<std::size_t>(j)];
        for (int i = 1; i <= j; ++i) acc -= den[static_cast<std::size_t>(i)] * out[static_cast<std::size_t>(j - i)];
        out[static_cast<std::size_t>(j)] = acc * inv0;
    }
    return out;
}

/// alpha (alpha - 1) ... (alpha - k + 1) / k!
inline RatFunc binom_falling(const RatFunc& alpha, int k) {
    if (k < 0) throw Error("negative binomial index");
    RatFunc acc(1);
    for (int i = 0; i < k; ++i) acc = acc * (alpha - RatFunc(i));
    return acc * RatFunc(BigRat(1) / BigRat(factorial(static_cast<unsigned>(k))));
}

/// (u+1) u (u-1) ... (u+2-m): the falling factorial of [P^1] = u + 1 of length m.
inline UPoly falling_p1(int m) {
    UPoly acc(1);
    for (int i = 0; i < m; ++i) acc *= UPoly{1 - i, 1};
    return acc;
}

// JSON ---------------------------------------------------------------------

inline nlohmann::json to_json(const UPoly& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : p.coeffs()) arr.push_back(c.get_str());
    return arr;
}

inline UPoly upoly_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw DataError("polynomial must be an array of coefficient strings");
    std::vector<BigRat> cs;
    for (const auto& c : j) {
        if (c.is_string()) {
            cs.push_back(parse_rat(c.get<std::string>()));
        } else if (c.is_number_integer()) {
            cs.emplace_back(c.get<long>());
        } else {
            throw DataError("polynomial coefficient must be a string \"p/q\" or an integer");
        }
    }
    return UPoly(std::move(cs));
}

inline nlohmann::json to_json(const RatFunc& f) {
    return nlohmann::json{{"num", to_json(f.num())}, {"den", to_json(f.den())}};
}

inline RatFunc ratfunc_from_json(const nlohmann::json& j) {
    if (j.is_array()) return RatFunc(upoly_from_json(j));
    if (!j.is_object() || !j.contains("num")) throw DataError("rational function must be {\"num\": [...], \"den\": [...]}");
    UPoly num = upoly_from_json(j.at("num"));
    UPoly den = j.contains("den") ? upoly_from_json(j.at("den")) : UPoly(1);
    if (den.is_zero()) throw DataError("zero denominator in rational function");
    return RatFunc(std::move(num), std::move(den));
}

}  // namespace stablemaps
