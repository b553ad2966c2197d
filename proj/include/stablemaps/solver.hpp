#pragma once

/**
 * @file solver.hpp
 * @brief Closed-form route: the critical point phi0 and the potential Phi_W.
 *
 * phi0 is the unique series without constant term solving
 *
 *   E(W,z) / (u (u-1) P_W) (1 + t + phi)^u = u/(u-1) phi + t/(u-1) + 1/(u(u-1)),
 *
 * and Phi_W = P_W (-u/(2(u+1)) phi0^2 + phi0/(u+1) - t^2/(2(u+1))).
 */

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qfield.hpp"
#include "series.hpp"
#include "target.hpp"

namespace stablemaps {

namespace detail {

inline RatFunc rf(const UPoly& num, const UPoly& den) { return RatFunc(num, den); }
inline RatFunc u_minus_1() { return RatFunc(UPoly{-1, 1}); }
inline RatFunc u_plus_1() { return RatFunc(UPoly{1, 1}); }

/// E(W,z) / (u (u-1) P_W), as a series in the given box.
inline MultiSeries scaled_eisenstein(const TargetSpace& w, int kmax, const Degree& dmax) {
    MultiSeries e = eisenstein_series(w, dmax);
    MultiSeries out(w.grading(), kmax, dmax);
    const RatFunc scale = RatFunc(1) / RatFunc(w.pw() * UPoly{0, -1, 1});
    for (const auto& [ex, c] : e.terms()) out.set(0, ex.d, c * scale);
    return out;
}

/// The right side G of phi = G(phi), whose phi-linear part vanishes at the origin:
///   G(phi) = A (1 + t + phi)^u - (phi + t)/(u - 1) - 1/(u (u - 1)).
inline MultiSeries phi0_map(const MultiSeries& a, const MultiSeries& phi) {
    const Grading& g = phi.grading();
    const MultiSeries t = MultiSeries::t(g, phi.kmax(), phi.dmax());
    const RatFunc inv_um1 = RatFunc(1) / u_minus_1();
    MultiSeries out = a * series_pow_binomial(t + phi, RatFunc::u());
    out -= (phi + t) * inv_um1;
    out -= MultiSeries::constant(g, phi.kmax(), phi.dmax(), inv_um1 / RatFunc::u());
    return out;
}

}  // namespace detail

/// Residual LHS - RHS of the functional equation for phi0.
inline MultiSeries functional_equation_residual(const TargetSpace& w, const MultiSeries& phi) {
    const MultiSeries a = detail::scaled_eisenstein(w, phi.kmax(), phi.dmax());
    const Grading& g = phi.grading();
    const MultiSeries t = MultiSeries::t(g, phi.kmax(), phi.dmax());
    const RatFunc inv_um1 = RatFunc(1) / detail::u_minus_1();
    MultiSeries lhs = a * series_pow_binomial(t + phi, RatFunc::u());
    MultiSeries rhs = phi * (RatFunc::u() * inv_um1) + t * inv_um1 +
                      MultiSeries::constant(g, phi.kmax(), phi.dmax(), inv_um1 / RatFunc::u());
    return lhs - rhs;
}

/// Fixed-point iteration from `start` (zero by default). Each pass fixes one
/// more total order in (t, z); the final pass must leave phi unchanged.
inline MultiSeries solve_phi0(const TargetSpace& w, int kmax, const Degree& dmax,
                              const std::optional<MultiSeries>& start = std::nullopt) {
    if (kmax < 0) throw Error("kmax must be >= 0");
    if (dmax.size() != w.rank()) throw DataError("dmax length does not match target rank");
    const MultiSeries a = detail::scaled_eisenstein(w, kmax, dmax);
    MultiSeries phi = start ? start->truncated(kmax, dmax) : MultiSeries(w.grading(), kmax, dmax);
    require_nilpotent(phi, "starting series must have zero constant term");
    const int passes = kmax + total_degree(dmax) + 2;
    for (int i = 0; i < passes; ++i) phi = detail::phi0_map(a, phi);
    if (!(detail::phi0_map(a, phi) == phi)) throw Error("internal error: phi0 iteration is not stationary");
    return phi;
}

/// Phi_W = P_W (-u/(2(u+1)) phi0^2 + phi0/(u+1) - t^2/(2(u+1))).
inline MultiSeries reduced_potential(const MultiSeries& phi0) {
    const Grading& g = phi0.grading();
    const RatFunc inv_up1 = RatFunc(1) / detail::u_plus_1();
    const MultiSeries t = MultiSeries::t(g, phi0.kmax(), phi0.dmax());
    return phi0 * phi0 * (-RatFunc::u() * inv_up1 * RatFunc(make_rat(1, 2))) + phi0 * inv_up1 -
           t * t * (inv_up1 * RatFunc(make_rat(1, 2)));
}

inline MultiSeries potential(const TargetSpace& w, const MultiSeries& phi0) {
    return reduced_potential(phi0) * RatFunc(w.pw());
}

// ---------------------------------------------------------------------------
// Class tables

struct ClassKey {
    int k = 0;
    Degree beta;
    friend auto operator<=>(const ClassKey&, const ClassKey&) = default;
    friend bool operator==(const ClassKey&, const ClassKey&) = default;
};

struct ClassTable {
    std::string target;
    int kmax = 0;
    Degree dmax;
    std::map<ClassKey, UPoly> entries;

    const UPoly& at(int k, const Degree& beta) const {
        auto it = entries.find(ClassKey{k, beta});
        if (it == entries.end()) throw Error("beyond truncation");
        return it->second;
    }
};

/// Raised when k! coeff(Phi) fails to be a polynomial in u.
struct NonPolynomialClass : Error {
    NonPolynomialClass(int k, Degree beta, RatFunc value)
        : Error(describe(k, beta, value)), k(k), beta(std::move(beta)), value(std::move(value)) {}
    int k;
    Degree beta;
    RatFunc value;

private:
    static std::string describe(int k, const Degree& beta, const RatFunc& value) {
        std::ostringstream os;
        os << "class at k=" << k << ", beta=(";
        for (std::size_t i = 0; i < beta.size(); ++i) os << (i ? "," : "") << beta[i];
        os << ") is not a polynomial in u: " << value;
        return os.str();
    }
};

inline ClassTable extract_classes(const MultiSeries& pot, const std::string& target_name = "") {
    ClassTable table{target_name, pot.kmax(), pot.dmax(), {}};
    for (int k = 0; k <= pot.kmax(); ++k) {
        const RatFunc kfact(BigRat(factorial(static_cast<unsigned>(k))));
        for (const auto& d : degrees_in_box(pot.dmax())) {
            RatFunc v = pot.coeff(k, d) * kfact;
            if (!v.is_polynomial()) throw NonPolynomialClass(k, d, v);
            table.entries.emplace(ClassKey{k, d}, v.num());
        }
    }
    return table;
}

/// solve_phi0 -> potential -> extract_classes.
inline ClassTable compute_classes(const TargetSpace& w, int kmax, const Degree& dmax) {
    return extract_classes(potential(w, solve_phi0(w, kmax, dmax)), w.name());
}

// ---------------------------------------------------------------------------
// Verification of identities satisfied by phi0 and Phi_W

struct OdeResidual {
    MultiSeries phi_form;  ///< (1 - u phi) phi_t - (u+1) phi - t
    MultiSeries psi_form;  ///< (1 + u t - u psi) psi_t - 1 - psi, psi = phi + t
    bool ok() const { return phi_form.is_zero() && psi_form.is_zero(); }
};

inline OdeResidual verify_ode(const MultiSeries& phi0) {
    const Grading& g = phi0.grading();
    const int k1 = phi0.kmax() - 1;
    const MultiSeries one = MultiSeries::constant(g, k1, phi0.dmax(), RatFunc(1));
    const MultiSeries t = MultiSeries::t(g, k1, phi0.dmax());
    const MultiSeries phi = phi0.truncated(k1, phi0.dmax());
    const MultiSeries phi_t = series_dt(phi0);
    const RatFunc u = RatFunc::u();

    MultiSeries r1 = (one - phi * u) * phi_t - phi * (u + RatFunc(1)) - t;

    const MultiSeries psi_full = phi0 + MultiSeries::t(g, phi0.kmax(), phi0.dmax());
    const MultiSeries psi = psi_full.truncated(k1, phi0.dmax());
    const MultiSeries psi_t = series_dt(psi_full);
    MultiSeries r2 = (one + t * u - psi * u) * psi_t - one - psi;
    return {std::move(r1), std::move(r2)};
}

/// d/dt (Phi_W / P_W) == phi0 within truncation.
inline bool verify_dt(const MultiSeries& pot, const MultiSeries& phi0, const TargetSpace& w) {
    if (pot.kmax() < 1) return false;
    MultiSeries lhs = series_dt(pot) * (RatFunc(1) / RatFunc(w.pw()));
    const int k1 = std::min(lhs.kmax(), phi0.kmax());
    const Degree box = MultiSeries::min_box(lhs.dmax(), phi0.dmax());
    return lhs.truncated(k1, box) == phi0.truncated(k1, box);
}

/// Coefficients of phi^n, n = 0..nmax, of the formal potential
/// S(phi) = -phi^2/2 + sum_n C_n phi^n / n!, built term by term from
///   C_n = E/([PGL2][W]) sum_k t^k/k! (u+1)_{n+k} - eps_n,
///   eps_n = sum_{k=0}^{2-n} N(W,0) t^k/k! (u+1)_{n+k}  (n <= 2), eps_n = 0 otherwise.
inline std::vector<MultiSeries> potential_coefficients_termwise(const TargetSpace& w, int nmax, int kmax,
                                                                const Degree& dmax) {
    const Grading& g = w.grading();
    const MultiSeries e = eisenstein_series(w, dmax);
    const RatFunc pref = RatFunc(1) / RatFunc(pgl2_class() * w.pw());
    const RatFunc n0 = nclass(w, Degree(w.rank(), 0));
    std::vector<MultiSeries> out;
    for (int n = 0; n <= nmax; ++n) {
        MultiSeries tsum(g, kmax, dmax);
        MultiSeries eps(g, kmax, dmax);
        for (int k = 0; k <= kmax; ++k) {
            const RatFunc term =
                RatFunc(falling_p1(n + k)) * RatFunc(BigRat(1) / BigRat(factorial(static_cast<unsigned>(k))));
            tsum.set(k, Degree(g.rank(), 0), term);
            if (k <= 2 - n) eps.set(k, Degree(g.rank(), 0), term * n0);
        }
        MultiSeries en(g, kmax, dmax);
        for (const auto& [ex, c] : e.terms()) en.set(0, ex.d, c * pref);
        MultiSeries c_n = en * tsum - eps;
        c_n *= RatFunc(BigRat(1) / BigRat(factorial(static_cast<unsigned>(n))));
        if (n == 2) c_n -= MultiSeries::constant(g, kmax, dmax, RatFunc(make_rat(1, 2)));
        out.push_back(std::move(c_n));
    }
    return out;
}

/// The same coefficients from the closed form
///   S = E/([PGL2][W]) (1+t+phi)^{u+1} - u/(2(u-1)) phi^2 - phi (1/(u(u-1)) + t/(u-1))
///       - (1/((u+1)u(u-1)) + t/(u(u-1)) + t^2/(2(u-1))),
/// expanding (1+t+phi)^{u+1} = sum_n C(u+1, n) phi^n (1+t)^{u+1-n}.
inline std::vector<MultiSeries> potential_coefficients_closed(const TargetSpace& w, int nmax, int kmax,
                                                              const Degree& dmax) {
    const Grading& g = w.grading();
    const MultiSeries e = eisenstein_series(w, dmax);
    const RatFunc pref = RatFunc(1) / RatFunc(pgl2_class() * w.pw());
    MultiSeries en(g, kmax, dmax);
    for (const auto& [ex, c] : e.terms()) en.set(0, ex.d, c * pref);
    const MultiSeries t = MultiSeries::t(g, kmax, dmax);
    const RatFunc u = RatFunc::u();
    const RatFunc um1 = detail::u_minus_1();
    const RatFunc up1 = detail::u_plus_1();
    const RatFunc half(make_rat(1, 2));
    std::vector<MultiSeries> out;
    for (int n = 0; n <= nmax; ++n) {
        MultiSeries c = en * series_pow_binomial(t, up1 - RatFunc(n)) * binom_falling(up1, n);
        if (n == 0) {
            c -= MultiSeries::constant(g, kmax, dmax, RatFunc(1) / (up1 * u * um1));
            c -= t * (RatFunc(1) / (u * um1));
            c -= t * t * (half / um1);
        } else if (n == 1) {
            c -= MultiSeries::constant(g, kmax, dmax, RatFunc(1) / (u * um1));
            c -= t * (RatFunc(1) / um1);
        } else if (n == 2) {
            c -= MultiSeries::constant(g, kmax, dmax, u * half / um1);
        }
        out.push_back(std::move(c));
    }
    return out;
}

inline bool verify_potential_expansion(const TargetSpace& w, int nmax, int kmax, const Degree& dmax) {
    if (nmax < 2) throw Error("nmax must be >= 2");
    return potential_coefficients_termwise(w, nmax, kmax, dmax) == potential_coefficients_closed(w, nmax, kmax, dmax);
}

// ---------------------------------------------------------------------------
// Numeric check of the implicit general solution
//   C x = (w+1)^{1/(u-1)} (w+u)^{u/(1-u)},  x = t + (u+1)/u,  y = u phi0 - 1,  w = y/x.

/// Evaluates the series at numeric (t, z), with u fixed, every z_i set to z_val.
inline double evaluate_numeric(const MultiSeries& s, const BigRat& u_val, double t_val, double z_val) {
    double acc = 0;
    for (const auto& [e, c] : s.terms()) {
        const double coef = eval_at(c, u_val).get_d();
        acc += coef * std::pow(t_val, e.k) * std::pow(z_val, total_degree(e.d));
    }
    return acc;
}

/// Max relative spread of C over the t samples for a given phi0.
inline double implicit_constant_spread(const MultiSeries& phi0, const BigRat& u_val, double z_val,
                                       std::span<const double> t_samples) {
    if (u_val == 0 || u_val == 1 || u_val == -1) throw Error("u must avoid 0 and +-1");
    if (t_samples.empty()) throw Error("need at least one t sample");
    const double u = u_val.get_d();
    std::vector<double> cs;
    for (double t : t_samples) {
        const double phi = evaluate_numeric(phi0, u_val, t, z_val);
        const double x = t + (u + 1) / u;
        const double y = u * phi - 1;
        const double wv = y / x;
        if (wv + 1 <= 0 || wv + u <= 0) throw Error("branch");
        const double c = std::pow(wv + 1, 1 / (u - 1)) * std::pow(wv + u, u / (1 - u)) / x;
        if (!std::isfinite(c)) throw Error("overflow");
        cs.push_back(c);
    }
    const auto [lo, hi] = std::minmax_element(cs.begin(), cs.end());
    const double scale = std::max(std::abs(*lo), std::abs(*hi));
    return scale == 0 ? 0.0 : (*hi - *lo) / scale;
}

inline double verify_implicit_numeric(const TargetSpace& w, const BigRat& u_val, double z_val,
                                      std::span<const double> t_samples, int kmax, const Degree& dmax) {
    return implicit_constant_spread(solve_phi0(w, kmax, dmax), u_val, z_val, t_samples);
}

// ---------------------------------------------------------------------------
// Structural checks on class tables

/// u^D P(1/u) == P(u).
inline bool is_palindromic(const UPoly& p, int dim) {
    if (p.is_zero()) return true;
    if (p.degree() > dim) return false;
    for (int i = 0; i <= dim; ++i)
        if (p[static_cast<std::size_t>(i)] != p[static_cast<std::size_t>(dim - i)]) return false;
    return true;
}

/// Expected dimension (n+1)|d| + n + k - 3 of the space of stable maps to P^n.
inline int expected_dimension_pn(int n, int k, const Degree& beta) { return (n + 1) * total_degree(beta) + n + k - 3; }

inline bool is_unstable(int k, const Degree& beta) { return total_degree(beta) == 0 && k <= 2; }

}  // namespace stablemaps
