#pragma once

/**
 * @file eulerchi.hpp
 * @brief The u -> 1 limit: Euler characteristics of the spaces of stable maps.
 *
 * With X(z) = lim_{u->1} (E(W,z)/P_W - 1)/(u - 1), the limit of phi0 solves
 *
 *   (1 + t + phi) log(1 + t + phi) = 2 phi + t - X (1 + t + phi),
 *
 * and chi(W) (-phi^2/4 + phi/2 - t^2/4) generates chi(M_{0,k}(W, beta)) t^k/k! z^beta.
 */

#include "qfield.hpp"
#include "series.hpp"
#include "solver.hpp"
#include "target.hpp"

namespace stablemaps {

/// X(z); every coefficient is a rational number.
inline MultiSeries xseries(const TargetSpace& w, const Degree& dmax) {
    const BigRat chi_w = w.pw().eval(1);
    if (chi_w == 0) throw Error("pole at unity: P_W(1) = 0");
    MultiSeries x(w.grading(), 0, dmax);
    for (const auto& d : degrees_in_box(dmax)) {
        if (total_degree(d) == 0) continue;
        const auto c = expand_at_one(w.map_class(d) / RatFunc(w.pw()), 1);
        if (c[0] != 0) throw Error("pole at unity: [Map_beta]/P_W does not vanish at u = 1");
        x.set(0, d, RatFunc(c[1]));
    }
    return x;
}

/// F(phi) = (1+g) log(1+g) - 2 phi - t + X (1+g), g = t + phi.
inline MultiSeries euler_equation_residual(const MultiSeries& x, const MultiSeries& phi) {
    const Grading& g = phi.grading();
    const MultiSeries t = MultiSeries::t(g, phi.kmax(), phi.dmax());
    const MultiSeries gp = t + phi;
    const MultiSeries one_plus = MultiSeries::constant(g, phi.kmax(), phi.dmax(), RatFunc(1)) + gp;
    return one_plus * series_log1p(gp) - phi * RatFunc(2) - t + x * one_plus;
}

/// Solves F(phi) = 0 one total order at a time. The phi-linear part of F at the
/// origin is -phi, so the order-m part of phi equals the order-m part of F
/// evaluated with that part still zero.
inline MultiSeries solve_phi0_chi(const MultiSeries& x, int kmax) {
    const Degree& dmax = x.dmax();
    MultiSeries xs(x.grading(), kmax, dmax);
    for (const auto& [e, c] : x.terms()) xs.set(0, e.d, c);
    MultiSeries phi(x.grading(), kmax, dmax);
    for (int order = 1; order <= phi.max_total_order(); ++order) {
        const MultiSeries f = euler_equation_residual(xs, phi).homogeneous_part(order);
        phi += f;
    }
    if (!euler_equation_residual(xs, phi).is_zero()) throw Error("internal error: Euler-limit equation not solved");
    return phi;
}

inline MultiSeries solve_phi0_chi(const TargetSpace& w, int kmax, const Degree& dmax) {
    return solve_phi0_chi(xseries(w, dmax), kmax);
}

/// chi(W) (-phi^2/4 + phi/2 - t^2/4), chi(W) = P_W(1).
inline MultiSeries chi_potential(const TargetSpace& w, const MultiSeries& phi0chi) {
    const MultiSeries t = MultiSeries::t(phi0chi.grading(), phi0chi.kmax(), phi0chi.dmax());
    const MultiSeries reduced = phi0chi * phi0chi * RatFunc(make_rat(-1, 4)) + phi0chi * RatFunc(make_rat(1, 2)) -
                                t * t * RatFunc(make_rat(1, 4));
    return reduced * RatFunc(w.pw().eval(1));
}

/// k! coefficients of the chi potential, keyed like a class table.
inline std::map<ClassKey, BigRat> chi_table(const MultiSeries& chi_pot) {
    std::map<ClassKey, BigRat> out;
    for (int k = 0; k <= chi_pot.kmax(); ++k)
        for (const auto& d : degrees_in_box(chi_pot.dmax()))
            out.emplace(ClassKey{k, d},
                        chi_pot.coeff(k, d).constant_value() * BigRat(factorial(static_cast<unsigned>(k))));
    return out;
}

/// Every class-table entry evaluated at u = 1 against the chi table.
inline bool crosscheck_chi(const ClassTable& table, const MultiSeries& chi_pot) {
    const auto chis = chi_table(chi_pot);
    for (const auto& [key, poly] : table.entries) {
        auto it = chis.find(key);
        if (it == chis.end() || poly.eval(1) != it->second) return false;
    }
    return true;
}

inline bool crosscheck_chi(const TargetSpace& w, int kmax, const Degree& dmax) {
    const ClassTable table = compute_classes(w, kmax, dmax);
    return crosscheck_chi(table, chi_potential(w, solve_phi0_chi(w, kmax, dmax)));
}

}  // namespace stablemaps
