#pragma once

// Serialization of class tables. Exact numbers are written as "p/q" strings.

#include <sstream>
#include <string>

#include "qfield.hpp"
#include "solver.hpp"

namespace stablemaps {

/// The same class as a polynomial in q (u = q^2).
inline UPoly to_q_polynomial(const UPoly& p) {
    std::vector<BigRat> out(p.is_zero() ? 0 : 2 * p.coeffs().size() - 1);
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) out[2 * i] = p.coeffs()[i];
    return UPoly(std::move(out));
}

inline nlohmann::json to_json(const ClassTable& table) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [key, poly] : table.entries) {
        entries.push_back({{"k", key.k},
                           {"beta", key.beta},
                           {"u", to_json(poly)},
                           {"q", to_json(to_q_polynomial(poly))},
                           {"chi", poly.eval(1).get_str()}});
    }
    return {{"target", table.target}, {"kmax", table.kmax}, {"dmax", table.dmax}, {"entries", entries}};
}

inline ClassTable class_table_from_json(const nlohmann::json& j) {
    try {
        ClassTable t;
        t.target = j.at("target").get<std::string>();
        t.kmax = j.at("kmax").get<int>();
        t.dmax = j.at("dmax").get<Degree>();
        for (const auto& e : j.at("entries"))
            t.entries.emplace(ClassKey{e.at("k").get<int>(), e.at("beta").get<Degree>()}, upoly_from_json(e.at("u")));
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed class table: ") + e.what());
    }
}

namespace detail {
inline std::string quoted_list(const UPoly& p) {
    std::string s = "\"[";
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) s += (i ? "," : "") + p.coeffs()[i].get_str();
    return s + "]\"";
}
}  // namespace detail

/// One row per (k, beta); polynomials as quoted coefficient lists, lowest degree first.
inline std::string to_csv(const ClassTable& table) {
    std::ostringstream os;
    os << "k,beta,class_u,class_q,chi\n";
    for (const auto& [key, poly] : table.entries) {
        os << key.k << ",\"[";
        for (std::size_t i = 0; i < key.beta.size(); ++i) os << (i ? "," : "") << key.beta[i];
        os << "]\"," << detail::quoted_list(poly) << "," << detail::quoted_list(to_q_polynomial(poly)) << ","
           << poly.eval(1).get_str() << "\n";
    }
    return os.str();
}

}  // namespace stablemaps
