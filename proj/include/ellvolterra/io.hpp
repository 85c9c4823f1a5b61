#pragma once

// JSON and CSV formats. All external indices are 1-based.
//
//   operator JSON   {"m": m, "P": P}  with P[i][j][k] = P_{(i+1)(j+1),(k+1)}
//   orbit CSV       step,x1,...,xm
//   report JSON     objects carrying "schema": 1
//
// Floats are written in the shortest form that round-trips (at most 17
// significant digits) and object keys are sorted, so identical inputs give
// byte-identical output.

#include <nlohmann/json.hpp>

#include <charconv>
#include <complex>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "ellvolterra/classify.hpp"
#include "ellvolterra/cubic_matrix.hpp"
#include "ellvolterra/dynamics.hpp"
#include "ellvolterra/errors.hpp"
#include "ellvolterra/extremals.hpp"
#include "ellvolterra/families.hpp"
#include "ellvolterra/simplex.hpp"

namespace ellvolterra::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class FormatError : public Error {
public:
    using Error::Error;
};

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Operators

inline json operator_to_json(const CubicMatrix& v) {
    const std::size_t m = v.m();
    json p = json::array();
    for (std::size_t i = 0; i < m; ++i) {
        json pi = json::array();
        for (std::size_t j = 0; j < m; ++j) {
            json pij = json::array();
            for (std::size_t k = 0; k < m; ++k) pij.push_back(v(i, j, k));
            pi.push_back(std::move(pij));
        }
        p.push_back(std::move(pi));
    }
    return json{{"m", m}, {"P", std::move(p)}};
}

/// Parses an operator object without validating it. An object wrapping the
/// operator under an "operator" key (as family reports do) is also accepted.
inline CubicArray operator_array_from_json(const json& j) {
    const json& o = (j.is_object() && j.contains("operator")) ? j.at("operator") : j;
    if (!o.is_object() || !o.contains("m") || !o.contains("P"))
        throw FormatError("operator JSON needs keys \"m\" and \"P\"");
    if (!o.at("m").is_number_integer()) throw FormatError("\"m\" must be an integer");
    const auto m = o.at("m").get<long long>();
    if (m < 2) throw FormatError("\"m\" must be at least 2");
    const json& p = o.at("P");
    auto check = [&](const json& a, const char* what) {
        if (!a.is_array() || a.size() != static_cast<std::size_t>(m))
            throw FormatError(std::string("\"P\" ") + what + " must be an array of length m");
    };
    check(p, "outer level");
    CubicArray out(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < out.m(); ++i) {
        check(p[i], "second level");
        for (std::size_t jj = 0; jj < out.m(); ++jj) {
            check(p[i][jj], "third level");
            for (std::size_t k = 0; k < out.m(); ++k) {
                if (!p[i][jj][k].is_number()) throw FormatError("\"P\" entries must be numbers");
                out.at(i, jj, k) = p[i][jj][k].get<double>();
            }
        }
    }
    return out;
}

inline CubicMatrix operator_from_json(const json& j) { return validate(operator_array_from_json(j)); }

inline json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(origin + ": " + e.what());
    }
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out << text;
    if (!out) throw FormatError(path + ": write failed");
}

/// Canonical text for a JSON document: 2-space indent, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Reports

inline json point_to_json(const SimplexPoint& x) { return x.to_vector(); }

inline json complex_to_json(const std::complex<double>& z) {
    return json{{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}};
}

inline json indices_to_json(const IndexSet& s) {
    json out = json::array();
    for (auto i : s) out.push_back(i + 1);
    return out;
}

inline json to_json(const EllClassification& c) {
    json w = json::array();
    for (const auto& x : c.witnesses)
        w.push_back(json{{"k", x.k + 1}, {"pair", {x.i + 1, x.j + 1}}});
    return json{{"schema", kSchemaVersion},
                {"m", c.m},
                {"ell", c.ell},
                {"is_volterra", c.is_volterra},
                {"volterra_coords", indices_to_json(c.volterra_coords)},
                {"witnesses", std::move(w)},
                {"non_prefix_volterra_coords", indices_to_json(c.non_prefix_volterra_coords)},
                {"strictly_in_class", c.strictly_in_class()}};
}

inline json to_json(const InvarianceCheck& c) {
    json out{{"holds", c.holds},
             {"within_hypothesis", c.within_hypothesis},
             {"points_checked", c.points_checked}};
    if (c.counterexample) out["counterexample"] = point_to_json(*c.counterexample);
    if (c.image) out["image"] = point_to_json(*c.image);
    return out;
}

inline json to_json(const FixedPointReport& r) {
    json eig = json::array();
    for (const auto& z : r.eigenvalues) eig.push_back(complex_to_json(z));
    json out{{"location", point_to_json(r.location)},
             {"residual", r.residual},
             {"eigenvalues", std::move(eig)},
             {"type", to_string(r.type)},
             {"source", to_string(r.source)}};
    if (!r.unstable_directions.empty()) {
        json dirs = json::array();
        for (const auto& d : r.unstable_directions)
            dirs.push_back(std::vector<double>(d.data(), d.data() + d.size()));
        out["unstable_directions"] = std::move(dirs);
    }
    return out;
}

inline json to_json(const FixedPointSearch& s) {
    json pts = json::array();
    for (const auto& p : s.points) pts.push_back(to_json(p));
    json cont = json::array();
    for (const auto& c : s.continua) {
        json basis = json::array();
        for (Eigen::Index d = 0; d < c.basis.cols(); ++d) {
            const Eigen::VectorXd col = c.basis.col(d);
            basis.push_back(std::vector<double>(col.data(), col.data() + col.size()));
        }
        cont.push_back(json{{"kind", c.dimension == 1 ? "fixed-line" : "fixed-continuum"},
                            {"dimension", c.dimension},
                            {"anchor", std::vector<double>(c.anchor.data(), c.anchor.data() + c.anchor.size())},
                            {"basis", std::move(basis)},
                            {"root_count", c.roots.size()}});
    }
    return json{{"schema", kSchemaVersion},
                {"fixed_points", std::move(pts)},
                {"continua", std::move(cont)},
                {"starts", s.starts},
                {"discarded_starts", s.discarded_starts}};
}

inline json to_json(const CycleReport& c) {
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back(point_to_json(p));
    return json{{"period", c.period}, {"points", std::move(pts)}, {"closure_residual", c.closure_residual}};
}

inline json to_json(const OmegaLimit& w) {
    json reps = json::array();
    for (const auto& p : w.representatives) reps.push_back(point_to_json(p));
    return json{{"kind", to_string(w.kind)}, {"period", w.period}, {"representatives", std::move(reps)}};
}

inline json named_points_to_json(const std::vector<std::pair<std::string, FixedPointReport>>& pts) {
    json out = json::array();
    for (const auto& [name, r] : pts) {
        json j = to_json(r);
        j["name"] = name;
        out.push_back(std::move(j));
    }
    return out;
}

inline json to_json(const M2Report& r) {
    return json{{"schema", kSchemaVersion},
                {"family", "m2"},
                {"params", {{"a", r.params.a}, {"b", r.params.b()}, {"c", r.params.c}, {"d", r.params.d()}}},
                {"fixed_points", named_points_to_json(r.fixed_points)},
                {"global_attractor", point_to_json(r.global_attractor)}};
}

inline json to_json(const M3Report& r) {
    json sets = json::array();
    for (const auto& s : r.invariant_sets) sets.push_back(json{{"name", s.name}, {"description", s.description}});
    json out{{"schema", kSchemaVersion},
             {"family", "m3"},
             {"params", {{"a", r.params.a}, {"b", r.params.b}, {"c", r.params.c}}},
             {"regime", to_string(r.regime)},
             {"coefficients", r.coefficients},
             {"fixed_points", named_points_to_json(r.fixed_points)},
             {"invariant_sets", std::move(sets)},
             {"manifolds", r.manifolds}};
    if (r.fixed_line_level) out["fixed_line"] = json{{"x_plus_y", *r.fixed_line_level}};
    if (r.ray_contraction) out["ray_contraction"] = *r.ray_contraction;
    return out;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_orbit_csv(std::ostream& os, const Orbit& o) {
    const std::size_t m = o.initial().dim();
    os << "step";
    for (std::size_t i = 1; i <= m; ++i) os << ",x" << i;
    os << '\n';
    for (std::size_t t = 0; t < o.points.size(); ++t) {
        os << t;
        for (std::size_t i = 0; i < m; ++i) os << ',' << format_double(o.points[t][i]);
        os << '\n';
    }
}

/// Parses "0.1,0.3,0.6" into a simplex point.
inline SimplexPoint parse_point(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        double d = 0.0;
        const char* b = tok.data();
        const char* e = tok.data() + tok.size();
        while (b < e && *b == ' ') ++b;
        const auto res = std::from_chars(b, e, d);
        if (res.ec != std::errc() || res.ptr != e) throw FormatError("bad coordinate '" + tok + "'");
        v.push_back(d);
    }
    if (v.empty()) throw FormatError("empty point");
    return SimplexPoint(std::span<const double>(v));
}

} // namespace ellvolterra::io
