#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ellvolterra/classify.hpp"
#include "ellvolterra/core.hpp"
#include "ellvolterra/cubic_matrix.hpp"
#include "ellvolterra/dynamics.hpp"
#include "ellvolterra/errors.hpp"
#include "ellvolterra/extremals.hpp"
#include "ellvolterra/simplex.hpp"

namespace ellvolterra {

// ---------------------------------------------------------------------------
// Vertex cycles

/// Disjoint vertex cycles among coordinates ell..m-1 (0-based). Each cycle
/// lists its vertices in visiting order: e_{c[0]} -> e_{c[1]} -> ... -> e_{c[0]}.
struct CycleSpec {
    std::size_t m = 0;
    std::size_t ell = 0;
    std::vector<std::vector<std::size_t>> cycles;
};

inline void check_cycle_spec(const CycleSpec& spec) {
    if (spec.m < 2) throw SpecError("m must be at least 2");
    if (spec.ell > spec.m) throw SpecError("ell must lie in 0..m");
    std::set<std::size_t> seen;
    for (const auto& c : spec.cycles) {
        if (c.empty()) throw SpecError("empty cycle");
        for (auto i : c) {
            if (i >= spec.m) throw SpecError("cycle index " + std::to_string(i + 1) + " exceeds m");
            if (i < spec.ell)
                throw SpecError("cycle index " + std::to_string(i + 1) +
                                " lies among the Volterra coordinates 1..ell");
            if (!seen.insert(i).second)
                throw SpecError("cycle index " + std::to_string(i + 1) + " used twice");
        }
    }
}

/// A representative operator of class ell on which every listed cycle is a
/// vertex cycle. Diagonal columns (i, i) of cycle vertices send all mass to the
/// successor vertex; every other column spreads its mass uniformly over its
/// admissible rows ({i, j} among the first ell coordinates, plus all later ones).
/// Throws SpecError when this completion does not land in class ell.
inline CubicMatrix cycle_family(const CycleSpec& spec) {
    check_cycle_spec(spec);
    const std::size_t m = spec.m;
    std::map<std::size_t, std::size_t> successor;
    for (const auto& c : spec.cycles)
        for (std::size_t t = 0; t < c.size(); ++t) successor[c[t]] = c[(t + 1) % c.size()];

    CubicArray p(m);
    for (auto [i, j] : column_pairs(m)) {
        std::vector<double> col(m, 0.0);
        if (i == j && successor.contains(i)) {
            col[successor[i]] = 1.0;
        } else {
            const auto rows = admissible_rows(m, spec.ell, i, j);
            for (auto k : rows) col[k] = 1.0 / static_cast<double>(rows.size());
        }
        p.set_column(i, j, col);
    }
    CubicMatrix v = validate(p);
    const auto cls = detect_ell(v);
    if (cls.ell != spec.ell || !cls.strictly_in_class())
        throw SpecError("no operator of class " + std::to_string(spec.ell) +
                        " realizes these cycles with the default completion");
    return v;
}

// ---------------------------------------------------------------------------
// m = 2

/// x' = a x^2 + 2 c x y, y' = b x^2 + 2 d x y + y^2 with b = 1 - a, d = 1 - c.
struct M2Params {
    double a = 0.0;
    double c = 0.0;

    double b() const { return 1.0 - a; }
    double d() const { return 1.0 - c; }
};

inline void check_params(const M2Params& p) {
    if (!(p.a >= 0.0 && p.a < 1.0)) throw ParamRangeError("a must lie in [0, 1); a = 1 is Volterra");
    if (!(p.c >= 0.0 && p.c <= 1.0)) throw ParamRangeError("c must lie in [0, 1]");
}

inline CubicMatrix m2_operator(const M2Params& p) {
    check_params(p);
    CubicArray q(2);
    q.set(0, 0, 0, p.a);
    q.set(0, 0, 1, p.b());
    q.set(0, 1, 0, p.c);
    q.set(0, 1, 1, p.d());
    q.set(1, 1, 1, 1.0);
    return validate(q);
}

/// f(x) = (a - 2c) x^2 + 2 c x: the first coordinate of the image of (x, 1 - x).
inline double m2_reduced_map(const M2Params& p, double x) {
    return (p.a - 2.0 * p.c) * x * x + 2.0 * p.c * x;
}

inline double m2_reduced_derivative(const M2Params& p, double x) {
    return 2.0 * (p.a - 2.0 * p.c) * x + 2.0 * p.c;
}

struct M2Report {
    M2Params params;
    std::vector<std::pair<std::string, FixedPointReport>> fixed_points;
    /// The point every orbit except the repeller converges to.
    SimplexPoint global_attractor{0.0, 1.0};
};

inline M2Report m2_analyze(const M2Params& p) {
    const CubicMatrix v = m2_operator(p);
    M2Report r{p, {}, SimplexPoint{0.0, 1.0}};
    r.fixed_points.emplace_back(
        "lambda0", analyze_fixed_point(v, SimplexPoint{0.0, 1.0}, FixedPointSource::closed_form));
    if (p.c > 0.5) {
        const double den = 2.0 * p.c - p.a;
        const SimplexPoint star{(2.0 * p.c - 1.0) / den, (1.0 - p.a) / den};
        r.fixed_points.emplace_back("lambda*",
                                    analyze_fixed_point(v, star, FixedPointSource::closed_form));
        r.global_attractor = star;
    }
    return r;
}

// ---------------------------------------------------------------------------
// m = 3, symmetric class-2 family

/// a = P_{11,1} = P_{22,2}, b = P_{12,1} = P_{12,2}, c = P_{13,1} = P_{23,2}.
struct M3SymParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

inline void check_params(const M3SymParams& p) {
    if (!(p.a >= 0.0 && p.a < 1.0)) throw ParamRangeError("a must lie in [0, 1); a = 1 is Volterra");
    if (!(p.b >= 0.0 && p.b <= 0.5)) throw ParamRangeError("b must lie in [0, 1/2]");
    if (!(p.c >= 0.0 && p.c <= 1.0)) throw ParamRangeError("c must lie in [0, 1]");
}

/// The eleven free coefficients of a general m = 3 class-2 operator, keyed
/// a1 a2 b1 b2 b3 c1 c2 d1 d2 e1 e2, as fixed by the symmetric parameters.
inline std::map<std::string, double> m3_coefficients(const M3SymParams& p) {
    check_params(p);
    return {{"a1", p.a},           {"a2", 1.0 - p.a}, {"b1", p.b},       {"b2", p.b},
            {"b3", 1.0 - 2.0 * p.b}, {"c1", p.c},      {"c2", 1.0 - p.c}, {"d1", p.a},
            {"d2", 1.0 - p.a},     {"e1", p.c},       {"e2", 1.0 - p.c}};
}

inline CubicMatrix m3_operator(const M3SymParams& p) {
    const auto k = m3_coefficients(p);
    CubicArray q(3);
    q.set(0, 0, 0, k.at("a1"));
    q.set(0, 0, 2, k.at("a2"));
    q.set(0, 1, 0, k.at("b1"));
    q.set(0, 1, 1, k.at("b2"));
    q.set(0, 1, 2, k.at("b3"));
    q.set(0, 2, 0, k.at("c1"));
    q.set(0, 2, 2, k.at("c2"));
    q.set(1, 1, 1, k.at("d1"));
    q.set(1, 1, 2, k.at("d2"));
    q.set(1, 2, 1, k.at("e1"));
    q.set(1, 2, 2, k.at("e2"));
    q.set(2, 2, 2, 1.0);
    return validate(q);
}

/// (x, y) -> (x (2c + (a - 2c) x + 2 (b - c) y), y (2c + 2 (b - c) x + (a - 2c) y)).
inline Eigen::Vector2d m3_reduced_map(const M3SymParams& p, double x, double y) {
    return {x * (2.0 * p.c + (p.a - 2.0 * p.c) * x + 2.0 * (p.b - p.c) * y),
            y * (2.0 * p.c + 2.0 * (p.b - p.c) * x + (p.a - 2.0 * p.c) * y)};
}

/// Closed-form Jacobian of m3_reduced_map.
inline Eigen::Matrix2d m3_jacobian(const M3SymParams& p, double x, double y) {
    const double bc = 2.0 * (p.b - p.c);
    Eigen::Matrix2d j;
    j << 2.0 * p.c + 2.0 * (p.a - 2.0 * p.c) * x + bc * y, bc * x,
        bc * y, 2.0 * p.c + 2.0 * (p.a - 2.0 * p.c) * y + bc * x;
    return j;
}

enum class M3Regime { weak_c, a_above_2b, a_below_2b, a_equals_2b };

inline std::string to_string(M3Regime r) {
    switch (r) {
    case M3Regime::weak_c: return "c<=1/2";
    case M3Regime::a_above_2b: return "c>1/2,a>2b";
    case M3Regime::a_below_2b: return "c>1/2,a<2b";
    case M3Regime::a_equals_2b: return "c>1/2,a=2b";
    }
    return "?";
}

/// `tolerance` widens the a = 2b test; the default 0 compares exactly.
inline M3Regime m3_regime(const M3SymParams& p, double tolerance = 0.0) {
    if (p.c <= 0.5) return M3Regime::weak_c;
    const double gap = p.a - 2.0 * p.b;
    if (std::abs(gap) <= tolerance) return M3Regime::a_equals_2b;
    return gap > 0.0 ? M3Regime::a_above_2b : M3Regime::a_below_2b;
}

/// Level of the fixed line x + y = (2c - 1) / (2 (c - b)) when a = 2b, c > 1/2.
inline double m3_fixed_line_level(const M3SymParams& p) {
    return (2.0 * p.c - 1.0) / (2.0 * (p.c - p.b));
}

/// Limit of orbits on the invariant ray y = nu x (a = 2b, c > 1/2), in reduced coordinates.
inline Eigen::Vector2d m3_ray_limit(const M3SymParams& p, double nu) {
    const double x = m3_fixed_line_level(p) / (1.0 + nu);
    return {x, nu * x};
}

/// The map restricted to the ray y = nu x: phi(x) = x (2c + 2 (b - c)(1 + nu) x).
inline double m3_ray_map(const M3SymParams& p, double nu, double x) {
    return x * (2.0 * p.c + 2.0 * (p.b - p.c) * (1.0 + nu) * x);
}

inline double m3_ray_derivative(const M3SymParams& p, double nu, double x) {
    return 2.0 * p.c + 4.0 * (p.b - p.c) * (1.0 + nu) * x;
}

struct InvariantSet {
    std::string name;
    std::string description;
};

struct M3Report {
    M3SymParams params;
    M3Regime regime = M3Regime::weak_c;
    std::map<std::string, double> coefficients;
    /// Named closed-form fixed points in full simplex coordinates, classified
    /// from the reduced-chart Jacobian.
    std::vector<std::pair<std::string, FixedPointReport>> fixed_points;
    /// Level s of the fixed line x + y = s (a = 2b regime only).
    std::optional<double> fixed_line_level;
    /// phi'(x) at the ray limit, identical for every ray (a = 2b regime only).
    std::optional<double> ray_contraction;
    std::vector<InvariantSet> invariant_sets;
    std::vector<std::string> manifolds;
};

inline const FixedPointReport* find_point(const M3Report& r, const std::string& name) {
    for (const auto& [n, fp] : r.fixed_points)
        if (n == name) return &fp;
    return nullptr;
}

inline M3Report m3_analyze(const M3SymParams& p, double a2b_tolerance = 0.0) {
    const CubicMatrix v = m3_operator(p);
    M3Report r;
    r.params = p;
    r.regime = m3_regime(p, a2b_tolerance);
    r.coefficients = m3_coefficients(p);
    auto add = [&](const std::string& name, double x, double y) {
        const SimplexPoint pt = SimplexPoint::from_reduced(Eigen::Vector2d(x, y));
        r.fixed_points.emplace_back(name, analyze_fixed_point(v, pt, FixedPointSource::closed_form));
    };
    add("lambda0", 0.0, 0.0);

    r.invariant_sets = {{"M0", "x = 0"}, {"M1", "y = 0"}, {"M=", "x = y"}, {"M>", "x > y"},
                        {"M<", "x < y"}};
    switch (r.regime) {
    case M3Regime::weak_c:
        r.manifolds.push_back("lambda0 attracts every orbit");
        break;
    case M3Regime::a_above_2b:
    case M3Regime::a_below_2b: {
        const double edge = (2.0 * p.c - 1.0) / (2.0 * p.c - p.a);
        const double diag = (2.0 * p.c - 1.0) / (4.0 * p.c - p.a - 2.0 * p.b);
        add("lambda1", 0.0, edge);
        add("lambda2", edge, 0.0);
        add("lambda3", diag, diag);
        if (r.regime == M3Regime::a_below_2b) {
            r.manifolds.push_back("M0 is the stable manifold of the saddle lambda1");
            r.manifolds.push_back("M1 is the stable manifold of the saddle lambda2");
        } else {
            r.manifolds.push_back("M= is the stable manifold of the saddle lambda3");
        }
        r.manifolds.push_back(
            "an invariant curve through lambda1, lambda2, lambda3 is the unstable manifold of the "
            "saddles; see unstable_directions");
        break;
    }
    case M3Regime::a_equals_2b: {
        const double level = m3_fixed_line_level(p);
        r.fixed_line_level = level;
        const double xbar = m3_ray_limit(p, 0.0)(0);
        r.ray_contraction = m3_ray_derivative(p, 0.0, xbar);
        r.invariant_sets.push_back({"I_nu", "y = nu x for every nu >= 0; orbits tend to the fixed line"});
        r.manifolds.push_back("orbits on M0 tend to lambda1 = (0, level)");
        break;
    }
    }
    return r;
}

} // namespace ellvolterra
