#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ellvolterra/core.hpp"
#include "ellvolterra/cubic_matrix.hpp"
#include "ellvolterra/errors.hpp"
#include "ellvolterra/simplex.hpp"

namespace ellvolterra {

// ---------------------------------------------------------------------------
// Orbits

struct Orbit {
    std::vector<SimplexPoint> points;  // x^(0), ..., x^(n)

    const SimplexPoint& initial() const { return points.front(); }
    const SimplexPoint& last() const { return points.back(); }
    std::size_t length() const { return points.size() - 1; }
};

inline Orbit orbit(const CubicMatrix& v, const SimplexPoint& x0, std::size_t n) {
    if (x0.dim() != v.m()) throw DimensionMismatch(v.m(), x0.dim());
    Orbit o;
    o.points.reserve(n + 1);
    o.points.push_back(x0);
    for (std::size_t t = 0; t < n; ++t) o.points.push_back(apply(v, o.points.back()));
    return o;
}

/// V^n(x0) without storing the intermediate points.
inline SimplexPoint iterate(const CubicMatrix& v, SimplexPoint x, std::size_t n) {
    for (std::size_t t = 0; t < n; ++t) x = apply(v, x);
    return x;
}

/// Number of steps until the orbit is within `tol` (sup-norm) of `target`, if
/// that happens within `max_iter` steps.
inline std::optional<std::size_t> steps_to_converge(const CubicMatrix& v, SimplexPoint x,
                                                    const SimplexPoint& target,
                                                    std::size_t max_iter, double tol) {
    for (std::size_t t = 0; t <= max_iter; ++t) {
        if (x.distance(target) <= tol) return t;
        if (t < max_iter) x = apply(v, x);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Jacobians

/// `full`: the m x m derivative of the quadratic form on R^m.
/// `reduced`: the (m-1) x (m-1) derivative of (x_1..x_{m-1}) -> (x'_1..x'_{m-1})
/// after substituting x_m = 1 - sum_{i<m} x_i.
enum class Chart { full, reduced };

/// J(k, i) = d x'_k / d x_i = 2 sum_j P_{ij,k} x_j.
inline Eigen::MatrixXd full_jacobian(const CubicMatrix& v, const Eigen::VectorXd& x) {
    const std::size_t m = v.m();
    if (static_cast<std::size_t>(x.size()) != m) throw DimensionMismatch(m, x.size());
    const auto n = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t l = 0; l < m; ++l) s += v(i, l, k) * x(l);
            j(k, i) = 2.0 * s;
        }
    return j;
}

inline Eigen::VectorXd lift_reduced(const Eigen::VectorXd& u) {
    Eigen::VectorXd x(u.size() + 1);
    x.head(u.size()) = u;
    x(u.size()) = 1.0 - u.sum();
    return x;
}

/// The map in reduced coordinates, defined on all of R^{m-1}.
inline Eigen::VectorXd reduced_map(const CubicMatrix& v, const Eigen::VectorXd& u) {
    if (static_cast<std::size_t>(u.size()) + 1 != v.m()) throw DimensionMismatch(v.m() - 1, u.size());
    return quadratic_map(v, lift_reduced(u)).head(u.size());
}

inline Eigen::MatrixXd reduced_jacobian(const CubicMatrix& v, const Eigen::VectorXd& u) {
    if (static_cast<std::size_t>(u.size()) + 1 != v.m()) throw DimensionMismatch(v.m() - 1, u.size());
    const Eigen::MatrixXd j = full_jacobian(v, lift_reduced(u));
    const Eigen::Index r = u.size();
    // chain rule through x_m = 1 - sum u
    return j.topLeftCorner(r, r) - j.col(r).head(r).replicate(1, r);
}

inline Eigen::MatrixXd jacobian(const CubicMatrix& v, const SimplexPoint& x, Chart chart) {
    if (x.dim() != v.m()) throw DimensionMismatch(v.m(), x.dim());
    return chart == Chart::full ? full_jacobian(v, x.coords()) : reduced_jacobian(v, x.reduced());
}

// ---------------------------------------------------------------------------
// Fixed points

enum class FixedPointType { attracting, repelling, saddle, non_hyperbolic };
enum class FixedPointSource { vertex_test, newton, closed_form };

inline std::string to_string(FixedPointType t) {
    switch (t) {
    case FixedPointType::attracting: return "attracting";
    case FixedPointType::repelling: return "repelling";
    case FixedPointType::saddle: return "saddle";
    case FixedPointType::non_hyperbolic: return "non-hyperbolic";
    }
    return "?";
}

inline std::string to_string(FixedPointSource s) {
    switch (s) {
    case FixedPointSource::vertex_test: return "vertex-test";
    case FixedPointSource::newton: return "newton";
    case FixedPointSource::closed_form: return "closed-form";
    }
    return "?";
}

/// Eigenvalues within this distance of the unit circle are never called hyperbolic.
inline constexpr double kHyperbolicMargin = 1e-9;

inline FixedPointType classify_eigenvalues(const std::vector<std::complex<double>>& eigs,
                                           double margin = kHyperbolicMargin) {
    bool all_in = true;
    bool all_out = true;
    for (const auto& mu : eigs) {
        const double r = std::abs(mu);
        if (r >= 1.0 - margin && r <= 1.0 + margin) return FixedPointType::non_hyperbolic;
        if (r >= 1.0) all_in = false;
        if (r <= 1.0) all_out = false;
    }
    if (all_in) return FixedPointType::attracting;
    if (all_out) return FixedPointType::repelling;
    return FixedPointType::saddle;
}

/// Eigenvalues sorted by modulus, ties broken by real then imaginary part.
inline std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& j) {
    std::vector<std::complex<double>> out;
    if (j.size() == 0) return out;
    Eigen::EigenSolver<Eigen::MatrixXd> es(j, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

struct FixedPointReport {
    SimplexPoint location;
    double residual = 0.0;  // sup-norm of V(x) - x
    std::vector<std::complex<double>> eigenvalues;  // reduced-chart Jacobian
    FixedPointType type = FixedPointType::non_hyperbolic;
    FixedPointSource source = FixedPointSource::newton;
    /// Real eigenvectors (reduced chart, unit length) for eigenvalues outside the unit circle at saddles.
    std::vector<Eigen::VectorXd> unstable_directions;
};

/// Residual, reduced-chart spectrum and hyperbolic type of a candidate fixed point.
inline FixedPointReport analyze_fixed_point(const CubicMatrix& v, const SimplexPoint& x,
                                            FixedPointSource source) {
    FixedPointReport r{x, apply(v, x).distance(x), {}, FixedPointType::non_hyperbolic, source, {}};
    const Eigen::MatrixXd j = jacobian(v, x, Chart::reduced);
    r.eigenvalues = eigenvalues(j);
    r.type = classify_eigenvalues(r.eigenvalues);
    if (r.type == FixedPointType::saddle) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(j, true);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const auto mu = es.eigenvalues()(i);
            if (std::abs(mu) > 1.0 + kHyperbolicMargin && mu.imag() == 0.0) {
                Eigen::VectorXd d = es.eigenvectors().col(i).real();
                r.unstable_directions.push_back(d.normalized());
            }
        }
    }
    return r;
}

/// An affine set of fixed points found as many Newton roots (a "fixed line" when dimension is 1).
struct FixedContinuum {
    std::size_t dimension = 0;
    Eigen::VectorXd anchor;  // centroid of the roots, full coordinates
    Eigen::MatrixXd basis;   // m x dimension, orthonormal columns
    std::vector<SimplexPoint> roots;
};

struct FixedPointSearch {
    std::vector<FixedPointReport> points;
    std::vector<FixedContinuum> continua;
    std::size_t starts = 0;
    std::size_t discarded_starts = 0;
};

struct FixedPointOptions {
    std::size_t grid_density = 20;
    std::size_t max_newton_steps = 100;
    double newton_tolerance = 1e-13;
    double max_residual = 1e-10;
    double dedup_radius = 1e-8;
    double simplex_slack = 1e-10;
    std::size_t continuum_min_roots = 10;
    double continuum_tolerance = 1e-7;
};

namespace detail {

/// Every integer vector of length `dims` with nonnegative entries summing to at most `n`.
inline void barycentric_grid(std::size_t dims, std::size_t n,
                             const std::function<void(const std::vector<std::size_t>&)>& visit) {
    std::vector<std::size_t> idx(dims, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t d, std::size_t left) {
        if (d == dims) {
            visit(idx);
            return;
        }
        for (std::size_t i = 0; i <= left; ++i) {
            idx[d] = i;
            rec(d + 1, left - i);
        }
    };
    rec(0, n);
}

/// Damped Newton on u -> F(u) - u in the reduced chart.
inline std::optional<Eigen::VectorXd> newton_fixed_point(const CubicMatrix& v, Eigen::VectorXd u,
                                                         const FixedPointOptions& opt) {
    const Eigen::Index r = u.size();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(r, r);
    Eigen::VectorXd g = reduced_map(v, u) - u;
    double norm = g.lpNorm<Eigen::Infinity>();
    for (std::size_t step = 0; step < opt.max_newton_steps; ++step) {
        if (norm <= opt.newton_tolerance) return u;
        const Eigen::MatrixXd jg = reduced_jacobian(v, u) - id;
        const Eigen::VectorXd delta = jg.completeOrthogonalDecomposition().solve(-g);
        if (!delta.allFinite()) return std::nullopt;
        double t = 1.0;
        bool improved = false;
        while (t > 1e-10) {
            const Eigen::VectorXd trial = u + t * delta;
            const Eigen::VectorXd gt = reduced_map(v, trial) - trial;
            const double nt = gt.lpNorm<Eigen::Infinity>();
            if (nt < norm) {
                u = trial;
                g = gt;
                norm = nt;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if (!improved) break;
        if (u.lpNorm<Eigen::Infinity>() > 1e3) return std::nullopt;
    }
    if (norm <= opt.max_residual) return u;
    return std::nullopt;
}

/// Lifts a reduced root to the simplex if it lies within `slack` of it.
inline std::optional<SimplexPoint> to_simplex(const Eigen::VectorXd& u, double slack) {
    Eigen::VectorXd x = lift_reduced(u);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) < -slack) return std::nullopt;
        if (x(i) < 0.0) x(i) = 0.0;
    }
    return SimplexPoint(x / x.sum());
}

/// Fits an affine subspace of dimension < m - 1 through `pts`. Returns the
/// dimension and basis when every point lies within `tol` of it.
inline std::optional<FixedContinuum> fit_affine(const std::vector<SimplexPoint>& pts, double tol) {
    const std::size_t n = pts.size();
    const auto m = static_cast<Eigen::Index>(pts.front().dim());
    Eigen::MatrixXd data(static_cast<Eigen::Index>(n), m);
    for (std::size_t i = 0; i < n; ++i) data.row(static_cast<Eigen::Index>(i)) = pts[i].coords().transpose();
    const Eigen::VectorXd centroid = data.colwise().mean().transpose();
    const Eigen::MatrixXd centered = data.rowwise() - centroid.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    // points on the simplex span at most m - 1 directions
    for (Eigen::Index d = 1; d < m; ++d) {
        const Eigen::MatrixXd basis = svd.matrixV().leftCols(d);
        const Eigen::MatrixXd resid = centered - (centered * basis) * basis.transpose();
        if (resid.rowwise().lpNorm<Eigen::Infinity>().maxCoeff() <= tol)
            return FixedContinuum{static_cast<std::size_t>(d), centroid, basis, pts};
    }
    return std::nullopt;
}

} // namespace detail

/// Vertex fixed points (e_i with P_{ii,i} = 1) plus damped-Newton roots from
/// a barycentric grid of starts in the reduced chart. Roots closer than the
/// dedup radius are merged. Non-hyperbolic roots that together fill an affine
/// set of at least `continuum_min_roots` points are reported as a continuum
/// instead of as isolated points.
inline FixedPointSearch find_fixed_points(const CubicMatrix& v, const FixedPointOptions& opt = {}) {
    const std::size_t m = v.m();
    FixedPointSearch out;
    auto known = [&](const SimplexPoint& x) {
        return std::any_of(out.points.begin(), out.points.end(), [&](const FixedPointReport& r) {
            return r.location.distance(x) <= opt.dedup_radius;
        });
    };
    for (std::size_t i = 0; i < m; ++i)
        if (1.0 - v(i, i, i) <= tolerance::kSum)
            out.points.push_back(analyze_fixed_point(v, SimplexPoint::vertex(m, i),
                                                     FixedPointSource::vertex_test));

    const double n = static_cast<double>(std::max<std::size_t>(opt.grid_density, 1));
    detail::barycentric_grid(m - 1, std::max<std::size_t>(opt.grid_density, 1),
                             [&](const std::vector<std::size_t>& idx) {
        ++out.starts;
        Eigen::VectorXd u(static_cast<Eigen::Index>(m - 1));
        for (std::size_t d = 0; d + 1 < m; ++d) u(static_cast<Eigen::Index>(d)) = idx[d] / n;
        const auto root = detail::newton_fixed_point(v, u, opt);
        if (!root) {
            ++out.discarded_starts;
            return;
        }
        const auto x = detail::to_simplex(*root, opt.simplex_slack);
        if (!x) return;  // a genuine root, just outside the simplex
        if (known(*x)) return;
        auto report = analyze_fixed_point(v, *x, FixedPointSource::newton);
        if (report.residual > opt.max_residual) {
            ++out.discarded_starts;
            return;
        }
        out.points.push_back(std::move(report));
    });

    // a continuum of dimension d needs at least d unit eigenvalues at each of its points
    auto unit_eigenvalues = [](const FixedPointReport& r) {
        return static_cast<std::size_t>(std::count_if(r.eigenvalues.begin(), r.eigenvalues.end(),
                                                      [](const auto& mu) { return std::abs(mu - 1.0) <= 1e-6; }));
    };
    std::vector<SimplexPoint> candidates;
    std::size_t unit_multiplicity = m;
    for (const auto& r : out.points)
        if (r.type == FixedPointType::non_hyperbolic && r.source == FixedPointSource::newton) {
            const std::size_t units = unit_eigenvalues(r);
            if (units == 0) continue;
            candidates.push_back(r.location);
            unit_multiplicity = std::min(unit_multiplicity, units);
        }
    while (candidates.size() >= opt.continuum_min_roots) {
        auto fit = detail::fit_affine(candidates, opt.continuum_tolerance);
        if (fit && fit->dimension <= unit_multiplicity) {
            std::erase_if(out.points, [&](const FixedPointReport& r) {
                return r.source == FixedPointSource::newton &&
                       std::any_of(candidates.begin(), candidates.end(),
                                   [&](const SimplexPoint& c) { return c == r.location; });
            });
            out.continua.push_back(std::move(*fit));
            break;
        }
        // drop the candidate farthest from the centroid and retry
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
        for (const auto& c : candidates) centroid += c.coords();
        centroid /= static_cast<double>(candidates.size());
        auto worst = std::max_element(candidates.begin(), candidates.end(),
                                      [&](const SimplexPoint& a, const SimplexPoint& b) {
            return (a.coords() - centroid).norm() < (b.coords() - centroid).norm();
        });
        candidates.erase(worst);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cycles and limit sets

struct CycleReport {
    std::size_t period = 0;
    std::vector<SimplexPoint> points;
    double closure_residual = 0.0;  // |V(points[s-1]) - points[0]|
};

inline constexpr double kCycleTolerance = 1e-9;

/// After `burn_in` steps, the smallest s in 1..max_period with |V^s(x) - x| <= 1e-9.
/// A return at s = 1 is a fixed point and yields no cycle.
inline std::optional<CycleReport> detect_cycle(const CubicMatrix& v, const SimplexPoint& x0,
                                               std::size_t burn_in, std::size_t max_period) {
    if (max_period < 2) throw DomainError("max_period must be at least 2");
    const SimplexPoint start = iterate(v, x0, burn_in);
    std::vector<SimplexPoint> pts{start};
    for (std::size_t s = 1; s <= max_period; ++s) {
        SimplexPoint next = apply(v, pts.back());
        if (next.distance(start) <= kCycleTolerance) {
            if (s == 1) return std::nullopt;
            CycleReport c;
            c.period = s;
            c.closure_residual = next.distance(pts.front());
            c.points = std::move(pts);
            return c;
        }
        pts.push_back(std::move(next));
    }
    return std::nullopt;
}

enum class LimitKind { fixed_point, cycle, unresolved };

inline std::string to_string(LimitKind k) {
    switch (k) {
    case LimitKind::fixed_point: return "fixed-point";
    case LimitKind::cycle: return "cycle";
    case LimitKind::unresolved: return "unresolved";
    }
    return "?";
}

struct OmegaLimit {
    LimitKind kind = LimitKind::unresolved;
    std::size_t period = 0;  // 1 for fixed points, s for cycles, 0 when unresolved
    /// Latest window point of each cluster, in visiting order; the final iterate when unresolved.
    std::vector<SimplexPoint> representatives;
};

/// Clusters `window` points collected after `burn_in` steps at sup-norm radius
/// `radius`. One cluster is a fixed point; s clusters visited in a strict
/// rotation form an s-cycle; anything else is unresolved.
inline OmegaLimit omega_limit_estimate(const CubicMatrix& v, const SimplexPoint& x0,
                                       std::size_t burn_in, std::size_t window,
                                       double radius = 1e-7) {
    if (window < 2) throw DomainError("window must be at least 2");
    SimplexPoint x = iterate(v, x0, burn_in);
    std::vector<SimplexPoint> leaders;
    std::vector<SimplexPoint> latest;
    std::vector<std::size_t> labels;
    for (std::size_t t = 0; t < window; ++t) {
        std::size_t label = leaders.size();
        for (std::size_t c = 0; c < leaders.size(); ++c)
            if (leaders[c].distance(x) <= radius) {
                label = c;
                break;
            }
        if (label == leaders.size()) {
            leaders.push_back(x);
            latest.push_back(x);
        } else {
            latest[label] = x;
        }
        labels.push_back(label);
        if (t + 1 < window) x = apply(v, x);
    }
    OmegaLimit out;
    const std::size_t s = leaders.size();
    if (s == 1) {
        out.kind = LimitKind::fixed_point;
        out.period = 1;
        out.representatives = {latest.front()};
        return out;
    }
    bool rotation = window >= 2 * s;
    for (std::size_t t = 0; rotation && t < window; ++t) rotation = labels[t] == t % s;
    if (rotation) {
        out.kind = LimitKind::cycle;
        out.period = s;
        out.representatives = latest;
        return out;
    }
    out.representatives = {x};
    return out;
}

} // namespace ellvolterra
