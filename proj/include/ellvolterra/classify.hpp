#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ellvolterra/core.hpp"
#include "ellvolterra/cubic_matrix.hpp"
#include "ellvolterra/errors.hpp"
#include "ellvolterra/simplex.hpp"

namespace ellvolterra {

/// 0-based coordinate indices.
using IndexSet = std::vector<std::size_t>;

/// A pair (i, j), both different from k, with P_{ij,k} > 0.
struct Witness {
    std::size_t k;
    std::size_t i;
    std::size_t j;
};

struct EllClassification {
    std::size_t m = 0;
    /// Length of the longest prefix 0..ell-1 of coordinates obeying the Volterra condition.
    std::size_t ell = 0;
    /// Every coordinate obeying the Volterra condition, prefix or not.
    IndexSet volterra_coords;
    /// First witness (lexicographic in i <= j) for each coordinate that has one.
    std::vector<Witness> witnesses;
    /// Coordinates k >= ell that still obey the Volterra condition. When this is
    /// non-empty the operator satisfies the prefix condition for `ell` but not the
    /// strict-positivity requirement for every later coordinate.
    IndexSet non_prefix_volterra_coords;
    bool is_volterra = false;

    bool strictly_in_class() const noexcept { return non_prefix_volterra_coords.empty(); }
};

inline std::optional<Witness> find_witness(const CubicMatrix& v, std::size_t k) {
    const std::size_t m = v.m();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
            if (i != k && j != k && v(i, j, k) > tolerance::kPositive) return Witness{k, i, j};
    return std::nullopt;
}

/// Classifies V by the literal coordinate order: no relabeling is attempted.
inline EllClassification detect_ell(const CubicMatrix& v) {
    EllClassification out;
    out.m = v.m();
    bool prefix = true;
    for (std::size_t k = 0; k < v.m(); ++k) {
        const auto w = find_witness(v, k);
        if (w) {
            out.witnesses.push_back(*w);
            prefix = false;
        } else {
            out.volterra_coords.push_back(k);
            if (prefix)
                ++out.ell;
            else
                out.non_prefix_volterra_coords.push_back(k);
        }
    }
    out.is_volterra = out.ell == v.m();
    return out;
}

/// Outcome of a sampled invariance check.
struct InvarianceCheck {
    bool holds = true;
    /// False when the index set lies outside the hypothesis under which invariance is guaranteed.
    bool within_hypothesis = true;
    std::size_t points_checked = 0;
    std::optional<SimplexPoint> counterexample;
    std::optional<SimplexPoint> image;
};

namespace detail {

/// Uniform sample on the sub-simplex spanned by `support`.
inline SimplexPoint sample_on_support(std::size_t m, const IndexSet& support, std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    double total = 0.0;
    for (auto i : support) {
        double e = expo(rng);
        if (e < 1e-6) e = 1e-6;
        v(static_cast<Eigen::Index>(i)) = e;
        total += e;
    }
    v /= total;
    return SimplexPoint(std::move(v));
}

inline SimplexPoint barycenter_of(std::size_t m, const IndexSet& support) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (auto i : support) v(static_cast<Eigen::Index>(i)) = 1.0 / static_cast<double>(support.size());
    return SimplexPoint(std::move(v));
}

inline IndexSet complement(std::size_t m, const IndexSet& s) {
    IndexSet out;
    for (std::size_t i = 0; i < m; ++i)
        if (std::find(s.begin(), s.end(), i) == s.end()) out.push_back(i);
    return out;
}

/// A random non-empty subset of `from` (each element kept with probability 1/2).
inline IndexSet random_subset(const IndexSet& from, std::mt19937_64& rng, bool non_empty) {
    IndexSet out;
    std::bernoulli_distribution coin(0.5);
    for (auto i : from)
        if (coin(rng)) out.push_back(i);
    if (non_empty && out.empty() && !from.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, from.size() - 1);
        out.push_back(from[pick(rng)]);
    }
    return out;
}

inline void check_index_set(std::size_t m, const IndexSet& s) {
    for (auto i : s)
        if (i >= m) throw DomainError("index set entry out of range");
}

} // namespace detail

/// Samples the face {x : x_i = 0 for i in I} and checks that V keeps the
/// I-coordinates at or below 1e-12. The face's vertices are tested first, then
/// its barycenter, then `samples` random points on random sub-faces.
inline InvarianceCheck check_face_invariance(const CubicMatrix& v, const IndexSet& face,
                                             std::size_t samples, std::uint64_t seed = 0) {
    const std::size_t m = v.m();
    detail::check_index_set(m, face);
    InvarianceCheck out;
    const IndexSet free = detail::complement(m, face);
    if (free.empty()) return out;  // the face is empty

    std::mt19937_64 rng(seed);
    auto test = [&](const SimplexPoint& x) {
        ++out.points_checked;
        const SimplexPoint y = apply(v, x);
        for (auto i : face)
            if (y[i] > 1e-12) {
                out.holds = false;
                out.counterexample = x;
                out.image = y;
                return false;
            }
        return true;
    };
    for (auto i : free)
        if (!test(SimplexPoint::vertex(m, i))) return out;
    if (!test(detail::barycenter_of(m, free))) return out;
    for (std::size_t s = 0; s < samples; ++s) {
        const IndexSet support = (s % 2 == 0) ? free : detail::random_subset(free, rng, true);
        if (!test(detail::sample_on_support(m, support, rng))) return out;
    }
    return out;
}

/// A_ell: coordinates k < ell whose canonical self-coefficient a_kk = P_{kk,k} is positive.
inline IndexSet positive_self_coords(const CubicMatrix& v, std::size_t ell) {
    IndexSet out;
    for (std::size_t k = 0; k < ell; ++k)
        if (v(k, k, k) > tolerance::kPositive) out.push_back(k);
    return out;
}

/// Samples points with x_i > 0 for all i in I and checks that V keeps those
/// coordinates strictly positive. `within_hypothesis` is cleared when I
/// contains a coordinate k < ell with a_kk = 0; the check still runs.
inline InvarianceCheck check_positivity_invariance(const CubicMatrix& v, const IndexSet& positive,
                                                   std::size_t samples, std::uint64_t seed = 0) {
    const std::size_t m = v.m();
    detail::check_index_set(m, positive);
    InvarianceCheck out;
    const std::size_t ell = detect_ell(v).ell;
    const IndexSet a_ell = positive_self_coords(v, ell);
    for (auto i : positive)
        if (i < ell && std::find(a_ell.begin(), a_ell.end(), i) == a_ell.end())
            out.within_hypothesis = false;

    std::mt19937_64 rng(seed);
    auto test = [&](const SimplexPoint& x) {
        ++out.points_checked;
        const SimplexPoint y = apply(v, x);
        for (auto i : positive)
            if (!(y[i] > 0.0)) {
                out.holds = false;
                out.counterexample = x;
                out.image = y;
                return false;
            }
        return true;
    };
    const IndexSet rest = detail::complement(m, positive);
    if (!positive.empty()) {
        if (!test(detail::barycenter_of(m, positive))) return out;
    }
    if (!test(SimplexPoint::barycenter(m))) return out;
    for (std::size_t s = 0; s < samples; ++s) {
        IndexSet support = positive;
        const IndexSet extra = detail::random_subset(rest, rng, positive.empty());
        support.insert(support.end(), extra.begin(), extra.end());
        if (!test(detail::sample_on_support(m, support, rng))) return out;
    }
    return out;
}

/// Entrywise lambda * V1 + (1 - lambda) * V2.
inline CubicMatrix convex_combine(const CubicMatrix& v1, const CubicMatrix& v2, double lambda) {
    if (v1.m() != v2.m()) throw DimensionMismatch(v1.m(), v2.m());
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
    CubicArray out(v1.m());
    const auto& a = v1.array().data();
    const auto& b = v2.array().data();
    const std::size_t m = v1.m();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t idx = (i * m + j) * m + k;
                out.at(i, j, k) = lambda * a[idx] + (1.0 - lambda) * b[idx];
            }
    return validate(out);
}

} // namespace ellvolterra
