#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ellvolterra/errors.hpp"

namespace ellvolterra {

namespace tolerance {
/// Column sums must equal one within this bound.
inline constexpr double kColumnSum = 1e-12;
/// P_{ij,k} and P_{ji,k} may differ by at most this much.
inline constexpr double kSymmetry = 1e-12;
/// Entries above this are structurally positive; at or below, structurally zero.
inline constexpr double kPositive = 1e-15;
} // namespace tolerance

/// Unvalidated m x m x m array of heredity coefficients.
///
/// Indices are 0-based: entry (i, j, k) is P_{(i+1)(j+1),(k+1)} in the usual
/// 1-based notation, the probability that parents i and j produce offspring k.
class CubicArray {
public:
    explicit CubicArray(std::size_t m) : m_(m), data_(m * m * m, 0.0) {}

    /// From nested P[i][j][k]; the outer three extents must all equal m.
    explicit CubicArray(const std::vector<std::vector<std::vector<double>>>& nested)
        : CubicArray(nested.size()) {
        for (std::size_t i = 0; i < m_; ++i) {
            if (nested[i].size() != m_) throw DomainError("heredity array is not cubic");
            for (std::size_t j = 0; j < m_; ++j) {
                if (nested[i][j].size() != m_) throw DomainError("heredity array is not cubic");
                for (std::size_t k = 0; k < m_; ++k) at(i, j, k) = nested[i][j][k];
            }
        }
    }

    std::size_t m() const noexcept { return m_; }

    double& at(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * m_ + j) * m_ + k]; }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * m_ + j) * m_ + k];
    }

    /// Sets both P_{ij,k} and P_{ji,k}.
    void set(std::size_t i, std::size_t j, std::size_t k, double v) {
        at(i, j, k) = v;
        at(j, i, k) = v;
    }

    /// Replaces column (i, j) (and its mirror) with `col`.
    void set_column(std::size_t i, std::size_t j, const std::vector<double>& col) {
        for (std::size_t k = 0; k < m_; ++k) set(i, j, k, col[k]);
    }

    const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t m_;
    std::vector<double> data_;
};

/// One failed condition found while validating a heredity array.
struct Violation {
    enum class Kind { Asymmetry, ColumnSum, NegativeEntry };

    Kind kind;
    std::size_t i;
    std::size_t j;
    std::size_t k;  // unused for ColumnSum
    double value;   // column sum for ColumnSum, the offending entry otherwise

    /// Human-readable description using 1-based indices.
    std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        switch (kind) {
        case Kind::Asymmetry:
            os << "AsymmetryError(" << i + 1 << "," << j + 1 << "," << k + 1 << ")";
            break;
        case Kind::ColumnSum:
            os << "ColumnSumError((" << i + 1 << "," << j + 1 << "), " << value << ")";
            break;
        case Kind::NegativeEntry:
            os << "NegativeEntryError(" << i + 1 << "," << j + 1 << "," << k + 1 << ")";
            break;
        }
        return os.str();
    }

    friend bool operator==(const Violation&, const Violation&) = default;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(summary(violations)), violations_(std::move(violations)) {}

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string summary(const std::vector<Violation>& vs) {
        std::string s = "invalid heredity matrix:";
        for (const auto& v : vs) s += " " + v.describe();
        return s;
    }

    std::vector<Violation> violations_;
};

/// Every violation of nonnegativity, symmetry and column stochasticity.
/// Asymmetries are reported once per unordered pair i < j. Column sums are
/// reported for i <= j, and for the mirror column only when its sum differs.
inline std::vector<Violation> find_violations(const CubicArray& p) {
    const std::size_t m = p.m();
    std::vector<Violation> out;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                const double v = p.at(i, j, k);
                if (!(v >= 0.0)) out.push_back({Violation::Kind::NegativeEntry, i, j, k, v});
            }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                const double d = p.at(i, j, k) - p.at(j, i, k);
                if (!(std::abs(d) <= tolerance::kSymmetry))
                    out.push_back({Violation::Kind::Asymmetry, i, j, k, p.at(i, j, k)});
            }
    auto column_sum = [&](std::size_t i, std::size_t j) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += p.at(i, j, k);
        return s;
    };
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            const double s = column_sum(i, j);
            if (!(std::abs(s - 1.0) <= tolerance::kColumnSum))
                out.push_back({Violation::Kind::ColumnSum, i, j, 0, s});
            if (i != j) {
                const double t = column_sum(j, i);
                if (t != s && !(std::abs(t - 1.0) <= tolerance::kColumnSum))
                    out.push_back({Violation::Kind::ColumnSum, j, i, 0, t});
            }
        }
    return out;
}

/// A validated quadratic stochastic operator: symmetric, nonnegative,
/// column-stochastic heredity coefficients. Immutable once built.
class CubicMatrix {
public:
    /// Validates `raw`, throwing ValidationError with every violation found.
    /// Symmetric partners are stored as their exact average.
    static CubicMatrix validate(const CubicArray& raw) {
        if (raw.m() < 2) throw DomainError("heredity matrix needs m >= 2");
        auto violations = find_violations(raw);
        if (!violations.empty()) throw ValidationError(std::move(violations));
        CubicArray sym = raw;
        const std::size_t m = raw.m();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                for (std::size_t k = 0; k < m; ++k) {
                    const double a = raw.at(i, j, k);
                    const double b = raw.at(j, i, k);
                    if (a != b) sym.set(i, j, k, 0.5 * (a + b));
                }
        return CubicMatrix(std::move(sym));
    }

    std::size_t m() const noexcept { return p_.m(); }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return p_.at(i, j, k); }
    const CubicArray& array() const noexcept { return p_; }

    friend bool operator==(const CubicMatrix& a, const CubicMatrix& b) {
        return a.p_.m() == b.p_.m() && a.p_.data() == b.p_.data();
    }

private:
    explicit CubicMatrix(CubicArray p) : p_(std::move(p)) {}

    CubicArray p_;
};

inline CubicMatrix validate(const CubicArray& raw) { return CubicMatrix::validate(raw); }

/// The operator with P_{ii,i} = 1 and P_{ij,i} = P_{ij,j} = 1/2: the identity map.
inline CubicMatrix identity_operator(std::size_t m) {
    CubicArray p(m);
    for (std::size_t i = 0; i < m; ++i) {
        p.at(i, i, i) = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            p.set(i, j, i, 0.5);
            p.set(i, j, j, 0.5);
        }
    }
    return validate(p);
}

} // namespace ellvolterra
