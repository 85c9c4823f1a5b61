#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ellvolterra/classify.hpp"
#include "ellvolterra/cubic_matrix.hpp"
#include "ellvolterra/errors.hpp"

namespace ellvolterra {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::size_t kMaxEnumerationDim = 4;

namespace detail {
inline BigInt ipow(std::size_t base, std::size_t exp) {
    BigInt r = 1;
    for (std::size_t e = 0; e < exp; ++e) r *= base;
    return r;
}
} // namespace detail

/// Number of 0/1 operators obeying the Volterra condition on coordinates 0..ell-1.
inline BigInt extremal_count(std::size_t m, std::size_t ell) {
    if (m < 2) throw DomainError("m must be at least 2");
    if (ell > m) throw DomainError("ell must lie in 0..m");
    if (ell == m) return detail::ipow(2, m * (m - 1) / 2);
    const std::size_t r = m - ell;
    return detail::ipow(r, r * (r + 1) / 2) * detail::ipow(r + 1, (r + 1) * ell) *
           detail::ipow(r + 2, ell * (ell - 1) / 2);
}

/// Extremal points of the set of all quadratic stochastic operators on m species.
inline BigInt extremal_count_unconstrained(std::size_t m) {
    if (m < 2) throw DomainError("m must be at least 2");
    return detail::ipow(m, m * (m + 1) / 2);
}

/// Columns (i, j) with i <= j, in lexicographic order.
inline std::vector<std::pair<std::size_t, std::size_t>> column_pairs(std::size_t m) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) out.emplace_back(i, j);
    return out;
}

/// Rows that may carry mass in column (i, j): i, j themselves and every k >= ell.
inline std::vector<std::size_t> admissible_rows(std::size_t m, std::size_t ell, std::size_t i,
                                                std::size_t j) {
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < m; ++k)
        if (k >= ell || k == i || k == j) rows.push_back(k);
    return rows;
}

/// A 0/1 operator stored as the row holding the single 1 of each column.
struct ExtremalOperator {
    std::size_t m = 0;
    std::vector<std::uint8_t> rows;  // indexed like column_pairs(m)
    std::size_t detected_ell = 0;
    bool strictly_in_class = true;

    CubicMatrix matrix() const {
        CubicArray p(m);
        std::size_t c = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) p.set(i, j, rows[c++], 1.0);
        return validate(p);
    }
};

/// Visits every 0/1 operator obeying the Volterra condition on 0..ell-1, in
/// lexicographic order of the per-column row choices. The strict-positivity
/// requirement on later coordinates is not imposed, so the visit count equals
/// extremal_count(m, ell).
inline void for_each_extremal(std::size_t m, std::size_t ell,
                              const std::function<void(const std::vector<std::uint8_t>&)>& visit) {
    if (m < 2) throw DomainError("m must be at least 2");
    if (ell > m) throw DomainError("ell must lie in 0..m");
    if (m > kMaxEnumerationDim) throw SizeGuardExceeded("extremal enumeration is limited to m <= 4");
    const auto cols = column_pairs(m);
    std::vector<std::vector<std::size_t>> choices;
    choices.reserve(cols.size());
    for (auto [i, j] : cols) choices.push_back(admissible_rows(m, ell, i, j));

    std::vector<std::size_t> odometer(cols.size(), 0);
    std::vector<std::uint8_t> rows(cols.size());
    while (true) {
        for (std::size_t c = 0; c < cols.size(); ++c)
            rows[c] = static_cast<std::uint8_t>(choices[c][odometer[c]]);
        visit(rows);
        std::size_t c = cols.size();
        while (c > 0) {
            --c;
            if (++odometer[c] < choices[c].size()) break;
            odometer[c] = 0;
            if (c == 0) return;
        }
    }
}

/// All extremal operators for (m, ell), each annotated with its detect_ell result.
inline std::vector<ExtremalOperator> enumerate_extremals(std::size_t m, std::size_t ell) {
    std::vector<ExtremalOperator> out;
    for_each_extremal(m, ell, [&](const std::vector<std::uint8_t>& rows) {
        ExtremalOperator e{m, rows, 0, true};
        const auto cls = detect_ell(e.matrix());
        e.detected_ell = cls.ell;
        e.strictly_in_class = cls.strictly_in_class();
        out.push_back(std::move(e));
    });
    return out;
}

struct EntrySplit {
    CubicMatrix v1;
    CubicMatrix v2;
    double alpha;
};

/// Writes V = alpha V1 + (1 - alpha) V2 with alpha = P_{i0 j0, k0} (0-based).
/// V1 puts all of column (i0, j0) on row k0; V2 zeroes that entry and rescales
/// the rest of the column by 1 / (1 - alpha). Other columns are copied.
inline EntrySplit split_at_entry(const CubicMatrix& v, std::size_t i0, std::size_t j0,
                                 std::size_t k0) {
    const std::size_t m = v.m();
    if (i0 >= m || j0 >= m || k0 >= m) throw DomainError("entry index out of range");
    const double alpha = v(i0, j0, k0);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw EntryNotFractional("entry (" + std::to_string(i0 + 1) + "," + std::to_string(j0 + 1) +
                                 "," + std::to_string(k0 + 1) + ") is not in (0, 1)");
    CubicArray p1 = v.array();
    CubicArray p2 = v.array();
    for (std::size_t k = 0; k < m; ++k) {
        p1.set(i0, j0, k, k == k0 ? 1.0 : 0.0);
        p2.set(i0, j0, k, k == k0 ? 0.0 : v(i0, j0, k) / (1.0 - alpha));
    }
    return {validate(p1), validate(p2), alpha};
}

} // namespace ellvolterra
