#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "ellvolterra/cubic_matrix.hpp"
#include "ellvolterra/errors.hpp"
#include "ellvolterra/simplex.hpp"

namespace ellvolterra {

/// The quadratic form x'_k = sum_{i,j} P_{ij,k} x_i x_j on all of R^m.
/// No simplex checks; used for Jacobian checks and Newton steps.
inline Eigen::VectorXd quadratic_map(const CubicMatrix& v, const Eigen::VectorXd& x) {
    const std::size_t m = v.m();
    if (static_cast<std::size_t>(x.size()) != m) throw DimensionMismatch(m, x.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
    for (std::size_t i = 0; i < m; ++i) {
        const double xi = x(i);
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < m; ++j) {
            const double w = xi * x(j);
            if (w == 0.0) continue;
            for (std::size_t k = 0; k < m; ++k) out(k) += v(i, j, k) * w;
        }
    }
    return out;
}

/// V(x) on the simplex.
inline SimplexPoint apply(const CubicMatrix& v, const SimplexPoint& x) {
    if (x.dim() != v.m()) throw DimensionMismatch(v.m(), x.dim());
    Eigen::VectorXd out = quadratic_map(v, x.coords());
    const double s = out.sum();
    if (std::abs(s - 1.0) > tolerance::kSum) {
        std::ostringstream os;
        os.precision(17);
        os << "image left the simplex: coordinate sum " << s;
        throw SimplexError(os.str());
    }
    return SimplexPoint(std::move(out));
}

/// True when P_{ij,k} vanishes for every pair with k not in {i, j}.
inline bool volterra_condition_holds(const CubicMatrix& v, std::size_t k) {
    const std::size_t m = v.m();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
            if (i != k && j != k && v(i, j, k) > tolerance::kPositive) return false;
    return true;
}

/// x'_k = x_k (a_kk + sum_{i != k} a_ki x_i) for k < ell, plus a quadratic
/// residual in the coordinates other than x_k for k >= ell (0-based).
struct CanonicalForm {
    std::size_t m = 0;
    std::size_t ell = 0;
    /// a(k, i) = 2 P_{ik,k} - P_{kk,k} off the diagonal, a(k, k) = P_{kk,k}.
    Eigen::MatrixXd a;
    /// residual[k - ell](i, j) = P_{ij,k} for i, j != k; zero in row and column k.
    std::vector<Eigen::MatrixXd> residual;

    const Eigen::MatrixXd& residual_for(std::size_t k) const {
        if (k < ell || k >= m) throw DomainError("no residual for this coordinate");
        return residual[k - ell];
    }
};

/// Requires the Volterra condition on coordinates 0..ell-1, otherwise the
/// canonical form would drop nonzero terms and DomainError is thrown.
inline CanonicalForm canonical_form(const CubicMatrix& v, std::size_t ell) {
    const std::size_t m = v.m();
    if (ell > m) throw DomainError("ell must lie in 0..m");
    for (std::size_t k = 0; k < ell; ++k)
        if (!volterra_condition_holds(v, k)) {
            throw DomainError("coordinate " + std::to_string(k + 1) +
                              " violates the Volterra condition; operator is not in class " +
                              std::to_string(ell));
        }
    CanonicalForm cf;
    cf.m = m;
    cf.ell = ell;
    const auto n = static_cast<Eigen::Index>(m);
    cf.a.resize(n, n);
    for (std::size_t k = 0; k < m; ++k) {
        const double pkk = v(k, k, k);
        for (std::size_t i = 0; i < m; ++i) cf.a(k, i) = (i == k) ? pkk : 2.0 * v(i, k, k) - pkk;
    }
    for (std::size_t k = ell; k < m; ++k) {
        Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (i != k && j != k) r(i, j) = v(i, j, k);
        cf.residual.push_back(std::move(r));
    }
    return cf;
}

inline SimplexPoint apply_canonical(const CanonicalForm& cf, const SimplexPoint& x) {
    if (x.dim() != cf.m) throw DimensionMismatch(cf.m, x.dim());
    const Eigen::VectorXd& c = x.coords();
    Eigen::VectorXd out(c.size());
    for (std::size_t k = 0; k < cf.m; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        double growth = cf.a(kk, kk);
        for (Eigen::Index i = 0; i < c.size(); ++i)
            if (i != kk) growth += cf.a(kk, i) * c(i);
        double xk = c(kk) * growth;
        if (k >= cf.ell) xk += c.dot(cf.residual[k - cf.ell] * c);
        out(kk) = xk;
    }
    const double s = out.sum();
    if (std::abs(s - 1.0) > tolerance::kSum) throw SimplexError("canonical image left the simplex");
    return SimplexPoint(std::move(out));
}

} // namespace ellvolterra
