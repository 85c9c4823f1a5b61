#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <sstream>
#include <vector>

#include "ellvolterra/errors.hpp"

namespace ellvolterra {

namespace tolerance {
/// Deviations of the coordinate sum up to this size are renormalized away.
inline constexpr double kRenormalize = 1e-9;
/// Coordinates in [-kClamp, 0) are treated as underflow and set to zero.
inline constexpr double kClamp = 1e-15;
/// Largest acceptable |sum - 1| after construction.
inline constexpr double kSum = 1e-12;
} // namespace tolerance

/// A probability vector x in S^{m-1}: x_i >= 0, sum x_i = 1.
///
/// Construction enforces the invariant. Slightly negative coordinates
/// (>= -1e-15) are clamped to zero and a coordinate sum within 1e-9 of one is
/// renormalized; anything further away raises SimplexError.
class SimplexPoint {
public:
    explicit SimplexPoint(Eigen::VectorXd coords) : coords_(std::move(coords)) { normalize(); }

    SimplexPoint(std::initializer_list<double> coords)
        : coords_(Eigen::Map<const Eigen::VectorXd>(coords.begin(),
                                                    static_cast<Eigen::Index>(coords.size()))) {
        normalize();
    }

    explicit SimplexPoint(std::span<const double> coords)
        : coords_(Eigen::Map<const Eigen::VectorXd>(coords.data(),
                                                    static_cast<Eigen::Index>(coords.size()))) {
        normalize();
    }

    /// Vertex e_i (0-based index).
    static SimplexPoint vertex(std::size_t m, std::size_t i) {
        if (i >= m) throw DomainError("vertex index out of range");
        Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
        v(static_cast<Eigen::Index>(i)) = 1.0;
        return SimplexPoint(std::move(v));
    }

    static SimplexPoint barycenter(std::size_t m) {
        return SimplexPoint(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), 1.0 / m));
    }

    /// Lift reduced coordinates (x_1..x_{m-1}) by x_m = 1 - sum.
    static SimplexPoint from_reduced(const Eigen::VectorXd& reduced) {
        Eigen::VectorXd v(reduced.size() + 1);
        v.head(reduced.size()) = reduced;
        v(reduced.size()) = 1.0 - reduced.sum();
        return SimplexPoint(std::move(v));
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(coords_.size()); }
    double operator[](std::size_t i) const { return coords_(static_cast<Eigen::Index>(i)); }
    const Eigen::VectorXd& coords() const noexcept { return coords_; }
    Eigen::VectorXd reduced() const { return coords_.head(coords_.size() - 1); }

    std::vector<double> to_vector() const {
        return std::vector<double>(coords_.data(), coords_.data() + coords_.size());
    }

    /// Sup-norm distance.
    double distance(const SimplexPoint& other) const {
        if (other.dim() != dim()) throw DimensionMismatch(dim(), other.dim());
        return (coords_ - other.coords_).lpNorm<Eigen::Infinity>();
    }

    friend bool operator==(const SimplexPoint& a, const SimplexPoint& b) {
        return a.coords_ == b.coords_;
    }

private:
    void normalize() {
        if (coords_.size() < 1) throw SimplexError("simplex point needs at least one coordinate");
        for (Eigen::Index i = 0; i < coords_.size(); ++i) {
            double& c = coords_(i);
            if (!std::isfinite(c)) throw SimplexError("non-finite simplex coordinate");
            if (c < 0.0) {
                if (c < -tolerance::kClamp) {
                    std::ostringstream os;
                    os << "negative simplex coordinate x_" << (i + 1) << " = " << c;
                    throw SimplexError(os.str());
                }
                c = 0.0;
            }
        }
        const double s = coords_.sum();
        if (std::abs(s - 1.0) > tolerance::kRenormalize) {
            std::ostringstream os;
            os.precision(17);
            os << "coordinates sum to " << s << ", not 1";
            throw SimplexError(os.str());
        }
        if (s != 1.0) coords_ /= s;
    }

    Eigen::VectorXd coords_;
};

} // namespace ellvolterra
