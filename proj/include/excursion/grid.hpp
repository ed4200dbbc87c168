#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

#include "excursion/errors.hpp"

namespace excursion {

/// The lattice of cell corners delta*i, i in [-N, N-1]^d, whose delta-cubes
/// tile the window T = [-delta N, delta N]^d exactly. Flat node indices run
/// with dimension 0 fastest.
struct GridSpec {
    int d = 2;
    int half_extent = 1;  // N
    double spacing = 1.0; // delta

    GridSpec() = default;
    GridSpec(int dim, int n, double delta) : d(dim), half_extent(n), spacing(delta) {
        if (dim < 1) throw ContractError("grid dimension must be >= 1");
        if (n < 1) throw ContractError("grid half extent must be >= 1");
        if (!(delta > 0.0)) throw ContractError("grid spacing must be positive");
    }

    /// Nodes per axis, 2N.
    std::int64_t side() const { return 2 * static_cast<std::int64_t>(half_extent); }

    std::int64_t node_count() const {
        std::int64_t n = 1;
        for (int k = 0; k < d; ++k) n *= side();
        return n;
    }

    double half_width() const { return spacing * half_extent; }

    /// sigma_d(T) = (2 N delta)^d.
    double window_volume() const {
        const double side_length = 2.0 * half_width();
        double v = 1.0;
        for (int k = 0; k < d; ++k) v *= side_length;
        return v;
    }

    /// Stride of axis k in the flat index.
    std::int64_t stride(int axis) const {
        std::int64_t s = 1;
        for (int k = 0; k < axis; ++k) s *= side();
        return s;
    }

    /// Coordinate of the node with flat index `flat`.
    Eigen::VectorXd node(std::int64_t flat) const {
        Eigen::VectorXd x(d);
        for (int k = 0; k < d; ++k) {
            x[k] = spacing * static_cast<double>(flat % side() - half_extent);
            flat /= side();
        }
        return x;
    }

    /// All node coordinates as a d x node_count matrix.
    Eigen::MatrixXd nodes() const {
        Eigen::MatrixXd out(d, node_count());
        for (std::int64_t i = 0; i < node_count(); ++i) out.col(i) = node(i);
        return out;
    }
};

}  // namespace excursion
