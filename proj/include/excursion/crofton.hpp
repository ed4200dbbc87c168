#pragma once

// Integral-geometry oracles: Monte Carlo Crofton measures from random lines,
// the sphere average of the L1 norm, and the L1-weighted level-curve length.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "excursion/grid.hpp"

namespace excursion {

/// The line {offset + t direction}, with |direction| = 1 and offset orthogonal to it.
struct ParamLine {
    Eigen::VectorXd direction;
    Eigen::VectorXd offset;

    Eigen::VectorXd point(double t) const { return offset + t * direction; }
};

/// Number of intersection points sigma_0(M n l) of a shape with a line.
using IntersectionOracle = std::function<int(const ParamLine&)>;

IntersectionOracle sphere_oracle(const Eigen::VectorXd& center, double radius);
/// Boundary of a closed polygon (2 x n vertices); each vertex is counted once.
IntersectionOracle polygon_boundary_oracle(const Eigen::Matrix2Xd& vertices);
/// Boundary of the axis-aligned square of side a centred at `center`.
IntersectionOracle square_boundary_oracle(const Eigen::Vector2d& center, double side);

struct CroftonEstimate {
    double measure = 0.0;
    double std_error = 0.0;
    std::int64_t n_lines = 0;
};

/// sigma_{d-1}(M) from n_lines random lines: directions uniform on the
/// sphere, offsets uniform in the (d-1)-disk of radius R orthogonal to the
/// direction. The shape must lie inside the ball of radius R about the origin.
CroftonEstimate crofton_measure_mc(const IntersectionOracle& shape, int d, std::int64_t n_lines, double R,
                                   std::uint64_t seed, unsigned threads = 1);

/// Gauss-Legendre nodes and weights on [a, b] (Golub-Welsch).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Average of |r|_1 over the unit sphere of R^d by deterministic quadrature.
/// Equals 2d / beta_d.
double sphere_l1_average(int d);

struct LevelSegment {
    Eigen::Vector2d a;
    Eigen::Vector2d b;
    Eigen::Vector2d normal;  // unit, towards increasing field

    double length() const { return (b - a).norm(); }
};

struct LevelPolyline {
    std::vector<LevelSegment> segments;
    int saddle_cells = 0;  // cells resolved by the centre value

    double total_length() const;
};

/// Marching squares on a 2D grid: level points by linear interpolation along
/// cell edges, normals from the central-difference gradient at each segment
/// midpoint.
LevelPolyline extract_level_polyline_2d(const Eigen::Ref<const Eigen::VectorXd>& values, const GridSpec& grid,
                                        double u);

/// Sum over segments of length * |normal|_1.
double l1_weighted_length(const LevelPolyline& p);

/// CSV with header x1,y1,x2,y2,nx,ny.
void write_csv(std::ostream& out, const LevelPolyline& p);

}  // namespace excursion
