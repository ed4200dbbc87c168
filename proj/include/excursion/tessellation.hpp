#pragma once

// Point-referenced honeycombs: tessellations by closed convex polytopes with
// one reference point per cell such that every shared facet is normal to the
// difference of the two reference points.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "excursion/grid.hpp"

namespace excursion {

using Box = Eigen::AlignedBox<double, Eigen::Dynamic>;

struct Cell {
    Eigen::MatrixXd vertices;  // d x nv; counter-clockwise polygon in 2D
    Eigen::VectorXd ref;       // reference point, inside the closed cell
    double volume = 0.0;       // sigma_d(P)
    double window_volume = 0.0;  // sigma_d(P intersect T)
    double window_diameter = 0.0;  // diam(P intersect T)
};

struct Facet {
    int cell_a = -1;
    int cell_b = -1;
    double measure = 0.0;      // sigma_{d-1}(P_a intersect P_b) > 0
    Eigen::VectorXd normal;    // unit, pointing from cell_a to cell_b
    Eigen::MatrixXd vertices;  // d x k; the two endpoints in 2D
};

/// Cells meeting the window T together with all their shared facets.
struct Honeycomb {
    int d = 2;
    std::vector<Cell> cells;
    std::vector<Facet> facets;
    Box window;
    double diameter_bound = 0.0;  // max over cells of diam(P intersect T)
    int merged_duplicates = 0;    // generators dropped as duplicates (Voronoi)
};

/// A honeycomb restricted to the cells contained in the window.
struct WindowedHoneycomb {
    Honeycomb mesh;
    std::vector<int> inside_cells;     // indices into mesh.cells, P subset of T
    std::vector<int> interior_facets;  // indices into mesh.facets, both cells inside
    std::vector<int> inside_slot;      // mesh cell -> position in inside_cells, or -1

    int dim() const { return mesh.d; }
    double window_volume() const { return mesh.window.volume(); }
    /// sigma_d(union of inside cells) / sigma_d(T).
    double coverage_ratio() const;
    const Cell& inside_cell(std::size_t slot) const { return mesh.cells[static_cast<std::size_t>(inside_cells[slot])]; }
};

/// Marks inside cells (vertex containment with 1e-12 slack) and interior facets.
WindowedHoneycomb restrict_to_window(Honeycomb mesh);

/// The hypercubic lattice delta*Z^d restricted to T = [-delta N, delta N]^d,
/// kept implicit: cells are V_i = delta*i + [0, delta]^d with reference corner
/// delta*i, i in [-N, N-1]^d, and are indexed like GridSpec nodes.
class HypercubicLattice {
public:
    HypercubicLattice(double delta, int N, int d);

    const GridSpec& grid() const { return grid_; }
    int dim() const { return grid_.d; }
    double spacing() const { return grid_.spacing; }
    std::int64_t cell_count() const { return grid_.node_count(); }
    /// d (2N - 1) (2N)^{d-1} unordered adjacent pairs inside T.
    std::int64_t interior_facet_count() const;
    double facet_measure() const;
    double cell_volume() const;
    double window_volume() const { return grid_.window_volume(); }
    double coverage_ratio() const { return 1.0; }
    double diameter_bound() const;
    Box window() const;

    /// Explicit cells and facets (2^d vertices per cell). Throws ContractError
    /// above `max_cells`.
    WindowedHoneycomb materialize(std::int64_t max_cells = 1 << 20) const;

private:
    GridSpec grid_;
};

HypercubicLattice hypercubic_honeycomb(double delta, int N, int d);

/// Regular hexagons of circumradius delta (flat-topped, centres on a
/// triangular lattice of spacing sqrt(3) delta with one centre at the origin);
/// every hexagon meeting T is kept.
WindowedHoneycomb hexagonal_honeycomb(double delta, const Box& window);

/// Voronoi honeycomb of 2D generators (2 x n). Cells are clipped against the
/// guard box T + guard, so cells meeting T must be bounded within it. Needs at
/// least two distinct generators; three or more must not all be collinear.
/// Generators closer than 1e-12 are merged (see Honeycomb::merged_duplicates).
WindowedHoneycomb voronoi_honeycomb_2d(const Eigen::Matrix2Xd& points, const Box& window, double guard);

/// Sum over ordered interior adjacent pairs of sigma_{d-1}(Q1 n Q2) |Q2* - Q1*|;
/// bounded by 2 d sigma_d(T) and approaching it as the cells shrink.
double pyramid_identity_sum(const WindowedHoneycomb& h);
double pyramid_identity_sum(const HypercubicLattice& h);

/// Largest |<facet direction, ref_b - ref_a>| / |ref_b - ref_a| over all
/// facets, i.e. the deviation from normality (2D); in general d the sine of
/// the angle between the facet normal and ref_b - ref_a.
double max_normality_violation(const Honeycomb& h);

/// Edge list ax,ay,bx,by,cell_a,cell_b,length of a 2D honeycomb.
void write_edges_csv(std::ostream& out, const Honeycomb& h);

/// Delaunay neighbours of each 2D generator (Bowyer-Watson). Requires at
/// least three distinct, not all collinear points.
std::vector<std::vector<int>> delaunay_neighbors(const Eigen::Matrix2Xd& points);

}  // namespace excursion
