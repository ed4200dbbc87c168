#include "excursion/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <locale>
#include <numbers>
#include <ostream>
#include <utility>

#include "excursion/errors.hpp"

namespace excursion {

namespace {

using Vec2 = Eigen::Vector2d;

// Convex polygon with a label per edge; edge k runs from vertex k to k+1.
struct LabeledPolygon {
    std::vector<Vec2> v;
    std::vector<int> label;
};

double polygon_area(const std::vector<Vec2>& v) {
    double a = 0.0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

double polygon_diameter(const std::vector<Vec2>& v) {
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, (v[i] - v[j]).norm());
    return d;
}

// Keeps {x : <x - origin, normal> <= 0}; the new edge on the cut line gets `cut_label`.
LabeledPolygon clip(const LabeledPolygon& poly, const Vec2& origin, const Vec2& normal, int cut_label) {
    LabeledPolygon out;
    const std::size_t n = poly.v.size();
    if (n == 0) return out;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = (poly.v[i] - origin).dot(normal);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const bool in_i = s[i] <= 0.0, in_j = s[j] <= 0.0;
        if (in_i) {
            out.v.push_back(poly.v[i]);
            out.label.push_back(poly.label[i]);
        }
        if (in_i != in_j) {
            const double t = s[i] / (s[i] - s[j]);
            const Vec2 x = poly.v[i] + t * (poly.v[j] - poly.v[i]);
            out.v.push_back(x);
            // Leaving the half-plane: the edge from x follows the cut line.
            out.label.push_back(in_i ? cut_label : poly.label[i]);
        }
    }
    // Drop edges of negligible length.
    const double scale = out.v.empty() ? 0.0 : polygon_diameter(out.v);
    LabeledPolygon cleaned;
    for (std::size_t i = 0, m = out.v.size(); i < m; ++i) {
        if ((out.v[(i + 1) % m] - out.v[i]).norm() <= 1e-14 * scale) continue;
        cleaned.v.push_back(out.v[i]);
        cleaned.label.push_back(out.label[i]);
    }
    if (cleaned.v.size() < 3) return {};
    return cleaned;
}

LabeledPolygon box_polygon(const Box& box) {
    const Vec2 lo = box.min(), hi = box.max();
    return {{lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())}, {-1, -1, -1, -1}};
}

LabeledPolygon clip_to_box(LabeledPolygon poly, const Box& box) {
    const Vec2 lo = box.min(), hi = box.max();
    poly = clip(poly, lo, Vec2(-1, 0), -1);
    poly = clip(poly, lo, Vec2(0, -1), -1);
    poly = clip(poly, hi, Vec2(1, 0), -1);
    poly = clip(poly, hi, Vec2(0, 1), -1);
    return poly;
}

Eigen::MatrixXd to_matrix(const std::vector<Vec2>& v) {
    Eigen::MatrixXd m(2, static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = v[i];
    return m;
}

Cell make_polygon_cell(const std::vector<Vec2>& verts, const Vec2& ref, const Box& window) {
    Cell c;
    c.vertices = to_matrix(verts);
    c.ref = ref;
    c.volume = polygon_area(verts);
    LabeledPolygon p{verts, std::vector<int>(verts.size(), -1)};
    const LabeledPolygon in_window = clip_to_box(p, window);
    c.window_volume = polygon_area(in_window.v);
    c.window_diameter = polygon_diameter(in_window.v);
    return c;
}

void check_window(const Box& window, int d) {
    if (window.dim() != d) throw ContractError("window dimension mismatch");
    if (window.isEmpty() || !(window.volume() > 0.0)) throw ContractError("window must have positive volume");
}

}  // namespace

double WindowedHoneycomb::coverage_ratio() const {
    double covered = 0.0;
    for (int i : inside_cells) covered += mesh.cells[static_cast<std::size_t>(i)].volume;
    return covered / window_volume();
}

WindowedHoneycomb restrict_to_window(Honeycomb mesh) {
    WindowedHoneycomb h;
    const Eigen::VectorXd lo = mesh.window.min(), hi = mesh.window.max();
    const double slack = 1e-12 * std::max(1.0, mesh.window.sizes().maxCoeff());
    h.inside_slot.assign(mesh.cells.size(), -1);
    for (std::size_t i = 0; i < mesh.cells.size(); ++i) {
        const Eigen::MatrixXd& v = mesh.cells[i].vertices;
        bool inside = true;
        for (Eigen::Index k = 0; k < v.cols() && inside; ++k)
            inside = ((v.col(k) - lo).array() >= -slack).all() && ((hi - v.col(k)).array() >= -slack).all();
        if (inside) {
            h.inside_slot[i] = static_cast<int>(h.inside_cells.size());
            h.inside_cells.push_back(static_cast<int>(i));
        }
    }
    for (std::size_t f = 0; f < mesh.facets.size(); ++f) {
        const Facet& fc = mesh.facets[f];
        if (h.inside_slot[static_cast<std::size_t>(fc.cell_a)] >= 0 && h.inside_slot[static_cast<std::size_t>(fc.cell_b)] >= 0)
            h.interior_facets.push_back(static_cast<int>(f));
    }
    h.mesh = std::move(mesh);
    return h;
}

// ---------------------------------------------------------------------------
// Hypercubic lattice

HypercubicLattice::HypercubicLattice(double delta, int N, int d) : grid_(d, N, delta) {
    if (d < 2) throw ContractError("hypercubic honeycomb needs d >= 2");
}

std::int64_t HypercubicLattice::interior_facet_count() const {
    return static_cast<std::int64_t>(grid_.d) * (grid_.side() - 1) * grid_.stride(grid_.d - 1);
}

double HypercubicLattice::facet_measure() const { return std::pow(grid_.spacing, grid_.d - 1); }
double HypercubicLattice::cell_volume() const { return std::pow(grid_.spacing, grid_.d); }
double HypercubicLattice::diameter_bound() const { return grid_.spacing * std::sqrt(static_cast<double>(grid_.d)); }

Box HypercubicLattice::window() const {
    const Eigen::VectorXd h = Eigen::VectorXd::Constant(grid_.d, grid_.half_width());
    return Box(-h, h);
}

WindowedHoneycomb HypercubicLattice::materialize(std::int64_t max_cells) const {
    if (cell_count() > max_cells) throw ContractError("hypercubic lattice too large to materialize");
    const int d = grid_.d;
    const double delta = grid_.spacing;
    const int corners = 1 << d;

    Honeycomb mesh;
    mesh.d = d;
    mesh.window = window();
    mesh.diameter_bound = diameter_bound();
    mesh.cells.reserve(static_cast<std::size_t>(cell_count()));
    for (std::int64_t i = 0; i < cell_count(); ++i) {
        Cell c;
        c.ref = grid_.node(i);
        c.vertices.resize(d, corners);
        for (int m = 0; m < corners; ++m)
            for (int k = 0; k < d; ++k) c.vertices(k, m) = c.ref[k] + (((m >> k) & 1) ? delta : 0.0);
        c.volume = cell_volume();
        c.window_volume = c.volume;
        c.window_diameter = diameter_bound();
        mesh.cells.push_back(std::move(c));
    }
    const std::int64_t side = grid_.side();
    for (int j = 0; j < d; ++j) {
        const std::int64_t stride = grid_.stride(j);
        for (std::int64_t i = 0; i < cell_count(); ++i) {
            if ((i / stride) % side == side - 1) continue;
            Facet f;
            f.cell_a = static_cast<int>(i);
            f.cell_b = static_cast<int>(i + stride);
            f.measure = facet_measure();
            f.normal = Eigen::VectorXd::Unit(d, j);
            const Eigen::VectorXd base = grid_.node(i + stride);
            f.vertices.resize(d, corners / 2);
            for (int m = 0, col = 0; m < corners; ++m) {
                if ((m >> j) & 1) continue;
                for (int k = 0; k < d; ++k) f.vertices(k, col) = base[k] + (k != j && ((m >> k) & 1) ? delta : 0.0);
                ++col;
            }
            mesh.facets.push_back(std::move(f));
        }
    }
    return restrict_to_window(std::move(mesh));
}

HypercubicLattice hypercubic_honeycomb(double delta, int N, int d) { return HypercubicLattice(delta, N, d); }

// ---------------------------------------------------------------------------
// Hexagonal honeycomb

WindowedHoneycomb hexagonal_honeycomb(double delta, const Box& window) {
    check_window(window, 2);
    if (!(delta > 0.0)) throw ContractError("hexagon circumradius must be positive");
    if (!(delta < window.sizes().minCoeff())) throw ContractError("hexagon circumradius must be below the window side");

    const double sqrt3 = std::numbers::sqrt3;
    auto center = [&](long q, long r) {
        return Vec2(delta * 1.5 * static_cast<double>(q), delta * sqrt3 * (static_cast<double>(r) + 0.5 * static_cast<double>(q)));
    };
    const Vec2 lo = window.min(), hi = window.max();
    const long q_lo = static_cast<long>(std::floor(lo.x() / (1.5 * delta))) - 1;
    const long q_hi = static_cast<long>(std::ceil(hi.x() / (1.5 * delta))) + 1;

    Honeycomb mesh;
    mesh.d = 2;
    mesh.window = window;
    std::vector<std::pair<long, long>> axial;
    std::vector<int> index_of;
    const long r_span_lo = static_cast<long>(std::floor(lo.y() / (sqrt3 * delta))) - (q_hi - q_lo) - 2;
    const long r_span_hi = static_cast<long>(std::ceil(hi.y() / (sqrt3 * delta))) + (q_hi - q_lo) + 2;
    const long r_count = r_span_hi - r_span_lo + 1;
    index_of.assign(static_cast<std::size_t>((q_hi - q_lo + 1) * r_count), -1);

    for (long q = q_lo; q <= q_hi; ++q) {
        for (long r = r_span_lo; r <= r_span_hi; ++r) {
            const Vec2 c = center(q, r);
            if (c.y() < lo.y() - 2 * delta || c.y() > hi.y() + 2 * delta) continue;
            std::vector<Vec2> verts(6);
            for (int k = 0; k < 6; ++k) {
                const double a = std::numbers::pi / 3.0 * k;
                verts[static_cast<std::size_t>(k)] = c + delta * Vec2(std::cos(a), std::sin(a));
            }
            Cell cell = make_polygon_cell(verts, c, window);
            if (!(cell.window_volume > 0.0)) continue;
            index_of[static_cast<std::size_t>((q - q_lo) * r_count + (r - r_span_lo))] = static_cast<int>(mesh.cells.size());
            axial.emplace_back(q, r);
            mesh.diameter_bound = std::max(mesh.diameter_bound, cell.window_diameter);
            mesh.cells.push_back(std::move(cell));
        }
    }

    // Three of the six axial directions enumerate each adjacent pair once.
    const std::pair<long, long> dirs[3] = {{1, 0}, {0, 1}, {1, -1}};
    for (std::size_t a = 0; a < axial.size(); ++a) {
        for (const auto& [dq, dr] : dirs) {
            const long q = axial[a].first + dq, r = axial[a].second + dr;
            if (q < q_lo || q > q_hi || r < r_span_lo || r > r_span_hi) continue;
            const int b = index_of[static_cast<std::size_t>((q - q_lo) * r_count + (r - r_span_lo))];
            if (b < 0) continue;
            const Vec2 ca = mesh.cells[a].ref, cb = mesh.cells[static_cast<std::size_t>(b)].ref;
            const Vec2 n = (cb - ca).normalized();
            const Vec2 mid = 0.5 * (ca + cb);
            const Vec2 along(-n.y(), n.x());
            Facet f;
            f.cell_a = static_cast<int>(a);
            f.cell_b = b;
            f.measure = delta;
            f.normal = n;
            f.vertices.resize(2, 2);
            f.vertices.col(0) = mid - 0.5 * delta * along;
            f.vertices.col(1) = mid + 0.5 * delta * along;
            mesh.facets.push_back(std::move(f));
        }
    }
    return restrict_to_window(std::move(mesh));
}

// ---------------------------------------------------------------------------
// Voronoi honeycomb

WindowedHoneycomb voronoi_honeycomb_2d(const Eigen::Matrix2Xd& points, const Box& window, double guard) {
    check_window(window, 2);
    if (!(guard >= 0.0)) throw ContractError("guard margin must be nonnegative");

    // Merge generators closer than 1e-12 (first occurrence wins).
    std::vector<int> order(static_cast<std::size_t>(points.cols()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return points(0, a) < points(0, b); });
    std::vector<char> dropped(order.size(), 0);
    int merged = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (dropped[static_cast<std::size_t>(order[i])]) continue;
        for (std::size_t j = i + 1; j < order.size() && points(0, order[j]) - points(0, order[i]) <= 1e-12; ++j) {
            if (dropped[static_cast<std::size_t>(order[j])]) continue;
            if ((points.col(order[j]) - points.col(order[i])).norm() <= 1e-12) {
                // Keep the lower original index.
                const int drop = std::max(order[i], order[j]);
                dropped[static_cast<std::size_t>(drop)] = 1;
                ++merged;
            }
        }
    }
    std::vector<int> kept;
    for (Eigen::Index i = 0; i < points.cols(); ++i)
        if (!dropped[static_cast<std::size_t>(i)]) kept.push_back(static_cast<int>(i));
    if (kept.size() < 2) throw ContractError("Voronoi honeycomb needs at least two distinct generators");

    Eigen::Matrix2Xd gen(2, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) gen.col(static_cast<Eigen::Index>(i)) = points.col(kept[i]);

    std::vector<std::vector<int>> nbrs;
    if (gen.cols() == 2) {
        nbrs = {{1}, {0}};
    } else {
        nbrs = delaunay_neighbors(gen);
    }

    Box guard_box = window;
    guard_box.min().array() -= guard;
    guard_box.max().array() += guard;
    const LabeledPolygon outer = box_polygon(guard_box);

    Honeycomb mesh;
    mesh.d = 2;
    mesh.window = window;
    mesh.merged_duplicates = merged;

    std::vector<int> cell_of(static_cast<std::size_t>(gen.cols()), -1);
    std::vector<LabeledPolygon> polys;
    for (Eigen::Index i = 0; i < gen.cols(); ++i) {
        const Vec2 gi = gen.col(i);
        LabeledPolygon poly = outer;
        for (int j : nbrs[static_cast<std::size_t>(i)]) {
            const Vec2 gj = gen.col(j);
            poly = clip(poly, 0.5 * (gi + gj), gj - gi, j);
            if (poly.v.empty()) break;
        }
        if (poly.v.empty()) continue;
        Cell cell = make_polygon_cell(poly.v, gi, window);
        if (!(cell.window_volume > 0.0)) continue;
        cell_of[static_cast<std::size_t>(i)] = static_cast<int>(mesh.cells.size());
        mesh.diameter_bound = std::max(mesh.diameter_bound, cell.window_diameter);
        mesh.cells.push_back(std::move(cell));
        polys.push_back(std::move(poly));
    }

    // Dual edges: edge of cell i generated by the bisector with j.
    for (Eigen::Index i = 0; i < gen.cols(); ++i) {
        const int ci = cell_of[static_cast<std::size_t>(i)];
        if (ci < 0) continue;
        const LabeledPolygon& poly = polys[static_cast<std::size_t>(ci)];
        const double scale = mesh.cells[static_cast<std::size_t>(ci)].window_diameter;
        for (std::size_t e = 0; e < poly.v.size(); ++e) {
            const int j = poly.label[e];
            if (j <= i) continue;
            const int cj = cell_of[static_cast<std::size_t>(j)];
            if (cj < 0) continue;
            const Vec2 a = poly.v[e], b = poly.v[(e + 1) % poly.v.size()];
            const double len = (b - a).norm();
            if (len <= 1e-12 * std::max(scale, 1e-300)) continue;
            Facet f;
            f.cell_a = ci;
            f.cell_b = cj;
            f.measure = len;
            f.normal = (gen.col(j) - gen.col(i)).normalized();
            f.vertices.resize(2, 2);
            f.vertices.col(0) = a;
            f.vertices.col(1) = b;
            mesh.facets.push_back(std::move(f));
        }
    }
    return restrict_to_window(std::move(mesh));
}

// ---------------------------------------------------------------------------

double pyramid_identity_sum(const WindowedHoneycomb& h) {
    double sum = 0.0;
    for (int fi : h.interior_facets) {
        const Facet& f = h.mesh.facets[static_cast<std::size_t>(fi)];
        const double dist = (h.mesh.cells[static_cast<std::size_t>(f.cell_b)].ref -
                             h.mesh.cells[static_cast<std::size_t>(f.cell_a)].ref).norm();
        sum += 2.0 * f.measure * dist;
    }
    return sum;
}

double pyramid_identity_sum(const HypercubicLattice& h) {
    return 2.0 * static_cast<double>(h.interior_facet_count()) * h.facet_measure() * h.spacing();
}

double max_normality_violation(const Honeycomb& h) {
    double worst = 0.0;
    for (const Facet& f : h.facets) {
        const Eigen::VectorXd diff = h.cells[static_cast<std::size_t>(f.cell_b)].ref - h.cells[static_cast<std::size_t>(f.cell_a)].ref;
        const double len = diff.norm();
        if (h.d == 2 && f.vertices.cols() >= 2) {
            const Eigen::VectorXd dir = (f.vertices.col(1) - f.vertices.col(0)).normalized();
            worst = std::max(worst, std::abs(dir.dot(diff)) / len);
        }
        // Facet hyperplane spanned by its vertices must be orthogonal to diff.
        for (Eigen::Index k = 1; k < f.vertices.cols(); ++k) {
            const Eigen::VectorXd edge = f.vertices.col(k) - f.vertices.col(0);
            const double en = edge.norm();
            if (en > 0.0) worst = std::max(worst, std::abs(edge.dot(diff)) / (en * len));
        }
    }
    return worst;
}

void write_edges_csv(std::ostream& out, const Honeycomb& h) {
    if (h.d != 2) throw ContractError("edge-list export is only defined for 2D honeycombs");
    out.imbue(std::locale::classic());
    out << "ax,ay,bx,by,cell_a,cell_b,length\n" << std::setprecision(17);
    for (const Facet& f : h.facets)
        out << f.vertices(0, 0) << ',' << f.vertices(1, 0) << ',' << f.vertices(0, 1) << ',' << f.vertices(1, 1) << ','
            << f.cell_a << ',' << f.cell_b << ',' << f.measure << '\n';
}

}  // namespace excursion
