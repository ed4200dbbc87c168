// Incremental Bowyer-Watson Delaunay triangulation in the plane.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "excursion/errors.hpp"
#include "excursion/tessellation.hpp"

namespace excursion {

namespace {

using Vec2 = Eigen::Vector2d;

struct Triangle {
    std::array<int, 3> v;   // counter-clockwise
    std::array<int, 3> nb;  // nb[i] lies across the edge opposite v[i]; -1 if none
    bool alive = true;
};

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when d lies strictly inside the circumcircle of the ccw triangle abc.
// Exactly cocircular points count as outside, which fixes one of the
// admissible triangulations deterministically.
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const long double adx = a.x() - d.x(), ady = a.y() - d.y();
    const long double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const long double cdx = c.x() - d.x(), cdy = c.y() - d.y();
    const long double ad = adx * adx + ady * ady;
    const long double bd = bdx * bdx + bdy * bdy;
    const long double cd = cdx * cdx + cdy * cdy;
    return static_cast<double>(adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                               ad * (bdx * cdy - bdy * cdx));
}

class BowyerWatson {
public:
    explicit BowyerWatson(std::vector<Vec2> pts) : p_(std::move(pts)), n_(static_cast<int>(p_.size())) {}

    std::vector<std::vector<int>> run() {
        add_super_triangle();
        for (int i : insertion_order()) insert(i);

        std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n_));
        for (const Triangle& t : tris_) {
            if (!t.alive) continue;
            for (int e = 0; e < 3; ++e) {
                const int a = t.v[e], b = t.v[(e + 1) % 3];
                if (a < n_ && b < n_) {
                    nbrs[static_cast<std::size_t>(a)].push_back(b);
                    nbrs[static_cast<std::size_t>(b)].push_back(a);
                }
            }
        }
        for (auto& list : nbrs) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
        return nbrs;
    }

private:
    std::vector<Vec2> p_;
    int n_;
    std::vector<Triangle> tris_;
    std::vector<unsigned> stamp_;
    unsigned generation_ = 0;
    int last_ = 0;

    void add_super_triangle() {
        Vec2 lo = p_[0], hi = p_[0];
        for (const Vec2& q : p_) {
            lo = lo.cwiseMin(q);
            hi = hi.cwiseMax(q);
        }
        const Vec2 c = 0.5 * (lo + hi);
        const double r = std::max(1.0, (hi - lo).maxCoeff()) * 64.0;
        p_.push_back(c + Vec2(-2.0 * r, -r));
        p_.push_back(c + Vec2(2.0 * r, -r));
        p_.push_back(c + Vec2(0.0, 2.0 * r));
        tris_.push_back({{n_, n_ + 1, n_ + 2}, {-1, -1, -1}, true});
    }

    // Snake order over a coarse bucket grid keeps the point-location walk short.
    std::vector<int> insertion_order() const {
        Vec2 lo = p_[0], hi = p_[0];
        for (int i = 0; i < n_; ++i) {
            lo = lo.cwiseMin(p_[static_cast<std::size_t>(i)]);
            hi = hi.cwiseMax(p_[static_cast<std::size_t>(i)]);
        }
        const int buckets = std::max(1, static_cast<int>(std::sqrt(n_ / 4.0)));
        const Vec2 span = (hi - lo).cwiseMax(Vec2::Constant(1e-300));
        auto key = [&](int i) {
            const Vec2& q = p_[static_cast<std::size_t>(i)];
            const int row = std::min(buckets - 1, static_cast<int>((q.y() - lo.y()) / span.y() * buckets));
            const double x = (row % 2 == 0) ? q.x() : -q.x();
            return std::pair<int, double>(row, x);
        };
        std::vector<int> order(static_cast<std::size_t>(n_));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });
        return order;
    }

    bool contains(const Triangle& t, const Vec2& q) const {
        for (int e = 0; e < 3; ++e)
            if (orient(p_[static_cast<std::size_t>(t.v[(e + 1) % 3])], p_[static_cast<std::size_t>(t.v[(e + 2) % 3])], q) < 0)
                return false;
        return true;
    }

    int locate(const Vec2& q) {
        int t = last_;
        if (!tris_[static_cast<std::size_t>(t)].alive) t = static_cast<int>(tris_.size()) - 1;
        const std::size_t max_steps = 4 * tris_.size() + 16;
        for (std::size_t step = 0; step < max_steps; ++step) {
            const Triangle& tri = tris_[static_cast<std::size_t>(t)];
            int next = -1;
            for (int e = 0; e < 3; ++e) {
                const Vec2& a = p_[static_cast<std::size_t>(tri.v[(e + 1) % 3])];
                const Vec2& b = p_[static_cast<std::size_t>(tri.v[(e + 2) % 3])];
                if (orient(a, b, q) < 0 && tri.nb[e] >= 0) {
                    next = tri.nb[e];
                    break;
                }
            }
            if (next < 0) return t;
            t = next;
        }
        for (std::size_t i = 0; i < tris_.size(); ++i)
            if (tris_[i].alive && contains(tris_[i], q)) return static_cast<int>(i);
        throw NumericError("Delaunay point location failed");
    }

    bool in_circle(int t, const Vec2& q) const {
        const Triangle& tri = tris_[static_cast<std::size_t>(t)];
        return incircle(p_[static_cast<std::size_t>(tri.v[0])], p_[static_cast<std::size_t>(tri.v[1])],
                        p_[static_cast<std::size_t>(tri.v[2])], q) > 0;
    }

    void insert(int pi) {
        const Vec2& q = p_[static_cast<std::size_t>(pi)];
        const int start = locate(q);

        ++generation_;
        stamp_.resize(tris_.size(), 0);
        auto in_cavity = [&](int t) -> bool { return stamp_[static_cast<std::size_t>(t)] == generation_; };
        auto mark = [&](int t) { stamp_[static_cast<std::size_t>(t)] = generation_; };
        std::vector<int> cavity{start};
        mark(start);
        for (std::size_t k = 0; k < cavity.size(); ++k) {
            for (int nb : tris_[static_cast<std::size_t>(cavity[k])].nb) {
                if (nb < 0 || in_cavity(nb) || !in_circle(nb, q)) continue;
                mark(nb);
                cavity.push_back(nb);
            }
        }

        struct BoundaryEdge {
            int a, b, outer, inner;
        };
        std::vector<BoundaryEdge> boundary;
        // Grow the cavity until every boundary edge sees q strictly on its left,
        // which keeps the cavity star-shaped under rounding.
        for (bool grew = true; grew;) {
            grew = false;
            boundary.clear();
            for (int t : cavity) {
                const Triangle& tri = tris_[static_cast<std::size_t>(t)];
                for (int e = 0; e < 3; ++e) {
                    const int nb = tri.nb[e];
                    if (nb >= 0 && in_cavity(nb)) continue;
                    const int a = tri.v[(e + 1) % 3], b = tri.v[(e + 2) % 3];
                    if (nb >= 0 && orient(p_[static_cast<std::size_t>(a)], p_[static_cast<std::size_t>(b)], q) <= 0) {
                        mark(nb);
                        cavity.push_back(nb);
                        grew = true;
                        break;
                    }
                    boundary.push_back({a, b, nb, t});
                }
                if (grew) break;
            }
        }

        for (int t : cavity) tris_[static_cast<std::size_t>(t)].alive = false;

        const int first = static_cast<int>(tris_.size());
        for (std::size_t k = 0; k < boundary.size(); ++k) {
            const BoundaryEdge& be = boundary[k];
            tris_.push_back({{be.a, be.b, pi}, {-1, -1, be.outer}, true});
            if (be.outer >= 0) {
                Triangle& o = tris_[static_cast<std::size_t>(be.outer)];
                for (int& slot : o.nb)
                    if (slot == be.inner) slot = first + static_cast<int>(k);
            }
        }
        for (std::size_t k = 0; k < boundary.size(); ++k) {
            Triangle& t = tris_[first + k];
            for (std::size_t j = 0; j < boundary.size(); ++j) {
                // Opposite a: edge (b, q), shared with the triangle starting at b.
                if (boundary[j].a == t.v[1]) t.nb[0] = first + static_cast<int>(j);
                // Opposite b: edge (q, a), shared with the triangle ending at a.
                if (boundary[j].b == t.v[0]) t.nb[1] = first + static_cast<int>(j);
            }
        }
        last_ = static_cast<int>(tris_.size()) - 1;

        if (tris_.size() > 8 * p_.size() + 64) compact();
    }

    void compact() {
        std::vector<int> remap(tris_.size(), -1);
        std::vector<Triangle> kept;
        kept.reserve(2 * p_.size() + 8);
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            if (!tris_[i].alive) continue;
            remap[i] = static_cast<int>(kept.size());
            kept.push_back(tris_[i]);
        }
        for (Triangle& t : kept)
            for (int& nb : t.nb)
                if (nb >= 0) nb = remap[static_cast<std::size_t>(nb)];
        tris_ = std::move(kept);
        stamp_.assign(tris_.size(), 0);
        last_ = static_cast<int>(tris_.size()) - 1;
    }
};

}  // namespace

std::vector<std::vector<int>> delaunay_neighbors(const Eigen::Matrix2Xd& points) {
    const Eigen::Index n = points.cols();
    if (n < 3) throw ContractError("Delaunay triangulation needs at least three points");
    std::vector<Vec2> pts(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = points.col(i);

    // Collinearity check against the two points furthest apart.
    Eigen::Index far = 0;
    for (Eigen::Index i = 1; i < n; ++i)
        if ((points.col(i) - points.col(0)).squaredNorm() > (points.col(far) - points.col(0)).squaredNorm()) far = i;
    const double scale = (points.col(far) - points.col(0)).norm();
    if (scale == 0.0) throw ContractError("Delaunay triangulation needs distinct points");
    bool collinear = true;
    for (Eigen::Index i = 0; i < n && collinear; ++i)
        if (std::abs(orient(pts[0], pts[static_cast<std::size_t>(far)], pts[static_cast<std::size_t>(i)])) >
            1e-12 * scale * scale)
            collinear = false;
    if (collinear) throw ContractError("Delaunay triangulation of collinear points");

    return BowyerWatson(std::move(pts)).run();
}

}  // namespace excursion
