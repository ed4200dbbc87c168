#include "excursion/crofton.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <locale>
#include <numbers>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/Householder>
#include <Eigen/QR>

#include "excursion/errors.hpp"
#include "excursion/field_models.hpp"
#include "excursion/parallel.hpp"
#include "excursion/rng.hpp"
#include "excursion/stats.hpp"

namespace excursion {

IntersectionOracle sphere_oracle(const Eigen::VectorXd& center, double radius) {
    return [center, radius](const ParamLine& l) {
        const Eigen::VectorXd rel = center - l.offset;
        const double dist2 = (rel - rel.dot(l.direction) * l.direction).squaredNorm();
        const double r2 = radius * radius;
        if (dist2 < r2) return 2;
        return dist2 == r2 && radius > 0.0 ? 1 : 0;
    };
}

IntersectionOracle polygon_boundary_oracle(const Eigen::Matrix2Xd& vertices) {
    return [vertices](const ParamLine& l) {
        const Eigen::Vector2d s = l.direction.head<2>();
        const Eigen::Vector2d o = l.offset.head<2>();
        const Eigen::Vector2d n(-s.y(), s.x());
        int count = 0;
        const Eigen::Index m = vertices.cols();
        for (Eigen::Index k = 0; k < m; ++k) {
            const Eigen::Vector2d p0 = vertices.col(k), p1 = vertices.col((k + 1) % m);
            const double s0 = n.dot(p0 - o), s1 = n.dot(p1 - o);
            if (s0 == s1) continue;  // parallel: hits have measure zero
            const double t = s0 / (s0 - s1);
            if (t >= 0.0 && t < 1.0) ++count;
        }
        return count;
    };
}

IntersectionOracle square_boundary_oracle(const Eigen::Vector2d& center, double side) {
    const double h = 0.5 * side;
    Eigen::Matrix2Xd v(2, 4);
    v << -h, h, h, -h,
         -h, -h, h, h;
    v.colwise() += center;
    return polygon_boundary_oracle(v);
}

CroftonEstimate crofton_measure_mc(const IntersectionOracle& shape, int d, std::int64_t n_lines, double R,
                                   std::uint64_t seed, unsigned threads) {
    if (n_lines <= 0) throw ContractError("Crofton estimate needs at least one line");
    if (d < 2) throw ContractError("Crofton estimate needs d >= 2");
    if (!(R > 0.0)) throw ContractError("bounding radius must be positive");

    // Blocks of lines with their own streams; the layout depends only on n_lines.
    constexpr std::int64_t kBlock = 4096;
    const std::int64_t blocks = (n_lines + kBlock - 1) / kBlock;
    std::vector<double> sums(static_cast<std::size_t>(blocks)), sq_sums(static_cast<std::size_t>(blocks));

    parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
        Engine rng = make_engine(mix_seed(seed, b));
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const std::int64_t begin = static_cast<std::int64_t>(b) * kBlock;
        const std::int64_t end = std::min(n_lines, begin + kBlock);
        double s = 0.0, s2 = 0.0;
        Eigen::VectorXd g(d), w(d - 1);
        for (std::int64_t i = begin; i < end; ++i) {
            for (int k = 0; k < d; ++k) g[k] = normal(rng);
            ParamLine line;
            line.direction = g.normalized();
            // Columns 1..d-1 of the Householder Q span the orthogonal complement.
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(line.direction);
            const Eigen::MatrixXd Q = qr.householderQ();
            for (int k = 0; k < d - 1; ++k) w[k] = normal(rng);
            const double radius = R * std::pow(unit(rng), 1.0 / (d - 1));
            line.offset = Q.rightCols(d - 1) * (radius * w.normalized());
            const double c = shape(line);
            s += c;
            s2 += c * c;
        }
        sums[b] = s;
        sq_sums[b] = s2;
    });

    const double n = static_cast<double>(n_lines);
    const double mean = stats::pairwise_sum(sums) / n;
    const double mean_sq = stats::pairwise_sum(sq_sums) / n;
    const double var = n > 1 ? std::max(0.0, (mean_sq - mean * mean) * n / (n - 1)) : 0.0;

    // sqrt(pi) Gamma((d+1)/2) / Gamma(d/2) times the offset-disk measure.
    const double disk = std::pow(R, d - 1) * std::pow(std::numbers::pi, 0.5 * (d - 1)) / std::tgamma(0.5 * (d + 1));
    const double scale = 0.5 * beta_d(d) * disk;

    CroftonEstimate e;
    e.n_lines = n_lines;
    e.measure = scale * mean;
    e.std_error = scale * std::sqrt(var / n);
    return e;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n, double a, double b) {
    if (n < 1) throw ContractError("quadrature order must be >= 1");
    // Jacobi matrix of the Legendre recurrence.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = beta;
        J(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
    const Eigen::VectorXd x = eig.eigenvalues();
    const Eigen::VectorXd w = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    return {(mid + half * x.array()).matrix(), half * w};
}

double sphere_l1_average(int d) {
    if (d < 1) throw DomainError("sphere dimension must be >= 1");
    constexpr double half_pi = std::numbers::pi / 2;
    if (d == 1) return 1.0;
    if (d == 2) {
        // Quarter circle by symmetry.
        const auto [x, w] = gauss_legendre(48, 0.0, half_pi);
        return (w.array() * (x.array().cos() + x.array().sin())).sum() / half_pi;
    }
    if (d == 3) {
        // First octant in polar (theta) and azimuthal (phi) angles; area element sin(theta).
        const auto [x, w] = gauss_legendre(48, 0.0, half_pi);
        double integral = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double st = std::sin(x[i]), ct = std::cos(x[i]);
            for (Eigen::Index j = 0; j < x.size(); ++j) {
                const double l1 = st * std::cos(x[j]) + st * std::sin(x[j]) + ct;
                integral += w[i] * w[j] * l1 * st;
            }
        }
        return integral / half_pi;  // octant area is pi/2
    }
    // E|r|_1 = d E|r_1|, where r_1 has density proportional to (1 - t^2)^{(d-3)/2}.
    // With t = sin(phi) both integrands are smooth on [0, pi/2].
    const auto [x, w] = gauss_legendre(64, 0.0, half_pi);
    const Eigen::ArrayXd kernel = x.array().cos().pow(d - 2);
    const double num = (w.array() * x.array().sin() * kernel).sum();
    const double den = (w.array() * kernel).sum();
    return d * num / den;
}

double LevelPolyline::total_length() const {
    double s = 0.0;
    for (const LevelSegment& seg : segments) s += seg.length();
    return s;
}

LevelPolyline extract_level_polyline_2d(const Eigen::Ref<const Eigen::VectorXd>& values, const GridSpec& grid,
                                        double u) {
    if (grid.d != 2) throw ContractError("level polyline extraction is two-dimensional");
    if (values.size() != grid.node_count()) throw ContractError("grid values do not match the lattice shape");
    const std::int64_t n = grid.side();
    const double h = grid.spacing;
    auto at = [&](std::int64_t i, std::int64_t j) { return values[i + n * j]; };
    auto pos = [&](std::int64_t i, std::int64_t j) {
        return Eigen::Vector2d(h * static_cast<double>(i - grid.half_extent), h * static_cast<double>(j - grid.half_extent));
    };
    // Central differences inside, one-sided on the border.
    auto grad = [&](std::int64_t i, std::int64_t j) {
        const std::int64_t i0 = std::max<std::int64_t>(i - 1, 0), i1 = std::min<std::int64_t>(i + 1, n - 1);
        const std::int64_t j0 = std::max<std::int64_t>(j - 1, 0), j1 = std::min<std::int64_t>(j + 1, n - 1);
        return Eigen::Vector2d((at(i1, j) - at(i0, j)) / (h * static_cast<double>(i1 - i0)),
                               (at(i, j1) - at(i, j0)) / (h * static_cast<double>(j1 - j0)));
    };

    LevelPolyline out;
    for (std::int64_t j = 0; j + 1 < n; ++j) {
        for (std::int64_t i = 0; i + 1 < n; ++i) {
            // Corners counter-clockwise: 0 (i,j), 1 (i+1,j), 2 (i+1,j+1), 3 (i,j+1).
            const std::array<double, 4> v{at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
            const std::array<Eigen::Vector2d, 4> p{pos(i, j), pos(i + 1, j), pos(i + 1, j + 1), pos(i, j + 1)};
            std::array<bool, 4> up{};
            for (int k = 0; k < 4; ++k) up[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(k)] >= u;

            // Edge e joins corner e and e+1.
            std::array<Eigen::Vector2d, 4> cross;
            std::array<bool, 4> has{};
            int crossings = 0;
            for (int e = 0; e < 4; ++e) {
                const auto a = static_cast<std::size_t>(e), b = static_cast<std::size_t>((e + 1) % 4);
                if (up[a] == up[b]) continue;
                const double t = (u - v[a]) / (v[b] - v[a]);
                cross[a] = p[a] + t * (p[b] - p[a]);
                has[a] = true;
                ++crossings;
            }
            if (crossings == 0) continue;

            std::vector<std::pair<int, int>> pairs;
            if (crossings == 2) {
                int first = -1, second = -1;
                for (int e = 0; e < 4; ++e)
                    if (has[static_cast<std::size_t>(e)]) (first < 0 ? first : second) = e;
                pairs.emplace_back(first, second);
            } else {
                ++out.saddle_cells;
                const bool centre_up = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= u;
                // Edges 3,0 meet at corner 0; 0,1 at corner 1; 1,2 at corner 2; 2,3 at corner 3.
                if (centre_up == up[0]) {
                    pairs.emplace_back(0, 1);  // isolate corner 1
                    pairs.emplace_back(2, 3);  // isolate corner 3
                } else {
                    pairs.emplace_back(3, 0);  // isolate corner 0
                    pairs.emplace_back(1, 2);  // isolate corner 2
                }
            }

            for (const auto& [e0, e1] : pairs) {
                LevelSegment seg;
                seg.a = cross[static_cast<std::size_t>(e0)];
                seg.b = cross[static_cast<std::size_t>(e1)];
                if (seg.length() == 0.0) continue;
                const Eigen::Vector2d mid = 0.5 * (seg.a + seg.b);
                const double fx = (mid.x() - p[0].x()) / h, fy = (mid.y() - p[0].y()) / h;
                const Eigen::Vector2d g = (1 - fx) * (1 - fy) * grad(i, j) + fx * (1 - fy) * grad(i + 1, j) +
                                          fx * fy * grad(i + 1, j + 1) + (1 - fx) * fy * grad(i, j + 1);
                if (g.norm() > 0.0) {
                    seg.normal = g.normalized();
                } else {
                    // Flat gradient: geometric normal, pointed at the higher corners.
                    const Eigen::Vector2d dir = (seg.b - seg.a).normalized();
                    seg.normal = Eigen::Vector2d(-dir.y(), dir.x());
                    Eigen::Vector2d hi = Eigen::Vector2d::Zero();
                    for (int k = 0; k < 4; ++k)
                        if (up[static_cast<std::size_t>(k)]) hi += p[static_cast<std::size_t>(k)] - mid;
                    if (seg.normal.dot(hi) < 0.0) seg.normal = -seg.normal;
                }
                out.segments.push_back(seg);
            }
        }
    }
    return out;
}

double l1_weighted_length(const LevelPolyline& p) {
    double s = 0.0;
    for (const LevelSegment& seg : p.segments) s += seg.length() * seg.normal.lpNorm<1>();
    return s;
}

void write_csv(std::ostream& out, const LevelPolyline& p) {
    out.imbue(std::locale::classic());
    out << "x1,y1,x2,y2,nx,ny\n" << std::setprecision(17);
    for (const LevelSegment& s : p.segments)
        out << s.a.x() << ',' << s.a.y() << ',' << s.b.x() << ',' << s.b.y() << ',' << s.normal.x() << ','
            << s.normal.y() << '\n';
}

}  // namespace excursion
