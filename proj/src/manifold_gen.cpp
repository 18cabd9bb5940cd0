#include "dcurv/manifold_gen.hpp"

#include "dcurv/error.hpp"
#include "dcurv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace dcurv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBoundarySamples = 720;

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

struct GraphPatch {
    Eigen::Matrix2d q;
    double radius;
};

std::optional<GraphPatch> as_graph(const Surface& surface) {
    return std::visit(
        Overloaded{
            [](const HyperbolicParaboloid& s) -> std::optional<GraphPatch> {
                Eigen::Matrix2d q;
                q << 1.0, 0.0, 0.0, -1.0;
                return GraphPatch{q, s.domain_radius};
            },
            [](const Plane& s) -> std::optional<GraphPatch> {
                return GraphPatch{Eigen::Matrix2d::Zero(), s.domain_radius};
            },
            [](const QuadricGraph& s) -> std::optional<GraphPatch> { return GraphPatch{s.q, s.domain_radius}; },
            [](const auto&) -> std::optional<GraphPatch> { return std::nullopt; },
        },
        surface);
}

void check_params(const Surface& surface) {
    auto positive = [](double v, const char* what) {
        require(std::isfinite(v) && v > 0.0, ErrorKind::InvalidSurfaceParams, std::string(what) + " must be positive");
    };
    std::visit(Overloaded{
                   [&](const Sphere& s) { positive(s.radius, "sphere radius"); },
                   [&](const Torus& s) {
                       positive(s.major, "torus R");
                       positive(s.minor, "torus r");
                       require(s.minor < s.major, ErrorKind::InvalidSurfaceParams, "torus needs r < R");
                   },
                   [&](const Ellipsoid& s) {
                       positive(s.a, "ellipsoid a");
                       positive(s.b, "ellipsoid b");
                       positive(s.c, "ellipsoid c");
                   },
                   [&](const HyperbolicParaboloid& s) { positive(s.domain_radius, "domain radius"); },
                   [&](const Plane& s) { positive(s.domain_radius, "domain radius"); },
                   [&](const Hyperboloid& s) {
                       positive(s.waist, "hyperboloid waist");
                       positive(s.half_height, "hyperboloid half height");
                   },
                   [&](const QuadricGraph& s) {
                       positive(s.domain_radius, "domain radius");
                       require(s.q.allFinite() && s.q(0, 1) == s.q(1, 0), ErrorKind::InvalidSurfaceParams,
                               "graph form must be finite and symmetric");
                   },
               },
               surface);
}

struct RawSample {
    Eigen::Vector3d point;
    double curvature;
};

RawSample draw(const Surface& surface, Rng& rng) {
    if (auto graph = as_graph(surface)) {
        const double rho = graph->radius;
        const Eigen::Matrix2d h = 2.0 * graph->q;
        // |grad f| = |2Qx| peaks on the boundary circle at 2 rho ||Q||_2.
        const double qnorm = graph->q.cwiseAbs().maxCoeff() == 0.0
                                 ? 0.0
                                 : Eigen::JacobiSVD<Eigen::Matrix2d>(graph->q).singularValues()(0);
        const double wmax = std::sqrt(1.0 + 4.0 * rho * rho * qnorm * qnorm);
        for (;;) {
            const Eigen::Vector2d x(uniform(rng, -rho, rho), uniform(rng, -rho, rho));
            const double accept = uniform(rng, 0.0, 1.0);
            if (x.squaredNorm() > rho * rho) continue;
            const Eigen::Vector2d g = h * x;
            if (accept * wmax > std::sqrt(1.0 + g.squaredNorm())) continue;
            const double z = x.dot(graph->q * x);
            return {Eigen::Vector3d(x(0), x(1), z), gaussian_curvature_of_graph(h, g)};
        }
    }
    return std::visit(
        Overloaded{
            [&](const Sphere& s) -> RawSample {
                const Vector u = unit_direction(rng, 3);
                return {Eigen::Vector3d(u(0), u(1), u(2)) * s.radius, 1.0 / (s.radius * s.radius)};
            },
            [&](const Torus& s) -> RawSample {
                const double big = s.major, small = s.minor;
                for (;;) {
                    const double u = uniform(rng, 0.0, 2.0 * kPi);
                    const double v = uniform(rng, 0.0, 2.0 * kPi);
                    const double accept = uniform(rng, 0.0, 1.0);
                    const double ring = big + small * std::cos(v);
                    if (accept * (big + small) > ring) continue;
                    return {Eigen::Vector3d(ring * std::cos(u), ring * std::sin(u), small * std::sin(v)),
                            std::cos(v) / (small * ring)};
                }
            },
            [&](const Ellipsoid& s) -> RawSample {
                const double gmax = 1.0 / std::min({s.a, s.b, s.c});
                for (;;) {
                    const Vector u = unit_direction(rng, 3);
                    const double accept = uniform(rng, 0.0, 1.0);
                    const double g = std::sqrt(u(0) * u(0) / (s.a * s.a) + u(1) * u(1) / (s.b * s.b) +
                                               u(2) * u(2) / (s.c * s.c));
                    if (accept * gmax > g) continue;
                    const Eigen::Vector3d p(s.a * u(0), s.b * u(1), s.c * u(2));
                    const double a2 = s.a * s.a, b2 = s.b * s.b, c2 = s.c * s.c;
                    const double w = p(0) * p(0) / (a2 * a2) + p(1) * p(1) / (b2 * b2) + p(2) * p(2) / (c2 * c2);
                    return {p, 1.0 / (a2 * b2 * c2 * w * w)};
                }
            },
            [&](const Hyperboloid& s) -> RawSample {
                const double h = s.half_height;
                const double wmax = std::cosh(h) * std::sqrt(std::cosh(2.0 * h));
                for (;;) {
                    const double u = uniform(rng, -h, h);
                    const double v = uniform(rng, 0.0, 2.0 * kPi);
                    const double accept = uniform(rng, 0.0, 1.0);
                    if (accept * wmax > std::cosh(u) * std::sqrt(std::cosh(2.0 * u))) continue;
                    const double ring = s.waist * std::cosh(u);
                    const double c2u = std::cosh(2.0 * u);
                    return {Eigen::Vector3d(ring * std::cos(v), ring * std::sin(v), s.waist * std::sinh(u)),
                            -1.0 / (s.waist * s.waist * c2u * c2u)};
                }
            },
            [](const auto&) -> RawSample { fail(ErrorKind::InvalidSurfaceParams, "unhandled surface"); },
        },
        surface);
}

std::vector<Eigen::Vector3d> boundary_curve(const Surface& surface) {
    std::vector<Eigen::Vector3d> out;
    if (auto graph = as_graph(surface)) {
        out.reserve(kBoundarySamples);
        for (int k = 0; k < kBoundarySamples; ++k) {
            const double a = 2.0 * kPi * k / kBoundarySamples;
            const Eigen::Vector2d x(graph->radius * std::cos(a), graph->radius * std::sin(a));
            out.emplace_back(x(0), x(1), x.dot(graph->q * x));
        }
    } else if (const auto* hyp = std::get_if<Hyperboloid>(&surface)) {
        out.reserve(2 * kBoundarySamples);
        const double ring = hyp->waist * std::cosh(hyp->half_height);
        const double z = hyp->waist * std::sinh(hyp->half_height);
        for (double sign : {-1.0, 1.0}) {
            for (int k = 0; k < kBoundarySamples; ++k) {
                const double a = 2.0 * kPi * k / kBoundarySamples;
                out.emplace_back(ring * std::cos(a), ring * std::sin(a), sign * z);
            }
        }
    }
    return out;
}

}  // namespace

std::string surface_name(const Surface& surface) {
    return std::visit(Overloaded{
                          [](const Sphere&) { return std::string("sphere"); },
                          [](const Torus&) { return std::string("torus"); },
                          [](const Ellipsoid&) { return std::string("ellipsoid"); },
                          [](const HyperbolicParaboloid&) { return std::string("hyperbolic-paraboloid"); },
                          [](const Plane&) { return std::string("plane"); },
                          [](const Hyperboloid&) { return std::string("hyperboloid"); },
                          [](const QuadricGraph&) { return std::string("quadric-graph"); },
                      },
                      surface);
}

std::vector<std::pair<std::string, double>> surface_params(const Surface& surface) {
    using P = std::vector<std::pair<std::string, double>>;
    return std::visit(Overloaded{
                          [](const Sphere& s) { return P{{"R", s.radius}}; },
                          [](const Torus& s) { return P{{"R", s.major}, {"r", s.minor}}; },
                          [](const Ellipsoid& s) { return P{{"a", s.a}, {"b", s.b}, {"c", s.c}}; },
                          [](const HyperbolicParaboloid& s) { return P{{"domain_radius", s.domain_radius}}; },
                          [](const Plane& s) { return P{{"domain_radius", s.domain_radius}}; },
                          [](const Hyperboloid& s) { return P{{"waist", s.waist}, {"half_height", s.half_height}}; },
                          [](const QuadricGraph& s) {
                              return P{{"q00", s.q(0, 0)}, {"q01", s.q(0, 1)}, {"q11", s.q(1, 1)},
                                       {"domain_radius", s.domain_radius}};
                          },
                      },
                      surface);
}

double gaussian_curvature_of_graph(const Eigen::Matrix2d& hessian, const Eigen::Vector2d& gradient) {
    const double denom = 1.0 + gradient.squaredNorm();
    return hessian.determinant() / (denom * denom);
}

SurfaceSample sample_surface(const Surface& surface, Index n, double noise_sd, Seed seed) {
    require(n >= 10, ErrorKind::InvalidInput, "sample_surface needs at least 10 points");
    require(std::isfinite(noise_sd) && noise_sd >= 0.0, ErrorKind::InvalidInput, "noise_sd must be >= 0");
    check_params(surface);

    const auto rows = static_cast<Eigen::Index>(n);
    Matrix points(rows, 3);
    Vector curvature(rows);
    Rng rng = make_rng(seed, 0);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const RawSample s = draw(surface, rng);
        points.row(i) = s.point.transpose();
        curvature(i) = s.curvature;
    }
    std::vector<bool> interior = interior_mask(surface, points);
    if (noise_sd > 0.0) {
        Rng noise = make_rng(seed, 1);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) points(i, j) += noise_sd * standard_normal(noise);
    }
    return SurfaceSample{PointCloud(std::move(points)), std::move(curvature), std::move(interior), surface, seed};
}

std::vector<bool> interior_mask(const Surface& surface, const Matrix& points, double fraction) {
    const auto n = static_cast<Index>(points.rows());
    const std::vector<Eigen::Vector3d> boundary = boundary_curve(surface);
    if (boundary.empty()) return std::vector<bool>(n, true);
    require(points.cols() == 3, ErrorKind::ShapeMismatch, "interior mask expects 3-d points");

    std::vector<Eigen::Vector3d> all(boundary);
    for (Index i = 0; i < n; ++i) all.emplace_back(points.row(static_cast<Eigen::Index>(i)).transpose());
    double diameter2 = 0.0;
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b) diameter2 = std::max(diameter2, (all[a] - all[b]).squaredNorm());
    const double cutoff = fraction * std::sqrt(diameter2);

    std::vector<bool> mask(n);
    for (Index i = 0; i < n; ++i) {
        const Eigen::Vector3d p = points.row(static_cast<Eigen::Index>(i)).transpose();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : boundary) best = std::min(best, (p - b).squaredNorm());
        mask[i] = std::sqrt(best) > cutoff;
    }
    return mask;
}

double Quadric::evaluate(const Eigen::Ref<const Vector>& x) const {
    const auto k = static_cast<Eigen::Index>(intrinsic_dim);
    require(x.size() >= k, ErrorKind::ShapeMismatch, "point has fewer coordinates than the quadric's dimension");
    const Vector head = x.head(k);
    return head.dot(q.topLeftCorner(k, k) * head);
}

Quadric random_quadric(Index k, Index ambient, double coeff_range, Seed seed) {
    require(k >= 2 && k <= ambient, ErrorKind::InvalidInput, "random_quadric needs 2 <= k <= K");
    require(std::isfinite(coeff_range) && coeff_range >= 0.0, ErrorKind::InvalidInput, "coeff_range must be >= 0");
    const auto big = static_cast<Eigen::Index>(ambient);
    Quadric out{Matrix::Zero(big, big), k};
    Rng rng = make_rng(seed, 0);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k); ++i) {
        for (Eigen::Index j = i; j < static_cast<Eigen::Index>(k); ++j) {
            const double v = uniform(rng, -coeff_range, coeff_range);
            out.q(i, j) = v;
            out.q(j, i) = v;
        }
    }
    return out;
}

QuadricSample sample_quadric(const Quadric& quadric, Index n, double domain_radius, Seed seed) {
    const Index k = quadric.intrinsic_dim;
    require(k >= 1, ErrorKind::InvalidInput, "quadric has no active dimensions");
    require(n >= triangle_size(k) + 1, ErrorKind::InvalidInput, "too few points to determine the quadric");
    require(std::isfinite(domain_radius) && domain_radius > 0.0, ErrorKind::InvalidInput, "domain_radius must be > 0");
    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(k);
    QuadricSample out{Matrix(rows, cols), Vector(rows)};
    const Matrix block = quadric.q.topLeftCorner(cols, cols);
    Rng rng = make_rng(seed, 0);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Vector dir = unit_direction(rng, k);
        const double r = domain_radius * std::pow(uniform(rng, 0.0, 1.0), 1.0 / static_cast<double>(k));
        out.xs.row(i) = (r * dir).transpose();
        const Vector x = out.xs.row(i).transpose();
        out.ys(i) = x.dot(block * x);
    }
    return out;
}

Vector upper_triangle(const Matrix& q) {
    const Eigen::Index k = q.rows();
    Vector out(k * (k + 1) / 2);
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i; j < k; ++j) out(pos++) = q(i, j);
    return out;
}

Matrix from_upper_triangle(const Eigen::Ref<const Vector>& values, Index dim) {
    const auto k = static_cast<Eigen::Index>(dim);
    require(values.size() == k * (k + 1) / 2, ErrorKind::ShapeMismatch, "upper-triangle length does not match dimension");
    Matrix q(k, k);
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = i; j < k; ++j) {
            q(i, j) = values(pos);
            q(j, i) = values(pos);
            ++pos;
        }
    }
    return q;
}

}  // namespace dcurv
