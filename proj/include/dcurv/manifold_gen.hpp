#pragma once

#include "dcurv/point_cloud.hpp"
#include "dcurv/types.hpp"

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dcurv {

struct Sphere {
    double radius = 1.0;
};

/// Ring torus; requires 0 < minor < major.
struct Torus {
    double major = 2.0;
    double minor = 1.0;
};

struct Ellipsoid {
    double a = 1.0;
    double b = 1.0;
    double c = 3.0;
};

/// z = x^2 - y^2 over the disk of the given radius.
struct HyperbolicParaboloid {
    double domain_radius = 2.0;
};

/// Flat disk z = 0.
struct Plane {
    double domain_radius = 2.0;
};

/// One-sheet hyperboloid (w cosh u cos v, w cosh u sin v, w sinh u), |u| <= half_height.
struct Hyperboloid {
    double waist = 1.0;
    double half_height = 1.0;
};

/// z = x^T Q x over the disk of the given radius.
struct QuadricGraph {
    Eigen::Matrix2d q = Eigen::Matrix2d::Identity();
    double domain_radius = 1.0;
};

using Surface = std::variant<Sphere, Torus, Ellipsoid, HyperbolicParaboloid, Plane, Hyperboloid, QuadricGraph>;

std::string surface_name(const Surface& surface);
std::vector<std::pair<std::string, double>> surface_params(const Surface& surface);

struct SurfaceSample {
    PointCloud cloud;
    Vector gauss_curvature;     ///< analytic, at the noiseless sample location
    std::vector<bool> interior; ///< far enough from the patch boundary (all true on closed surfaces)
    Surface surface;
    Seed seed = 0;
};

/// Area-uniform sample of n points with Gaussian ambient noise added afterwards.
SurfaceSample sample_surface(const Surface& surface, Index n, double noise_sd, Seed seed);

/// Points whose ambient distance to the patch boundary exceeds `fraction` of the patch diameter.
std::vector<bool> interior_mask(const Surface& surface, const Matrix& points, double fraction = 0.1);

/// det(H) / (1 + |grad f|^2)^2 for the graph of f over the plane.
double gaussian_curvature_of_graph(const Eigen::Matrix2d& hessian, const Eigen::Vector2d& gradient);

/// Symmetric K x K form whose nonzero entries sit in the leading k x k block.
struct Quadric {
    Matrix q;
    Index intrinsic_dim = 0;

    Index ambient_dim() const noexcept { return static_cast<Index>(q.rows()); }
    /// x^T Q x over the leading intrinsic_dim coordinates of x.
    double evaluate(const Eigen::Ref<const Vector>& x) const;
};

/// Upper triangle of the k x k block i.i.d. uniform on [-range, range], mirrored.
Quadric random_quadric(Index k, Index ambient, double coeff_range, Seed seed);

struct QuadricSample {
    Matrix xs;  ///< n x k, uniform in the k-ball
    Vector ys;  ///< x^T Q x
};

QuadricSample sample_quadric(const Quadric& quadric, Index n, double domain_radius, Seed seed);

/// Upper-triangular entries (row-major, i <= j) and the inverse.
Vector upper_triangle(const Matrix& q);
Matrix from_upper_triangle(const Eigen::Ref<const Vector>& values, Index dim);
inline constexpr Index triangle_size(Index k) noexcept { return k * (k + 1) / 2; }

}  // namespace dcurv
