#pragma once

#include "dcurv/geometry.hpp"
#include "dcurv/types.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dcurv {

/// Per-point radius: the q-quantile of the point's diffusion distances to all other points.
struct QuantileRadius {
    double q = 0.1;
};

/// One radius shared by every point.
struct FixedRadius {
    double r = 0.0;
};

using RadiusRule = std::variant<QuantileRadius, FixedRadius>;

std::string describe(const RadiusRule& rule);

inline constexpr int kDefaultDiffusionTime = 8;

/// P^t together with all pairwise diffusion distances at the same t.
struct DiffusionSnapshot {
    int t = 1;
    Matrix transition;
    Matrix distance;
    Index size() const noexcept { return static_cast<Index>(transition.rows()); }
};

DiffusionSnapshot make_snapshot(const DiffusionOperator& op, int t);

struct DiffusionBall {
    Index center = 0;
    double radius = 0.0;
    std::vector<Index> members;  ///< sorted, includes center
};

struct CurvatureField {
    Vector values;
    int t = 0;
    RadiusRule radius_rule;
    std::vector<Index> ball_sizes;
    Vector radii;
};

struct Correlation {
    double pearson = 0.0;
    double spearman = 0.0;
    Index count = 0;
};

DiffusionBall diffusion_ball(const DiffusionSnapshot& snap, Index center, double r);
DiffusionBall diffusion_ball(const DiffusionOperator& op, int t, Index center, double r);

/// Radius for point i under the rule.
double resolve_radius(const DiffusionSnapshot& snap, Index i, const RadiusRule& rule);

/// C(x_i) = sum over the diffusion ball of P^t[i, y], divided by the ball size.
CurvatureField pointwise_curvature(const DiffusionSnapshot& snap, const RadiusRule& rule = QuantileRadius{});
CurvatureField pointwise_curvature(const DiffusionOperator& op, int t, const RadiusRule& rule = QuantileRadius{});

/// Diffuses the uniform distribution on `region` and averages its mass over the
/// union of the members' diffusion balls.
double region_curvature(const DiffusionSnapshot& snap, std::span<const Index> region, const RadiusRule& rule);
double region_curvature(const DiffusionOperator& op, int t, std::span<const Index> region, const RadiusRule& rule);

/// Pearson and Spearman correlation over the masked points (at least 10).
Correlation curvature_correlation(const CurvatureField& field, const Vector& reference, const std::vector<bool>& mask);

}  // namespace dcurv
