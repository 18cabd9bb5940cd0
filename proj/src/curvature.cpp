#include "dcurv/curvature.hpp"

#include "dcurv/error.hpp"
#include "dcurv/io.hpp"
#include "dcurv/parallel.hpp"
#include "dcurv/stats.hpp"

#include <algorithm>
#include <cmath>

namespace dcurv {

std::string describe(const RadiusRule& rule) {
    if (const auto* q = std::get_if<QuantileRadius>(&rule)) return "quantile:" + format_double(q->q);
    return "fixed:" + format_double(std::get<FixedRadius>(rule).r);
}

DiffusionSnapshot make_snapshot(const DiffusionOperator& op, int t) {
    DiffusionSnapshot snap;
    snap.t = t;
    snap.transition = power_operator(op, t).p();
    snap.distance = diffusion_distance_matrix(snap.transition, op.stationary());
    return snap;
}

double resolve_radius(const DiffusionSnapshot& snap, Index i, const RadiusRule& rule) {
    if (const auto* fixed = std::get_if<FixedRadius>(&rule)) {
        require(fixed->r >= 0.0, ErrorKind::InvalidConfig, "radius must be nonnegative");
        return fixed->r;
    }
    const double q = std::get<QuantileRadius>(rule).q;
    require(q >= 0.0 && q <= 1.0, ErrorKind::InvalidConfig, "radius quantile must lie in [0, 1]");
    const auto row = snap.distance.row(static_cast<Eigen::Index>(i));
    std::vector<double> others;
    others.reserve(snap.size() - 1);
    for (Eigen::Index j = 0; j < row.size(); ++j)
        if (static_cast<Index>(j) != i) others.push_back(row[j]);
    return stats::quantile(std::move(others), q);
}

DiffusionBall diffusion_ball(const DiffusionSnapshot& snap, Index center, double r) {
    require(center < snap.size(), ErrorKind::InvalidInput, "ball center out of range");
    require(r >= 0.0, ErrorKind::InvalidInput, "ball radius must be nonnegative");
    DiffusionBall ball{center, r, {}};
    const auto row = snap.distance.row(static_cast<Eigen::Index>(center));
    for (Eigen::Index y = 0; y < row.size(); ++y)
        if (row[y] <= r || static_cast<Index>(y) == center) ball.members.push_back(static_cast<Index>(y));
    return ball;
}

DiffusionBall diffusion_ball(const DiffusionOperator& op, int t, Index center, double r) {
    return diffusion_ball(make_snapshot(op, t), center, r);
}

CurvatureField pointwise_curvature(const DiffusionSnapshot& snap, const RadiusRule& rule) {
    const Index n = snap.size();
    CurvatureField field;
    field.t = snap.t;
    field.radius_rule = rule;
    field.values.resize(static_cast<Eigen::Index>(n));
    field.radii.resize(static_cast<Eigen::Index>(n));
    field.ball_sizes.assign(n, 0);
    parallel_for(n, [&](std::size_t i) {
        const double r = resolve_radius(snap, i, rule);
        const auto p_row = snap.transition.row(static_cast<Eigen::Index>(i));
        const auto d_row = snap.distance.row(static_cast<Eigen::Index>(i));
        double mass = 0.0;
        Index count = 0;
        for (Eigen::Index y = 0; y < d_row.size(); ++y) {
            if (d_row[y] <= r || static_cast<Index>(y) == i) {
                mass += p_row[y];
                ++count;
            }
        }
        field.values[static_cast<Eigen::Index>(i)] = mass / static_cast<double>(count);
        field.radii[static_cast<Eigen::Index>(i)] = r;
        field.ball_sizes[i] = count;
    });
    return field;
}

CurvatureField pointwise_curvature(const DiffusionOperator& op, int t, const RadiusRule& rule) {
    return pointwise_curvature(make_snapshot(op, t), rule);
}

double region_curvature(const DiffusionSnapshot& snap, std::span<const Index> region, const RadiusRule& rule) {
    require(!region.empty(), ErrorKind::EmptyRegion, "region has no points");
    const auto n = static_cast<Eigen::Index>(snap.size());
    Vector mass = Vector::Zero(n);
    std::vector<bool> in_union(static_cast<std::size_t>(n), false);
    for (Index u : region) {
        require(u < snap.size(), ErrorKind::InvalidInput, "region index out of range");
        mass += snap.transition.row(static_cast<Eigen::Index>(u)).transpose();
        for (Index y : diffusion_ball(snap, u, resolve_radius(snap, u, rule)).members) in_union[y] = true;
    }
    mass /= static_cast<double>(region.size());
    double total = 0.0;
    Index count = 0;
    for (Eigen::Index y = 0; y < n; ++y) {
        if (in_union[static_cast<std::size_t>(y)]) {
            total += mass[y];
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double region_curvature(const DiffusionOperator& op, int t, std::span<const Index> region, const RadiusRule& rule) {
    return region_curvature(make_snapshot(op, t), region, rule);
}

Correlation curvature_correlation(const CurvatureField& field, const Vector& reference, const std::vector<bool>& mask) {
    require(reference.size() == field.values.size() && mask.size() == static_cast<std::size_t>(reference.size()),
            ErrorKind::InvalidInput, "curvature, reference and mask lengths differ");
    std::vector<double> a, b;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        a.push_back(field.values[static_cast<Eigen::Index>(i)]);
        b.push_back(reference[static_cast<Eigen::Index>(i)]);
    }
    require(a.size() >= 10, ErrorKind::InvalidInput, "mask selects fewer than 10 points");
    return {stats::pearson(a, b), stats::spearman(a, b), a.size()};
}

}  // namespace dcurv
