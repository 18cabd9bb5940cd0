#pragma once

#include "dcurv/error.hpp"
#include "dcurv/point_cloud.hpp"
#include "dcurv/rng.hpp"

#include <doctest.h>

#include <functional>

namespace testutil {

inline dcurv::PointCloud random_cloud(dcurv::Index n, dcurv::Index dim, dcurv::Seed seed, double scale = 1.0) {
    dcurv::Rng rng = dcurv::make_rng(seed, 99);
    dcurv::Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = scale * dcurv::standard_normal(rng);
    return dcurv::PointCloud(std::move(x));
}

inline dcurv::ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const dcurv::Error& e) {
        return e.kind();
    }
    FAIL("expected a dcurv::Error");
    return dcurv::ErrorKind::InvalidInput;
}

inline double max_abs_diff(const dcurv::Matrix& a, const dcurv::Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace testutil
