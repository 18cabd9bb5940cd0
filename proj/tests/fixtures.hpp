#pragma once

#include "dcurv/quadric_net.hpp"
#include "dcurv/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace testutil {

// K = 1, no diffusion coordinates, encoder {1}, head {2}: 3 + 4 + 3 = 10 weights.
inline dcurv::NetModel mini_model(double l1, dcurv::Seed seed) {
    dcurv::NetModel shape;
    shape.ambient = 1;
    shape.d_emb = 0;
    shape.encoder_widths = {1};
    shape.head_widths = {2};
    shape.l1_weight = l1;
    shape.seed = seed;
    dcurv::NetModel m = dcurv::init_model(shape);
    // biases start at zero; move them off so every weight is exercised
    dcurv::Rng rng = dcurv::make_rng(seed, 7);
    for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights[i] += 0.3 * dcurv::standard_normal(rng);
    return m;
}

inline dcurv::TrainingExample mini_example(dcurv::Seed seed) {
    dcurv::Rng rng = dcurv::make_rng(seed, 8);
    dcurv::TrainingExample ex;
    const Eigen::Index n = 12;
    ex.phi = dcurv::Matrix(n, 0);
    ex.coords.resize(n, 1);
    ex.loss_axis.resize(n);
    const double q = 0.8;
    for (Eigen::Index i = 0; i < n; ++i) {
        ex.coords(i, 0) = dcurv::standard_normal(rng);
        ex.loss_axis[i] = q * ex.coords(i, 0) * ex.coords(i, 0);
    }
    ex.target = dcurv::Vector::Constant(1, q);
    ex.k = 1;
    return ex;
}

struct GradCheck {
    double worst_relative = 0.0;
    int directions = 0;
    dcurv::Index parameters = 0;
};

// Directional derivative from the analytic gradient vs central differences.
inline GradCheck gradient_check(int directions, double step, dcurv::Seed seed) {
    const dcurv::NetModel model = mini_model(0.05, seed);
    const dcurv::TrainingExample ex = mini_example(seed);
    dcurv::Vector grad = dcurv::Vector::Zero(model.weights.size());
    dcurv::example_loss(model, ex, &grad);
    dcurv::Rng rng = dcurv::make_rng(seed, 9);
    GradCheck out;
    out.parameters = model.weights.size();
    for (int d = 0; d < directions; ++d) {
        dcurv::Vector u(model.weights.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = dcurv::standard_normal(rng);
        u.normalize();
        dcurv::NetModel plus = model, minus = model;
        plus.weights += step * u;
        minus.weights -= step * u;
        const double numeric = (dcurv::example_loss(plus, ex) - dcurv::example_loss(minus, ex)) / (2.0 * step);
        const double analytic = grad.dot(u);
        const double rel = std::abs(numeric - analytic) / std::max({std::abs(numeric), std::abs(analytic), 1e-8});
        out.worst_relative = std::max(out.worst_relative, rel);
        ++out.directions;
    }
    return out;
}

// Q diag(lambda) Q^T with Haar-ish orthogonal Q and |lambda| in [0.1, 3], signs chosen at random.
inline dcurv::Matrix random_symmetric(dcurv::Index k, dcurv::Seed seed, dcurv::Vector* eigenvalues = nullptr) {
    dcurv::Rng rng = dcurv::make_rng(seed, 10);
    const auto n = static_cast<Eigen::Index>(k);
    dcurv::Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = dcurv::standard_normal(rng);
    const dcurv::Matrix q = Eigen::HouseholderQR<dcurv::Matrix>(g).householderQ();
    dcurv::Vector lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mag = dcurv::uniform(rng, 0.1, 3.0);
        lambda[i] = dcurv::uniform(rng, 0.0, 1.0) < 0.5 ? -mag : mag;
    }
    if (eigenvalues) *eigenvalues = lambda;
    dcurv::Matrix a = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose());
}

inline dcurv::Matrix random_orthogonal(dcurv::Index k, dcurv::Seed seed) {
    dcurv::Rng rng = dcurv::make_rng(seed, 11);
    const auto n = static_cast<Eigen::Index>(k);
    dcurv::Matrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = dcurv::standard_normal(rng);
    return Eigen::HouseholderQR<dcurv::Matrix>(g).householderQ();
}

}  // namespace testutil
