#include "dcurv/landscape.hpp"
#include "fixtures.hpp"
#include "helpers.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>

using namespace dcurv;
using testutil::kind_of;

namespace {

Objective quadratic(const Matrix& a, double c = 0.0) {
    return [a, c](const Vector& x) { return x.dot(a * x) + c; };
}

HessianEstimate ls_probe(const Objective& f, const Vector& center, Seed seed, double radius_scale = 0.1) {
    ProbeConfig cfg;
    cfg.seed = seed;
    cfg.radius_scale = radius_scale;
    cfg.n_samples = 200;
    return estimate_hessian(sample_around(f, center, cfg), cfg);
}

}  // namespace

TEST_CASE("probe sampling") {
    ProbeConfig cfg;
    cfg.n_samples = 500;
    cfg.seed = 3;
    const Vector center = Vector::Zero(3);
    const ProbeSample s = sample_around([](const Vector& x) { return x.squaredNorm(); }, center, cfg);
    CHECK(s.halvings == 0);
    CHECK(s.radius == 0.1);
    CHECK(s.xs.rows() == 500);
    CHECK(s.ys.minCoeff() >= 0.0);
    CHECK(s.ys.maxCoeff() <= s.radius * s.radius);
    CHECK(s.xs.rowwise().norm().maxCoeff() <= s.radius + 1e-15);
    CHECK(s.xs.rowwise().norm().minCoeff() > 0.0);

    const ProbeSample again = sample_around([](const Vector& x) { return x.squaredNorm(); }, center, cfg);
    CHECK(again.xs == s.xs);
    CHECK(again.ys == s.ys);

    // rho scales with the center norm and ys are centered
    Vector far(2);
    far << 30.0, 40.0;
    cfg.rel_loss_tol = 1e6;
    const ProbeSample big = sample_around([](const Vector& x) { return x.squaredNorm(); }, far, cfg);
    CHECK(big.radius == doctest::Approx(5.0));
    CHECK(big.halvings == 0);
    for (Eigen::Index i = 0; i < 5; ++i)
        CHECK(big.ys[i] == doctest::Approx((far + big.xs.row(i).transpose()).squaredNorm() - 2500.0));

    cfg.shell = true;
    cfg.estimator = LeastSquaresEstimator{1e-9};
    const ProbeSample shell = sample_around([](const Vector& x) { return x.squaredNorm(); }, center, cfg);
    CHECK((shell.xs.rowwise().norm().array() - shell.radius).abs().maxCoeff() < 1e-14);
}

TEST_CASE("locality halving") {
    ProbeConfig cfg;
    cfg.n_samples = 300;
    // steep bowl: rho = 0.1 moves f by up to 1, so the radius must shrink below sqrt(0.1)/10
    const ProbeSample s = sample_around([](const Vector& x) { return 100.0 * x.squaredNorm(); }, Vector::Zero(2), cfg);
    CHECK(s.halvings >= 1);
    const double far = static_cast<double>((s.ys.array().abs() > 0.1).count());
    CHECK(far < 0.05 * 300);
    // a jump at the center cannot be made local
    const Objective step = [](const Vector& x) { return x(0) > 0.0 ? 1.0 : 0.0; };
    CHECK(kind_of([&] { sample_around(step, Vector::Zero(2), cfg); }) == ErrorKind::LocalityFailure);
    const Objective bad = [](const Vector& x) { return x(0) > 0.05 ? std::numeric_limits<double>::quiet_NaN() : 0.0; };
    CHECK(kind_of([&] { sample_around(bad, Vector::Zero(2), cfg); }) == ErrorKind::NonFiniteValue);
    cfg.shell = true;
    CHECK(kind_of([&] { sample_around(quadratic(Matrix::Identity(2, 2)), Vector::Zero(2), cfg); }) ==
          ErrorKind::InvalidConfig);
    cfg.shell = false;
    cfg.n_samples = 5;
    CHECK(kind_of([&] { sample_around(quadratic(Matrix::Identity(3, 3)), Vector::Zero(3), cfg); }) ==
          ErrorKind::InvalidConfig);
}

TEST_CASE("Hessian examples") {
    Matrix a = Matrix::Zero(2, 2);
    a.diagonal() << 1.0, 3.0;
    const HessianEstimate e = ls_probe(quadratic(a), Vector::Zero(2), 0);
    CHECK(std::abs(e.eigenvalues[0] - 2.0) <= 1e-8);
    CHECK(std::abs(e.eigenvalues[1] - 6.0) <= 1e-8);
    CHECK(e.signature == Signature::Minimum);
    CHECK(e.condition_number == doctest::Approx(3.0));

    const auto saddle = builtin_objective("saddle2d", 2);
    CHECK(ls_probe(saddle.f, saddle.center, 1).signature == Signature::Saddle);
    const auto cap = builtin_objective("cap", 4);
    const HessianEstimate c = ls_probe(cap.f, cap.center, 2);
    CHECK(c.signature == Signature::Maximum);
    CHECK(c.negative_count() == 4);

    Matrix flat = Matrix::Zero(3, 3);
    flat(0, 0) = 1.0;
    flat(1, 1) = -2.0;
    CHECK(classify(flat).signature == Signature::Degenerate);
    CHECK(classify(Matrix::Zero(2, 2)).signature == Signature::Degenerate);
    CHECK(to_string(Signature::Saddle) == "Saddle");
    CHECK(kind_of([] { classify(Matrix::Zero(2, 3)); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("least-squares probe is exact on quadratics") {
    for (Seed seed = 0; seed < 10; ++seed) {
        const Index k = 2 + seed % 5;
        const Matrix a = testutil::random_symmetric(k, seed);
        Vector center = Vector::Zero(static_cast<Eigen::Index>(k));
        center[0] = 0.3 * static_cast<double>(seed);
        // f(x) = (x - c)^T A (x - c) + 7 has its critical point at c
        const Objective f = [a, center](const Vector& x) { return (x - center).dot(a * (x - center)) + 7.0; };
        const HessianEstimate e = ls_probe(f, center, seed);
        CAPTURE(seed);
        CHECK(testutil::max_abs_diff(e.h, 2.0 * a) <= 1e-8);
    }
}

TEST_CASE("probe is rotation equivariant") {
    // Quadratic objectives; a finite sample set is not rotation invariant, so
    // anything beyond second order would leak a sample-dependent bias.
    for (Seed seed = 0; seed < 5; ++seed) {
        const Index k = 3 + seed % 3;
        const Matrix a = testutil::random_symmetric(k, seed + 100);
        const Matrix r = testutil::random_orthogonal(k, seed + 200);
        const Objective rotated = [a, r](const Vector& x) {
            const Vector y = r * x;
            return y.dot(a * y) - 2.0;
        };
        const Vector zero = Vector::Zero(static_cast<Eigen::Index>(k));
        const HessianEstimate e0 = ls_probe(quadratic(a, -2.0), zero, seed);
        const HessianEstimate e1 = ls_probe(rotated, zero, seed + 50);
        CAPTURE(seed);
        CHECK((e0.eigenvalues - e1.eigenvalues).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK(testutil::max_abs_diff(e1.h, r.transpose() * e0.h * r) <= 1e-6);
    }
}

TEST_CASE("cubic perturbation stays within 10 percent") {
    const auto obj = builtin_objective("quadratic-cubic", 4);
    const HessianEstimate e = ls_probe(obj.f, obj.center, 4);
    const Vector expected = Vector::LinSpaced(4, 2.0, 8.0);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(e.eigenvalues[i] - expected[i]) <= 0.1 * expected[i]);
}

TEST_CASE("network estimator path runs end to end") {
    NetModel shape;
    shape.ambient = 3;
    shape.d_emb = 6;
    shape.encoder_widths = {8};
    shape.head_widths = {8};
    ProbeConfig cfg;
    cfg.n_samples = 60;
    cfg.estimator = NetEstimator{init_model(shape), KernelConfig{}};
    const auto bowl = builtin_objective("bowl", 2);
    const ProbeSample s = sample_around(bowl.f, bowl.center, cfg);
    const HessianEstimate e = estimate_hessian(s, cfg);
    CHECK(e.h.rows() == 2);
    CHECK(e.h == e.h.transpose());
    CHECK(e.eigenvalues.allFinite());
    // estimate is unchanged when the same samples are given at another scale
    ProbeSample scaled = s;
    scaled.xs *= 3.0;
    scaled.ys *= 9.0;
    scaled.radius *= 3.0;
    CHECK(testutil::max_abs_diff(estimate_hessian(scaled, cfg).h, e.h) <= 1e-8);
    CHECK(kind_of([&] { sample_around(bowl.f, Vector::Zero(4), cfg); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("spectrum report") {
    Matrix pos = Matrix::Identity(4, 4);
    pos.diagonal() << 1.0, 2.0, 3.0, 4.0;
    Matrix sad = pos;
    sad(0, 0) = -1.0;
    sad(1, 1) = -2.0;
    const SpectrumReport r = spectrum_report({classify(sad), classify(pos)}, {"early", "late"});
    CHECK(r.estimates[0].negative_count() == 2);
    CHECK(r.estimates[1].negative_count() == 0);
    CHECK(r.edges.size() == 65);
    CHECK(r.edges.front() == -2.0);
    CHECK(r.edges.back() == 4.0);
    for (std::size_t l = 0; l < 2; ++l) {
        CHECK(r.cdf[l].back() == 1.0);
        Index total = 0;
        for (Index c : r.counts[l]) total += c;
        CHECK(total == 4);
        CHECK(std::is_sorted(r.cdf[l].begin(), r.cdf[l].end()));
    }
    CHECK(r.counts[1].back() == 1);
    const auto j = nlohmann::json::parse(r.json());
    CHECK(j["estimates"][0]["negative_count"] == 2);
    CHECK(j["estimates"][1]["signature"] == "Minimum");
    CHECK(r.summary_csv().find("early,Saddle,2,") != std::string::npos);
    CHECK(r.eigenvalues_csv().rfind("label,index,eigenvalue\n", 0) == 0);
    CHECK(kind_of([] { spectrum_report({}, {}); }) == ErrorKind::InvalidInput);
}

TEST_CASE("toy regression model has a probe-able minimum") {
    const auto toy = builtin_objective("toy-regression", 0, 1);
    CHECK(toy.center.size() == 10);
    CHECK(toy.f(toy.center) < 0.2);
    ProbeConfig cfg;
    cfg.n_samples = 400;
    cfg.radius_scale = 0.01;
    const HessianEstimate e = estimate_hessian(sample_around(toy.f, toy.center, cfg), cfg);
    CHECK(e.eigenvalues.size() == 10);
    CHECK(e.eigenvalues.allFinite());
    // after 200 plain steps the top curvature direction is well resolved
    CHECK(e.eigenvalues.maxCoeff() > 0.0);
    CHECK(kind_of([] { builtin_objective("nope", 2); }) == ErrorKind::InvalidConfig);
}
