#include "dcurv/experiments.hpp"
#include "dcurv/quadric_fit.hpp"
#include "dcurv/quadric_net.hpp"
#include "dcurv/stats.hpp"
#include "fixtures.hpp"
#include "helpers.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <sstream>

using namespace dcurv;
using testutil::kind_of;

namespace {

CorpusConfig small_corpus(Index n, Seed seed) {
    CorpusConfig c;
    c.n_quadrics = n;
    c.n_points = 40;
    c.dims = {2};
    c.ambient = 2;
    c.d_emb = 6;
    c.seed = seed;
    return c;
}

NetModel small_shape(const CorpusConfig& c, double l1 = 0.0) {
    NetModel m;
    m.ambient = c.ambient;
    m.d_emb = c.d_emb;
    m.t = c.t;
    m.encoder_widths = {16};
    m.head_widths = {16};
    m.l1_weight = l1;
    m.seed = 5;
    return init_model(m);
}

// Running median of 5, shrinking at the ends.
std::vector<double> median5(const std::vector<double>& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t lo = i < 2 ? 0 : i - 2, hi = std::min(x.size(), i + 3);
        std::vector<double> w(x.begin() + static_cast<std::ptrdiff_t>(lo), x.begin() + static_cast<std::ptrdiff_t>(hi));
        out[i] = stats::quantile(w, 0.5);
    }
    return out;
}

}  // namespace

TEST_CASE("corpus examples") {
    CorpusConfig c = small_corpus(1, 3);
    c.ambient = 5;
    const auto corpus = build_corpus(c);
    REQUIRE(corpus.size() == 1);
    CHECK(corpus[0].target.size() == 15);
    CHECK((corpus[0].target.array() != 0.0).count() == 3);
    CHECK(corpus[0].k == 2);
    CHECK(corpus[0].phi.rows() == 40);
    CHECK(corpus[0].phi.cols() == 6);
    CHECK(corpus[0].coords.cols() == 5);
    CHECK((corpus[0].coords.rightCols(3).array() == 0.0).all());

    CorpusConfig wide = c;
    wide.ambient = 20;
    CHECK(build_corpus(wide)[0].target.size() == 210);

    CorpusConfig mixed = small_corpus(4, 8);
    mixed.dims = {2, 3};
    mixed.ambient = 3;
    const auto a = build_corpus(mixed), b = build_corpus(mixed);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].k == (i % 2 == 0 ? 2 : 3));
        CHECK(a[i].phi == b[i].phi);
        CHECK(a[i].target == b[i].target);
        CHECK(a[i].loss_axis == b[i].loss_axis);
    }
    mixed.dims = {1};
    CHECK(kind_of([&] { build_corpus(mixed); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("least-squares quadric fit") {
    SUBCASE("realizable data is recovered") {
        const Quadric q = random_quadric(5, 5, 1.0, 31);
        const QuadricSample s = sample_quadric(q, 100, 1.0, 32);
        const Quadric fit = ls_quadric_fit(s.xs, s.ys);
        CHECK(testutil::max_abs_diff(fit.q, q.q) <= 1e-10);
        CHECK(fit.q == fit.q.transpose());
    }
    SUBCASE("zero values give zero") {
        const QuadricSample s = sample_quadric(random_quadric(3, 3, 1.0, 1), 20, 1.0, 2);
        CHECK(ls_quadric_fit(s.xs, Vector::Zero(20)).q.cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("scaled basis vectors recover the identity diagonal") {
        // basis vectors fix the diagonal; pairwise sums fix the cross terms
        const Index k = 3;
        Matrix xs(6, 3);
        xs << 2, 0, 0, 0, 2, 0, 0, 0, 2, 1, 1, 0, 1, 0, 1, 0, 1, 1;
        Vector ys(6);
        for (Eigen::Index i = 0; i < 6; ++i) ys[i] = xs.row(i).squaredNorm();
        const Quadric fit = ls_quadric_fit(xs, ys);
        CHECK(fit.q.rows() == static_cast<Eigen::Index>(k));
        for (int a = 0; a < 3; ++a) CHECK(fit.q(a, a) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(fit.q.cwiseAbs().maxCoeff() <= 1.0 + 1e-14);
        Matrix axes(6, 3);
        axes << xs.topRows(3), -xs.topRows(3);
        Vector axis_ys(6);
        axis_ys << ys.head(3), ys.head(3);
        CHECK(kind_of([&] { ls_quadric_fit(axes, axis_ys); }) == ErrorKind::RankDeficient);
        CHECK(ls_quadric_fit(axes, axis_ys, 1e-8).q.allFinite());
        CHECK(kind_of([&] { ls_quadric_fit(xs.topRows(3), ys.head(3)); }) == ErrorKind::InvalidInput);
    }
    SUBCASE("feature ordering") {
        Matrix x(1, 3);
        x << 2, 3, 5;
        Matrix f = quadric_features(x);
        CHECK(f.cols() == 6);
        CHECK(f(0, 0) == 4.0);
        CHECK(f(0, 1) == 6.0);
        CHECK(f(0, 2) == 10.0);
        CHECK(f(0, 3) == 9.0);
        CHECK(f(0, 5) == 25.0);
    }
}

TEST_CASE("random baseline") {
    // target and estimate independent U(-1, 1): E (a - b)^2 = 2/3
    double total = 0.0;
    Index count = 0;
    for (Seed s = 0; s < 10000; ++s) {
        const Quadric truth = random_quadric(2, 2, 1.0, s);
        const Quadric guess = random_baseline(2, 1.0, s + 1000000);
        total += active_mse(guess.q, upper_triangle(truth.q), 2, 2);
        ++count;
    }
    CHECK(std::abs(total / static_cast<double>(count) - 2.0 / 3.0) <= 0.05 * 2.0 / 3.0);
    CHECK(random_baseline(4, 1.0, 9).q == random_baseline(4, 1.0, 9).q);
    CHECK(random_baseline(4, 1.0, 9).q == random_baseline(4, 1.0, 9).q.transpose());
    CHECK(random_baseline(4, 0.5, 9).q.cwiseAbs().maxCoeff() <= 0.5);
}

TEST_CASE("prediction is symmetric and permutation invariant") {
    const auto corpus = build_corpus(small_corpus(1, 4));
    const NetModel model = small_shape(small_corpus(1, 4));
    const TrainingExample& ex = corpus[0];
    const Quadric q = predict(model, ex);
    CHECK(q.q == q.q.transpose());

    std::vector<int> order(static_cast<std::size_t>(ex.phi.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    std::rotate(order.begin(), order.begin() + 7, order.end());
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(Eigen::Map<Eigen::VectorXi>(order.data(), ex.phi.rows()));
    const Quadric shuffled = predict(model, perm * ex.phi, perm * ex.loss_axis, perm * ex.coords);
    CHECK(testutil::max_abs_diff(q.q, shuffled.q) <= 1e-12);

    CHECK(kind_of([&] { forward(model, ex.phi.leftCols(3), ex.loss_axis, ex.coords); }) == ErrorKind::ShapeMismatch);
    CHECK(kind_of([&] { forward(model, ex.phi, ex.loss_axis.head(5), ex.coords); }) == ErrorKind::ShapeMismatch);
    TrainingExample bad = ex;
    bad.target = Vector::Zero(2);
    CHECK(kind_of([&] { example_loss(model, bad); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("analytic gradients match central differences") {
    const testutil::GradCheck g = testutil::gradient_check(100, 1e-5, 0);
    CHECK(g.parameters == 10);
    CHECK(g.directions == 100);
    CHECK(g.worst_relative <= 1e-4);
    // the full-size architecture too, a few coordinates
    const auto corpus = build_corpus(small_corpus(1, 6));
    NetModel m = small_shape(small_corpus(1, 6), 0.01);
    Vector grad = Vector::Zero(m.weights.size());
    example_loss(m, corpus[0], &grad);
    for (Eigen::Index i = 0; i < m.weights.size(); i += 37) {
        NetModel p = m, q = m;
        p.weights[i] += 1e-5;
        q.weights[i] -= 1e-5;
        const double numeric = (example_loss(p, corpus[0]) - example_loss(q, corpus[0])) / 2e-5;
        CHECK(std::abs(numeric - grad[i]) <= 1e-4 * std::max(std::abs(numeric), 1e-3));
    }
}

TEST_CASE("single example is memorized") {
    const auto corpus = build_corpus(small_corpus(1, 11));
    TrainConfig cfg;
    cfg.epochs = 1500;
    cfg.lr = 1e-2;
    cfg.batch = 1;
    const TrainResult r = train(small_shape(small_corpus(1, 11)), corpus, cfg);
    const double mse = active_mse(predict(r.model, corpus[0]).q, corpus[0].target, 2, 2);
    CHECK(mse < 1e-3);
    CHECK(r.epoch_loss.size() == 1500);
    CHECK(r.epoch_loss.back() < r.epoch_loss.front());
}

TEST_CASE("untrained model is on the baseline's scale") {
    const CorpusConfig c = small_corpus(40, 12);
    const EvalTable t = evaluate(small_shape(c), build_corpus(c), 1.0, 13);
    CHECK(t.overall.baseline_mean == doctest::Approx(2.0 / 3.0).epsilon(0.15));
    CHECK(t.overall.curvenet_mean > 0.1 * t.overall.baseline_mean);
    CHECK(t.overall.curvenet_mean < 10.0 * t.overall.baseline_mean);
    CHECK(t.overall.ls_mean < 1e-20);
}

TEST_CASE("training loss decreases on the smoothed curve") {
    const CorpusConfig c = small_corpus(32, 14);
    TrainConfig cfg;
    cfg.epochs = 120;
    cfg.lr = 3e-3;
    cfg.batch = 8;
    const TrainResult r = train(small_shape(c), build_corpus(c), cfg);
    const std::vector<double> s = median5(r.epoch_loss);
    for (std::size_t i = 0; i + 20 < s.size(); ++i) {
        CAPTURE(i);
        CHECK(s[i + 20] <= s[i]);
    }
}

TEST_CASE("momentum optimizer also trains") {
    const CorpusConfig c = small_corpus(16, 15);
    TrainConfig cfg;
    cfg.epochs = 300;
    cfg.lr = 1e-2;
    cfg.batch = 4;
    cfg.optimizer = Optimizer::Momentum;
    const TrainResult r = train(small_shape(c), build_corpus(c), cfg);
    CHECK(r.epoch_loss.back() < 0.5 * r.epoch_loss.front());
    const TrainResult again = train(small_shape(c), build_corpus(c), cfg);
    CHECK(again.model.weights == r.model.weights);
}

TEST_CASE("training errors") {
    const CorpusConfig c = small_corpus(4, 16);
    auto corpus = build_corpus(c);
    corpus[2].target[0] = std::numeric_limits<double>::quiet_NaN();
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch = 2;
    try {
        train(small_shape(c), corpus, cfg);
        FAIL("expected NonFiniteLoss");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonFiniteLoss);
        CHECK(std::string(e.what()).find("batch") != std::string::npos);
    }
    CHECK(kind_of([&] { train(small_shape(c), {}, cfg); }) == ErrorKind::InvalidInput);
    cfg.lr = 0.0;
    CHECK(kind_of([&] { train(small_shape(c), build_corpus(c), cfg); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("checkpoint round trip") {
    const NetModel m = small_shape(small_corpus(1, 0), 0.25);
    std::stringstream buf;
    write_model(buf, m);
    const NetModel back = read_model(buf);
    CHECK(back.weights == m.weights);
    CHECK(back.encoder_widths == m.encoder_widths);
    CHECK(back.head_widths == m.head_widths);
    CHECK(back.l1_weight == 0.25);
    CHECK(back.ambient == m.ambient);
    CHECK(back.d_emb == m.d_emb);
    CHECK(back.t == m.t);
    CHECK(back.seed == m.seed);

    std::string bytes = buf.str();
    std::stringstream bad(std::string("XCNN") + bytes.substr(4));
    CHECK(kind_of([&] { read_model(bad); }) == ErrorKind::Io);
    std::stringstream cut(bytes.substr(0, bytes.size() - 3));
    CHECK(kind_of([&] { read_model(cut); }) == ErrorKind::Io);
    CHECK(kind_of([] { load_model("/nonexistent/model.dcnn"); }) == ErrorKind::Io);
}

// Full desk-scale protocol; slow, so these run as their own ctest entries.
namespace {

struct DeskRun {
    TableConfig cfg;
    TableResult result;
    std::vector<TrainingExample> held_out;
};

const DeskRun& desk_run() {
    static const DeskRun run = [] {
        DeskRun r;
        r.cfg = default_table_config();
        r.result = run_table(r.cfg);
        CorpusConfig held = r.cfg.train;
        held.n_quadrics = r.cfg.held_out;
        held.seed = r.cfg.held_out_seed;
        r.held_out = build_corpus(held);
        return r;
    }();
    return run;
}

}  // namespace

TEST_CASE("desk-scale oracle beats the net and the smoothed loss decreases") {
    const DeskRun& run = desk_run();
    const Index ambient = run.cfg.train.ambient;
    for (const TrainingExample& ex : run.held_out) {
        const Matrix xs = ex.coords.leftCols(static_cast<Eigen::Index>(ex.k));
        const double net_err = active_mse(predict(run.result.model, ex).q, ex.target, ambient, ex.k);
        const double ls_err = active_mse(ls_quadric_fit(xs, ex.loss_axis).q, ex.target, ambient, ex.k);
        CHECK(ls_err <= net_err);
    }
    CHECK(run.result.table.overall.curvenet_mean * 5.0 <= run.result.table.overall.baseline_mean);

    const std::vector<double> s = median5(run.result.epoch_loss);
    REQUIRE(s.size() == 100);
    for (std::size_t i = 0; i + 20 < s.size(); ++i) {
        CAPTURE(i);
        CHECK(s[i + 20] <= s[i]);
    }
}

TEST_CASE("desk-scale k=2 held-out coefficients within 0.15") {
    // the first k = 2 quadric of the held-out set
    const DeskRun& run = desk_run();
    const auto it = std::find_if(run.held_out.begin(), run.held_out.end(),
                                 [](const TrainingExample& ex) { return ex.k == 2; });
    REQUIRE(it != run.held_out.end());
    const Quadric net = predict(run.result.model, *it);
    const Vector truth = upper_triangle(from_upper_triangle(it->target, run.cfg.train.ambient).topLeftCorner(2, 2));
    const Vector est = upper_triangle(net.q.topLeftCorner(2, 2));
    CAPTURE(truth.transpose());
    CAPTURE(est.transpose());
    CHECK((truth - est).cwiseAbs().maxCoeff() <= 0.15);
}

TEST_CASE("desk-scale L1 weight increases sparsity") {
    TableConfig cfg = default_table_config();
    CorpusConfig held = cfg.train;
    held.n_quadrics = cfg.held_out;
    held.seed = cfg.held_out_seed;
    const auto train_set = build_corpus(cfg.train);
    const auto examples = build_corpus(held);
    std::optional<Index> previous;
    for (double l1 : {0.0, 0.01, 0.1}) {
        NetModel shape = cfg.shape;
        shape.l1_weight = l1;
        const TrainResult r = train(init_model(shape), train_set, cfg.optimizer);
        Index small = 0;
        for (const TrainingExample& ex : examples) {
            const Vector out = forward(r.model, ex.phi, ex.loss_axis, ex.coords);
            for (Eigen::Index j = 0; j < out.size(); ++j)
                if (ex.target[j] == 0.0 && std::abs(out[j]) < 1e-3) ++small;
        }
        CAPTURE(l1);
        CAPTURE(small);
        if (previous) CHECK(small >= *previous);
        previous = small;
    }
}
