#include "dcurv/landscape.hpp"

#include "dcurv/error.hpp"
#include "dcurv/io.hpp"
#include "dcurv/quadric_fit.hpp"
#include "dcurv/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dcurv {

namespace {

constexpr int kMaxHalvings = 20;
constexpr double kLocalityFraction = 0.05;

double checked(const Objective& f, const Vector& x) {
    const double v = f(x);
    require(std::isfinite(v), ErrorKind::NonFiniteValue, "objective returned a non-finite value");
    return v;
}

}  // namespace

void validate(const ProbeConfig& cfg, Index k) {
    require(k >= 1, ErrorKind::InvalidConfig, "probe dimension must be >= 1");
    require(cfg.radius_scale > 0.0 && std::isfinite(cfg.radius_scale), ErrorKind::InvalidConfig,
            "radius_scale must be > 0");
    require(cfg.rel_loss_tol > 0.0, ErrorKind::InvalidConfig, "rel_loss_tol must be > 0");
    require(cfg.n_samples >= 1, ErrorKind::InvalidConfig, "n_samples must be >= 1");
    if (const auto* ls = std::get_if<LeastSquaresEstimator>(&cfg.estimator)) {
        require(ls->ridge >= 0.0, ErrorKind::InvalidConfig, "ridge must be >= 0");
        require(cfg.n_samples >= triangle_size(k) + 1, ErrorKind::InvalidConfig,
                "least squares needs at least k(k+1)/2 + 1 samples");
        require(!cfg.shell || ls->ridge > 0.0, ErrorKind::InvalidConfig, "shell sampling needs ridge > 0");
    } else {
        const auto& net = std::get<NetEstimator>(cfg.estimator);
        require(net.model.ambient >= k, ErrorKind::InvalidConfig, "network K is smaller than the probe dimension");
        require(cfg.n_samples >= net.model.d_emb, ErrorKind::InvalidConfig, "fewer samples than embedding width");
    }
}

ProbeSample sample_around(const Objective& f, const Vector& center, const ProbeConfig& cfg) {
    const auto k = static_cast<Index>(center.size());
    validate(cfg, k);
    require(center.allFinite(), ErrorKind::NonFiniteValue, "probe center is not finite");
    const auto n = static_cast<Eigen::Index>(cfg.n_samples);

    Rng rng = make_rng(cfg.seed, 0x70726f);
    Matrix unit(n, center.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vector dir = unit_direction(rng, k);
        const double frac = cfg.shell ? 1.0 : 1.0 - uniform(rng, 0.0, 1.0);
        unit.row(i) = (frac * dir).transpose();
    }

    const double f0 = checked(f, center);
    const double scale = std::max(std::abs(f0), 1.0);
    double rho = cfg.radius_scale * std::max(center.norm(), 1.0);
    for (int halvings = 0; halvings <= kMaxHalvings; ++halvings, rho *= 0.5) {
        ProbeSample s{rho * unit, Vector(n), rho, halvings};
        Eigen::Index far = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            s.ys(i) = checked(f, center + s.xs.row(i).transpose()) - f0;
            if (std::abs(s.ys(i)) / scale > cfg.rel_loss_tol) ++far;
        }
        if (static_cast<double>(far) < kLocalityFraction * static_cast<double>(n)) return s;
    }
    fail(ErrorKind::LocalityFailure, "samples stayed non-local after " + std::to_string(kMaxHalvings) + " halvings");
}

std::string to_string(Signature s) {
    switch (s) {
        case Signature::Minimum: return "Minimum";
        case Signature::Maximum: return "Maximum";
        case Signature::Saddle: return "Saddle";
        case Signature::Degenerate: return "Degenerate";
    }
    return "?";
}

Index HessianEstimate::negative_count() const {
    return static_cast<Index>((eigenvalues.array() < -tolerance).count());
}

HessianEstimate classify(const Matrix& h) {
    require(h.rows() == h.cols() && h.rows() >= 1, ErrorKind::ShapeMismatch, "Hessian must be square");
    require(h.allFinite(), ErrorKind::NonFiniteValue, "Hessian has non-finite entries");
    HessianEstimate e;
    e.h = h;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    e.eigenvalues = solver.eigenvalues();
    const double top = e.eigenvalues.cwiseAbs().maxCoeff();
    e.tolerance = 1e-6 * top;
    bool degenerate = top == 0.0;
    bool all_pos = true, all_neg = true;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (Eigen::Index i = 0; i < e.eigenvalues.size(); ++i) {
        const double v = e.eigenvalues(i);
        if (std::abs(v) <= e.tolerance) {
            degenerate = true;
            continue;
        }
        all_pos = all_pos && v > 0.0;
        all_neg = all_neg && v < 0.0;
        lo = std::min(lo, std::abs(v));
        hi = std::max(hi, std::abs(v));
    }
    if (degenerate)
        e.signature = Signature::Degenerate;
    else if (all_pos)
        e.signature = Signature::Minimum;
    else if (all_neg)
        e.signature = Signature::Maximum;
    else
        e.signature = Signature::Saddle;
    e.condition_number = std::isfinite(lo) ? hi / lo : std::numeric_limits<double>::infinity();
    return e;
}

HessianEstimate estimate_hessian(const ProbeSample& sample, const ProbeConfig& cfg) {
    const auto k = static_cast<Index>(sample.xs.cols());
    validate(cfg, k);
    require(sample.xs.rows() == sample.ys.size(), ErrorKind::ShapeMismatch, "xs and ys disagree on sample count");
    if (const auto* ls = std::get_if<LeastSquaresEstimator>(&cfg.estimator))
        return classify(2.0 * ls_quadric_fit(sample.xs, sample.ys, ls->ridge).q);

    const auto& net = std::get<NetEstimator>(cfg.estimator);
    require(sample.radius > 0.0, ErrorKind::InvalidInput, "sample radius must be > 0");
    // y = x^T A x is invariant under (x, y) -> (x / rho, y / rho^2), which puts the cloud on the training domain.
    const Matrix xs = sample.xs / sample.radius;
    const Vector ys = sample.ys / (sample.radius * sample.radius);
    const TrainingExample ex = make_example(xs, ys, Matrix::Zero(1, 1), net.model.ambient, net.model.d_emb,
                                            net.model.t, net.kernel);
    const Matrix q = predict(net.model, ex).q;
    const auto kk = static_cast<Eigen::Index>(k);
    return classify(2.0 * q.topLeftCorner(kk, kk));
}

SpectrumReport spectrum_report(const std::vector<HessianEstimate>& estimates, const std::vector<std::string>& labels) {
    require(!estimates.empty(), ErrorKind::InvalidInput, "spectrum report needs at least one estimate");
    require(labels.size() == estimates.size(), ErrorKind::ShapeMismatch, "one label per estimate required");
    SpectrumReport r;
    r.labels = labels;
    r.estimates = estimates;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& e : estimates) {
        lo = std::min(lo, e.eigenvalues.minCoeff());
        hi = std::max(hi, e.eigenvalues.maxCoeff());
    }
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    r.edges.resize(kSpectrumBins + 1);
    for (Index b = 0; b <= kSpectrumBins; ++b)
        r.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(kSpectrumBins);
    r.edges.back() = hi;
    for (const auto& e : estimates) {
        std::vector<Index> counts(kSpectrumBins, 0);
        for (Eigen::Index i = 0; i < e.eigenvalues.size(); ++i) {
            const double v = e.eigenvalues(i);
            auto bin = static_cast<Index>((v - lo) / (hi - lo) * static_cast<double>(kSpectrumBins));
            bin = std::min<Index>(bin, kSpectrumBins - 1);
            ++counts[bin];
        }
        std::vector<double> cdf(kSpectrumBins);
        Index running = 0;
        for (Index b = 0; b < kSpectrumBins; ++b) {
            running += counts[b];
            cdf[b] = static_cast<double>(running) / static_cast<double>(e.eigenvalues.size());
        }
        r.counts.push_back(std::move(counts));
        r.cdf.push_back(std::move(cdf));
    }
    return r;
}

std::string SpectrumReport::eigenvalues_csv() const {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t l = 0; l < labels.size(); ++l)
        for (Eigen::Index i = 0; i < estimates[l].eigenvalues.size(); ++i)
            rows.push_back({labels[l], std::to_string(i), format_double(estimates[l].eigenvalues(i))});
    return to_csv({"label", "index", "eigenvalue"}, rows);
}

std::string SpectrumReport::histogram_csv() const {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t l = 0; l < labels.size(); ++l)
        for (Index b = 0; b < kSpectrumBins; ++b)
            rows.push_back({labels[l], std::to_string(b), format_double(edges[b]), format_double(edges[b + 1]),
                            std::to_string(counts[l][b]), format_double(cdf[l][b])});
    return to_csv({"label", "bin", "left", "right", "count", "cdf"}, rows);
}

std::string SpectrumReport::summary_csv() const {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t l = 0; l < labels.size(); ++l) {
        const auto& e = estimates[l];
        rows.push_back({labels[l], to_string(e.signature), std::to_string(e.negative_count()),
                        format_double(e.condition_number), format_double(e.tolerance)});
    }
    return to_csv({"label", "signature", "negative_count", "condition_number", "tolerance"}, rows);
}

std::string SpectrumReport::json() const {
    nlohmann::ordered_json out;
    out["bins"] = kSpectrumBins;
    out["edges"] = edges;
    nlohmann::ordered_json items = nlohmann::ordered_json::array();
    for (std::size_t l = 0; l < labels.size(); ++l) {
        const auto& e = estimates[l];
        nlohmann::ordered_json item;
        item["label"] = labels[l];
        item["signature"] = to_string(e.signature);
        item["eigenvalues"] = std::vector<double>(e.eigenvalues.data(), e.eigenvalues.data() + e.eigenvalues.size());
        item["negative_count"] = e.negative_count();
        item["condition_number"] =
            std::isfinite(e.condition_number) ? nlohmann::ordered_json(e.condition_number) : nlohmann::ordered_json();
        item["counts"] = counts[l];
        item["cdf"] = cdf[l];
        items.push_back(std::move(item));
    }
    out["estimates"] = std::move(items);
    return out.dump(2) + "\n";
}

namespace {

// 1-3-1 tanh regressor fitted to sin on [-2, 2]; parameters (w1[3], b1[3], w2[3], b2).
double toy_loss(const Vector& theta) {
    constexpr int kPoints = 32;
    double sum = 0.0;
    for (int i = 0; i < kPoints; ++i) {
        const double x = -2.0 + 4.0 * i / (kPoints - 1);
        double y = theta(9);
        for (int h = 0; h < 3; ++h) y += theta(6 + h) * std::tanh(theta(h) * x + theta(3 + h));
        const double r = y - std::sin(x);
        sum += r * r;
    }
    return sum / kPoints;
}

Vector train_toy(Seed seed) {
    Rng rng = make_rng(seed, 0x746f79);
    Vector theta(10);
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = uniform(rng, -1.0, 1.0);
    constexpr double kStep = 1e-6, kLr = 0.1;
    for (int it = 0; it < 200; ++it) {
        Vector grad(10);
        for (Eigen::Index i = 0; i < 10; ++i) {
            Vector a = theta, b = theta;
            a(i) += kStep;
            b(i) -= kStep;
            grad(i) = (toy_loss(a) - toy_loss(b)) / (2.0 * kStep);
        }
        theta -= kLr * grad;
    }
    return theta;
}

}  // namespace

std::vector<std::string> builtin_objective_names() {
    return {"saddle2d", "bowl", "cap", "quadratic-cubic", "toy-regression"};
}

BuiltinObjective builtin_objective(const std::string& name, Index dim, Seed seed) {
    if (name == "toy-regression") return {name, toy_loss, train_toy(seed), std::nullopt};
    if (name == "saddle2d") {
        Matrix h(2, 2);
        h << 2.0, 0.0, 0.0, -2.0;
        return {name, [](const Vector& x) { return x(0) * x(0) - x(1) * x(1); }, Vector::Zero(2), h};
    }
    require(dim >= 1, ErrorKind::InvalidConfig, "objective dimension must be >= 1");
    const auto d = static_cast<Eigen::Index>(dim);
    if (name == "bowl")
        return {name, [](const Vector& x) { return x.squaredNorm(); }, Vector::Zero(d), Matrix(2.0 * Matrix::Identity(d, d))};
    if (name == "cap")
        return {name, [](const Vector& x) { return -x.squaredNorm(); }, Vector::Zero(d),
                Matrix(-2.0 * Matrix::Identity(d, d))};
    if (name == "quadratic-cubic") {
        Vector a = Vector::LinSpaced(d, 1.0, static_cast<double>(d));
        return {name,
                [a](const Vector& x) {
                    const double r = x.norm();
                    return x.dot(a.cwiseProduct(x)) + 0.01 * r * r * r;
                },
                Vector::Zero(d), Matrix(2.0 * a.asDiagonal().toDenseMatrix())};
    }
    fail(ErrorKind::InvalidConfig, "unknown objective '" + name + "'");
}

}  // namespace dcurv
