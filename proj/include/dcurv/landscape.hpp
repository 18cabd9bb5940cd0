#pragma once

#include "dcurv/geometry.hpp"
#include "dcurv/quadric_net.hpp"
#include "dcurv/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dcurv {

struct LeastSquaresEstimator {
    double ridge = 0.0;
};

/// Network path: the probe cloud is rescaled to the unit ball before embedding.
struct NetEstimator {
    NetModel model;
    KernelConfig kernel;
};

using Estimator = std::variant<LeastSquaresEstimator, NetEstimator>;

struct ProbeConfig {
    Index n_samples = 1000;
    double radius_scale = 0.1;
    double rel_loss_tol = 0.1;
    Seed seed = 0;
    bool shell = false;  ///< radii fixed at rho instead of uniform in (0, rho]
    Estimator estimator = LeastSquaresEstimator{};
};

/// Throws InvalidConfig for inconsistent settings at dimension k.
void validate(const ProbeConfig& cfg, Index k);

using Objective = std::function<double(const Vector&)>;

struct ProbeSample {
    Matrix xs;          ///< offsets from the center, n x k
    Vector ys;          ///< f(center + x) - f(center)
    double radius = 0;  ///< final rho after halving
    int halvings = 0;
};

/// Directions and radius fractions are drawn once; rho = radius_scale * max(|x_s|, 1)
/// is halved until fewer than 5% of samples move f by more than rel_loss_tol
/// relative to max(|f(x_s)|, 1).
ProbeSample sample_around(const Objective& f, const Vector& center, const ProbeConfig& cfg);

enum class Signature { Minimum, Maximum, Saddle, Degenerate };
std::string to_string(Signature s);

struct HessianEstimate {
    Matrix h;
    Vector eigenvalues;  ///< ascending
    Signature signature = Signature::Degenerate;
    double tolerance = 0.0;
    double condition_number = 0.0;
    Index negative_count() const;
};

/// Eigen-analysis of a symmetric matrix with tol = 1e-6 * max|lambda|.
HessianEstimate classify(const Matrix& h);

HessianEstimate estimate_hessian(const ProbeSample& sample, const ProbeConfig& cfg);

struct SpectrumReport {
    std::vector<std::string> labels;
    std::vector<HessianEstimate> estimates;
    std::vector<double> edges;                ///< 65 bin edges over the pooled range
    std::vector<std::vector<Index>> counts;   ///< per label, 64 bins
    std::vector<std::vector<double>> cdf;     ///< per label, at the right edge of each bin

    std::string eigenvalues_csv() const;
    std::string histogram_csv() const;
    std::string summary_csv() const;
    std::string json() const;
};

inline constexpr Index kSpectrumBins = 64;

SpectrumReport spectrum_report(const std::vector<HessianEstimate>& estimates, const std::vector<std::string>& labels);

struct BuiltinObjective {
    std::string name;
    Objective f;
    Vector center;
    std::optional<Matrix> hessian;  ///< exact Hessian at the center when known
};

/// saddle2d, bowl, cap, quadratic-cubic, toy-regression. `dim` is ignored by
/// saddle2d (2) and toy-regression (its parameter count).
BuiltinObjective builtin_objective(const std::string& name, Index dim, Seed seed = 0);
std::vector<std::string> builtin_objective_names();

}  // namespace dcurv
