#pragma once

#include "dcurv/point_cloud.hpp"
#include "dcurv/types.hpp"

#include <optional>
#include <variant>

namespace dcurv {

/// Gaussian bandwidth given directly, in squared-distance units.
struct FixedBandwidth {
    double sigma = 1.0;
};

/// sigma = mean over points of the squared distance to the k-th nearest neighbour.
/// An empty k resolves to ceil(log2 N).
struct AdaptiveKnn {
    std::optional<Index> k;
};

using BandwidthRule = std::variant<FixedBandwidth, AdaptiveKnn>;

struct KernelConfig {
    BandwidthRule bandwidth = AdaptiveKnn{};
    double alpha = 1.0;
    /// Zero affinities below truncation_floor. Meant for large N only.
    bool truncate = false;
    double truncation_floor = 1e-12;
};

/// Throws InvalidConfig when alpha is outside [0,1], sigma <= 0, or k is out of range for n_points.
void validate(const KernelConfig& cfg, Index n_points);

enum class AffinityKind { Gaussian, Anisotropic };

struct AffinityMatrix {
    Matrix values;
    AffinityKind kind = AffinityKind::Gaussian;
    double sigma = 0.0;  ///< resolved bandwidth
};

/// Row-stochastic transition matrix together with the degrees it was normalized by.
/// The degrees define the stationary weights pi = degrees / sum(degrees).
class DiffusionOperator {
public:
    /// Checks row sums (1e-10), entry range and positive degrees.
    static DiffusionOperator from_matrix(Matrix p, Vector degrees);

    const Matrix& p() const noexcept { return p_; }
    const Vector& degrees() const noexcept { return degrees_; }
    Index size() const noexcept { return static_cast<Index>(p_.rows()); }
    Vector stationary() const { return degrees_ / degrees_.sum(); }

private:
    DiffusionOperator(Matrix p, Vector degrees) : p_(std::move(p)), degrees_(std::move(degrees)) {}

    Matrix p_;
    Vector degrees_;
};

struct DiffusionMap {
    Vector eigenvalues;   ///< descending
    Matrix eigenvectors;  ///< column j is the right eigenvector for eigenvalues[j]
    int t = 0;
};

struct SpectralOptions {
    /// Number of leading pairs for the iterative path; ignored on the dense path.
    Index top = 32;
    /// Operators larger than this use the iterative solver.
    Index dense_limit = 2000;
    double tolerance = 1e-10;
    Index max_restarts = 500;
};

AffinityMatrix gaussian_affinity(const PointCloud& cloud, const KernelConfig& cfg);
AffinityMatrix anisotropic_normalize(const AffinityMatrix& g, double alpha);
DiffusionOperator markov_normalize(const AffinityMatrix& k);

/// Kernel -> anisotropic normalization -> Markov normalization in one call.
DiffusionOperator build_operator(const PointCloud& cloud, const KernelConfig& cfg, double* sigma_out = nullptr);

/// Eigenpairs of P via the symmetric conjugate D^{1/2} P D^{-1/2}. Eigenvectors are
/// scaled so that sum_z pi(z) phi(z)^2 = 1, which makes phi_1 the constant 1 and
/// turns Euclidean distances between full diffusion coordinates into diffusion distances.
DiffusionMap spectral_decompose(const DiffusionOperator& op, const SpectralOptions& options = {});

/// Row i is [lambda_1^t phi_1(i), ..., lambda_d^t phi_d(i)].
Matrix diffusion_coordinates(const DiffusionMap& map, int t, Index d);

/// Direct evaluation of sqrt(sum_z (P^t[i,z] - P^t[j,z])^2 / pi(z)).
double diffusion_distance(const DiffusionOperator& op, int t, Index i, Index j);

/// Same sum with P^t and pi supplied, for callers evaluating many pairs.
double diffusion_distance(const Matrix& p_t, const Vector& stationary, Index i, Index j);

/// All pairwise diffusion distances at time t (same sum, vectorized per pair).
Matrix diffusion_distance_matrix(const DiffusionOperator& op, int t);

/// Same as above when P^t is already available.
Matrix diffusion_distance_matrix(const Matrix& p_t, const Vector& stationary);

/// P^t by binary powering.
DiffusionOperator power_operator(const DiffusionOperator& op, int t);

/// D^{1/2} P D^{-1/2}; symmetric for operators built from symmetric affinities.
Matrix symmetric_conjugate(const DiffusionOperator& op);

}  // namespace dcurv
