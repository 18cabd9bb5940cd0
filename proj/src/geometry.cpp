#include "dcurv/geometry.hpp"

#include "dcurv/eigensolver.hpp"
#include "dcurv/error.hpp"
#include "dcurv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dcurv {

namespace {

Index resolve_knn(const AdaptiveKnn& rule, Index n_points) {
    if (rule.k) return *rule.k;
    return static_cast<Index>(std::ceil(std::log2(static_cast<double>(n_points))));
}

Matrix squared_distances(const Matrix& x) {
    const Eigen::Index n = x.rows();
    Matrix d2(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        const auto i = static_cast<Eigen::Index>(row);
        d2(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) d2(i, j) = (x.row(i) - x.row(j)).squaredNorm();
    });
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) d2(i, j) = d2(j, i);
    return d2;
}

double mean_knn_squared_distance(const Matrix& d2, Index k) {
    const Eigen::Index n = d2.rows();
    std::vector<double> kth(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        std::vector<double> values(d2.row(static_cast<Eigen::Index>(row)).begin(),
                                   d2.row(static_cast<Eigen::Index>(row)).end());
        // position 0 is the point itself (distance 0)
        std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
        kth[row] = values[k];
    });
    return std::accumulate(kth.begin(), kth.end(), 0.0) / static_cast<double>(n);
}

}  // namespace

void validate(const KernelConfig& cfg, Index n_points) {
    require(cfg.alpha >= 0.0 && cfg.alpha <= 1.0, ErrorKind::InvalidConfig, "alpha must lie in [0, 1]");
    if (const auto* fixed = std::get_if<FixedBandwidth>(&cfg.bandwidth)) {
        require(fixed->sigma > 0.0 && std::isfinite(fixed->sigma), ErrorKind::InvalidConfig,
                "sigma must be positive");
    } else {
        const Index k = resolve_knn(std::get<AdaptiveKnn>(cfg.bandwidth), n_points);
        require(k >= 1 && k < n_points, ErrorKind::InvalidConfig, "adaptive bandwidth needs 1 <= k < N");
    }
}

DiffusionOperator DiffusionOperator::from_matrix(Matrix p, Vector degrees) {
    require(p.rows() == p.cols() && p.rows() >= 1, ErrorKind::InvalidInput, "transition matrix must be square");
    require(degrees.size() == p.rows(), ErrorKind::InvalidInput, "degree vector length mismatch");
    require(p.allFinite() && degrees.allFinite(), ErrorKind::InvalidInput, "operator has non-finite entries");
    require((degrees.array() > 0.0).all(), ErrorKind::InvalidInput, "degrees must be positive");
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        require(std::abs(p.row(i).sum() - 1.0) <= 1e-10, ErrorKind::InvalidInput,
                "row " + std::to_string(i) + " does not sum to 1");
    }
    require(p.minCoeff() >= 0.0 && p.maxCoeff() <= 1.0 + 1e-12, ErrorKind::InvalidInput,
            "transition probabilities must lie in [0, 1]");
    return DiffusionOperator(std::move(p), std::move(degrees));
}

AffinityMatrix gaussian_affinity(const PointCloud& cloud, const KernelConfig& cfg) {
    validate(cfg, cloud.size());
    const Matrix d2 = squared_distances(cloud.points());

    double sigma = 0.0;
    if (const auto* fixed = std::get_if<FixedBandwidth>(&cfg.bandwidth)) {
        sigma = fixed->sigma;
    } else {
        sigma = mean_knn_squared_distance(d2, resolve_knn(std::get<AdaptiveKnn>(cfg.bandwidth), cloud.size()));
        require(sigma > 0.0, ErrorKind::DegenerateCloud, "adaptive bandwidth is zero (points coincide)");
    }

    AffinityMatrix g;
    g.kind = AffinityKind::Gaussian;
    g.sigma = sigma;
    g.values = (-d2.array() / sigma).exp().matrix();
    if (cfg.truncate) {
        g.values = (g.values.array() < cfg.truncation_floor).select(0.0, g.values);
        g.values.diagonal().setOnes();
    }
    return g;
}

AffinityMatrix anisotropic_normalize(const AffinityMatrix& g, double alpha) {
    require(g.kind == AffinityKind::Gaussian, ErrorKind::InvalidInput, "expected a Gaussian affinity");
    require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::InvalidConfig, "alpha must lie in [0, 1]");
    const Vector scale = g.values.rowwise().sum().array().pow(alpha).inverse();
    AffinityMatrix k;
    k.kind = AffinityKind::Anisotropic;
    k.sigma = g.sigma;
    k.values = scale.asDiagonal() * g.values * scale.asDiagonal();
    return k;
}

DiffusionOperator markov_normalize(const AffinityMatrix& k) {
    const Vector degrees = k.values.rowwise().sum();
    for (Eigen::Index i = 0; i < degrees.size(); ++i) {
        require(degrees[i] > 0.0, ErrorKind::ZeroRow, "affinity row " + std::to_string(i) + " sums to zero");
    }
    Matrix p = degrees.cwiseInverse().asDiagonal() * k.values;
    return DiffusionOperator::from_matrix(std::move(p), degrees);
}

DiffusionOperator build_operator(const PointCloud& cloud, const KernelConfig& cfg, double* sigma_out) {
    const AffinityMatrix g = gaussian_affinity(cloud, cfg);
    if (sigma_out) *sigma_out = g.sigma;
    return markov_normalize(anisotropic_normalize(g, cfg.alpha));
}

Matrix symmetric_conjugate(const DiffusionOperator& op) {
    const Vector root = op.degrees().cwiseSqrt();
    return root.asDiagonal() * op.p() * root.cwiseInverse().asDiagonal();
}

DiffusionMap spectral_decompose(const DiffusionOperator& op, const SpectralOptions& options) {
    Matrix s = symmetric_conjugate(op);
    const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
    require(asym <= 1e-8 * std::max(1.0, s.cwiseAbs().maxCoeff()), ErrorKind::InvalidInput,
            "operator is not reversible with respect to its degrees");
    s = 0.5 * (s + s.transpose());

    SymmetricEigenpairs pairs = op.size() <= options.dense_limit
                                    ? dense_symmetric_eigenpairs(s)
                                    : lanczos_top_eigenpairs(s, std::min(options.top, op.size()),
                                                             options.tolerance, options.max_restarts);

    DiffusionMap map;
    map.t = 0;
    map.eigenvalues = std::move(pairs.values);
    const Vector inv_root_pi = op.stationary().cwiseSqrt().cwiseInverse();
    map.eigenvectors = inv_root_pi.asDiagonal() * pairs.vectors;

    for (Eigen::Index j = 0; j < map.eigenvectors.cols(); ++j) {
        auto col = map.eigenvectors.col(j);
        Eigen::Index pivot = 0;
        col.cwiseAbs().maxCoeff(&pivot);
        if (j == 0) {
            if (col.sum() < 0.0) col = -col;
        } else if (col[pivot] < 0.0) {
            col = -col;
        }
    }
    return map;
}

Matrix diffusion_coordinates(const DiffusionMap& map, int t, Index d) {
    require(t >= 0, ErrorKind::InvalidInput, "diffusion time must be nonnegative");
    require(d >= 1 && d <= static_cast<Index>(map.eigenvectors.cols()), ErrorKind::InvalidInput,
            "coordinate count out of range");
    const auto cols = static_cast<Eigen::Index>(d);
    Vector scale(cols);
    for (Eigen::Index j = 0; j < cols; ++j) scale[j] = std::pow(map.eigenvalues[j], t);
    return map.eigenvectors.leftCols(cols) * scale.asDiagonal();
}

DiffusionOperator power_operator(const DiffusionOperator& op, int t) {
    require(t >= 1, ErrorKind::InvalidInput, "diffusion time must be >= 1");
    Matrix result;
    Matrix base = op.p();
    bool have_result = false;
    for (int e = t; e > 0; e >>= 1) {
        if (e & 1) {
            result = have_result ? Matrix(result * base) : base;
            have_result = true;
        }
        if (e > 1) base = base * base;
    }
    return DiffusionOperator::from_matrix(std::move(result), op.degrees());
}

double diffusion_distance(const DiffusionOperator& op, int t, Index i, Index j) {
    require(t >= 1, ErrorKind::InvalidInput, "diffusion time must be >= 1");
    require(i < op.size() && j < op.size(), ErrorKind::InvalidInput, "point index out of range");
    if (i == j) return 0.0;
    return diffusion_distance(power_operator(op, t).p(), op.stationary(), i, j);
}

double diffusion_distance(const Matrix& p_t, const Vector& stationary, Index i, Index j) {
    require(i < static_cast<Index>(p_t.rows()) && j < static_cast<Index>(p_t.rows()), ErrorKind::InvalidInput,
            "point index out of range");
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    double sum = 0.0;
    for (Eigen::Index z = 0; z < p_t.cols(); ++z) {
        const double diff = p_t(a, z) - p_t(b, z);
        sum += diff * diff / stationary[z];
    }
    return std::sqrt(sum);
}

Matrix diffusion_distance_matrix(const Matrix& p_t, const Vector& stationary) {
    const Eigen::Index n = p_t.rows();
    const RowMatrix w = p_t * stationary.cwiseSqrt().cwiseInverse().asDiagonal();
    Matrix dist(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        const auto i = static_cast<Eigen::Index>(row);
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) dist(i, j) = (w.row(i) - w.row(j)).norm();
    });
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j) dist(i, j) = dist(j, i);
    return dist;
}

Matrix diffusion_distance_matrix(const DiffusionOperator& op, int t) {
    return diffusion_distance_matrix(power_operator(op, t).p(), op.stationary());
}

}  // namespace dcurv
