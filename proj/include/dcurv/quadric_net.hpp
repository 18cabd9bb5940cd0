#pragma once

#include "dcurv/geometry.hpp"
#include "dcurv/manifold_gen.hpp"
#include "dcurv/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dcurv {

struct CorpusConfig {
    Index n_quadrics = 500;
    Index n_points = 200;
    std::vector<Index> dims{2, 5};  ///< cycled through in order
    Index ambient = 5;              ///< K; targets have K(K+1)/2 entries
    int t = 8;
    Index d_emb = 25;
    double coeff_range = 1.0;
    double domain_radius = 1.0;
    KernelConfig kernel;
    Seed seed = 0;
};

void validate(const CorpusConfig& cfg);

/// One sampled quadric as seen by the network.
struct TrainingExample {
    Matrix phi;        ///< n x d_emb diffusion coordinates of the graph points (x, f(x))
    Vector loss_axis;  ///< f(x_i)
    Matrix coords;     ///< n x K sample locations, zero-padded beyond k
    Vector target;     ///< upper triangle of Q, length K(K+1)/2
    Index k = 0;
};

/// Embeds an already sampled quadric (xs may have fewer than `ambient` columns).
TrainingExample make_example(const Matrix& xs, const Vector& ys, const Matrix& q, Index ambient, Index d_emb, int t,
                             const KernelConfig& kernel);

std::vector<TrainingExample> build_corpus(const CorpusConfig& cfg);

/// Set-pooling regressor: a tanh encoder applied to every point's input
/// (coords || phi || f), mean pooling, a tanh head and a linear output layer.
struct NetModel {
    Index ambient = 5;
    Index d_emb = 25;
    int t = 8;
    std::vector<Index> encoder_widths{64, 64};
    std::vector<Index> head_widths{64};
    double l1_weight = 0.0;
    Seed seed = 0;
    Vector weights;

    Index input_dim() const noexcept { return ambient + d_emb + 1; }
    Index output_dim() const noexcept { return triangle_size(ambient); }
    Index parameter_count() const;
};

/// Weights drawn uniform on +-1/sqrt(fan_in), biases zero.
NetModel init_model(NetModel shape);

/// Raw network output (length K(K+1)/2).
Vector forward(const NetModel& model, const Matrix& phi, const Vector& loss_axis, const Matrix& coords);

/// sum_j (target_j - out_j)^2 + l1 * |out_j| for one example; adds d(loss)/d(weights) to *grad when given.
double example_loss(const NetModel& model, const TrainingExample& ex, Vector* grad = nullptr);

enum class Optimizer { Adam, Momentum };

struct TrainConfig {
    Index epochs = 100;
    double lr = 1e-3;
    Index batch = 16;
    Optimizer optimizer = Optimizer::Adam;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainResult {
    NetModel model;
    std::vector<double> epoch_loss;  ///< mean example loss over each epoch's batches
};

TrainResult train(NetModel model, const std::vector<TrainingExample>& corpus, const TrainConfig& cfg);

/// Symmetric K x K estimate assembled from the network output.
Quadric predict(const NetModel& model, const Matrix& phi, const Vector& loss_axis, const Matrix& coords);
Quadric predict(const NetModel& model, const TrainingExample& ex);

/// Upper triangle uniform on [-coeff_range, coeff_range], mirrored.
Quadric random_baseline(Index ambient, double coeff_range, Seed seed);

/// Mean squared error over the leading k x k upper triangle.
double active_mse(const Matrix& estimate, const Vector& target, Index ambient, Index k);

struct EvalRow {
    Index k = 0;
    Index count = 0;
    double curvenet_mean = 0.0, curvenet_sd = 0.0;
    double ls_mean = 0.0, ls_sd = 0.0;
    double baseline_mean = 0.0, baseline_sd = 0.0;
};

struct EvalTable {
    std::vector<EvalRow> rows;  ///< one per intrinsic dimension, ascending
    EvalRow overall;            ///< k = 0, pooled over all examples
};

/// Baseline statistics pool `baseline_draws` independent random quadrics per example.
EvalTable evaluate(const NetModel& model, const std::vector<TrainingExample>& held_out, double coeff_range,
                   Seed baseline_seed, Index baseline_draws = 100);

// DCNN checkpoint, little-endian:
//   "DCNN" | u32 version | u32 K | u32 d_emb | u32 t | u32 n_enc | u32 widths... |
//   u32 n_head | u32 widths... | f64 l1 | u64 seed | u64 n_weights | f64 weights...
void write_model(std::ostream& out, const NetModel& model);
NetModel read_model(std::istream& in);
void save_model(const std::string& path, const NetModel& model);
NetModel load_model(const std::string& path);

}  // namespace dcurv
