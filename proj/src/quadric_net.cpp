#include "dcurv/quadric_net.hpp"

#include "dcurv/error.hpp"
#include "dcurv/io.hpp"
#include "dcurv/parallel.hpp"
#include "dcurv/quadric_fit.hpp"
#include "dcurv/rng.hpp"
#include "dcurv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

namespace dcurv {

namespace {

constexpr std::uint32_t kModelVersion = 1;
constexpr std::array<char, 4> kModelMagic{'D', 'C', 'N', 'N'};

struct Layer {
    Eigen::Index in = 0;
    Eigen::Index out = 0;
    Eigen::Index offset = 0;  ///< W (out x in, row-major) then b (out)
    Eigen::Index size() const { return in * out + out; }
};

struct Layout {
    std::vector<Layer> encoder;
    std::vector<Layer> head;
    Layer output;
    Eigen::Index total = 0;
};

Layout layout_of(const NetModel& m) {
    Layout lay;
    Eigen::Index width = static_cast<Eigen::Index>(m.input_dim());
    Eigen::Index offset = 0;
    auto add = [&](Eigen::Index out) {
        Layer l{width, out, offset};
        offset += l.size();
        width = out;
        return l;
    };
    for (Index w : m.encoder_widths) lay.encoder.push_back(add(static_cast<Eigen::Index>(w)));
    for (Index w : m.head_widths) lay.head.push_back(add(static_cast<Eigen::Index>(w)));
    lay.output = add(static_cast<Eigen::Index>(m.output_dim()));
    lay.total = offset;
    return lay;
}

using ConstW = Eigen::Map<const RowMatrix>;
using MutW = Eigen::Map<RowMatrix>;

ConstW weight(const Vector& w, const Layer& l) { return ConstW(w.data() + l.offset, l.out, l.in); }
Eigen::Map<const Vector> bias(const Vector& w, const Layer& l) {
    return Eigen::Map<const Vector>(w.data() + l.offset + l.in * l.out, l.out);
}
MutW weight(Vector& w, const Layer& l) { return MutW(w.data() + l.offset, l.out, l.in); }
Eigen::Map<Vector> bias(Vector& w, const Layer& l) { return Eigen::Map<Vector>(w.data() + l.offset + l.in * l.out, l.out); }

void check_shape(const NetModel& m, const Matrix& phi, const Vector& loss_axis, const Matrix& coords) {
    require(m.weights.size() == static_cast<Eigen::Index>(m.parameter_count()), ErrorKind::ShapeMismatch,
            "model weights do not match its architecture");
    require(phi.rows() >= 1, ErrorKind::ShapeMismatch, "no points");
    require(phi.cols() == static_cast<Eigen::Index>(m.d_emb), ErrorKind::ShapeMismatch,
            "embedding width " + std::to_string(phi.cols()) + " != model d_emb " + std::to_string(m.d_emb));
    require(coords.cols() == static_cast<Eigen::Index>(m.ambient), ErrorKind::ShapeMismatch,
            "coordinate width " + std::to_string(coords.cols()) + " != model K " + std::to_string(m.ambient));
    require(loss_axis.size() == phi.rows() && coords.rows() == phi.rows(), ErrorKind::ShapeMismatch,
            "phi, loss axis and coords disagree on the number of points");
}

Matrix assemble_input(const Matrix& phi, const Vector& loss_axis, const Matrix& coords) {
    Matrix x(phi.rows(), coords.cols() + phi.cols() + 1);
    x << coords, phi, loss_axis;
    return x;
}

struct Activations {
    std::vector<Matrix> enc;  ///< enc[0] is the input
    std::vector<Vector> head; ///< head[0] is the pooled vector
    Vector out;
};

Activations run(const NetModel& m, const Layout& lay, Matrix input) {
    Activations a;
    a.enc.push_back(std::move(input));
    for (const Layer& l : lay.encoder) {
        Matrix z = a.enc.back() * weight(m.weights, l).transpose();
        z.rowwise() += bias(m.weights, l).transpose();
        a.enc.push_back(z.array().tanh().matrix());
    }
    a.head.push_back(a.enc.back().colwise().mean().transpose());
    for (const Layer& l : lay.head) {
        Vector z = weight(m.weights, l) * a.head.back() + bias(m.weights, l);
        a.head.push_back(z.array().tanh().matrix());
    }
    a.out = weight(m.weights, lay.output) * a.head.back() + bias(m.weights, lay.output);
    return a;
}

void backprop(const NetModel& m, const Layout& lay, const Activations& a, const Vector& d_out, Vector& grad) {
    weight(grad, lay.output).noalias() += d_out * a.head.back().transpose();
    bias(grad, lay.output) += d_out;
    Vector g = weight(m.weights, lay.output).transpose() * d_out;
    for (std::size_t i = lay.head.size(); i-- > 0;) {
        const Layer& l = lay.head[i];
        const Vector gz = g.cwiseProduct((1.0 - a.head[i + 1].array().square()).matrix());
        weight(grad, l).noalias() += gz * a.head[i].transpose();
        bias(grad, l) += gz;
        g = weight(m.weights, l).transpose() * gz;
    }
    const double n = static_cast<double>(a.enc.front().rows());
    Matrix gm = (g / n).transpose().replicate(a.enc.front().rows(), 1);
    for (std::size_t i = lay.encoder.size(); i-- > 0;) {
        const Layer& l = lay.encoder[i];
        const Matrix gz = gm.cwiseProduct((1.0 - a.enc[i + 1].array().square()).matrix());
        weight(grad, l).noalias() += gz.transpose() * a.enc[i];
        bias(grad, l) += gz.colwise().sum().transpose();
        if (i > 0) gm = gz * weight(m.weights, l);
    }
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

Matrix pad(const Matrix& q, Index ambient) {
    const auto big = static_cast<Eigen::Index>(ambient);
    require(q.rows() == q.cols() && q.rows() <= big, ErrorKind::ShapeMismatch, "quadric larger than ambient dimension");
    Matrix out = Matrix::Zero(big, big);
    out.topLeftCorner(q.rows(), q.cols()) = q;
    return out;
}

}  // namespace

void validate(const CorpusConfig& cfg) {
    require(cfg.n_quadrics >= 1, ErrorKind::InvalidConfig, "corpus needs at least one quadric");
    require(!cfg.dims.empty(), ErrorKind::InvalidConfig, "corpus needs at least one intrinsic dimension");
    for (Index k : cfg.dims)
        require(k >= 2 && k <= cfg.ambient, ErrorKind::InvalidConfig, "intrinsic dimensions must lie in [2, K]");
    for (Index k : cfg.dims)
        require(cfg.n_points >= triangle_size(k) + 1, ErrorKind::InvalidConfig, "too few points for dimension " +
                                                                                   std::to_string(k));
    require(cfg.d_emb >= 1 && cfg.d_emb <= cfg.n_points, ErrorKind::InvalidConfig, "d_emb must lie in [1, n_points]");
    require(cfg.t >= 0, ErrorKind::InvalidConfig, "t must be >= 0");
    require(cfg.coeff_range >= 0.0 && std::isfinite(cfg.coeff_range), ErrorKind::InvalidConfig, "bad coeff_range");
    require(cfg.domain_radius > 0.0 && std::isfinite(cfg.domain_radius), ErrorKind::InvalidConfig, "bad domain_radius");
    validate(cfg.kernel, cfg.n_points);
}

TrainingExample make_example(const Matrix& xs, const Vector& ys, const Matrix& q, Index ambient, Index d_emb, int t,
                             const KernelConfig& kernel) {
    require(xs.rows() == ys.size(), ErrorKind::ShapeMismatch, "xs and ys disagree on the number of samples");
    require(xs.cols() <= static_cast<Eigen::Index>(ambient), ErrorKind::ShapeMismatch,
            "sample dimension exceeds ambient dimension");
    Matrix graph(xs.rows(), xs.cols() + 1);
    graph << xs, ys;
    const DiffusionOperator op = build_operator(PointCloud(std::move(graph)), kernel);
    SpectralOptions opts;
    opts.top = d_emb;
    const DiffusionMap map = spectral_decompose(op, opts);

    TrainingExample ex;
    ex.phi = diffusion_coordinates(map, t, d_emb);
    ex.loss_axis = ys;
    ex.coords = Matrix::Zero(xs.rows(), static_cast<Eigen::Index>(ambient));
    ex.coords.leftCols(xs.cols()) = xs;
    ex.target = upper_triangle(pad(q, ambient));
    ex.k = static_cast<Index>(xs.cols());
    return ex;
}

std::vector<TrainingExample> build_corpus(const CorpusConfig& cfg) {
    validate(cfg);
    std::vector<TrainingExample> out(cfg.n_quadrics);
    parallel_for(cfg.n_quadrics, [&](std::size_t i) {
        const Index k = cfg.dims[i % cfg.dims.size()];
        const Quadric quad = random_quadric(k, cfg.ambient, cfg.coeff_range, mix_seed(cfg.seed, 2 * i));
        const QuadricSample s = sample_quadric(quad, cfg.n_points, cfg.domain_radius, mix_seed(cfg.seed, 2 * i + 1));
        out[i] = make_example(s.xs, s.ys, quad.q, cfg.ambient, cfg.d_emb, cfg.t, cfg.kernel);
    });
    return out;
}

Index NetModel::parameter_count() const { return static_cast<Index>(layout_of(*this).total); }

NetModel init_model(NetModel shape) {
    require(shape.ambient >= 1, ErrorKind::InvalidConfig, "K must be >= 1");
    for (Index w : shape.encoder_widths) require(w >= 1, ErrorKind::InvalidConfig, "layer widths must be >= 1");
    for (Index w : shape.head_widths) require(w >= 1, ErrorKind::InvalidConfig, "layer widths must be >= 1");
    require(shape.l1_weight >= 0.0 && std::isfinite(shape.l1_weight), ErrorKind::InvalidConfig, "l1 weight must be >= 0");
    const Layout lay = layout_of(shape);
    shape.weights = Vector::Zero(lay.total);
    Rng rng = make_rng(shape.seed, 0x6e6574);
    auto fill = [&](const Layer& l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
        auto w = weight(shape.weights, l);
        for (Eigen::Index r = 0; r < l.out; ++r)
            for (Eigen::Index c = 0; c < l.in; ++c) w(r, c) = uniform(rng, -bound, bound);
    };
    for (const Layer& l : lay.encoder) fill(l);
    for (const Layer& l : lay.head) fill(l);
    fill(lay.output);
    return shape;
}

Vector forward(const NetModel& model, const Matrix& phi, const Vector& loss_axis, const Matrix& coords) {
    check_shape(model, phi, loss_axis, coords);
    return run(model, layout_of(model), assemble_input(phi, loss_axis, coords)).out;
}

double example_loss(const NetModel& model, const TrainingExample& ex, Vector* grad) {
    check_shape(model, ex.phi, ex.loss_axis, ex.coords);
    require(ex.target.size() == static_cast<Eigen::Index>(model.output_dim()), ErrorKind::ShapeMismatch,
            "target length does not match model output");
    const Layout lay = layout_of(model);
    const Activations a = run(model, lay, assemble_input(ex.phi, ex.loss_axis, ex.coords));
    const Vector diff = a.out - ex.target;
    const double loss = diff.squaredNorm() + model.l1_weight * a.out.cwiseAbs().sum();
    if (grad) {
        require(grad->size() == lay.total, ErrorKind::ShapeMismatch, "gradient buffer has the wrong size");
        Vector d_out = 2.0 * diff;
        if (model.l1_weight > 0.0)
            for (Eigen::Index j = 0; j < d_out.size(); ++j) d_out(j) += model.l1_weight * sign(a.out(j));
        backprop(model, lay, a, d_out, *grad);
    }
    return loss;
}

TrainResult train(NetModel model, const std::vector<TrainingExample>& corpus, const TrainConfig& cfg) {
    require(!corpus.empty(), ErrorKind::InvalidInput, "training corpus is empty");
    require(cfg.lr > 0.0 && std::isfinite(cfg.lr), ErrorKind::InvalidConfig, "learning rate must be > 0");
    require(cfg.batch >= 1, ErrorKind::InvalidConfig, "batch size must be >= 1");
    if (model.weights.size() == 0) model = init_model(model);
    const auto p = static_cast<Eigen::Index>(model.parameter_count());
    require(model.weights.size() == p, ErrorKind::ShapeMismatch, "model weights do not match its architecture");

    TrainResult result;
    Vector m1 = Vector::Zero(p), m2 = Vector::Zero(p);
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t step = 0;
    std::size_t batch_index = 0;

    for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng = make_rng(model.seed, 0x5348 + epoch);
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng() % i);
            std::swap(order[i - 1], order[j]);
        }
        double epoch_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch, ++batch_index) {
            const std::size_t count = std::min<std::size_t>(cfg.batch, order.size() - start);
            std::vector<Vector> grads(count, Vector::Zero(p));
            std::vector<double> losses(count);
            parallel_for(count, [&](std::size_t b) {
                losses[b] = example_loss(model, corpus[order[start + b]], &grads[b]);
            });
            Vector g = Vector::Zero(p);
            double loss = 0.0;
            for (std::size_t b = 0; b < count; ++b) {
                g += grads[b];
                loss += losses[b];
            }
            if (!std::isfinite(loss) || !g.allFinite())
                fail(ErrorKind::NonFiniteLoss, "non-finite loss at batch " + std::to_string(batch_index) + " (epoch " +
                                                   std::to_string(epoch) + ")");
            epoch_sum += loss;
            g /= static_cast<double>(count);
            ++step;
            if (cfg.optimizer == Optimizer::Adam) {
                m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * g;
                m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * g.cwiseProduct(g);
                const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
                const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
                model.weights.array() -=
                    cfg.lr * (m1.array() / c1) / ((m2.array() / c2).sqrt() + cfg.epsilon);
            } else {
                m1 = cfg.momentum * m1 + g;
                model.weights -= cfg.lr * m1;
            }
        }
        result.epoch_loss.push_back(epoch_sum / static_cast<double>(corpus.size()));
    }
    result.model = std::move(model);
    return result;
}

Quadric predict(const NetModel& model, const Matrix& phi, const Vector& loss_axis, const Matrix& coords) {
    return Quadric{from_upper_triangle(forward(model, phi, loss_axis, coords), model.ambient), model.ambient};
}

Quadric predict(const NetModel& model, const TrainingExample& ex) {
    return predict(model, ex.phi, ex.loss_axis, ex.coords);
}

Quadric random_baseline(Index ambient, double coeff_range, Seed seed) {
    require(ambient >= 1, ErrorKind::InvalidInput, "K must be >= 1");
    const auto big = static_cast<Eigen::Index>(ambient);
    Quadric out{Matrix::Zero(big, big), ambient};
    Rng rng = make_rng(seed, 0x62);
    for (Eigen::Index i = 0; i < big; ++i) {
        for (Eigen::Index j = i; j < big; ++j) {
            const double v = uniform(rng, -coeff_range, coeff_range);
            out.q(i, j) = v;
            out.q(j, i) = v;
        }
    }
    return out;
}

double active_mse(const Matrix& estimate, const Vector& target, Index ambient, Index k) {
    const auto kk = static_cast<Eigen::Index>(k);
    require(estimate.rows() >= kk && estimate.cols() >= kk, ErrorKind::ShapeMismatch, "estimate smaller than k");
    const Matrix truth = from_upper_triangle(target, ambient);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < kk; ++i)
        for (Eigen::Index j = i; j < kk; ++j) sum += (estimate(i, j) - truth(i, j)) * (estimate(i, j) - truth(i, j));
    return sum / static_cast<double>(triangle_size(k));
}

EvalTable evaluate(const NetModel& model, const std::vector<TrainingExample>& held_out, double coeff_range,
                   Seed baseline_seed, Index baseline_draws) {
    require(!held_out.empty(), ErrorKind::InvalidInput, "held-out set is empty");
    require(baseline_draws >= 1, ErrorKind::InvalidConfig, "baseline_draws must be >= 1");
    const std::size_t n = held_out.size();
    std::vector<double> net(n), ls(n);
    std::vector<std::vector<double>> base(n, std::vector<double>(baseline_draws));
    parallel_for(n, [&](std::size_t i) {
        const TrainingExample& ex = held_out[i];
        const auto k = static_cast<Eigen::Index>(ex.k);
        net[i] = active_mse(predict(model, ex).q, ex.target, model.ambient, ex.k);
        ls[i] = active_mse(ls_quadric_fit(ex.coords.leftCols(k), ex.loss_axis).q, ex.target, model.ambient, ex.k);
        for (Index d = 0; d < baseline_draws; ++d)
            base[i][d] = active_mse(random_baseline(model.ambient, coeff_range, mix_seed(baseline_seed, i * baseline_draws + d)).q,
                                    ex.target, model.ambient, ex.k);
    });

    auto summarize = [&](Index k, const std::vector<std::size_t>& idx) {
        std::vector<double> a, b, c;
        for (std::size_t i : idx) {
            a.push_back(net[i]);
            b.push_back(ls[i]);
            c.insert(c.end(), base[i].begin(), base[i].end());
        }
        return EvalRow{k, idx.size(), stats::mean(a), stats::stddev(a), stats::mean(b), stats::stddev(b),
                       stats::mean(c), stats::stddev(c)};
    };
    std::map<Index, std::vector<std::size_t>> by_dim;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < n; ++i) by_dim[held_out[i].k].push_back(i);
    EvalTable table;
    for (const auto& [k, idx] : by_dim) table.rows.push_back(summarize(k, idx));
    table.overall = summarize(0, all);
    return table;
}

void write_model(std::ostream& out, const NetModel& model) {
    using namespace binary;
    write_magic(out, kModelMagic);
    write_u32(out, kModelVersion);
    write_u32(out, static_cast<std::uint32_t>(model.ambient));
    write_u32(out, static_cast<std::uint32_t>(model.d_emb));
    write_u32(out, static_cast<std::uint32_t>(model.t));
    write_u32(out, static_cast<std::uint32_t>(model.encoder_widths.size()));
    for (Index w : model.encoder_widths) write_u32(out, static_cast<std::uint32_t>(w));
    write_u32(out, static_cast<std::uint32_t>(model.head_widths.size()));
    for (Index w : model.head_widths) write_u32(out, static_cast<std::uint32_t>(w));
    write_f64(out, model.l1_weight);
    write_u64(out, model.seed);
    write_u64(out, static_cast<std::uint64_t>(model.weights.size()));
    for (Eigen::Index i = 0; i < model.weights.size(); ++i) write_f64(out, model.weights(i));
    require(static_cast<bool>(out), ErrorKind::Io, "failed writing model checkpoint");
}

NetModel read_model(std::istream& in) {
    using namespace binary;
    expect_magic(in, kModelMagic);
    const std::uint32_t version = read_u32(in);
    require(version == kModelVersion, ErrorKind::Io, "unsupported checkpoint version " + std::to_string(version));
    NetModel m;
    m.ambient = read_u32(in);
    m.d_emb = read_u32(in);
    m.t = static_cast<int>(read_u32(in));
    m.encoder_widths.assign(read_u32(in), 0);
    for (Index& w : m.encoder_widths) w = read_u32(in);
    m.head_widths.assign(read_u32(in), 0);
    for (Index& w : m.head_widths) w = read_u32(in);
    m.l1_weight = read_f64(in);
    m.seed = read_u64(in);
    const std::uint64_t count = read_u64(in);
    require(count == m.parameter_count(), ErrorKind::Io, "checkpoint weight count does not match its architecture");
    m.weights.resize(static_cast<Eigen::Index>(count));
    for (Eigen::Index i = 0; i < m.weights.size(); ++i) m.weights(i) = read_f64(in);
    return m;
}

void save_model(const std::string& path, const NetModel& model) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path + " for writing");
    write_model(out, model);
}

NetModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
    return read_model(in);
}

}  // namespace dcurv
