#include "dcurv/experiments.hpp"

#include "dcurv/curvature.hpp"
#include "dcurv/error.hpp"
#include "dcurv/io.hpp"
#include "dcurv/stats.hpp"

#include <cmath>

namespace dcurv {

using json = nlohmann::ordered_json;

namespace {

CurvatureField surface_curvature(const SurfaceSample& s, int t, double q, double alpha) {
    KernelConfig kernel;
    kernel.alpha = alpha;
    const DiffusionOperator op = build_operator(s.cloud, kernel);
    return pointwise_curvature(op, t, QuantileRadius{q});
}

double interior_mean(const CurvatureField& field, const std::vector<bool>& mask) {
    double sum = 0.0;
    Index count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        sum += field.values(static_cast<Eigen::Index>(i));
        ++count;
    }
    require(count > 0, ErrorKind::EmptyRegion, "no interior points");
    return sum / static_cast<double>(count);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<std::string> row(std::initializer_list<std::string> cells) { return cells; }

}  // namespace

Surface ordering_sphere() { return Sphere{1.0}; }
Surface ordering_plane() { return Plane{2.0}; }
Surface ordering_saddle() { return HyperbolicParaboloid{2.0}; }

std::vector<OrderingRow> run_ordering(const OrderingConfig& cfg) {
    std::vector<OrderingRow> rows;
    for (Index s = 0; s < cfg.n_seeds; ++s) {
        OrderingRow r;
        r.seed = cfg.first_seed + s;
        double* slots[] = {&r.sphere, &r.plane, &r.saddle};
        const Surface surfaces[] = {ordering_sphere(), ordering_plane(), ordering_saddle()};
        for (int i = 0; i < 3; ++i) {
            const SurfaceSample sample = sample_surface(surfaces[i], cfg.n_points, 0.0, r.seed);
            *slots[i] = interior_mean(surface_curvature(sample, cfg.t, cfg.quantile, cfg.alpha), sample.interior);
        }
        rows.push_back(r);
    }
    return rows;
}

std::string ordering_csv(const std::vector<OrderingRow>& rows) {
    std::vector<std::vector<std::string>> out;
    for (const auto& r : rows)
        out.push_back(row({std::to_string(r.seed), format_double(r.sphere), format_double(r.plane),
                           format_double(r.saddle), r.ordered() ? "1" : "0"}));
    return to_csv({"seed", "sphere", "plane", "hyperbolic_paraboloid", "ordered"}, out);
}

CorrelationConfig default_correlation_config() {
    CorrelationConfig cfg;
    cfg.cases = {
        {"ellipsoid_1_1_3", Ellipsoid{1.0, 1.0, 3.0}, 0},
        {"hyperboloid_1_1", Hyperboloid{1.0, 1.0}, 0},
        {"hyperboloid_1_1.25", Hyperboloid{1.0, 1.25}, 0},
        {"hyperbolic_paraboloid", HyperbolicParaboloid{2.0}, 0},
    };
    return cfg;
}

std::vector<CorrelationResult> run_correlation(const CorrelationConfig& cfg) {
    std::vector<CorrelationResult> out;
    for (const auto& c : cfg.cases) {
        const SurfaceSample sample = sample_surface(c.surface, cfg.n_points, cfg.noise_sd, c.seed);
        const CurvatureField field = surface_curvature(sample, cfg.t, cfg.quantile, cfg.alpha);
        const Correlation corr = curvature_correlation(field, sample.gauss_curvature, sample.interior);
        out.push_back({c.label, c.seed, corr.pearson, corr.spearman, corr.count, sample.gauss_curvature, field.values,
                       sample.interior});
    }
    return out;
}

std::string correlation_summary_csv(const std::vector<CorrelationResult>& results) {
    std::vector<std::vector<std::string>> out;
    for (const auto& r : results)
        out.push_back(row({r.label, std::to_string(r.seed), std::to_string(r.interior), format_double(r.pearson),
                           format_double(r.spearman)}));
    return to_csv({"surface", "seed", "interior_points", "pearson", "spearman"}, out);
}

std::string correlation_biaxial_csv(const std::vector<CorrelationResult>& results) {
    std::vector<std::vector<std::string>> out;
    for (const auto& r : results)
        for (Eigen::Index i = 0; i < r.gauss.size(); ++i)
            out.push_back(row({r.label, std::to_string(i), format_double(r.gauss(i)), format_double(r.diffusion(i)),
                               r.mask[static_cast<std::size_t>(i)] ? "1" : "0"}));
    return to_csv({"surface", "point_id", "gauss_curvature", "diffusion_curvature", "interior"}, out);
}

TableConfig default_table_config() { return TableConfig{}; }

TableResult run_table(const TableConfig& cfg) {
    const std::vector<TrainingExample> corpus = build_corpus(cfg.train);
    CorpusConfig held = cfg.train;
    held.n_quadrics = cfg.held_out;
    held.seed = cfg.held_out_seed;
    const std::vector<TrainingExample> test = build_corpus(held);

    NetModel shape = cfg.shape;
    shape.ambient = cfg.train.ambient;
    shape.d_emb = cfg.train.d_emb;
    shape.t = cfg.train.t;
    shape.weights.resize(0);
    TrainResult trained = train(init_model(shape), corpus, cfg.optimizer);
    EvalTable table = evaluate(trained.model, test, cfg.train.coeff_range, cfg.baseline_seed, cfg.baseline_draws);
    return {std::move(trained.model), std::move(trained.epoch_loss), std::move(table)};
}

std::string loss_csv(const std::vector<double>& epoch_loss) {
    std::vector<std::vector<std::string>> out;
    for (std::size_t e = 0; e < epoch_loss.size(); ++e) out.push_back(row({std::to_string(e), format_double(epoch_loss[e])}));
    return to_csv({"epoch", "loss"}, out);
}

std::string mse_table_csv(const EvalTable& table) {
    std::vector<std::vector<std::string>> out;
    auto emit = [&](const EvalRow& r, const std::string& dim) {
        out.push_back(row({dim, std::to_string(r.count), format_double(r.curvenet_mean), format_double(r.curvenet_sd),
                           format_double(r.ls_mean), format_double(r.ls_sd), format_double(r.baseline_mean),
                           format_double(r.baseline_sd)}));
    };
    for (const auto& r : table.rows) emit(r, std::to_string(r.k));
    emit(table.overall, "all");
    return to_csv({"dim", "count", "curvenet_mean", "curvenet_sd", "ls_oracle_mean", "ls_oracle_sd",
                   "baseline_random_mean", "baseline_random_sd"},
                  out);
}

json to_json(const KernelConfig& c) {
    json j;
    if (const auto* f = std::get_if<FixedBandwidth>(&c.bandwidth)) {
        j["bandwidth"] = "fixed";
        j["sigma"] = f->sigma;
    } else {
        const auto& a = std::get<AdaptiveKnn>(c.bandwidth);
        j["bandwidth"] = "adaptive-knn";
        j["k"] = a.k ? json(*a.k) : json();
    }
    j["alpha"] = c.alpha;
    j["truncate"] = c.truncate;
    j["truncation_floor"] = c.truncation_floor;
    return j;
}

KernelConfig kernel_config_from_json(const json& j) {
    KernelConfig c;
    const std::string rule = get_or<std::string>(j, "bandwidth", "adaptive-knn");
    if (rule == "fixed") {
        c.bandwidth = FixedBandwidth{j.at("sigma").get<double>()};
    } else if (rule == "adaptive-knn") {
        AdaptiveKnn a;
        if (j.contains("k") && !j.at("k").is_null()) a.k = j.at("k").get<Index>();
        c.bandwidth = a;
    } else {
        fail(ErrorKind::InvalidConfig, "unknown bandwidth rule '" + rule + "'");
    }
    c.alpha = get_or(j, "alpha", c.alpha);
    c.truncate = get_or(j, "truncate", c.truncate);
    c.truncation_floor = get_or(j, "truncation_floor", c.truncation_floor);
    return c;
}

json to_json(const Surface& s) {
    json j;
    j["name"] = surface_name(s);
    json params = json::object();
    for (const auto& [k, v] : surface_params(s)) params[k] = v;
    j["params"] = params;
    return j;
}

Surface make_surface(const std::string& name, const std::map<std::string, double>& p) {
    auto get = [&](const char* key, double fallback) {
        auto it = p.find(key);
        return it == p.end() ? fallback : it->second;
    };
    if (name == "sphere") return Sphere{get("R", 1.0)};
    if (name == "torus") return Torus{get("R", 2.0), get("r", 1.0)};
    if (name == "ellipsoid") return Ellipsoid{get("a", 1.0), get("b", 1.0), get("c", 3.0)};
    if (name == "hyperbolic-paraboloid" || name == "saddle") return HyperbolicParaboloid{get("domain_radius", 2.0)};
    if (name == "plane") return Plane{get("domain_radius", 2.0)};
    if (name == "hyperboloid") return Hyperboloid{get("waist", 1.0), get("half_height", 1.0)};
    if (name == "quadric-graph" || name == "paraboloid") {
        QuadricGraph g;
        g.q << get("q00", 1.0), get("q01", 0.0), get("q01", 0.0), get("q11", 1.0);
        g.domain_radius = get("domain_radius", 1.0);
        return g;
    }
    fail(ErrorKind::InvalidConfig, "unknown surface '" + name + "'");
}

Surface surface_from_json(const json& j) {
    std::map<std::string, double> params;
    if (j.contains("params"))
        for (const auto& [k, v] : j.at("params").items()) params[k] = v.get<double>();
    return make_surface(j.at("name").get<std::string>(), params);
}

json to_json(const OrderingConfig& c) {
    json j;
    j["n_points"] = c.n_points;
    j["first_seed"] = c.first_seed;
    j["n_seeds"] = c.n_seeds;
    j["t"] = c.t;
    j["quantile"] = c.quantile;
    j["alpha"] = c.alpha;
    j["surfaces"] = json::array({to_json(ordering_sphere()), to_json(ordering_plane()), to_json(ordering_saddle())});
    return j;
}

OrderingConfig ordering_config_from_json(const json& j) {
    OrderingConfig c;
    c.n_points = get_or(j, "n_points", c.n_points);
    c.first_seed = get_or(j, "first_seed", c.first_seed);
    c.n_seeds = get_or(j, "n_seeds", c.n_seeds);
    c.t = get_or(j, "t", c.t);
    c.quantile = get_or(j, "quantile", c.quantile);
    c.alpha = get_or(j, "alpha", c.alpha);
    return c;
}

json to_json(const CorrelationConfig& c) {
    json j;
    json cases = json::array();
    for (const auto& cc : c.cases) {
        json item;
        item["label"] = cc.label;
        item["surface"] = to_json(cc.surface);
        item["seed"] = cc.seed;
        cases.push_back(item);
    }
    j["cases"] = cases;
    j["n_points"] = c.n_points;
    j["t"] = c.t;
    j["quantile"] = c.quantile;
    j["alpha"] = c.alpha;
    j["noise_sd"] = c.noise_sd;
    return j;
}

CorrelationConfig correlation_config_from_json(const json& j) {
    CorrelationConfig c = j.contains("cases") ? CorrelationConfig{} : default_correlation_config();
    if (j.contains("cases"))
        for (const auto& item : j.at("cases"))
            c.cases.push_back({item.at("label").get<std::string>(), surface_from_json(item.at("surface")),
                               get_or<Seed>(item, "seed", 0)});
    c.n_points = get_or(j, "n_points", c.n_points);
    c.t = get_or(j, "t", c.t);
    c.quantile = get_or(j, "quantile", c.quantile);
    c.alpha = get_or(j, "alpha", c.alpha);
    c.noise_sd = get_or(j, "noise_sd", c.noise_sd);
    return c;
}

json to_json(const CorpusConfig& c) {
    json j;
    j["n_quadrics"] = c.n_quadrics;
    j["n_points"] = c.n_points;
    j["dims"] = c.dims;
    j["ambient"] = c.ambient;
    j["t"] = c.t;
    j["d_emb"] = c.d_emb;
    j["coeff_range"] = c.coeff_range;
    j["domain_radius"] = c.domain_radius;
    j["kernel"] = to_json(c.kernel);
    j["seed"] = c.seed;
    return j;
}

CorpusConfig corpus_config_from_json(const json& j) {
    CorpusConfig c;
    c.n_quadrics = get_or(j, "n_quadrics", c.n_quadrics);
    c.n_points = get_or(j, "n_points", c.n_points);
    c.dims = get_or(j, "dims", c.dims);
    c.ambient = get_or(j, "ambient", c.ambient);
    c.t = get_or(j, "t", c.t);
    c.d_emb = get_or(j, "d_emb", c.d_emb);
    c.coeff_range = get_or(j, "coeff_range", c.coeff_range);
    c.domain_radius = get_or(j, "domain_radius", c.domain_radius);
    if (j.contains("kernel")) c.kernel = kernel_config_from_json(j.at("kernel"));
    c.seed = get_or(j, "seed", c.seed);
    return c;
}

json to_json(const TableConfig& c) {
    json j;
    j["train"] = to_json(c.train);
    j["held_out"] = c.held_out;
    j["held_out_seed"] = c.held_out_seed;
    j["encoder_widths"] = c.shape.encoder_widths;
    j["head_widths"] = c.shape.head_widths;
    j["l1_weight"] = c.shape.l1_weight;
    j["model_seed"] = c.shape.seed;
    j["epochs"] = c.optimizer.epochs;
    j["lr"] = c.optimizer.lr;
    j["batch"] = c.optimizer.batch;
    j["optimizer"] = c.optimizer.optimizer == Optimizer::Adam ? "adam" : "momentum";
    j["momentum"] = c.optimizer.momentum;
    j["baseline_draws"] = c.baseline_draws;
    j["baseline_seed"] = c.baseline_seed;
    return j;
}

TableConfig table_config_from_json(const json& j) {
    TableConfig c;
    if (j.contains("train")) c.train = corpus_config_from_json(j.at("train"));
    c.held_out = get_or(j, "held_out", c.held_out);
    c.held_out_seed = get_or(j, "held_out_seed", c.held_out_seed);
    c.shape.encoder_widths = get_or(j, "encoder_widths", c.shape.encoder_widths);
    c.shape.head_widths = get_or(j, "head_widths", c.shape.head_widths);
    c.shape.l1_weight = get_or(j, "l1_weight", c.shape.l1_weight);
    c.shape.seed = get_or(j, "model_seed", c.shape.seed);
    c.optimizer.epochs = get_or(j, "epochs", c.optimizer.epochs);
    c.optimizer.lr = get_or(j, "lr", c.optimizer.lr);
    c.optimizer.batch = get_or(j, "batch", c.optimizer.batch);
    const std::string opt = get_or<std::string>(j, "optimizer", "adam");
    require(opt == "adam" || opt == "momentum", ErrorKind::InvalidConfig, "optimizer must be adam or momentum");
    c.optimizer.optimizer = opt == "adam" ? Optimizer::Adam : Optimizer::Momentum;
    c.optimizer.momentum = get_or(j, "momentum", c.optimizer.momentum);
    c.baseline_draws = get_or(j, "baseline_draws", c.baseline_draws);
    c.baseline_seed = get_or(j, "baseline_seed", c.baseline_seed);
    return c;
}

ExperimentOutputs run_experiment(const std::string& kind, const json& config) {
    try {
        if (kind == "ordering") return {{"ordering.csv", ordering_csv(run_ordering(ordering_config_from_json(config)))}};
        if (kind == "correlation") {
            const auto results = run_correlation(correlation_config_from_json(config));
            return {{"correlation.csv", correlation_summary_csv(results)},
                    {"biaxial.csv", correlation_biaxial_csv(results)}};
        }
        if (kind == "table") {
            const TableResult r = run_table(table_config_from_json(config));
            return {{"loss.csv", loss_csv(r.epoch_loss)}, {"mse_table.csv", mse_table_csv(r.table)}};
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("bad experiment config: ") + e.what());
    }
    fail(ErrorKind::InvalidConfig, "unknown experiment '" + kind + "'");
}

}  // namespace dcurv
