// Command-line front end: data generation, operators, curvature, the quadric
// net, critical-point probes and the canned experiments.

#include "dcurv/curvature.hpp"
#include "dcurv/error.hpp"
#include "dcurv/experiments.hpp"
#include "dcurv/geometry.hpp"
#include "dcurv/io.hpp"
#include "dcurv/landscape.hpp"
#include "dcurv/manifest.hpp"
#include "dcurv/manifold_gen.hpp"
#include "dcurv/parallel.hpp"
#include "dcurv/quadric_net.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace dcurv;

namespace {

struct Globals {
    Seed seed = 0;
    bool seed_given = false;
    std::string out_dir = ".";
    std::size_t threads = 1;
};

struct KernelFlags {
    std::optional<double> sigma;
    std::optional<Index> knn;
    double alpha = 1.0;

    void add(CLI::App* cmd) {
        cmd->add_option("--sigma", sigma, "fixed Gaussian bandwidth (squared-distance units)");
        cmd->add_option("--knn", knn, "adaptive bandwidth neighbour rank (default ceil(log2 N))");
        cmd->add_option("--alpha", alpha, "density normalization exponent in [0,1]")->capture_default_str();
    }
    KernelConfig config() const {
        require(!(sigma && knn), ErrorKind::InvalidConfig, "--sigma and --knn are mutually exclusive");
        KernelConfig k;
        if (sigma)
            k.bandwidth = FixedBandwidth{*sigma};
        else
            k.bandwidth = AdaptiveKnn{knn};
        k.alpha = alpha;
        return k;
    }
};

fs::path out_path(const Globals& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / name;
}

void write_manifest(const Globals& g, RunManifest m) {
    m.config["seed"] = g.seed;
    m.config["threads"] = g.threads;
    m.write(out_path(g, "manifest.json"));
}

std::vector<Index> parse_list(const std::string& text) {
    std::vector<Index> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        require(parse_double(item, v) && v >= 0.0 && v == std::floor(v), ErrorKind::InvalidConfig,
                "expected a comma-separated list of non-negative integers, got '" + text + "'");
        out.push_back(static_cast<Index>(v));
    }
    return out;
}

// gen ------------------------------------------------------------------------

struct GenArgs {
    std::string surface = "sphere";
    Index n = 1000;
    double noise = 0.0;
    std::map<std::string, double> params;
};

void cmd_gen(const Globals& g, const GenArgs& a) {
    const Surface surface = make_surface(a.surface, a.params);
    const SurfaceSample s = sample_surface(surface, a.n, a.noise, g.seed);
    write_cloud_csv(out_path(g, "cloud.csv"), s.cloud);
    std::vector<std::vector<std::string>> rows;
    for (Index i = 0; i < s.cloud.size(); ++i)
        rows.push_back({std::to_string(i), format_double(s.gauss_curvature(static_cast<Eigen::Index>(i))),
                        s.interior[i] ? "1" : "0"});
    write_csv(out_path(g, "curvature.csv"), {"point_id", "gauss_curvature", "interior"}, rows);

    RunManifest m;
    m.command = "gen";
    m.config["surface"] = to_json(surface);
    m.config["n_points"] = a.n;
    m.config["noise_sd"] = a.noise;
    write_manifest(g, m);
}

// operator -------------------------------------------------------------------

struct OperatorArgs {
    std::string input;
    KernelFlags kernel;
    bool map = false;
    int t = 1;
};

void cmd_operator(const Globals& g, const OperatorArgs& a) {
    const PointCloud cloud = load_cloud(a.input);
    const KernelConfig kernel = a.kernel.config();
    double sigma = 0.0;
    const DiffusionOperator op = build_operator(cloud, kernel, &sigma);
    {
        std::ofstream out(out_path(g, "operator.bin"), std::ios::binary);
        write_operator_binary(out, op);
    }
    json summary;
    summary["n_points"] = cloud.size();
    summary["sigma"] = sigma;
    summary["alpha"] = kernel.alpha;
    if (a.map) {
        DiffusionMap map = spectral_decompose(op);
        map.t = a.t;
        std::ofstream out(out_path(g, "map.bin"), std::ios::binary);
        write_map_binary(out, map);
        summary["eigenvalues_head"] =
            std::vector<double>(map.eigenvalues.data(), map.eigenvalues.data() + std::min<Eigen::Index>(10, map.eigenvalues.size()));
    }
    write_text(out_path(g, "operator.json"), summary.dump(2) + "\n");

    RunManifest m;
    m.command = "operator";
    m.config["kernel"] = to_json(kernel);
    m.config["map"] = a.map;
    m.config["t"] = a.t;
    m.add_input(a.input);
    write_manifest(g, m);
}

// curvature ------------------------------------------------------------------

struct CurvatureArgs {
    std::string input;
    KernelFlags kernel;
    int t = kDefaultDiffusionTime;
    std::optional<double> quantile;
    std::optional<double> radius;
    std::string reference;
};

void cmd_curvature(const Globals& g, const CurvatureArgs& a) {
    require(!(a.quantile && a.radius), ErrorKind::InvalidConfig, "--r-quantile and --r are mutually exclusive");
    const RadiusRule rule = a.radius ? RadiusRule{FixedRadius{*a.radius}} : RadiusRule{QuantileRadius{a.quantile.value_or(0.1)}};
    const PointCloud cloud = load_cloud(a.input);
    const KernelConfig kernel = a.kernel.config();
    double sigma = 0.0;
    const DiffusionOperator op = build_operator(cloud, kernel, &sigma);
    const CurvatureField field = pointwise_curvature(op, a.t, rule);

    std::vector<std::vector<std::string>> rows;
    for (Index i = 0; i < cloud.size(); ++i)
        rows.push_back({cloud.label(i), format_double(field.values(static_cast<Eigen::Index>(i))),
                        std::to_string(field.ball_sizes[i])});
    write_csv(out_path(g, "curvature.csv"), {"point_id", "curvature", "ball_size"}, rows);

    json side;
    side["t"] = a.t;
    side["radius_rule"] = describe(rule);
    side["sigma"] = sigma;
    side["alpha"] = kernel.alpha;
    side["seed"] = g.seed;
    side["n_points"] = cloud.size();
    write_text(out_path(g, "curvature.json"), side.dump(2) + "\n");

    RunManifest m;
    m.command = "curvature";
    m.config["kernel"] = to_json(kernel);
    m.config["t"] = a.t;
    m.config["radius_rule"] = describe(rule);
    m.add_input(a.input);

    if (!a.reference.empty()) {
        const CsvTable ref = read_csv(a.reference, true);
        require(ref.rows.size() == cloud.size(), ErrorKind::ShapeMismatch, "reference has a different number of rows");
        const std::size_t col = ref.column("gauss_curvature").value_or(ref.header.size() - 1);
        const std::optional<std::size_t> mask_col = ref.column("interior");
        Vector reference(static_cast<Eigen::Index>(cloud.size()));
        std::vector<bool> mask(cloud.size(), true);
        for (std::size_t i = 0; i < ref.rows.size(); ++i) {
            require(col < ref.rows[i].size() && parse_double(ref.rows[i][col], reference(static_cast<Eigen::Index>(i))),
                    ErrorKind::InvalidInput, "non-numeric reference value in row " + std::to_string(i + 1));
            if (mask_col) mask[i] = ref.rows[i].at(*mask_col) != "0";
        }
        const Correlation corr = curvature_correlation(field, reference, mask);
        json report;
        report["pearson"] = corr.pearson;
        report["spearman"] = corr.spearman;
        report["count"] = corr.count;
        write_text(out_path(g, "correlation.json"), report.dump(2) + "\n");
        std::vector<std::vector<std::string>> biaxial;
        for (Index i = 0; i < cloud.size(); ++i)
            if (mask[i])
                biaxial.push_back({format_double(reference(static_cast<Eigen::Index>(i))),
                                   format_double(field.values(static_cast<Eigen::Index>(i)))});
        write_csv(out_path(g, "biaxial.csv"), {"gauss_curvature", "diffusion_curvature"}, biaxial);
        m.add_input(a.reference);
    }
    write_manifest(g, m);
}

// corpus / train / eval --------------------------------------------------------

struct CorpusArgs {
    Index quadrics = 500;
    Index points = 200;
    std::string dims = "2,5";
    Index ambient = 5;
    int t = 8;
    Index d_emb = 25;
    double coeff_range = 1.0;
    double domain_radius = 1.0;
    KernelFlags kernel;
    std::string manifest;

    void add(CLI::App* cmd, bool allow_manifest) {
        cmd->add_option("--quadrics", quadrics, "number of quadrics")->capture_default_str();
        cmd->add_option("--points", points, "points per quadric")->capture_default_str();
        cmd->add_option("--dims", dims, "intrinsic dimensions, comma separated")->capture_default_str();
        cmd->add_option("--K", ambient, "ambient dimension K")->capture_default_str();
        cmd->add_option("--t", t, "diffusion time")->capture_default_str();
        cmd->add_option("--d-emb", d_emb, "diffusion coordinates per point")->capture_default_str();
        cmd->add_option("--coeff-range", coeff_range, "coefficient range")->capture_default_str();
        cmd->add_option("--domain-radius", domain_radius, "sampling ball radius")->capture_default_str();
        kernel.add(cmd);
        if (allow_manifest) cmd->add_option("--corpus", manifest, "corpus manifest written by `corpus`");
    }
    CorpusConfig config(const Globals& g) const {
        if (!manifest.empty()) {
            const RunManifest m = RunManifest::read(manifest);
            require(m.command == "corpus", ErrorKind::InvalidInput, manifest + " is not a corpus manifest");
            return corpus_config_from_json(m.config.at("corpus"));
        }
        CorpusConfig c;
        c.n_quadrics = quadrics;
        c.n_points = points;
        c.dims = parse_list(dims);
        c.ambient = ambient;
        c.t = t;
        c.d_emb = d_emb;
        c.coeff_range = coeff_range;
        c.domain_radius = domain_radius;
        c.kernel = kernel.config();
        c.seed = g.seed;
        return c;
    }
};

void cmd_corpus(const Globals& g, const CorpusArgs& a) {
    const CorpusConfig cfg = a.config(g);
    const std::vector<TrainingExample> corpus = build_corpus(cfg);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        std::vector<std::string> r{std::to_string(i), std::to_string(corpus[i].k)};
        for (Eigen::Index j = 0; j < corpus[i].target.size(); ++j) r.push_back(format_double(corpus[i].target(j)));
        rows.push_back(std::move(r));
    }
    std::vector<std::string> header{"example", "k"};
    for (Index j = 0; j < triangle_size(cfg.ambient); ++j) header.push_back("q" + std::to_string(j));
    write_csv(out_path(g, "targets.csv"), header, rows);

    RunManifest m;
    m.command = "corpus";
    m.config["corpus"] = to_json(cfg);
    write_manifest(g, m);
}

struct TrainArgs {
    CorpusArgs corpus;
    Index epochs = 100;
    double lr = 1e-3;
    Index batch = 16;
    double l1 = 0.0;
    std::string encoder = "64,64";
    std::string head = "64";
    std::string optimizer = "adam";
};

void cmd_train(const Globals& g, const TrainArgs& a) {
    const CorpusConfig cc = a.corpus.config(g);
    NetModel shape;
    shape.ambient = cc.ambient;
    shape.d_emb = cc.d_emb;
    shape.t = cc.t;
    shape.encoder_widths = parse_list(a.encoder);
    shape.head_widths = parse_list(a.head);
    shape.l1_weight = a.l1;
    shape.seed = g.seed;
    TrainConfig tc;
    tc.epochs = a.epochs;
    tc.lr = a.lr;
    tc.batch = a.batch;
    require(a.optimizer == "adam" || a.optimizer == "momentum", ErrorKind::InvalidConfig,
            "--optimizer must be adam or momentum");
    tc.optimizer = a.optimizer == "adam" ? Optimizer::Adam : Optimizer::Momentum;

    const std::vector<TrainingExample> corpus = build_corpus(cc);
    const TrainResult r = train(init_model(shape), corpus, tc);
    save_model(out_path(g, "model.dcnn").string(), r.model);
    write_text(out_path(g, "loss.csv"), loss_csv(r.epoch_loss));
    std::cout << "final loss " << format_double(r.epoch_loss.back()) << "\n";

    RunManifest m;
    m.command = "train";
    m.config["corpus"] = to_json(cc);
    m.config["encoder_widths"] = shape.encoder_widths;
    m.config["head_widths"] = shape.head_widths;
    m.config["l1_weight"] = a.l1;
    m.config["epochs"] = a.epochs;
    m.config["lr"] = a.lr;
    m.config["batch"] = a.batch;
    m.config["optimizer"] = a.optimizer;
    if (!a.corpus.manifest.empty()) m.add_input(a.corpus.manifest);
    write_manifest(g, m);
}

struct EvalArgs {
    CorpusArgs corpus;
    std::string model;
    Index held_out = 200;
    Index baseline_draws = 100;
};

void cmd_eval(const Globals& g, const EvalArgs& a) {
    const NetModel model = load_model(a.model);
    CorpusConfig cc = a.corpus.config(g);
    cc.n_quadrics = a.held_out;
    cc.seed = cc.seed + 1;
    require(cc.ambient == model.ambient && cc.d_emb == model.d_emb && cc.t == model.t, ErrorKind::ShapeMismatch,
            "corpus settings do not match the model (K, d_emb, t)");
    const EvalTable table = evaluate(model, build_corpus(cc), cc.coeff_range, g.seed + 2, a.baseline_draws);
    write_text(out_path(g, "mse_table.csv"), mse_table_csv(table));

    RunManifest m;
    m.command = "eval";
    m.config["held_out_corpus"] = to_json(cc);
    m.config["baseline_draws"] = a.baseline_draws;
    m.add_input(a.model);
    if (!a.corpus.manifest.empty()) m.add_input(a.corpus.manifest);
    write_manifest(g, m);
}

// probe ----------------------------------------------------------------------

struct ProbeArgs {
    std::string objective = "saddle2d";
    std::string input;
    Index dim = 2;
    Index samples = 1000;
    double radius_scale = 0.1;
    double tol = 0.1;
    std::string estimator = "ls";
    std::string model;
    double ridge = 0.0;
    bool shell = false;
    KernelFlags kernel;
};

void cmd_probe(const Globals& g, const ProbeArgs& a) {
    ProbeConfig cfg;
    cfg.n_samples = a.samples;
    cfg.radius_scale = a.radius_scale;
    cfg.rel_loss_tol = a.tol;
    cfg.seed = g.seed;
    cfg.shell = a.shell;
    if (a.estimator == "ls") {
        cfg.estimator = LeastSquaresEstimator{a.ridge};
    } else if (a.estimator == "net") {
        require(!a.model.empty(), ErrorKind::InvalidConfig, "--estimator net needs --model");
        cfg.estimator = NetEstimator{load_model(a.model), a.kernel.config()};
    } else {
        fail(ErrorKind::InvalidConfig, "--estimator must be ls or net");
    }

    RunManifest m;
    m.command = "probe";
    ProbeSample sample;
    std::string label;
    if (!a.input.empty()) {
        // First row is the probe center; the remaining rows are (x, f(x)).
        const CsvTable t = read_csv(a.input);
        require(t.rows.size() >= 2, ErrorKind::InvalidInput, "probe CSV needs a center row and samples");
        const std::size_t cols = t.rows.front().size();
        require(cols >= 2, ErrorKind::InvalidInput, "probe CSV rows need coordinates and a value");
        Matrix data(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            require(t.rows[i].size() == cols, ErrorKind::InvalidInput, "ragged probe CSV");
            for (std::size_t j = 0; j < cols; ++j)
                require(parse_double(t.rows[i][j], data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))),
                        ErrorKind::InvalidInput, "non-numeric probe CSV field");
        }
        const Eigen::Index k = static_cast<Eigen::Index>(cols) - 1;
        const Eigen::Index n = data.rows() - 1;
        sample.xs = data.bottomRows(n).leftCols(k).rowwise() - data.row(0).head(k);
        sample.ys = data.bottomRows(n).col(k).array() - data(0, k);
        sample.radius = sample.xs.rowwise().norm().maxCoeff();
        cfg.n_samples = static_cast<Index>(n);
        label = fs::path(a.input).stem().string();
        m.add_input(a.input);
    } else {
        const BuiltinObjective obj = builtin_objective(a.objective, a.dim, g.seed);
        sample = sample_around(obj.f, obj.center, cfg);
        label = obj.name;
        m.config["objective"] = obj.name;
        m.config["dim"] = obj.center.size();
        m.config["final_radius"] = sample.radius;
        m.config["halvings"] = sample.halvings;
    }
    const HessianEstimate est = estimate_hessian(sample, cfg);
    const SpectrumReport report = spectrum_report({est}, {label});

    json h;
    h["label"] = label;
    h["signature"] = to_string(est.signature);
    h["eigenvalues"] = std::vector<double>(est.eigenvalues.data(), est.eigenvalues.data() + est.eigenvalues.size());
    json rows = json::array();
    for (Eigen::Index i = 0; i < est.h.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < est.h.cols(); ++j) r.push_back(est.h(i, j));
        rows.push_back(r);
    }
    h["hessian"] = rows;
    h["tolerance"] = est.tolerance;
    h["condition_number"] = std::isfinite(est.condition_number) ? json(est.condition_number) : json();
    h["negative_count"] = est.negative_count();
    write_text(out_path(g, "hessian.json"), h.dump(2) + "\n");
    write_text(out_path(g, "eigenvalues.csv"), report.eigenvalues_csv());
    write_text(out_path(g, "histogram.csv"), report.histogram_csv());
    write_text(out_path(g, "spectrum_summary.csv"), report.summary_csv());
    write_text(out_path(g, "spectrum.json"), report.json());
    std::cout << to_string(est.signature) << "\n";

    m.config["samples"] = cfg.n_samples;
    m.config["radius_scale"] = a.radius_scale;
    m.config["rel_loss_tol"] = a.tol;
    m.config["estimator"] = a.estimator;
    m.config["ridge"] = a.ridge;
    m.config["shell"] = a.shell;
    if (a.estimator == "net") {
        m.config["kernel"] = to_json(a.kernel.config());
        m.add_input(a.model);
    }
    write_manifest(g, m);
}

// report ---------------------------------------------------------------------

struct ReportArgs {
    std::string experiment;
    std::string config;
    std::string manifest;
};

json apply_seed(const std::string& kind, json cfg, Seed seed) {
    if (kind == "ordering") {
        cfg["first_seed"] = seed;
    } else if (kind == "correlation") {
        for (auto& c : cfg["cases"]) c["seed"] = seed;
    } else if (kind == "table") {
        cfg["train"]["seed"] = seed;
        cfg["model_seed"] = seed;
        cfg["held_out_seed"] = seed + 1;
        cfg["baseline_seed"] = seed + 2;
    }
    return cfg;
}

json default_experiment_config(const std::string& kind) {
    if (kind == "ordering") return to_json(OrderingConfig{});
    if (kind == "correlation") return to_json(default_correlation_config());
    if (kind == "table") return to_json(default_table_config());
    fail(ErrorKind::InvalidConfig, "unknown experiment '" + kind + "' (ordering, correlation, table)");
}

void cmd_report(const Globals& g, const ReportArgs& a) {
    std::string kind = a.experiment;
    json cfg;
    RunManifest m;
    if (!a.manifest.empty()) {
        const RunManifest prev = RunManifest::read(a.manifest);
        require(prev.command == "report", ErrorKind::InvalidInput, a.manifest + " is not a report manifest");
        kind = prev.config.at("experiment").get<std::string>();
        cfg = prev.config.at("experiment_config");
        if (g.seed_given) cfg = apply_seed(kind, cfg, g.seed);
        m.add_input(a.manifest);
    } else {
        require(!kind.empty(), ErrorKind::InvalidConfig, "report needs --experiment or --manifest");
        if (!a.config.empty()) {
            cfg = json::parse(read_text(a.config));
            if (g.seed_given) cfg = apply_seed(kind, cfg, g.seed);
            m.add_input(a.config);
        } else {
            cfg = apply_seed(kind, default_experiment_config(kind), g.seed);
        }
    }
    const ExperimentOutputs outputs = run_experiment(kind, cfg);
    for (const auto& [name, text] : outputs) write_text(out_path(g, name), text);

    m.command = "report";
    m.config["experiment"] = kind;
    m.config["experiment_config"] = cfg;
    m.write(out_path(g, "manifest.json"));
}

int exit_code(const Error& e) { return is_numeric_failure(e.kind()) ? 3 : 2; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffusion curvature and quadric estimation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads")->capture_default_str();

    GenArgs gen;
    auto* c_gen = app.add_subcommand("gen", "sample a test surface with analytic Gaussian curvature");
    c_gen->add_option("--surface", gen.surface,
                      "sphere, torus, ellipsoid, hyperbolic-paraboloid, plane, hyperboloid, paraboloid")
        ->capture_default_str();
    c_gen->add_option("--n", gen.n, "number of points")->capture_default_str();
    c_gen->add_option("--noise", gen.noise, "ambient Gaussian noise sd")->capture_default_str();
    for (const char* p : {"R", "r", "a", "b", "c", "waist", "half-height", "domain-radius", "q00", "q01", "q11"}) {
        std::string key = p;
        std::replace(key.begin(), key.end(), '-', '_');
        c_gen->add_option_function<double>(std::string("--") + p, [&gen, key](double v) { gen.params[key] = v; },
                                           "surface parameter " + key);
    }

    OperatorArgs op;
    auto* c_op = app.add_subcommand("operator", "build the diffusion operator (and optionally the map)");
    c_op->add_option("--input", op.input, "point cloud (CSV or .bin)")->required();
    op.kernel.add(c_op);
    c_op->add_flag("--map", op.map, "also write the diffusion map");
    c_op->add_option("--t", op.t, "diffusion time recorded with the map")->capture_default_str();

    CurvatureArgs cv;
    auto* c_cv = app.add_subcommand("curvature", "pointwise diffusion curvature");
    c_cv->add_option("--input", cv.input, "point cloud (CSV or .bin)")->required();
    cv.kernel.add(c_cv);
    c_cv->add_option("--t", cv.t, "diffusion time")->capture_default_str();
    c_cv->add_option("--r-quantile", cv.quantile, "per-point radius quantile (default 0.1)");
    c_cv->add_option("--r", cv.radius, "fixed diffusion radius");
    c_cv->add_option("--reference", cv.reference, "reference curvature CSV (e.g. gen's curvature.csv)");

    CorpusArgs corpus;
    auto* c_corpus = app.add_subcommand("corpus", "generate a quadric training corpus");
    corpus.add(c_corpus, false);

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "train the quadric network");
    tr.corpus.add(c_train, true);
    c_train->add_option("--epochs", tr.epochs, "epochs")->capture_default_str();
    c_train->add_option("--lr", tr.lr, "learning rate")->capture_default_str();
    c_train->add_option("--batch", tr.batch, "batch size")->capture_default_str();
    c_train->add_option("--l1", tr.l1, "L1 weight on predicted coefficients")->capture_default_str();
    c_train->add_option("--encoder", tr.encoder, "encoder widths")->capture_default_str();
    c_train->add_option("--head", tr.head, "head widths")->capture_default_str();
    c_train->add_option("--optimizer", tr.optimizer, "adam or momentum")->capture_default_str();

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "held-out MSE table: network, LS oracle, random baseline");
    ev.corpus.add(c_eval, true);
    c_eval->add_option("--model", ev.model, "model checkpoint")->required();
    c_eval->add_option("--held-out", ev.held_out, "held-out quadrics")->capture_default_str();
    c_eval->add_option("--baseline-draws", ev.baseline_draws, "random baselines per example")->capture_default_str();

    ProbeArgs pr;
    auto* c_probe = app.add_subcommand("probe", "estimate the Hessian at a critical point");
    c_probe->add_option("--objective", pr.objective, "saddle2d, bowl, cap, quadratic-cubic, toy-regression")
        ->capture_default_str();
    c_probe->add_option("--input", pr.input, "CSV of (x, f(x)) rows; the first row is the center");
    c_probe->add_option("--dim", pr.dim, "objective dimension")->capture_default_str();
    c_probe->add_option("--samples", pr.samples, "number of samples")->capture_default_str();
    c_probe->add_option("--radius-scale", pr.radius_scale, "base radius scale")->capture_default_str();
    c_probe->add_option("--tol", pr.tol, "relative loss tolerance")->capture_default_str();
    c_probe->add_option("--estimator", pr.estimator, "ls or net")->capture_default_str();
    c_probe->add_option("--model", pr.model, "checkpoint for the net estimator");
    c_probe->add_option("--ridge", pr.ridge, "ridge for the LS estimator")->capture_default_str();
    c_probe->add_flag("--shell", pr.shell, "sample on the sphere of radius rho only");
    pr.kernel.add(c_probe);

    ReportArgs rp;
    auto* c_report = app.add_subcommand("report", "run a canned experiment and write its tables");
    c_report->add_option("--experiment", rp.experiment, "ordering, correlation or table");
    c_report->add_option("--config", rp.config, "experiment config JSON");
    c_report->add_option("--manifest", rp.manifest, "rerun from a previous report manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    g.seed_given = seed_opt->count() > 0;

    try {
        require(g.threads >= 1, ErrorKind::InvalidConfig, "--threads must be >= 1");
        set_thread_count(g.threads);
        if (*c_gen) cmd_gen(g, gen);
        if (*c_op) cmd_operator(g, op);
        if (*c_cv) cmd_curvature(g, cv);
        if (*c_corpus) cmd_corpus(g, corpus);
        if (*c_train) cmd_train(g, tr);
        if (*c_eval) cmd_eval(g, ev);
        if (*c_probe) cmd_probe(g, pr);
        if (*c_report) cmd_report(g, rp);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
