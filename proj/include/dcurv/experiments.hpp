#pragma once

#include "dcurv/manifold_gen.hpp"
#include "dcurv/quadric_net.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace dcurv {

/// Named output files (CSV text) of one experiment run.
using ExperimentOutputs = std::map<std::string, std::string>;

// Mean interior curvature of sphere, plane and saddle patch over a seed range.
struct OrderingConfig {
    Index n_points = 1000;
    Seed first_seed = 0;
    Index n_seeds = 20;
    int t = 8;
    double quantile = 0.1;
    double alpha = 1.0;
};

struct OrderingRow {
    Seed seed = 0;
    double sphere = 0.0, plane = 0.0, saddle = 0.0;
    bool ordered() const { return sphere > plane && plane > saddle; }
};

std::vector<OrderingRow> run_ordering(const OrderingConfig& cfg);
std::string ordering_csv(const std::vector<OrderingRow>& rows);

/// The three surfaces compared by run_ordering.
Surface ordering_sphere();
Surface ordering_plane();
Surface ordering_saddle();

// Diffusion vs Gaussian curvature on interior points of fixed test surfaces.
struct CorrelationCase {
    std::string label;
    Surface surface;
    Seed seed = 0;
};

struct CorrelationConfig {
    std::vector<CorrelationCase> cases;
    Index n_points = 1000;
    int t = 8;
    double quantile = 0.1;
    double alpha = 1.0;
    double noise_sd = 0.0;
};

CorrelationConfig default_correlation_config();

struct CorrelationResult {
    std::string label;
    Seed seed = 0;
    double pearson = 0.0, spearman = 0.0;
    Index interior = 0;
    Vector gauss, diffusion;
    std::vector<bool> mask;
};

std::vector<CorrelationResult> run_correlation(const CorrelationConfig& cfg);
std::string correlation_summary_csv(const std::vector<CorrelationResult>& results);
std::string correlation_biaxial_csv(const std::vector<CorrelationResult>& results);

// Held-out coefficient MSE of the trained net vs the LS oracle and the random baseline.
struct TableConfig {
    CorpusConfig train;
    Index held_out = 200;
    Seed held_out_seed = 1;
    NetModel shape;
    TrainConfig optimizer;
    Index baseline_draws = 100;
    Seed baseline_seed = 2;
};

TableConfig default_table_config();

struct TableResult {
    NetModel model;
    std::vector<double> epoch_loss;
    EvalTable table;
};

TableResult run_table(const TableConfig& cfg);
std::string loss_csv(const std::vector<double>& epoch_loss);
std::string mse_table_csv(const EvalTable& table);

// JSON round trips, used for manifests.
nlohmann::ordered_json to_json(const OrderingConfig& c);
nlohmann::ordered_json to_json(const CorrelationConfig& c);
nlohmann::ordered_json to_json(const TableConfig& c);
nlohmann::ordered_json to_json(const CorpusConfig& c);
nlohmann::ordered_json to_json(const KernelConfig& c);
nlohmann::ordered_json to_json(const Surface& s);
OrderingConfig ordering_config_from_json(const nlohmann::ordered_json& j);
CorrelationConfig correlation_config_from_json(const nlohmann::ordered_json& j);
TableConfig table_config_from_json(const nlohmann::ordered_json& j);
CorpusConfig corpus_config_from_json(const nlohmann::ordered_json& j);
KernelConfig kernel_config_from_json(const nlohmann::ordered_json& j);
Surface surface_from_json(const nlohmann::ordered_json& j);

/// Builds a surface from its name and parameter map (missing keys take defaults).
Surface make_surface(const std::string& name, const std::map<std::string, double>& params);

/// Runs the experiment named by `kind` ("ordering", "correlation", "table") from its JSON config.
ExperimentOutputs run_experiment(const std::string& kind, const nlohmann::ordered_json& config);

}  // namespace dcurv
