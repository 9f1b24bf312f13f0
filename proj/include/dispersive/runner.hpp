#pragma once

#include "dispersive/analysis.hpp"
#include "dispersive/integrate.hpp"
#include "dispersive/models.hpp"
#include "dispersive/operators.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dispersive {

enum class Experiment { validate_soliton, spectrum, periodicity };

std::string_view experiment_name(Experiment e);

enum class Linearization { initial, zero };

/// One fully specified run. Parsed from a JSON document; the original text
/// is kept so outputs can echo it verbatim.
struct RunConfig {
    std::string name;
    Experiment experiment = Experiment::periodicity;
    double a = -1.0;
    double b = 1.0;
    std::size_t nodes = 200;
    std::size_t stencil = 25;
    double shape = 0.001;
    ShapeMode shape_mode = ShapeMode::absolute;
    ModelSpec model;
    ForcingSpec forcing = ForcingSpec::sin_tanh();
    std::optional<SolitonSpec> soliton;
    double dt = 1e-3;
    double t_max = 1.8;
    std::vector<double> probes;
    std::size_t snapshot_stride = 100;
    std::vector<double> report_times;
    double period = 0.1;
    double periodicity_tol = 0.05;
    Linearization linearization = Linearization::zero;

    std::string source_text;
};

/// Throws ConfigError on malformed JSON, unknown keys or invalid values.
RunConfig parse_config(std::string_view text);

std::vector<std::string> preset_names();
std::optional<std::string_view> preset_text(std::string_view name);

/// A preset name or a path to a JSON file.
RunConfig load_config(const std::string& target);

struct RunOptions {
    // Empty: nothing is written.
    std::filesystem::path out_dir;
    bool dump_operators = false;
};

/// Nodes, stencils, kernel and operators shared by every experiment.
struct Discretization {
    NodeSet nodes;
    StencilMap stencils;
    KernelConfig kernel;
    OperatorSet ops;
};

Discretization discretize(const RunConfig& cfg);

/// Boundary data implied by the config: exact soliton data for kdv-classic,
/// the forcing otherwise.
BoundaryData boundary_for(const RunConfig& cfg, const NodeSet& nodes);

/// Initial state: the soliton at t = 0 for kdv-classic, zero otherwise.
Eigen::VectorXd initial_state(const RunConfig& cfg, const NodeSet& nodes);

struct ErrorRow {
    double t = 0.0;
    double linf = 0.0;
    double l2 = 0.0;
    double wall_seconds = 0.0;
};

struct ValidationResult {
    std::vector<ErrorRow> errors;
    SimulationRecord record;
};

ValidationResult run_validate_soliton(const RunConfig& cfg, const RunOptions& opts = {});

SpectrumReport run_spectrum(const RunConfig& cfg, const RunOptions& opts = {});

struct PeriodicityResult {
    SimulationRecord record;
    PeriodicityReport report;
};

PeriodicityResult run_periodicity(const RunConfig& cfg, const RunOptions& opts = {});

/// Dispatches on cfg.experiment.
void run_experiment(const RunConfig& cfg, const RunOptions& opts);

nlohmann::json make_meta(const RunConfig& cfg, const Discretization& disc,
                         const std::vector<ProbeInfo>& probes);

void write_probes_csv(std::ostream& os, const SimulationRecord& record);

} // namespace dispersive
