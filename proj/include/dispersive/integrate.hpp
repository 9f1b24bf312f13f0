#pragma once

#include "dispersive/models.hpp"
#include "dispersive/nodes.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace dispersive {

/// Solutions with max |u| above this abort the run.
inline constexpr double blowup_threshold = 1e6;

struct IntegratorConfig {
    double dt = 1e-3;
    double t_max = 1.0;
    // Snapshot every this many steps; 0 disables snapshots.
    std::size_t snapshot_stride = 100;
    std::vector<double> probe_points;

    /// round(t_max / dt).
    std::size_t step_count() const;
    void validate(const NodeSet& nodes) const;
};

/// A requested probe coordinate and the node it samples.
struct ProbeInfo {
    double requested = 0.0;
    std::size_t node = 0;
    double node_x = 0.0;
};

std::vector<ProbeInfo> locate_probes(const NodeSet& nodes, std::span<const double> points);

struct Snapshot {
    double t = 0.0;
    std::vector<double> state;
};

struct SimulationRecord {
    std::vector<double> times;
    std::vector<ProbeInfo> probes;
    // probe_series[p][k] is the value at probes[p] and times[k].
    std::vector<std::vector<double>> probe_series;
    std::vector<Snapshot> snapshots;
    double dt = 0.0;
};

using RhsFunction = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;
using ConstraintFunction = std::function<void(double, Eigen::Ref<Eigen::VectorXd>)>;

/// One classical RK4 step. The constraint (may be empty) is applied to every
/// stage state and to the result. Throws NumericalError on non-finite stages.
Eigen::VectorXd rk4_step(const RhsFunction& rhs, const ConstraintFunction& constraint,
                         const Eigen::VectorXd& u, double t, double dt);

/// Called with (step, t, state) after the initial state and after each step.
using StepObserver = std::function<void(std::size_t, double, const Eigen::VectorXd&)>;

SimulationRecord simulate(const RhsEvaluator& rhs, const NodeSet& nodes,
                          const IntegratorConfig& cfg, Eigen::VectorXd initial,
                          const StepObserver& observer = {});

} // namespace dispersive
