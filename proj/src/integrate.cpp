#include "dispersive/integrate.hpp"

#include "dispersive/errors.hpp"

#include <cmath>
#include <sstream>

namespace dispersive {

std::size_t IntegratorConfig::step_count() const
{
    return static_cast<std::size_t>(std::llround(t_max / dt));
}

void IntegratorConfig::validate(const NodeSet& nodes) const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigError("time step dt must be positive");
    if (!(t_max >= dt) || !std::isfinite(t_max))
        throw ConfigError("t_max must be at least dt");
    const double steps = static_cast<double>(step_count());
    if (!(std::abs(steps * dt - t_max) <= 1e-9 * t_max))
        throw ConfigError("t_max is not reachable in whole steps of dt");
    for (double p : probe_points)
        if (!(p >= nodes.a() && p <= nodes.b()))
            throw ConfigError("probe point outside the node interval");
}

std::vector<ProbeInfo> locate_probes(const NodeSet& nodes, std::span<const double> points)
{
    std::vector<ProbeInfo> out;
    out.reserve(points.size());
    for (double p : points) {
        const std::size_t i = nodes.nearest_index(p);
        out.push_back({p, i, nodes[i]});
    }
    return out;
}

namespace {

void check_finite(const Eigen::VectorXd& v, double t, const char* what)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            std::ostringstream msg;
            msg << "non-finite " << what << " at t = " << t << ", node " << i;
            throw NumericalError(msg.str());
        }
    }
}

} // namespace

Eigen::VectorXd rk4_step(const RhsFunction& rhs, const ConstraintFunction& constraint,
                         const Eigen::VectorXd& u, double t, double dt)
{
    const double half = 0.5 * dt;
    const auto stage = [&](double ts, Eigen::VectorXd v) {
        if (constraint)
            constraint(ts, v);
        Eigen::VectorXd k;
        rhs(ts, v, k);
        check_finite(k, ts, "stage derivative");
        return k;
    };

    const Eigen::VectorXd k1 = stage(t, u);
    const Eigen::VectorXd k2 = stage(t + half, u + half * k1);
    const Eigen::VectorXd k3 = stage(t + half, u + half * k2);
    const Eigen::VectorXd k4 = stage(t + dt, u + dt * k3);

    Eigen::VectorXd next = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (constraint)
        constraint(t + dt, next);
    check_finite(next, t + dt, "state");
    return next;
}

SimulationRecord simulate(const RhsEvaluator& rhs, const NodeSet& nodes,
                          const IntegratorConfig& cfg, Eigen::VectorXd initial,
                          const StepObserver& observer)
{
    cfg.validate(nodes);
    if (static_cast<std::size_t>(initial.size()) != nodes.size() || rhs.size() != nodes.size())
        throw ConfigError("initial state, operators and node set disagree in size");

    SimulationRecord rec;
    rec.dt = cfg.dt;
    rec.probes = locate_probes(nodes, cfg.probe_points);
    rec.probe_series.assign(rec.probes.size(), {});

    const std::size_t steps = cfg.step_count();
    rec.times.reserve(steps + 1);
    for (auto& s : rec.probe_series)
        s.reserve(steps + 1);

    const auto record = [&](std::size_t step, double t, const Eigen::VectorXd& u) {
        rec.times.push_back(t);
        for (std::size_t p = 0; p < rec.probes.size(); ++p)
            rec.probe_series[p].push_back(u[static_cast<Eigen::Index>(rec.probes[p].node)]);
        if (cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0)
            rec.snapshots.push_back({t, std::vector<double>(u.data(), u.data() + u.size())});
        if (observer)
            observer(step, t, u);
    };

    const RhsFunction f = [&rhs](double t, const Eigen::VectorXd& u, Eigen::VectorXd& du) {
        rhs(t, u, du);
    };
    const ConstraintFunction g = [&rhs](double t, Eigen::Ref<Eigen::VectorXd> u) {
        rhs.enforce(t, u);
    };

    Eigen::VectorXd u = std::move(initial);
    rhs.enforce(0.0, u);
    record(0, 0.0, u);
    for (std::size_t step = 1; step <= steps; ++step) {
        const double t0 = static_cast<double>(step - 1) * cfg.dt;
        const double t1 = static_cast<double>(step) * cfg.dt;
        u = rk4_step(f, g, u, t0, cfg.dt);
        // t0 + dt can differ from step * dt in the last bit; the record uses the latter.
        rhs.enforce(t1, u);
        const double peak = u.cwiseAbs().maxCoeff();
        if (peak > blowup_threshold) {
            Eigen::Index where = 0;
            u.cwiseAbs().maxCoeff(&where);
            std::ostringstream msg;
            msg << "solution blew up at t = " << t1 << " (|u| = " << peak << " at node " << where
                << ")";
            throw NumericalError(msg.str());
        }
        record(step, t1, u);
    }
    return rec;
}

} // namespace dispersive
