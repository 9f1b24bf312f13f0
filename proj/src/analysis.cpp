#include "dispersive/analysis.hpp"

#include "dispersive/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dispersive {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw ConfigError("error norm: vectors have different lengths");
}

} // namespace

double linf_error(std::span<const double> exact, std::span<const double> approx)
{
    check_lengths(exact, approx);
    double m = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i)
        m = std::max(m, std::abs(exact[i] - approx[i]));
    return m;
}

double l2_error(std::span<const double> exact, std::span<const double> approx, double h)
{
    check_lengths(exact, approx);
    if (!(h > 0.0))
        throw ConfigError("l2_error: spacing h must be positive");
    double s = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double d = exact[i] - approx[i];
        s += d * d;
    }
    return std::sqrt(h * s);
}

double rk4_stability_modulus(std::complex<double> z)
{
    // Horner form of 1 + z + z^2/2 + z^3/6 + z^4/24.
    const std::complex<double> r = 1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
    return std::abs(r);
}

SpectrumReport spectrum_of(const Eigen::MatrixXd& jacobian, double dt)
{
    if (!(dt > 0.0))
        throw ConfigError("spectrum: dt must be positive");
    if (jacobian.rows() != jacobian.cols())
        throw ConfigError("spectrum: matrix must be square");

    Eigen::EigenSolver<Eigen::MatrixXd> es(jacobian, false);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigenvalue computation did not converge");

    SpectrumReport rep;
    rep.scaled_eigenvalues.reserve(static_cast<std::size_t>(jacobian.rows()));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const std::complex<double> z = dt * es.eigenvalues()[i];
        rep.scaled_eigenvalues.push_back(z);
        rep.max_stability_modulus = std::max(rep.max_stability_modulus, rk4_stability_modulus(z));
    }
    rep.all_stable = rep.max_stability_modulus <= 1.0 + stability_slack;
    return rep;
}

SpectrumReport spectrum_check(const RhsEvaluator& rhs, double dt,
                              const Eigen::VectorXd& linearization_state)
{
    if (rhs.size() > 1024)
        throw ConfigError("spectrum_check is limited to 1024 nodes");
    if (static_cast<std::size_t>(linearization_state.size()) != rhs.size())
        throw ConfigError("linearization state has the wrong length");

    // Stage states always satisfy the boundary constraints, so the dynamics
    // live on range(P); P J P has that spectrum plus zeros on ker(P).
    const Eigen::MatrixXd p = rhs.boundary_projection();
    const Eigen::MatrixXd j = rhs.jacobian(linearization_state);
    return spectrum_of(p * j * p, dt);
}

PeriodicityReport periodicity_report(const SimulationRecord& record, double period, double tol)
{
    if (!(period > 0.0))
        throw ConfigError("period must be positive");
    if (!(tol >= 0.0))
        throw ConfigError("periodicity tolerance must be nonnegative");
    if (record.times.size() < 2)
        throw ConfigError("periodicity needs at least two recorded times");

    const double dt = record.dt > 0.0 ? record.dt : record.times[1] - record.times[0];
    const double ratio = period / dt;
    const auto shift = static_cast<std::size_t>(std::llround(ratio));
    if (shift == 0 || std::abs(static_cast<double>(shift) * dt - period) > 1e-9)
        throw ConfigError("period is not an integer multiple of the record time step");
    if (record.times.back() - record.times.front() < 2.0 * period - 1e-9)
        throw ConfigError("record must span at least two periods");

    PeriodicityReport rep;
    rep.period = period;
    rep.tolerance = tol;
    const std::size_t m = record.times.size() - shift;
    for (std::size_t p = 0; p < record.probes.size(); ++p) {
        const auto& s = record.probe_series[p];
        ProbePeriodicity pp;
        pp.probe = record.probes[p];
        pp.times.assign(record.times.begin(), record.times.begin() + static_cast<std::ptrdiff_t>(m));
        pp.metric.resize(m);
        for (std::size_t k = 0; k < m; ++k)
            pp.metric[k] = std::abs(s[k + shift] - s[k]);

        // Onset: first time after the last violation.
        std::size_t first_ok = 0;
        for (std::size_t k = m; k-- > 0;) {
            if (pp.metric[k] > tol) {
                first_ok = k + 1;
                break;
            }
        }
        if (first_ok < m)
            pp.onset_time = pp.times[first_ok];
        rep.probes.push_back(std::move(pp));
    }
    return rep;
}

nlohmann::json to_json(const SpectrumReport& report)
{
    nlohmann::json eig = nlohmann::json::array();
    for (const auto& z : report.scaled_eigenvalues)
        eig.push_back({z.real(), z.imag()});
    return {{"scaled_eigenvalues", std::move(eig)},
            {"max_stability_modulus", report.max_stability_modulus},
            {"all_stable", report.all_stable},
            {"eigenvalue_count", report.scaled_eigenvalues.size()}};
}

nlohmann::json to_json(const PeriodicityReport& report)
{
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& p : report.probes) {
        nlohmann::json series = nlohmann::json::array();
        for (std::size_t k = 0; k < p.times.size(); ++k)
            series.push_back({p.times[k], p.metric[k]});
        probes.push_back({{"requested_x", p.probe.requested},
                          {"node", p.probe.node},
                          {"node_x", p.probe.node_x},
                          {"onset_time", p.onset_time ? nlohmann::json(*p.onset_time)
                                                      : nlohmann::json(nullptr)},
                          {"metric", std::move(series)}});
    }
    return {{"period", report.period}, {"tolerance", report.tolerance}, {"probes", std::move(probes)}};
}

void write_spectrum_csv(std::ostream& os, const SpectrumReport& report)
{
    const auto old_precision = os.precision(17);
    os << "re,im,modulus\n";
    for (const auto& z : report.scaled_eigenvalues)
        os << z.real() << ',' << z.imag() << ',' << rk4_stability_modulus(z) << '\n';
    os.precision(old_precision);
}

} // namespace dispersive
