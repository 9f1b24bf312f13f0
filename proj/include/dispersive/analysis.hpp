#pragma once

#include "dispersive/integrate.hpp"
#include "dispersive/models.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace dispersive {

double linf_error(std::span<const double> exact, std::span<const double> approx);

/// sqrt(h * sum (exact - approx)^2).
double l2_error(std::span<const double> exact, std::span<const double> approx, double h);

/// |R(z)| for R(z) = 1 + z + z^2/2 + z^3/6 + z^4/24.
double rk4_stability_modulus(std::complex<double> z);

/// Slack allowed beyond |R| = 1 before an eigenvalue counts as unstable.
inline constexpr double stability_slack = 1e-9;

struct SpectrumReport {
    std::vector<std::complex<double>> scaled_eigenvalues;
    double max_stability_modulus = 0.0;
    bool all_stable = true;
};

/// Eigenvalues of dt * A checked against the RK4 stability region.
SpectrumReport spectrum_of(const Eigen::MatrixXd& jacobian, double dt);

/// Linearizes the right-hand side at the given state, restricts it to the
/// boundary-constrained subspace (P J P) and checks dt * eigenvalues.
SpectrumReport spectrum_check(const RhsEvaluator& rhs, double dt,
                              const Eigen::VectorXd& linearization_state);

struct ProbePeriodicity {
    ProbeInfo probe;
    std::vector<double> times;
    // |u(t + T) - u(t)| at each entry of times.
    std::vector<double> metric;
    std::optional<double> onset_time;
};

struct PeriodicityReport {
    double period = 0.0;
    double tolerance = 0.0;
    std::vector<ProbePeriodicity> probes;
};

PeriodicityReport periodicity_report(const SimulationRecord& record, double period, double tol);

nlohmann::json to_json(const SpectrumReport& report);
nlohmann::json to_json(const PeriodicityReport& report);

/// re, im, |R(z)| per eigenvalue.
void write_spectrum_csv(std::ostream& os, const SpectrumReport& report);

} // namespace dispersive
