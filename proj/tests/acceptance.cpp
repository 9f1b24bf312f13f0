// Acceptance checks, one line per criterion:
//     ./acceptance                 all criteria
//     ./acceptance --criterion 3   a single criterion

#include "dispersive/errors.hpp"
#include "dispersive/runner.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace dispersive;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool within_factor(double value, double reference, double factor)
{
    return value >= reference / factor && value <= reference * factor;
}

// ---- simulation-backed criteria -------------------------------------------

Outcome soliton_table()
{
    const auto res = run_validate_soliton(load_config("table1"));
    const auto row = [&](double t) -> const ErrorRow* {
        for (const auto& e : res.errors)
            if (std::abs(e.t - t) < 1e-9)
                return &e;
        return nullptr;
    };
    const ErrorRow* r1 = row(1.0);
    const ErrorRow* r5 = row(5.0);
    if (!r1 || !r5)
        return {false, "missing error rows at t = 1 or t = 5"};
    const bool ok = within_factor(r1->linf, 8.468e-5, 5.0) && within_factor(r5->linf, 3.119e-4, 5.0) &&
                    within_factor(r5->l2, 2.032e-3, 5.0);
    return {ok, fmt("Linf(1) = %.4e [ref 8.468e-05], Linf(5) = %.4e [ref 3.119e-04], "
                    "L2(5) = %.4e [ref 2.032e-03], factor 5, %.1f s",
                    r1->linf, r5->linf, r5->l2, r5->wall_seconds)};
}

Outcome soliton_spectrum()
{
    const auto rep = run_spectrum(load_config("fig1"));
    std::complex<double> worst;
    for (const auto& z : rep.scaled_eigenvalues)
        if (rk4_stability_modulus(z) >= rk4_stability_modulus(worst))
            worst = z;
    const bool ok = rep.max_stability_modulus <= 1.0 + 1e-6;
    return {ok, fmt("max |R(dt lambda)| - 1 = %.3e (limit 1e-06) at dt lambda = %.3e%+.3ei, "
                    "%zu eigenvalues",
                    rep.max_stability_modulus - 1.0, worst.real(), worst.imag(),
                    rep.scaled_eigenvalues.size())};
}

std::map<std::string, PeriodicityResult>& runs()
{
    static std::map<std::string, PeriodicityResult> cache;
    return cache;
}

const PeriodicityResult& periodicity_run(const std::string& preset)
{
    auto& cache = runs();
    auto it = cache.find(preset);
    if (it == cache.end())
        it = cache.emplace(preset, run_periodicity(load_config(preset))).first;
    return it->second;
}

std::size_t probe_index(const SimulationRecord& rec, double x)
{
    for (std::size_t p = 0; p < rec.probes.size(); ++p)
        if (std::abs(rec.probes[p].requested - x) < 1e-9)
            return p;
    throw std::logic_error("no probe at requested coordinate");
}

double max_amplitude(const SimulationRecord& rec, std::size_t p, double t0, double t1)
{
    double m = 0.0;
    for (std::size_t k = 0; k < rec.times.size(); ++k)
        if (rec.times[k] >= t0 - 1e-12 && rec.times[k] <= t1 + 1e-12)
            m = std::max(m, std::abs(rec.probe_series[p][k]));
    return m;
}

Outcome eventual_periodicity()
{
    const auto& run = periodicity_run("fig2");
    const auto& rec = run.record;
    std::ostringstream detail;
    bool ok = true;
    for (double x : {-0.950670, -0.308720}) {
        const std::size_t p = probe_index(rec, x);
        const double amp = max_amplitude(rec, p, 0.0, rec.times.back());
        const auto& pp = run.report.probes[p];
        double worst = 0.0;
        for (std::size_t k = 0; k < pp.times.size(); ++k)
            if (pp.times[k] >= 1.4 - 1e-12 && pp.times[k] <= 1.7 + 1e-12)
                worst = std::max(worst, pp.metric[k]);
        ok = ok && worst < 0.05 * amp;
        detail << fmt("x=%.5f: max E on [1.4,1.7] = %.3e vs 5%% of %.4f; ", x, worst, amp);
    }
    const std::size_t right = probe_index(rec, 0.999650);
    const double right_amp = max_amplitude(rec, right, 0.0, rec.times.back());
    ok = ok && right_amp < 1e-3;
    detail << fmt("right probe max |u| = %.3e (limit 1e-03)", right_amp);
    return {ok, detail.str()};
}

Outcome dissipation_ordering()
{
    const auto& bbm = periodicity_run("fig2").record;
    const auto& burgers = periodicity_run("fig3").record;
    const auto& kdv = periodicity_run("fig8").record;
    const auto& damped = periodicity_run("fig10").record;
    bool ok = true;
    double worst_bbm = -1e300;
    double worst_damped = 0.0;
    for (std::size_t p = 0; p < bbm.probes.size(); ++p) {
        const double a = max_amplitude(bbm, p, 1.0, 1.8);
        const double b = max_amplitude(burgers, p, 1.0, 1.8);
        ok = ok && b <= a;
        worst_bbm = std::max(worst_bbm, b - a);
    }
    const std::size_t last = kdv.snapshots.front().state.size() - 1;
    for (std::size_t p = 0; p < kdv.probes.size(); ++p) {
        if (kdv.probes[p].node == 0 || kdv.probes[p].node == last)
            continue;
        const double a = max_amplitude(kdv, p, 1.0, 1.8);
        const double d = max_amplitude(damped, p, 1.0, 1.8);
        ok = ok && d <= 0.9 * a;
        worst_damped = std::max(worst_damped, a > 0.0 ? d / a : 0.0);
    }
    return {ok, fmt("max over probes of (BBM-Burgers - BBM) amplitude = %.3e (<= 0); "
                    "max damped/undamped KdV ratio at interior probes = %.4f (<= 0.9)",
                    worst_bbm, worst_damped)};
}

Outcome nonlinear_amplitude()
{
    const auto& lin = periodicity_run("fig2").record;
    const auto& nl = periodicity_run("fig4").record;
    const std::size_t p = probe_index(lin, -0.308720);
    const double a = max_amplitude(lin, p, 1.0, 1.8);
    const double b = max_amplitude(nl, p, 1.0, 1.8);
    return {b >= a, fmt("x=-0.30872 max |u| on [1,1.8]: nonlinear %.5f vs linearized %.5f", b, a)};
}

// ---- property criteria ------------------------------------------------------

Outcome oracle_equivalence()
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> count(4, 64);
    std::uniform_real_distribution<double> ratio(1.0, 3.0);
    std::uniform_real_distribution<double> left(-5.0, 5.0);
    std::uniform_real_distribution<double> width(0.5, 10.0);
    double worst = 0.0;
    int trials = 0;
    for (; trials < 60; ++trials) {
        const std::size_t n = count(rng);
        const double a = left(rng);
        const auto nodes = NodeSet::uniform(a, a + width(rng), n);
        const KernelConfig cfg(ratio(rng) * nodes.spacing());
        const auto stencils = build_stencils(nodes, n);
        for (int k = 1; k <= 3; ++k) {
            const Eigen::MatrixXd sparse(assemble_operator(nodes, stencils, k, cfg).matrix());
            const Eigen::MatrixXd dense = global_dense_operator(nodes, k, cfg);
            for (Eigen::Index i = 0; i < dense.rows(); ++i) {
                const double scale = std::max(1.0, dense.row(i).cwiseAbs().maxCoeff());
                worst = std::max(worst, (sparse.row(i) - dense.row(i)).cwiseAbs().maxCoeff() / scale);
            }
        }
    }
    return {worst <= 1e-9,
            fmt("%d random node sets, k = 1..3, n = N <= 64, C in [h, 3h]: max entry gap "
                "(relative to row max) = %.3e (limit 1e-09)",
                trials, worst)};
}

Outcome kernel_span()
{
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::size_t> count(15, 100);
    std::uniform_int_distribution<std::size_t> stencil(5, 15);
    std::uniform_int_distribution<int> order(1, 3);
    std::uniform_real_distribution<double> ratio(1.0, 3.0);
    double worst = 0.0;
    int trials = 0;
    for (; trials < 60; ++trials) {
        const std::size_t n = count(rng);
        const auto nodes = NodeSet::uniform(0.0, 1.0, n);
        const std::size_t s = stencil(rng);
        const int k = order(rng);
        const KernelConfig cfg(ratio(rng) * nodes.spacing());
        const auto stencils = build_stencils(nodes, s);
        const auto op = assemble_operator(nodes, stencils, k, cfg);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = op.row(i);
            for (std::size_t j : stencils.neighbors(i)) {
                double sum = 0.0;
                for (std::size_t m = 0; m < row.cols.size(); ++m)
                    sum += row.weights[m] * mq_value(std::abs(nodes[row.cols[m]] - nodes[j]), cfg);
                const double want = mq_derivative(nodes[i] - nodes[j], k, cfg);
                worst = std::max(worst, std::abs(sum - want));
            }
        }
    }
    return {worst <= 1e-8, fmt("%d random operators (N <= 100, n in 5..15, k in 1..3): max "
                               "|L phi_j - phi_j^(k)| = %.3e (limit 1e-08)",
                               trials, worst)};
}

Outcome rk4_order()
{
    const RhsFunction decay = [](double, const Eigen::VectorXd& u, Eigen::VectorXd& du) { du = -u; };
    const auto error = [&](double dt) {
        Eigen::VectorXd u = Eigen::VectorXd::Ones(1);
        const auto steps = std::lround(1.0 / dt);
        for (long k = 0; k < steps; ++k)
            u = rk4_step(decay, {}, u, static_cast<double>(k) * dt, dt);
        return std::abs(u[0] - std::exp(-1.0));
    };
    const double ratio = error(0.05) / error(0.025);
    const double one = rk4_step(decay, {}, Eigen::VectorXd::Ones(1), 0.0, 0.1)[0];
    const bool ok = ratio >= 14.0 && ratio <= 18.0 && std::abs(one - 0.9048375) <= 1e-12;
    return {ok, fmt("error ratio dt 0.05 -> 0.025 = %.4f (in [14, 18]); one step = %.12f", ratio, one)};
}

Outcome jacobian_check()
{
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> count(10, 64);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    const Family families[] = {Family::kdv_classic, Family::bbm,         Family::bbm_burgers,
                               Family::kdv,         Family::kdv_burgers, Family::kdv_damped};
    double worst = 0.0;
    int trials = 0;
    for (int rep = 0; rep < 3; ++rep) {
        for (Family f : families) {
            ++trials;
            const std::size_t n = count(rng);
            const auto nodes = NodeSet::uniform(-1.0, 1.0, n);
            const auto stencils = build_stencils(nodes, std::min<std::size_t>(9, n));
            const auto ops = build_operator_set(nodes, stencils, KernelConfig(2.0 * nodes.spacing()), f);
            ModelSpec m;
            m.family = f;
            m.beta = 0.8;
            m.mu = 1e-3;
            m.alpha = f == Family::kdv_classic ? 0.0 : 1.0;
            m.delta = (f == Family::bbm_burgers || f == Family::kdv_burgers) ? 1e-3 : 0.0;
            m.gamma_damp = f == Family::kdv_damped ? 4.5 : 0.0;
            const auto rhs = build_rhs(m, ops, forced_boundary(ForcingSpec::zero()));
            Eigen::VectorXd u(static_cast<Eigen::Index>(n));
            for (auto& v : u)
                v = amp(rng);
            const Eigen::MatrixXd j = rhs.jacobian(u);
            const double h = 1e-6;
            const double scale = j.cwiseAbs().maxCoeff();
            for (Eigen::Index c = 0; c < u.size(); ++c) {
                Eigen::VectorXd up = u, um = u;
                up[c] += h;
                um[c] -= h;
                const Eigen::VectorXd fd = (rhs.evaluate(0.0, up) - rhs.evaluate(0.0, um)) / (2.0 * h);
                worst = std::max(worst, (fd - j.col(c)).cwiseAbs().maxCoeff() / scale);
            }
        }
    }
    return {worst <= 1e-5, fmt("%d random states over all families, N <= 64: max |J - J_fd| / "
                               "max|J| = %.3e (limit 1e-05)",
                               trials, worst)};
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> check;
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> list{
        {1, "soliton error table", soliton_table},
        {2, "soliton spectrum inside the RK4 region", soliton_spectrum},
        {3, "eventual periodicity of forced linear BBM", eventual_periodicity},
        {4, "dissipation lowers probe amplitudes", dissipation_ordering},
        {5, "nonlinearity raises BBM amplitude", nonlinear_amplitude},
        {6, "sparse n = N operator equals dense global operator", oracle_equivalence},
        {7, "kernel-span exactness", kernel_span},
        {8, "RK4 order and single step", rk4_order},
        {9, "analytic Jacobian vs finite differences", jacobian_check},
    };
    return list;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    for (const auto& c : criteria()) {
        if (only != 0 && c.id != only)
            continue;
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        std::printf("[%s] criterion %d: %s -- %s\n", out.pass ? "PASS" : "FAIL", c.id, c.title,
                    out.detail.c_str());
        std::fflush(stdout);
        failures += out.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
