#include "dispersive/models.hpp"

#include "dispersive/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace dispersive {

namespace {

struct FamilyInfo {
    Family family;
    std::string_view name;
    bool alpha, beta, mu, delta, gamma_damp;
};

constexpr std::array<FamilyInfo, 6> family_table{{
    {Family::kdv_classic, "kdv-classic", false, true, true, false, false},
    {Family::bbm, "bbm", true, true, true, false, false},
    {Family::bbm_burgers, "bbm-burgers", true, true, true, true, false},
    {Family::kdv, "kdv", true, true, true, false, false},
    {Family::kdv_burgers, "kdv-burgers", true, true, true, true, false},
    {Family::kdv_damped, "kdv-damped", true, true, true, false, true},
}};

const FamilyInfo& info(Family f)
{
    return *std::find_if(family_table.begin(), family_table.end(),
                         [f](const FamilyInfo& i) { return i.family == f; });
}

void check_coefficient(std::string_view name, double value, bool active, bool nonnegative,
                       Family f)
{
    if (!std::isfinite(value))
        throw ConfigError(std::string(name) + " must be finite");
    if (!active && value != 0.0)
        throw ConfigError(std::string(name) + " is not used by family " +
                          std::string(family_name(f)) + " and must be zero");
    if (nonnegative && value < 0.0)
        throw ConfigError(std::string(name) + " must be nonnegative");
}

double sech2(double z)
{
    const double ch = std::cosh(z);
    return 1.0 / (ch * ch);
}

} // namespace

std::string_view family_name(Family f) { return info(f).name; }

Family parse_family(std::string_view name)
{
    for (const auto& i : family_table)
        if (i.name == name)
            return i.family;
    throw ConfigError("unknown model family '" + std::string(name) + "'");
}

bool is_bbm(Family f) { return f == Family::bbm || f == Family::bbm_burgers; }

bool uses_third_derivative(Family f) { return !is_bbm(f); }

void ModelSpec::validate() const
{
    const auto& fi = info(family);
    check_coefficient("alpha", alpha, fi.alpha, false, family);
    check_coefficient("beta", beta, fi.beta, false, family);
    check_coefficient("mu", mu, fi.mu, true, family);
    check_coefficient("delta", delta, fi.delta, true, family);
    check_coefficient("gamma_damp", gamma_damp, fi.gamma_damp, true, family);
    if (is_bbm(family) && mu == 0.0 && !allow_zero_mu)
        throw ConfigError("BBM families need mu > 0 (set allow_zero_mu to accept mu = 0)");
}

ForcingSpec ForcingSpec::sin_tanh() { return ForcingSpec(Kind::sin_tanh, 0.1); }

ForcingSpec ForcingSpec::zero(double period)
{
    if (!(period > 0.0))
        throw ConfigError("forcing period must be positive");
    return ForcingSpec(Kind::zero, period);
}

ForcingSpec ForcingSpec::custom_table(std::vector<std::pair<double, double>> samples,
                                      double period)
{
    if (!(period > 0.0))
        throw ConfigError("forcing period must be positive");
    if (samples.size() < 2)
        throw ConfigError("custom forcing table needs at least two samples");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].first > samples[i - 1].first))
            throw ConfigError("custom forcing table times must be strictly increasing");
    ForcingSpec f(Kind::custom_table, period);
    f.table_ = std::move(samples);
    return f;
}

double forcing_eval(const ForcingSpec& forcing, double t)
{
    if (t < 0.0)
        throw ConfigError("forcing evaluated at negative time");
    switch (forcing.kind()) {
    case ForcingSpec::Kind::sin_tanh:
        return std::sin(20.0 * std::numbers::pi * t) * std::tanh(5.0 * t);
    case ForcingSpec::Kind::zero:
        return 0.0;
    case ForcingSpec::Kind::custom_table: {
        const auto tab = forcing.table();
        if (t < tab.front().first || t > tab.back().first) {
            std::ostringstream msg;
            msg << "custom forcing queried at t = " << t << " outside table range ["
                << tab.front().first << ", " << tab.back().first << "]";
            throw ConfigError(msg.str());
        }
        auto it = std::upper_bound(tab.begin(), tab.end(), t,
                                   [](double v, const auto& s) { return v < s.first; });
        if (it == tab.end())
            return tab.back().second;
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (t - lo.first) / (hi.first - lo.first);
        return (1.0 - w) * lo.second + w * hi.second;
    }
    }
    return 0.0;
}

void SolitonSpec::validate() const
{
    if (!(speed_c > 0.0))
        throw ConfigError("soliton speed c must be positive");
    if (beta == 0.0 || !std::isfinite(beta))
        throw ConfigError("soliton beta must be nonzero");
    if (!(gamma_disp > 0.0))
        throw ConfigError("soliton gamma must be positive");
}

double soliton_exact(double x, double t, const SolitonSpec& spec)
{
    const double c = spec.speed_c;
    const double k = 0.5 * std::sqrt(c / spec.gamma_disp);
    return 3.0 * c / spec.beta * sech2(k * (x - c * t) - 7.0);
}

double soliton_exact_dx(double x, double t, const SolitonSpec& spec)
{
    const double c = spec.speed_c;
    const double k = 0.5 * std::sqrt(c / spec.gamma_disp);
    const double z = k * (x - c * t) - 7.0;
    return -2.0 * k * 3.0 * c / spec.beta * sech2(z) * std::tanh(z);
}

BoundaryData forced_boundary(ForcingSpec forcing)
{
    BoundaryData d;
    d.left = [forcing = std::move(forcing)](double t) { return forcing_eval(forcing, t); };
    d.right = [](double) { return 0.0; };
    d.right_slope = [](double) { return 0.0; };
    return d;
}

BoundaryData soliton_boundary(const SolitonSpec& spec, double a, double b)
{
    spec.validate();
    BoundaryData d;
    d.left = [spec, a](double t) { return soliton_exact(a, t, spec); };
    d.right = [spec, b](double t) { return soliton_exact(b, t, spec); };
    d.right_slope = [spec, b](double t) { return soliton_exact_dx(b, t, spec); };
    return d;
}

namespace {

double adjacent_weight(const StencilRow& row, std::size_t adjacent)
{
    const double w = row.weight_at(adjacent);
    double scale = 0.0;
    for (double v : row.weights)
        scale = std::max(scale, std::abs(v));
    if (!(std::abs(w) > 1e-14 * scale))
        throw NumericalError("right-end derivative row has no usable weight on node " +
                             std::to_string(adjacent) + "; cannot impose u_x at the boundary");
    return w;
}

} // namespace

void apply_boundary(Eigen::Ref<Eigen::VectorXd> state, double t, const ModelSpec& model,
                    const BoundaryData& data, const StencilRow& d1_right_row)
{
    const auto n = static_cast<std::size_t>(state.size());
    state[0] = data.left(t);
    state[static_cast<Eigen::Index>(n - 1)] = data.right(t);
    if (!model.neumann_active())
        return;

    const std::size_t adj = n - 2;
    const double wa = adjacent_weight(d1_right_row, adj);
    double rest = 0.0;
    for (std::size_t k = 0; k < d1_right_row.cols.size(); ++k)
        if (d1_right_row.cols[k] != adj)
            rest += d1_right_row.weights[k] * state[static_cast<Eigen::Index>(d1_right_row.cols[k])];
    state[static_cast<Eigen::Index>(adj)] = (data.right_slope(t) - rest) / wa;
}

std::size_t OperatorSet::size() const { return d1 ? d1->size() : 0; }

OperatorSet build_operator_set(const NodeSet& nodes, const StencilMap& stencils,
                               const KernelConfig& cfg, Family family)
{
    OperatorSet ops;
    ops.d1 = assemble_operator(nodes, stencils, 1, cfg);
    if (is_bbm(family) || family == Family::kdv_burgers)
        ops.d2 = assemble_operator(nodes, stencils, 2, cfg);
    if (uses_third_derivative(family))
        ops.d3 = assemble_operator(nodes, stencils, 3, cfg);
    return ops;
}

RhsEvaluator::RhsEvaluator(ModelSpec model, const OperatorSet& ops, BoundaryData boundary)
    : model_(model), size_(ops.size()), boundary_(std::move(boundary))
{
    model_.validate();
    if (!ops.d1)
        throw ConfigError("every model family needs the first-derivative operator");
    const bool needs_d2 = is_bbm(model_.family) || model_.delta != 0.0;
    const bool needs_d3 = uses_third_derivative(model_.family);
    if (needs_d2 && !ops.d2)
        throw ConfigError(std::string("family ") + std::string(family_name(model_.family)) +
                          " needs the second-derivative operator");
    if (needs_d3 && !ops.d3)
        throw ConfigError(std::string("family ") + std::string(family_name(model_.family)) +
                          " needs the third-derivative operator");
    if ((ops.d2 && ops.d2->size() != size_) || (ops.d3 && ops.d3->size() != size_))
        throw ConfigError("operators were assembled on different node sets");
    if (!boundary_.left || !boundary_.right || !boundary_.right_slope)
        throw ConfigError("boundary data is incomplete");

    d1_ = ops.d1->matrix();
    if (ops.d2)
        d2_ = ops.d2->matrix();
    if (ops.d3)
        d3_ = ops.d3->matrix();
    right_row_ = ops.d1->row(size_ - 1);
    if (model_.neumann_active())
        adjacent_weight(right_row_, size_ - 2);

    if (is_bbm(model_.family)) {
        const auto n = static_cast<Eigen::Index>(size_);
        SparseMatrix mass(n, n);
        mass.setIdentity();
        mass -= model_.mu * d2_;
        // Boundary rows carry no dynamics; keep them as identity rows.
        for (Eigen::Index r : {Eigen::Index{0}, n - 1}) {
            for (SparseMatrix::InnerIterator it(mass, r); it; ++it)
                it.valueRef() = (it.col() == r) ? 1.0 : 0.0;
        }
        mass.prune(0.0);
        mass_ = mass;
        mass_lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        Eigen::SparseMatrix<double> cm = mass_;
        mass_lu_->compute(cm);
        if (mass_lu_->info() != Eigen::Success)
            throw NumericalError("factorization of the BBM mass matrix (I - mu D2) failed");
    }
}

Eigen::VectorXd RhsEvaluator::explicit_part(const Eigen::VectorXd& u) const
{
    const Eigen::VectorXd d1u = d1_ * u;
    Eigen::VectorXd r = -model_.beta * u.cwiseProduct(d1u);
    switch (model_.family) {
    case Family::kdv_classic:
        r -= model_.mu * (d3_ * u);
        break;
    case Family::kdv:
    case Family::kdv_burgers:
    case Family::kdv_damped:
        r += model_.mu * (d3_ * u);
        [[fallthrough]];
    case Family::bbm:
    case Family::bbm_burgers:
        r -= model_.alpha * d1u;
        break;
    }
    if (model_.delta != 0.0)
        r += model_.delta * (d2_ * u);
    if (model_.gamma_damp != 0.0)
        r -= model_.gamma_damp * u;
    r[0] = 0.0;
    r[r.size() - 1] = 0.0;
    return r;
}

void RhsEvaluator::operator()(double, const Eigen::VectorXd& u, Eigen::VectorXd& du) const
{
    if (mass_lu_)
        du = mass_lu_->solve(explicit_part(u));
    else
        du = explicit_part(u);
}

Eigen::VectorXd RhsEvaluator::evaluate(double t, const Eigen::VectorXd& u) const
{
    Eigen::VectorXd du;
    (*this)(t, u, du);
    return du;
}

void RhsEvaluator::enforce(double t, Eigen::Ref<Eigen::VectorXd> u) const
{
    apply_boundary(u, t, model_, boundary_, right_row_);
}

Eigen::MatrixXd RhsEvaluator::jacobian(const Eigen::VectorXd& u) const
{
    const auto n = static_cast<Eigen::Index>(size_);
    const Eigen::MatrixXd d1 = Eigen::MatrixXd(d1_);
    const Eigen::VectorXd d1u = d1_ * u;

    // d/du [-beta u o (D1 u)] = -beta (diag(D1 u) + diag(u) D1)
    Eigen::MatrixXd j = -model_.beta * (u.asDiagonal() * d1);
    j.diagonal() -= model_.beta * d1u;
    switch (model_.family) {
    case Family::kdv_classic:
        j -= model_.mu * Eigen::MatrixXd(d3_);
        break;
    case Family::kdv:
    case Family::kdv_burgers:
    case Family::kdv_damped:
        j += model_.mu * Eigen::MatrixXd(d3_);
        [[fallthrough]];
    case Family::bbm:
    case Family::bbm_burgers:
        j -= model_.alpha * d1;
        break;
    }
    if (model_.delta != 0.0)
        j += model_.delta * Eigen::MatrixXd(d2_);
    if (model_.gamma_damp != 0.0)
        j.diagonal().array() -= model_.gamma_damp;
    j.row(0).setZero();
    j.row(n - 1).setZero();

    if (mass_lu_)
        return mass_lu_->solve(j);
    return j;
}

Eigen::MatrixXd RhsEvaluator::boundary_projection() const
{
    const auto n = static_cast<Eigen::Index>(size_);
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    p(0, 0) = 0.0;
    p(n - 1, n - 1) = 0.0;
    if (model_.neumann_active()) {
        const std::size_t adj = size_ - 2;
        const double wa = adjacent_weight(right_row_, adj);
        p.row(n - 2).setZero();
        for (std::size_t k = 0; k < right_row_.cols.size(); ++k) {
            const std::size_t col = right_row_.cols[k];
            if (col == adj || col == 0 || col == size_ - 1)
                continue;
            p(n - 2, static_cast<Eigen::Index>(col)) = -right_row_.weights[k] / wa;
        }
    }
    return p;
}

Eigen::VectorXd RhsEvaluator::apply_mass(const Eigen::VectorXd& v) const
{
    if (!mass_lu_)
        throw ConfigError("apply_mass is only defined for BBM families");
    return mass_ * v;
}

RhsEvaluator build_rhs(const ModelSpec& model, const OperatorSet& ops, BoundaryData boundary)
{
    return RhsEvaluator(model, ops, std::move(boundary));
}

} // namespace dispersive
