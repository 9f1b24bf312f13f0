#pragma once

#include "dispersive/operators.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dispersive {

enum class Family { kdv_classic, bbm, bbm_burgers, kdv, kdv_burgers, kdv_damped };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

bool is_bbm(Family f);
bool uses_third_derivative(Family f);

/// Equation family and its coefficients.
///
///   kdv-classic  u_t = -beta u u_x - mu u_xxx
///   kdv          u_t = -alpha u_x - beta u u_x + mu u_xxx
///   kdv-burgers  kdv + delta u_xx
///   kdv-damped   kdv - gamma_damp u
///   bbm          (1 - mu d_xx) u_t = -alpha u_x - beta u u_x
///   bbm-burgers  bbm right side + delta u_xx
///
/// Coefficients that a family does not use must be zero.
struct ModelSpec {
    Family family = Family::kdv;
    double alpha = 0.0;
    double beta = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    double gamma_damp = 0.0;
    // Impose u_x = 0 at the right end for BBM families too.
    bool bbm_neumann = false;
    // Accept mu = 0 for BBM families (mass matrix degenerates to identity).
    bool allow_zero_mu = false;

    void validate() const;
    bool neumann_active() const { return uses_third_derivative(family) || bbm_neumann; }
};

class ForcingSpec {
public:
    enum class Kind { sin_tanh, zero, custom_table };

    static ForcingSpec sin_tanh();
    static ForcingSpec zero(double period = 0.1);
    /// Samples (t, g) with strictly increasing t, linearly interpolated.
    static ForcingSpec custom_table(std::vector<std::pair<double, double>> samples, double period);

    Kind kind() const { return kind_; }
    double period() const { return period_; }
    std::span<const std::pair<double, double>> table() const { return table_; }

private:
    ForcingSpec(Kind kind, double period) : kind_(kind), period_(period) {}

    Kind kind_;
    double period_;
    std::vector<std::pair<double, double>> table_;
};

/// g(t). sin-tanh is sin(20 pi t) tanh(5 t).
double forcing_eval(const ForcingSpec& forcing, double t);

struct SolitonSpec {
    double speed_c = 0.5;
    double beta = 6.0;
    double gamma_disp = 1.0;

    void validate() const;
};

/// Solitary wave of u_t + beta u u_x + gamma u_xxx = 0:
/// (3c/beta) sech^2( sqrt(c/gamma)/2 (x - c t) - 7 ). For beta = 6 and
/// gamma = 1 this is (c/2) sech^2( sqrt(c)/2 (x - c t) - 7 ).
double soliton_exact(double x, double t, const SolitonSpec& spec);
double soliton_exact_dx(double x, double t, const SolitonSpec& spec);

/// Time-dependent boundary data: Dirichlet values at both ends and the
/// slope imposed at the right end when the Neumann row is active.
struct BoundaryData {
    std::function<double(double)> left;
    std::function<double(double)> right;
    std::function<double(double)> right_slope;
};

/// left = g(t), right = 0, right slope = 0.
BoundaryData forced_boundary(ForcingSpec forcing);

/// Exact soliton values and slope at a and b.
BoundaryData soliton_boundary(const SolitonSpec& spec, double a, double b);

/// Sets the Dirichlet ends, then (when the Neumann row is active) solves the
/// node next to the right end from sum_j w_j u_j = slope, with w the first
/// derivative row at the right end.
void apply_boundary(Eigen::Ref<Eigen::VectorXd> state, double t, const ModelSpec& model,
                    const BoundaryData& data, const StencilRow& d1_right_row);

struct OperatorSet {
    std::optional<DiffOperator> d1;
    std::optional<DiffOperator> d2;
    std::optional<DiffOperator> d3;

    std::size_t size() const;
};

/// Assembles the operators a family needs (D1 always).
OperatorSet build_operator_set(const NodeSet& nodes, const StencilMap& stencils,
                               const KernelConfig& cfg, Family family);

/// Method-of-lines right-hand side for one model on one node set. Owns the
/// factorized BBM mass matrix; one integration timeline at a time.
class RhsEvaluator {
public:
    RhsEvaluator(ModelSpec model, const OperatorSet& ops, BoundaryData boundary);

    std::size_t size() const { return size_; }
    const ModelSpec& model() const { return model_; }

    /// du/dt at the given state. Dirichlet rows are zero.
    void operator()(double t, const Eigen::VectorXd& u, Eigen::VectorXd& du) const;
    Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& u) const;

    /// Applies the boundary constraints at time t in place.
    void enforce(double t, Eigen::Ref<Eigen::VectorXd> u) const;

    /// Analytic Jacobian of operator() at u, dense.
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const;

    /// Linear part of enforce(): a projection P with P u = enforce(u) for
    /// homogeneous boundary data.
    Eigen::MatrixXd boundary_projection() const;

    /// Applies (I - mu D2) with identity boundary rows. BBM families only.
    Eigen::VectorXd apply_mass(const Eigen::VectorXd& v) const;

    const StencilRow& right_d1_row() const { return right_row_; }

private:
    Eigen::VectorXd explicit_part(const Eigen::VectorXd& u) const;

    ModelSpec model_;
    std::size_t size_;
    SparseMatrix d1_;
    SparseMatrix d2_;
    SparseMatrix d3_;
    SparseMatrix mass_;
    std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> mass_lu_;
    BoundaryData boundary_;
    StencilRow right_row_;
};

RhsEvaluator build_rhs(const ModelSpec& model, const OperatorSet& ops, BoundaryData boundary);

} // namespace dispersive
