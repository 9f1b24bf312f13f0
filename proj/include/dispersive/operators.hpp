#pragma once

#include "dispersive/kernels.hpp"
#include "dispersive/nodes.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace dispersive {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Local systems whose estimated 1-norm condition number exceeds this are
/// rejected.
inline constexpr double max_local_condition = 1e14;

enum class ShapeMode { absolute, proportional };

/// absolute: C = value. proportional: C = value * h.
KernelConfig resolve_shape(double value, ShapeMode mode, const NodeSet& nodes);

/// Interpolation matrix and differentiated kernel row for one stencil.
struct LocalSystem {
    Eigen::VectorXd stencil_coords;
    Eigen::MatrixXd interpolation_matrix;
    Eigen::VectorXd rhs_row;
};

LocalSystem build_local_system(const NodeSet& nodes, std::span<const std::size_t> stencil,
                               std::size_t center, int order, const KernelConfig& cfg);

/// RBF-FD weights for d^k/dx^k at nodes[center] over the given stencil.
/// Throws NumericalError when the local matrix is too ill-conditioned.
Eigen::VectorXd local_weights(const NodeSet& nodes, std::span<const std::size_t> stencil,
                              std::size_t center, int order, const KernelConfig& cfg);

/// Sparse weights of a single operator row.
struct StencilRow {
    std::vector<std::size_t> cols;
    std::vector<double> weights;

    double weight_at(std::size_t col) const;
};

/// Sparse N x N approximation of d^k/dx^k. Row i holds the local weights
/// of node i scattered onto its stencil columns.
class DiffOperator {
public:
    DiffOperator(int order, SparseMatrix matrix, KernelConfig kernel, std::size_t stencil_size);

    int order() const { return order_; }
    const SparseMatrix& matrix() const { return matrix_; }
    const KernelConfig& kernel() const { return kernel_; }
    std::size_t stencil_size() const { return stencil_size_; }
    std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const { return matrix_ * u; }
    StencilRow row(std::size_t i) const;

private:
    int order_;
    SparseMatrix matrix_;
    KernelConfig kernel_;
    std::size_t stencil_size_;
};

DiffOperator assemble_operator(const NodeSet& nodes, const StencilMap& stencils, int order,
                               const KernelConfig& cfg);

/// Dense global differentiation matrix K_L K^{-1} over all nodes. Used as an
/// independent check of the sparse assembly; limited to 512 nodes.
Eigen::MatrixXd global_dense_operator(const NodeSet& nodes, int order, const KernelConfig& cfg);

/// Same on raw coordinates, without the node-set minimum size.
Eigen::MatrixXd global_dense_operator(std::span<const double> coords, int order,
                                      const KernelConfig& cfg);

/// One "row col value" line per stored entry, zero-based indices.
void write_coordinate_text(std::ostream& os, const DiffOperator& op);

} // namespace dispersive
