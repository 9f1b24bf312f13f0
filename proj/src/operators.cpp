#include "dispersive/operators.hpp"

#include "dispersive/errors.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace dispersive {

namespace {

void check_order(int order)
{
    if (order < 1 || order > 3)
        throw ConfigError("differentiation order must be 1, 2 or 3, got " + std::to_string(order));
}

} // namespace

KernelConfig resolve_shape(double value, ShapeMode mode, const NodeSet& nodes)
{
    if (mode == ShapeMode::proportional)
        return KernelConfig(value * nodes.spacing());
    return KernelConfig(value);
}

LocalSystem build_local_system(const NodeSet& nodes, std::span<const std::size_t> stencil,
                               std::size_t center, int order, const KernelConfig& cfg)
{
    const auto n = static_cast<Eigen::Index>(stencil.size());
    LocalSystem sys;
    sys.stencil_coords.resize(n);
    for (Eigen::Index j = 0; j < n; ++j)
        sys.stencil_coords[j] = nodes[stencil[static_cast<std::size_t>(j)]];

    sys.interpolation_matrix.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j; k < n; ++k) {
            const double v =
                mq_value(std::abs(sys.stencil_coords[j] - sys.stencil_coords[k]), cfg);
            sys.interpolation_matrix(j, k) = v;
            sys.interpolation_matrix(k, j) = v;
        }
    }

    const double xc = nodes[center];
    sys.rhs_row.resize(n);
    for (Eigen::Index j = 0; j < n; ++j)
        sys.rhs_row[j] = mq_derivative(xc - sys.stencil_coords[j], order, cfg);
    return sys;
}

Eigen::VectorXd local_weights(const NodeSet& nodes, std::span<const std::size_t> stencil,
                              std::size_t center, int order, const KernelConfig& cfg)
{
    check_order(order);
    const LocalSystem sys = build_local_system(nodes, stencil, center, order, cfg);

    // K is symmetric, so w^T = r^T K^{-1} is the solution of K w = r.
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.interpolation_matrix);
    const double rcond = lu.rcond();
    if (!(rcond * max_local_condition >= 1.0)) {
        std::ostringstream msg;
        msg << "local RBF system at node " << center << " is numerically singular (condition ~"
            << (rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity())
            << "); change the shape-to-spacing ratio (C = " << cfg.shape() << ")";
        throw NumericalError(msg.str());
    }
    return lu.solve(sys.rhs_row);
}

double StencilRow::weight_at(std::size_t col) const
{
    for (std::size_t k = 0; k < cols.size(); ++k)
        if (cols[k] == col)
            return weights[k];
    return 0.0;
}

DiffOperator::DiffOperator(int order, SparseMatrix matrix, KernelConfig kernel,
                           std::size_t stencil_size)
    : order_(order), matrix_(std::move(matrix)), kernel_(kernel), stencil_size_(stencil_size)
{
}

StencilRow DiffOperator::row(std::size_t i) const
{
    StencilRow r;
    for (SparseMatrix::InnerIterator it(matrix_, static_cast<Eigen::Index>(i)); it; ++it) {
        r.cols.push_back(static_cast<std::size_t>(it.col()));
        r.weights.push_back(it.value());
    }
    return r;
}

DiffOperator assemble_operator(const NodeSet& nodes, const StencilMap& stencils, int order,
                               const KernelConfig& cfg)
{
    check_order(order);
    if (stencils.node_count() != nodes.size())
        throw ConfigError("stencil map and node set sizes differ");

    const auto count = static_cast<Eigen::Index>(nodes.size());
    const std::size_t n = stencils.stencil_size();

    // Row-major storage: reserving exactly n entries per row makes the
    // scatter below a direct fill.
    SparseMatrix m(count, count);
    m.reserve(Eigen::VectorXi::Constant(count, static_cast<int>(n)));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto nb = stencils.neighbors(i);
        const Eigen::VectorXd w = local_weights(nodes, nb, i, order, cfg);
        for (std::size_t j = 0; j < n; ++j)
            m.insert(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nb[j])) =
                w[static_cast<Eigen::Index>(j)];
    }
    m.makeCompressed();
    return DiffOperator(order, std::move(m), cfg, n);
}

Eigen::MatrixXd global_dense_operator(const NodeSet& nodes, int order, const KernelConfig& cfg)
{
    return global_dense_operator(nodes.coords(), order, cfg);
}

Eigen::MatrixXd global_dense_operator(std::span<const double> nodes, int order,
                                      const KernelConfig& cfg)
{
    check_order(order);
    if (nodes.size() > 512)
        throw ConfigError("global_dense_operator is limited to 512 nodes");
    if (nodes.empty())
        throw ConfigError("global_dense_operator needs at least one node");

    const auto count = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd k(count, count);
    Eigen::MatrixXd kl(count, count);
    for (Eigen::Index i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < count; ++j) {
            const double s = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
            k(i, j) = mq_value(std::abs(s), cfg);
            kl(i, j) = mq_derivative(s, order, cfg);
        }
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(k);
    if (!(lu.rcond() > std::numeric_limits<double>::epsilon()))
        throw NumericalError("global interpolation matrix is singular to working precision");

    // L = K_L K^{-1}  <=>  K L^T = K_L^T for symmetric K.
    return lu.solve(kl.transpose()).transpose();
}

void write_coordinate_text(std::ostream& os, const DiffOperator& op)
{
    const auto old_precision = os.precision(17);
    const auto& m = op.matrix();
    for (Eigen::Index i = 0; i < m.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(m, i); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    os.precision(old_precision);
}

} // namespace dispersive
