#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dispersive {

enum class NodeLayout { uniform, explicit_list };

inline constexpr std::size_t min_nodes = 4;
inline constexpr std::size_t min_stencil = 4;

/// Strictly increasing 1D node coordinates. Index 0 and size()-1 are the
/// boundary nodes.
class NodeSet {
public:
    static NodeSet uniform(double a, double b, std::size_t count);
    static NodeSet from_coords(std::vector<double> coords);

    std::size_t size() const { return coords_.size(); }
    std::span<const double> coords() const { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }

    double a() const { return coords_.front(); }
    double b() const { return coords_.back(); }

    /// (b - a) / (N - 1); the nominal spacing used by the L2 norm.
    double spacing() const { return spacing_; }

    std::size_t left_index() const { return 0; }
    std::size_t right_index() const { return coords_.size() - 1; }

    /// Index of the node closest to x; ties go to the smaller index.
    std::size_t nearest_index(double x) const;

private:
    explicit NodeSet(std::vector<double> coords);

    std::vector<double> coords_;
    double spacing_ = 0.0;
};

NodeSet build_nodes(double a, double b, std::size_t count, NodeLayout layout,
                    std::span<const double> explicit_coords = {});

/// The n nodes nearest to nodes[center], sorted by index. Equidistant
/// candidates resolve to the smaller index. No lower bound on n is applied.
std::vector<std::size_t> select_neighbors(const NodeSet& nodes, std::size_t center,
                                          std::size_t n);

class StencilMap {
public:
    StencilMap(std::size_t stencil_size, std::vector<std::size_t> flat);

    std::size_t stencil_size() const { return stencil_size_; }
    std::size_t node_count() const { return flat_.size() / stencil_size_; }

    std::span<const std::size_t> neighbors(std::size_t i) const
    {
        return std::span<const std::size_t>(flat_).subspan(i * stencil_size_, stencil_size_);
    }

    friend bool operator==(const StencilMap&, const StencilMap&) = default;

private:
    std::size_t stencil_size_;
    std::vector<std::size_t> flat_;
};

/// k-nearest-neighbor stencil for every node, min_stencil <= n <= N.
StencilMap build_stencils(const NodeSet& nodes, std::size_t n);

} // namespace dispersive
