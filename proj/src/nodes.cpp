#include "dispersive/nodes.hpp"

#include "dispersive/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dispersive {

NodeSet::NodeSet(std::vector<double> coords) : coords_(std::move(coords))
{
    if (coords_.size() < min_nodes)
        throw ConfigError("node set needs at least " + std::to_string(min_nodes) + " nodes, got " +
                          std::to_string(coords_.size()));
    for (std::size_t i = 1; i < coords_.size(); ++i) {
        if (!(coords_[i] > coords_[i - 1]))
            throw ConfigError("node coordinates must be strictly increasing (index " +
                              std::to_string(i) + ")");
    }
    if (!std::isfinite(coords_.front()) || !std::isfinite(coords_.back()))
        throw ConfigError("node coordinates must be finite");
    spacing_ = (coords_.back() - coords_.front()) / static_cast<double>(coords_.size() - 1);
}

NodeSet NodeSet::uniform(double a, double b, std::size_t count)
{
    if (!(a < b))
        throw ConfigError("interval must satisfy a < b");
    if (count < min_nodes)
        throw ConfigError("node set needs at least " + std::to_string(min_nodes) + " nodes, got " +
                          std::to_string(count));
    std::vector<double> x(count);
    const double h = (b - a) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
        x[i] = a + static_cast<double>(i) * h;
    x.back() = b;
    return NodeSet(std::move(x));
}

NodeSet NodeSet::from_coords(std::vector<double> coords) { return NodeSet(std::move(coords)); }

std::size_t NodeSet::nearest_index(double x) const
{
    auto it = std::lower_bound(coords_.begin(), coords_.end(), x);
    if (it == coords_.begin())
        return 0;
    if (it == coords_.end())
        return coords_.size() - 1;
    const auto hi = static_cast<std::size_t>(it - coords_.begin());
    const std::size_t lo = hi - 1;
    const double dl = x - coords_[lo];
    const double dr = coords_[hi] - x;
    const double tie_tol = 1e-12 * (b() - a());
    return dr < dl - tie_tol ? hi : lo;
}

NodeSet build_nodes(double a, double b, std::size_t count, NodeLayout layout,
                    std::span<const double> explicit_coords)
{
    if (layout == NodeLayout::uniform)
        return NodeSet::uniform(a, b, count);

    if (explicit_coords.size() != count)
        throw ConfigError("explicit node list has " + std::to_string(explicit_coords.size()) +
                          " entries, expected " + std::to_string(count));
    if (count == 0 || explicit_coords.front() != a || explicit_coords.back() != b)
        throw ConfigError("explicit node list must start at a and end at b");
    return NodeSet::from_coords({explicit_coords.begin(), explicit_coords.end()});
}

std::vector<std::size_t> select_neighbors(const NodeSet& nodes, std::size_t center,
                                          std::size_t n)
{
    const std::size_t count = nodes.size();
    if (center >= count)
        throw ConfigError("stencil center out of range");
    if (n == 0 || n > count)
        throw ConfigError("stencil size must be in [1, N]");

    // In 1D the n nearest nodes form a contiguous window; grow it one node at
    // a time from the closer side.
    const double tie_tol = 1e-12 * (nodes.b() - nodes.a());
    const double xc = nodes[center];
    std::size_t lo = center;
    std::size_t hi = center;
    while (hi - lo + 1 < n) {
        if (lo == 0) {
            ++hi;
        } else if (hi + 1 == count) {
            --lo;
        } else {
            const double dl = xc - nodes[lo - 1];
            const double dr = nodes[hi + 1] - xc;
            if (dr < dl - tie_tol)
                ++hi;
            else
                --lo;
        }
    }
    std::vector<std::size_t> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = lo + k;
    return out;
}

StencilMap::StencilMap(std::size_t stencil_size, std::vector<std::size_t> flat)
    : stencil_size_(stencil_size), flat_(std::move(flat))
{
    if (stencil_size_ == 0 || flat_.size() % stencil_size_ != 0)
        throw ConfigError("stencil map size mismatch");
}

StencilMap build_stencils(const NodeSet& nodes, std::size_t n)
{
    if (n < min_stencil || n > nodes.size())
        throw ConfigError("stencil size must satisfy " + std::to_string(min_stencil) +
                          " <= n <= N (n = " + std::to_string(n) +
                          ", N = " + std::to_string(nodes.size()) + ")");
    std::vector<std::size_t> flat;
    flat.reserve(nodes.size() * n);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto nb = select_neighbors(nodes, i, n);
        flat.insert(flat.end(), nb.begin(), nb.end());
    }
    return StencilMap(n, std::move(flat));
}

} // namespace dispersive
