#include "dispersive/kernels.hpp"

#include "dispersive/errors.hpp"

#include <cmath>
#include <string>

namespace dispersive {

KernelConfig::KernelConfig(double shape) : shape_(shape)
{
    if (!(shape > 0.0) || !std::isfinite(shape))
        throw ConfigError("kernel shape parameter must be positive, got " + std::to_string(shape));
}

double mq_value(double r, const KernelConfig& cfg)
{
    if (r < 0.0)
        throw ConfigError("mq_value: separation must be nonnegative");
    const double c = cfg.shape();
    return std::sqrt(c * c + r * r);
}

double mq_derivative(double s, int order, const KernelConfig& cfg)
{
    const double c2 = cfg.shape() * cfg.shape();
    const double p = std::sqrt(c2 + s * s);
    switch (order) {
    case 0:
        return p;
    case 1:
        return s / p;
    case 2:
        return c2 / (p * p * p);
    case 3: {
        const double p2 = p * p;
        return -3.0 * c2 * s / (p2 * p2 * p);
    }
    default:
        throw ConfigError("mq_derivative: unsupported derivative order " + std::to_string(order));
    }
}

} // namespace dispersive
