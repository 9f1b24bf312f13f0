#pragma once

namespace dispersive {

/// Multiquadric kernel phi(r) = sqrt(C^2 + r^2) with shape parameter C > 0.
class KernelConfig {
public:
    explicit KernelConfig(double shape);

    double shape() const { return shape_; }

private:
    double shape_;
};

/// phi(r) for a nonnegative separation r.
double mq_value(double r, const KernelConfig& cfg);

/// d^k/dx^k of phi(|x - x_j|) evaluated at signed separation s = x - x_j,
/// for k in {0, 1, 2, 3}. Odd orders are odd in s, even orders even.
double mq_derivative(double s, int order, const KernelConfig& cfg);

} // namespace dispersive
