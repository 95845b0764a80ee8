#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ocq {

/// Largest mode index accepted by the public orbital evaluators.
inline constexpr int kMaxHermiteIndex = 10000;

/// Normalized harmonic-oscillator eigenfunction phi_n(x) in trap units
/// (hbar = m = omega = 1). Evaluated with a rescaled three-term recurrence
/// on phi_n itself, so neither Hermite polynomials nor exp(-x^2/2) are formed
/// explicitly; values underflow gracefully to zero far outside the
/// classically allowed region.
[[nodiscard]] double hermite_orbital(int n, double x);

/// Fills out[k] = phi_k(x) for k = 0 .. out.size()-1.
void hermite_orbitals(double x, std::span<double> out);

/// Walks phi_0(x), phi_1(x), ... one mode at a time. The two most recent
/// values are kept as mantissas sharing one exponent, so their ratio stays
/// exact even where value() underflows.
class OrbitalSequence {
public:
    explicit OrbitalSequence(double x);

    [[nodiscard]] int index() const noexcept { return index_; }
    [[nodiscard]] double value() const;           // phi_index(x)
    [[nodiscard]] double previous_value() const;  // phi_{index-1}(x); 0 at index 0
    [[nodiscard]] double mantissa() const noexcept { return cur_; }
    [[nodiscard]] double previous_mantissa() const noexcept { return prev_; }
    void advance();

private:
    double prev_ = 0.0;
    double cur_ = 1.0;
    double log_scale_;
    double x_;
    int index_ = 0;
};

/// Gauss-Hermite rule for the weight exp(-x^2). `function_weights` are the
/// weights w_i * exp(x_i^2), i.e. the rule integrates f(x) directly:
///     int f(x) dx  ~=  sum_i function_weights[i] * f(nodes[i])
/// which is exact for f = phi_m * phi_n whenever m + n < 2 * nodes.size().
struct GaussHermiteRule {
    std::vector<double> nodes;             // ascending
    std::vector<double> function_weights;  // w_i * exp(x_i^2)
};

/// Golub-Welsch eigenvalues of the Jacobi matrix, polished by Newton steps
/// on phi_n; weights from the Christoffel-Darboux identity.
[[nodiscard]] GaussHermiteRule gauss_hermite(std::size_t node_count);

}  // namespace ocq
