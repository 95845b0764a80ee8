#include "ocq/hermite.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>

#include "ocq/error.hpp"

namespace ocq {
namespace {

constexpr double kRescaleThreshold = 0x1p+500;
constexpr double kRescaleFactor = 0x1p-500;
const double kRescaleLog = 500.0 * std::numbers::ln2;

double materialize(double mantissa, double log_scale) {
    if (mantissa == 0.0) return 0.0;
    const double magnitude = std::exp(std::log(std::abs(mantissa)) + log_scale);
    return mantissa < 0.0 ? -magnitude : magnitude;
}

}  // namespace

OrbitalSequence::OrbitalSequence(double x)
    : log_scale_(-0.5 * x * x - 0.25 * std::log(std::numbers::pi)), x_(x) {}

double OrbitalSequence::value() const { return materialize(cur_, log_scale_); }

double OrbitalSequence::previous_value() const { return materialize(prev_, log_scale_); }

void OrbitalSequence::advance() {
    const double k = index_;
    const double next = std::sqrt(2.0 / (k + 1.0)) * x_ * cur_ - std::sqrt(k / (k + 1.0)) * prev_;
    prev_ = cur_;
    cur_ = next;
    ++index_;
    if (std::abs(cur_) > kRescaleThreshold) {
        cur_ *= kRescaleFactor;
        prev_ *= kRescaleFactor;
        log_scale_ += kRescaleLog;
    }
}

double hermite_orbital(int n, double x) {
    if (n < 0 || n > kMaxHermiteIndex) {
        throw UsageError("hermite_orbital: mode index " + std::to_string(n) +
                         " outside supported range [0, " + std::to_string(kMaxHermiteIndex) + "]");
    }
    if (!std::isfinite(x)) throw UsageError("hermite_orbital: non-finite position");
    OrbitalSequence seq(x);
    for (int k = 0; k < n; ++k) seq.advance();
    return seq.value();
}

void hermite_orbitals(double x, std::span<double> out) {
    if (out.empty()) return;
    if (!std::isfinite(x)) throw UsageError("hermite_orbitals: non-finite position");
    OrbitalSequence seq(x);
    out[0] = seq.value();
    for (std::size_t k = 1; k < out.size(); ++k) {
        seq.advance();
        out[k] = seq.value();
    }
}

GaussHermiteRule gauss_hermite(std::size_t node_count) {
    if (node_count == 0) throw UsageError("gauss_hermite: need at least one node");
    const auto n = static_cast<Eigen::Index>(node_count);

    GaussHermiteRule rule;
    rule.nodes.resize(node_count);
    rule.function_weights.resize(node_count);
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.function_weights[0] = std::sqrt(std::numbers::pi);
        return rule;
    }

    Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (Eigen::Index k = 0; k + 1 < n; ++k) sub[k] = std::sqrt(0.5 * static_cast<double>(k + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diagonal, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("gauss_hermite: tridiagonal eigensolve failed");

    const double sqrt_two_n = std::sqrt(2.0 * static_cast<double>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        double x = solver.eigenvalues()[i];
        for (int newton = 0; newton < 4; ++newton) {
            OrbitalSequence seq(x);
            for (Eigen::Index k = 0; k < n; ++k) seq.advance();
            // phi_n' = sqrt(2n) phi_{n-1} - x phi_n
            const double derivative = sqrt_two_n * seq.previous_mantissa() - x * seq.mantissa();
            if (derivative == 0.0) break;
            const double dx = seq.mantissa() / derivative;
            x -= dx;
            if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        OrbitalSequence seq(x);
        for (Eigen::Index k = 0; k + 1 < n; ++k) seq.advance();
        const double phi = seq.value();
        rule.nodes[static_cast<std::size_t>(i)] = x;
        // Christoffel-Darboux: sum_{k<n} phi_k(x_i)^2 = n phi_{n-1}(x_i)^2
        rule.function_weights[static_cast<std::size_t>(i)] = 1.0 / (static_cast<double>(n) * phi * phi);
    }
    // exact reflection symmetry
    for (std::size_t i = 0; i < node_count / 2; ++i) {
        const std::size_t j = node_count - 1 - i;
        const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.function_weights[i] + rule.function_weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.function_weights[i] = rule.function_weights[j] = w;
    }
    if (node_count % 2 == 1) rule.nodes[node_count / 2] = 0.0;
    return rule;
}

}  // namespace ocq
