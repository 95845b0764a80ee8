#include "ocq/oscillator_basis.hpp"

#include <cmath>
#include <vector>

#include "ocq/error.hpp"
#include "ocq/impurity.hpp"

namespace ocq {

OscillatorBasis::OscillatorBasis(std::size_t modes, std::size_t quadrature_nodes) : modes_(modes) {
    if (modes == 0) throw UsageError("OscillatorBasis: need at least one mode");
    if (quadrature_nodes > 0) {
        if (quadrature_nodes < modes) {
            throw UsageError("OscillatorBasis: quadrature needs at least as many nodes as modes");
        }
        rule_ = std::make_shared<const GaussHermiteRule>(gauss_hermite(quadrature_nodes));
    }
}

Eigen::VectorXd OscillatorBasis::energies() const {
    return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(modes_), 0.5,
                                      static_cast<double>(modes_) - 0.5);
}

const GaussHermiteRule& OscillatorBasis::quadrature() const {
    if (!rule_) throw UsageError("OscillatorBasis: no quadrature rule attached");
    return *rule_;
}

Eigen::MatrixXd OscillatorBasis::orbital_table(std::span<const double> points) const {
    Eigen::MatrixXd table(static_cast<Eigen::Index>(modes_), static_cast<Eigen::Index>(points.size()));
    std::vector<double> column(modes_);
    for (std::size_t j = 0; j < points.size(); ++j) {
        hermite_orbitals(points[j], column);
        table.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(column.data(), table.rows());
    }
    return table;
}

double OscillatorBasis::gram_deviation() const {
    const GaussHermiteRule& rule = quadrature();
    const Eigen::MatrixXd phi = orbital_table(rule.nodes);
    const Eigen::Map<const Eigen::VectorXd> w(rule.function_weights.data(),
                                              static_cast<Eigen::Index>(rule.function_weights.size()));
    const Eigen::MatrixXd scaled = phi * w.cwiseSqrt().asDiagonal();
    Eigen::MatrixXd gram = scaled * scaled.transpose();
    gram -= Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
    return gram.cwiseAbs().maxCoeff();
}

void ImpurityPotential::validate() const {
    if (!std::isfinite(strength) || !std::isfinite(position) || !std::isfinite(width)) {
        throw UsageError("impurity potential: strength, position and width must be finite");
    }
    if (width < 0.0) throw UsageError("impurity potential: width must be non-negative");
}

}  // namespace ocq
