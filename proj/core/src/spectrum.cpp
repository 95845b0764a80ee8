#include "ocq/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ocq/error.hpp"
#include "ocq/secular.hpp"

namespace ocq {

std::string_view to_string(SolverMethod method) {
    return method == SolverMethod::rank_one ? "rank-one" : "dense-gaussian";
}

std::string_view to_string(CouplingScheme scheme) {
    return scheme == CouplingScheme::bare ? "bare" : "renormalized";
}

Eigen::VectorXd PerturbedSpectrum::unperturbed_energies() const {
    return OscillatorBasis(modes()).energies();
}

std::vector<double> PerturbedSpectrum::coupled_energies() const {
    std::vector<double> out;
    for (std::size_t k = 0; k < modes(); ++k) {
        if (coupled[k] != 0) out.push_back(energies[static_cast<Eigen::Index>(k)]);
    }
    return out;
}

double PerturbedSpectrum::orthogonality_defect() const {
    Eigen::MatrixXd gram = overlaps.transpose() * overlaps;
    gram -= Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
    return gram.cwiseAbs().maxCoeff();
}

double truncated_green_tail(std::size_t modes, double position) {
    constexpr std::size_t kExplicitTerms = std::size_t{1} << 22;
    const std::size_t upper = std::max(kExplicitTerms, 2 * modes);
    OrbitalSequence seq(position);
    while (static_cast<std::size_t>(seq.index()) < modes) seq.advance();
    double tail = 0.0;
    for (std::size_t n = modes; n < upper; ++n) {
        const double phi = seq.value();
        tail += phi * phi / (static_cast<double>(n) + 0.5);
        seq.advance();
    }
    // phi_n(d)^2 averages to 1/(pi sqrt(2n)) for n >> d^2
    tail += std::numbers::sqrt2 / (std::numbers::pi * std::sqrt(static_cast<double>(upper)));
    return tail;
}

namespace {

void check_modes(const OscillatorBasis& basis, const SolverOptions& options) {
    if (basis.modes() < options.min_modes) {
        std::ostringstream msg;
        msg << "diagonalize_perturbed: K = " << basis.modes() << " below the minimum of " << options.min_modes;
        throw UsageError(msg.str());
    }
}

PerturbedSpectrum diagonalize_contact(const OscillatorBasis& basis, const ImpurityPotential& pot,
                                      const SolverOptions& options) {
    const std::size_t modes = basis.modes();
    const auto K = static_cast<Eigen::Index>(modes);
    const Eigen::VectorXd energies = basis.energies();

    PerturbedSpectrum out;
    out.method = SolverMethod::rank_one;
    out.coupling = options.coupling;
    out.potential = pot;

    double kappa = pot.strength;
    if (options.coupling == CouplingScheme::renormalized && kappa != 0.0) {
        const double denominator = 1.0 + kappa * truncated_green_tail(modes, pot.position);
        if (denominator < 0.25) {
            std::ostringstream msg;
            msg << "diagonalize_perturbed: attractive coupling " << kappa << " is too strong for K = " << modes
                << " (renormalization denominator " << denominator << "); raise K or use the bare scheme";
            throw NumericalError(msg.str());
        }
        kappa /= denominator;
    }
    out.effective_strength = kappa;

    std::vector<double> v(modes);
    hermite_orbitals(pot.position, v);

    double v_norm2 = 0.0;
    for (double x : v) v_norm2 += x * x;
    const double scale = energies[K - 1] + std::abs(kappa) * v_norm2;
    const double deflation = 64.0 * std::numeric_limits<double>::epsilon() * scale;

    std::vector<std::size_t> active;
    for (std::size_t n = 0; n < modes; ++n) {
        if (kappa != 0.0 && std::abs(kappa) * v[n] * v[n] > deflation) active.push_back(n);
    }

    std::vector<double> poles(active.size());
    std::vector<double> z(active.size());
    for (std::size_t j = 0; j < active.size(); ++j) {
        poles[j] = energies[static_cast<Eigen::Index>(active[j])];
        z[j] = v[active[j]];
    }
    const RankOneEigensystem system =
        active.empty() ? RankOneEigensystem{} : solve_rank_one(poles, z, kappa);

    struct Level {
        double energy;
        bool is_active;
        std::size_t index;  // mode n if deflated, root j if active
    };
    std::vector<Level> levels;
    levels.reserve(modes);
    std::vector<char> is_active(modes, 0);
    for (std::size_t n : active) is_active[n] = 1;
    for (std::size_t n = 0; n < modes; ++n) {
        if (!is_active[n]) levels.push_back({energies[static_cast<Eigen::Index>(n)], false, n});
    }
    for (std::size_t j = 0; j < active.size(); ++j) {
        levels.push_back({system.values[static_cast<Eigen::Index>(j)], true, j});
    }
    std::stable_sort(levels.begin(), levels.end(),
                     [](const Level& a, const Level& b) { return a.energy < b.energy; });

    out.energies.resize(K);
    out.overlaps = Eigen::MatrixXd::Zero(K, K);
    out.coupled.assign(modes, 0);
    for (std::size_t k = 0; k < modes; ++k) {
        const Level& level = levels[k];
        const auto col = static_cast<Eigen::Index>(k);
        out.energies[col] = level.energy;
        if (!level.is_active) {
            out.overlaps(static_cast<Eigen::Index>(level.index), col) = 1.0;
            continue;
        }
        out.coupled[k] = 1;
        for (std::size_t j = 0; j < active.size(); ++j) {
            out.overlaps(static_cast<Eigen::Index>(active[j]), col) =
                system.vectors(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(level.index));
        }
    }
    return out;
}

// Node positions and weights for int f(x) exp(-(x-d)^2/(2 sigma^2)) dx with
// f = phi_m phi_n: substitute around the centre of the combined Gaussian.
struct ProductRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

ProductRule gaussian_product_rule(std::size_t node_count, double sigma, double d) {
    const GaussHermiteRule base = gauss_hermite(node_count);
    const double s2 = sigma * sigma;
    const double a = 1.0 + 1.0 / (2.0 * s2);
    const double c = d / (2.0 * s2 + 1.0);
    const double offset = -d * d / (2.0 * s2) + a * c * c;
    const double inv_sqrt_a = 1.0 / std::sqrt(a);
    ProductRule rule;
    rule.nodes.resize(node_count);
    rule.weights.resize(node_count);
    for (std::size_t j = 0; j < node_count; ++j) {
        const double y = base.nodes[j];
        const double x = c + y * inv_sqrt_a;
        rule.nodes[j] = x;
        rule.weights[j] = base.function_weights[j] * inv_sqrt_a * std::exp(offset + x * x - y * y);
    }
    return rule;
}

PerturbedSpectrum diagonalize_gaussian(const OscillatorBasis& basis, const ImpurityPotential& pot,
                                       const SolverOptions& options) {
    const std::size_t modes = basis.modes();
    if (modes > options.gaussian_mode_cap) {
        std::ostringstream msg;
        msg << "diagonalize_perturbed: Gaussian impurity needs K <= " << options.gaussian_mode_cap << ", got " << modes;
        throw UsageError(msg.str());
    }
    const auto K = static_cast<Eigen::Index>(modes);
    const double prefactor = pot.strength / (std::sqrt(2.0 * std::numbers::pi) * pot.width);

    const std::size_t node_count = std::max<std::size_t>(options.quadrature_factor * modes, modes + 1);
    const ProductRule rule = gaussian_product_rule(node_count, pot.width, pot.position);
    Eigen::MatrixXd phi = basis.orbital_table(rule.nodes);
    for (std::size_t j = 0; j < node_count; ++j) phi.col(static_cast<Eigen::Index>(j)) *= std::sqrt(rule.weights[j]);

    Eigen::MatrixXd potential = Eigen::MatrixXd::Zero(K, K);
    potential.selfadjointView<Eigen::Lower>().rankUpdate(phi, prefactor);
    potential = potential.selfadjointView<Eigen::Lower>();

    // Cross-check the diagonal with an independent, smaller rule.
    const ProductRule check = gaussian_product_rule(modes + modes / 2 + 1, pot.width, pot.position);
    Eigen::VectorXd diag_check = Eigen::VectorXd::Zero(K);
    std::vector<double> column(modes);
    for (std::size_t j = 0; j < check.nodes.size(); ++j) {
        hermite_orbitals(check.nodes[j], column);
        for (std::size_t n = 0; n < modes; ++n) {
            diag_check[static_cast<Eigen::Index>(n)] += check.weights[j] * column[n] * column[n];
        }
    }
    diag_check *= prefactor;
    const double scale = std::max(1.0, potential.cwiseAbs().maxCoeff());
    const double mismatch = (diag_check - potential.diagonal()).cwiseAbs().maxCoeff();
    if (!(mismatch <= 1e-9 * scale)) {
        std::ostringstream msg;
        msg << "diagonalize_perturbed: quadrature for sigma = " << pot.width << " not converged (node-count mismatch "
            << mismatch << ")";
        throw NumericalError(msg.str());
    }
    if (pot.is_centered()) {
        for (Eigen::Index m = 0; m < K; ++m) {
            for (Eigen::Index n = 0; n < K; ++n) {
                if ((m + n) % 2 == 1) potential(m, n) = 0.0;
            }
        }
    }

    Eigen::MatrixXd hamiltonian = potential;
    hamiltonian.diagonal() += basis.energies();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
    if (solver.info() != Eigen::Success) throw NumericalError("diagonalize_perturbed: dense eigensolve failed");

    PerturbedSpectrum out;
    out.method = SolverMethod::dense_gaussian;
    out.coupling = options.coupling;
    out.potential = pot;
    out.effective_strength = pot.strength;
    out.energies = solver.eigenvalues();
    out.overlaps = solver.eigenvectors();
    for (Eigen::Index k = 0; k < K; ++k) {
        Eigen::Index largest = 0;
        out.overlaps.col(k).cwiseAbs().maxCoeff(&largest);
        if (out.overlaps(largest, k) < 0.0) out.overlaps.col(k) *= -1.0;
    }
    out.coupled.assign(modes, 1);
    return out;
}

}  // namespace

PerturbedSpectrum diagonalize_perturbed(const OscillatorBasis& basis, const ImpurityPotential& potential,
                                        const SolverOptions& options) {
    potential.validate();
    check_modes(basis, options);
    return potential.is_point() ? diagonalize_contact(basis, potential, options)
                                : diagonalize_gaussian(basis, potential, options);
}

namespace {

// G(E) = Gamma(1/4 - E/2) / (2 Gamma(3/4 - E/2)), the contact Green's
// function at the origin; the even levels solve G(E) = -1/kappa.
double contact_green(double energy) {
    const double a = 0.25 - 0.5 * energy;
    const double b = 0.75 - 0.5 * energy;
    int sign_a = 1;
    int sign_b = 1;
    const double la = boost::math::lgamma(a, &sign_a);
    const double lb = boost::math::lgamma(b, &sign_b);
    return 0.5 * sign_a * sign_b * std::exp(la - lb);
}

bool is_pole_argument(double x) { return x <= 0.0 && x == std::floor(x); }

double safe_contact_green(double energy) {
    if (is_pole_argument(0.75 - 0.5 * energy)) return 0.0;
    return contact_green(energy);
}

}  // namespace

std::vector<double> solve_even_energies_exact(double kappa, std::size_t count) {
    if (!std::isfinite(kappa)) throw UsageError("solve_even_energies_exact: kappa must be finite");
    if (count == 0) throw UsageError("solve_even_energies_exact: count must be >= 1");
    std::vector<double> out(count);
    if (kappa == 0.0) {
        for (std::size_t n = 0; n < count; ++n) out[n] = 2.0 * static_cast<double>(n) + 0.5;
        return out;
    }
    const double target = -1.0 / kappa;
    auto f = [target](double e) { return safe_contact_green(e) - target; };
    boost::math::tools::eps_tolerance<double> tolerance(45);

    for (std::size_t n = 0; n < count; ++n) {
        const double base = 2.0 * static_cast<double>(n);
        // G runs from -inf (pole at base + 1/2) to 0 (zero at base + 3/2)
        // for kappa > 0, and from 0 (zero at base - 1/2) to +inf (pole at
        // base + 1/2) for kappa < 0.
        double lo;
        double hi;
        if (kappa > 0.0) {
            const double pole = base + 0.5;
            hi = base + 1.5;
            double step = 0.5;
            lo = pole + step;
            while (f(lo) > 0.0) {
                step *= 0.5;
                lo = pole + step;
                if (step < 1e-300) throw NumericalError("solve_even_energies_exact: lower bracket collapsed");
            }
        } else {
            const double pole = base + 0.5;
            double step = 0.5;
            hi = pole - step;
            while (f(hi) < 0.0) {
                step *= 0.5;
                hi = pole - step;
                if (step < 1e-300) throw NumericalError("solve_even_energies_exact: upper bracket collapsed");
            }
            if (n > 0) {
                lo = base - 0.5;
            } else {
                // deeply bound state: extend downward geometrically
                double reach = 1.0;
                lo = 0.5 - reach;
                while (f(lo) > 0.0) {
                    reach *= 2.0;
                    lo = 0.5 - reach;
                    if (reach > 1e300) throw NumericalError("solve_even_energies_exact: bound state not bracketed");
                }
            }
        }
        const double flo = f(lo);
        const double fhi = f(hi);
        if (!(flo <= 0.0 && fhi >= 0.0)) {
            std::ostringstream msg;
            msg << "solve_even_energies_exact: bracket [" << lo << ", " << hi << "] has f = (" << flo << ", " << fhi
                << ")";
            throw NumericalError(msg.str());
        }
        if (flo == 0.0) {
            out[n] = lo;
        } else if (fhi == 0.0) {
            out[n] = hi;
        } else {
            std::uintmax_t iterations = 300;
            const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tolerance, iterations);
            out[n] = 0.5 * (bracket.first + bracket.second);
        }
    }
    return out;
}

}  // namespace ocq
