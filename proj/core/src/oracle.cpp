#include "ocq/oracle.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ocq/error.hpp"

namespace ocq {

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t factor = n - k + i;
        if (result > std::numeric_limits<std::size_t>::max() / factor) return std::numeric_limits<std::size_t>::max();
        result = result * factor / i;  // exact: result * factor is divisible by i
    }
    return result;
}

ManyBodyBasis::ManyBodyBasis(const PerturbedSpectrum& spectrum, std::size_t particles, std::size_t limit)
    : modes_(spectrum.modes()), particles_(particles) {
    if (particles > modes_) throw UsageError("many-body basis: more particles than modes");
    const std::size_t count = binomial(modes_, particles);
    if (count > limit) {
        std::ostringstream msg;
        msg << "many-body basis: C(" << modes_ << ", " << particles << ") = " << count << " configurations exceed the limit "
            << limit;
        throw UsageError(msg.str());
    }
    occupations_.reserve(count * particles);
    unperturbed_.reserve(count);
    perturbed_.reserve(count);
    std::vector<std::uint32_t> occ(particles);
    std::iota(occ.begin(), occ.end(), 0u);
    for (std::size_t c = 0; c < count; ++c) {
        double e = 0.0, ep = 0.0;
        for (std::uint32_t n : occ) {
            e += static_cast<double>(n) + 0.5;
            ep += spectrum.energies[n];
        }
        occupations_.insert(occupations_.end(), occ.begin(), occ.end());
        unperturbed_.push_back(e);
        perturbed_.push_back(ep);
        // next combination in lexicographic order
        std::size_t i = particles;
        while (i > 0 && occ[i - 1] == modes_ - particles + i - 1) --i;
        if (i == 0) break;
        ++occ[i - 1];
        for (std::size_t j = i; j < particles; ++j) occ[j] = occ[j - 1] + 1;
    }
}

std::span<const std::uint32_t> ManyBodyBasis::configuration(std::size_t c) const {
    return std::span<const std::uint32_t>(occupations_).subspan(c * particles_, particles_);
}

double many_body_overlap(const ManyBodyBasis& basis, const PerturbedSpectrum& spectrum, std::size_t perturbed_config,
                         std::size_t unperturbed_config) {
    const std::size_t n = basis.particles();
    if (n == 0) return 1.0;
    const auto rows = basis.configuration(unperturbed_config);
    const auto cols = basis.configuration(perturbed_config);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = spectrum.overlaps(rows[a], cols[b]);
        }
    }
    return n == 1 ? m(0, 0) : m.partialPivLu().determinant();
}

namespace {

void check_basis(const ManyBodyBasis& basis, const PerturbedSpectrum& spectrum) {
    if (basis.modes() != spectrum.modes()) throw UsageError("oracle: basis and spectrum disagree on the mode count");
}

OverlapTrace empty_trace(const PerturbedSpectrum& spectrum, std::size_t particles, double temperature,
                         const TimeGrid& grid) {
    OverlapTrace trace;
    trace.grid = grid;
    trace.values.assign(grid.samples, Complex(0.0, 0.0));
    trace.particles = particles;
    trace.temperature = temperature;
    trace.potential = spectrum.potential;
    trace.modes = spectrum.modes();
    return trace;
}

// Adds weight * sum_m |Lambda_{m,l}|^2 e^{-i(E'_m - E_l)t} to `values`.
void accumulate_state(const ManyBodyBasis& basis, const PerturbedSpectrum& spectrum, std::size_t l, double weight,
                      const TimeGrid& grid, std::vector<Complex>& values) {
    const double el = basis.unperturbed_energy(l);
    for (std::size_t m = 0; m < basis.size(); ++m) {
        const double lambda = many_body_overlap(basis, spectrum, m, l);
        const double w = weight * lambda * lambda;
        if (w == 0.0) continue;
        const double gap = basis.perturbed_energy(m) - el;
        for (std::size_t j = 0; j < grid.samples; ++j) values[j] += w * std::polar(1.0, -gap * grid.time(j));
    }
}

}  // namespace

OverlapTrace nu_slater_sum(const ManyBodyBasis& basis, const PerturbedSpectrum& spectrum, const TimeGrid& grid) {
    check_basis(basis, spectrum);
    OverlapTrace trace = empty_trace(spectrum, basis.particles(), 0.0, grid);
    double completeness = 0.0;
    for (std::size_t m = 0; m < basis.size(); ++m) {
        const double lambda = many_body_overlap(basis, spectrum, m, 0);
        completeness += lambda * lambda;
    }
    if (std::abs(completeness - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "nu_slater_sum: sum |Lambda_m0|^2 = " << completeness << " misses completeness";
        throw NumericalError(msg.str());
    }
    accumulate_state(basis, spectrum, 0, 1.0, grid, trace.values);
    return trace;
}

OverlapTrace nu_canonical(const ManyBodyBasis& basis, const PerturbedSpectrum& spectrum, double temperature,
                          const TimeGrid& grid) {
    check_basis(basis, spectrum);
    if (!(temperature > 0.0) || !std::isfinite(temperature)) throw UsageError("nu_canonical: temperature must be positive");
    const double e0 = basis.unperturbed_energy(0);
    double z = 0.0;
    for (std::size_t l = 0; l < basis.size(); ++l) z += std::exp(-(basis.unperturbed_energy(l) - e0) / temperature);
    OverlapTrace trace = empty_trace(spectrum, basis.particles(), temperature, grid);
    for (std::size_t l = 0; l < basis.size(); ++l) {
        const double c = std::exp(-(basis.unperturbed_energy(l) - e0) / temperature) / z;
        if (c < 1e-300) continue;
        accumulate_state(basis, spectrum, l, c, grid, trace.values);
    }
    return trace;
}

OverlapTrace nu_grand_canonical_sectors(const PerturbedSpectrum& spectrum, std::size_t particles, double temperature,
                                        const TimeGrid& grid) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw UsageError("nu_grand_canonical_sectors: temperature must be positive");
    }
    const Eigen::VectorXd e = spectrum.unperturbed_energies();
    const double mu = solve_chemical_potential(std::span<const double>(e.data(), e.size()),
                                               static_cast<double>(particles), temperature);
    const std::size_t K = spectrum.modes();
    std::vector<ManyBodyBasis> sectors;
    double log_max = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n <= K; ++n) {
        sectors.emplace_back(spectrum, n);
        for (std::size_t l = 0; l < sectors.back().size(); ++l) {
            log_max = std::max(log_max, (mu * static_cast<double>(n) - sectors.back().unperturbed_energy(l)) / temperature);
        }
    }
    double xi = 0.0;
    for (std::size_t n = 0; n <= K; ++n) {
        for (std::size_t l = 0; l < sectors[n].size(); ++l) {
            xi += std::exp((mu * static_cast<double>(n) - sectors[n].unperturbed_energy(l)) / temperature - log_max);
        }
    }
    OverlapTrace trace = empty_trace(spectrum, particles, temperature, grid);
    for (std::size_t n = 0; n <= K; ++n) {
        for (std::size_t l = 0; l < sectors[n].size(); ++l) {
            const double w =
                std::exp((mu * static_cast<double>(n) - sectors[n].unperturbed_energy(l)) / temperature - log_max) / xi;
            accumulate_state(sectors[n], spectrum, l, w, grid, trace.values);
        }
    }
    return trace;
}

std::string_view to_string(BoxOverlapForm form) {
    switch (form) {
        case BoxOverlapForm::resonant: return "resonant";
        case BoxOverlapForm::full_integral: return "full_integral";
    }
    return "unknown";
}

void BoxModel::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw UsageError("box model: radius must be positive");
    if (!(phase_shift > -0.5 * std::numbers::pi && phase_shift <= 0.5 * std::numbers::pi)) {
        throw UsageError("box model: phase shift must lie in (-pi/2, pi/2]");
    }
    if (max_particles == 0) throw UsageError("box model: max_particles must be positive");
    // k'_j = (j pi - delta) / R > 0 for j >= 1 follows from delta <= pi/2
}

double box_overlap(const BoxModel& model, std::size_t particles, BoxOverlapForm form) {
    model.validate();
    if (particles == 0 || particles > model.max_particles) {
        throw UsageError("box_overlap: particle number must lie in [1, max_particles]");
    }
    const double delta = model.phase_shift;
    if (delta == 0.0) return 1.0;
    const auto n = static_cast<Eigen::Index>(particles);
    const double s = std::sin(delta);
    const double pi = std::numbers::pi;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
            const double diff = static_cast<double>(i - j) * pi + delta;
            double v = sign * s / diff;
            if (form == BoxOverlapForm::full_integral) {
                // mode numbers start at 1; dimensionless k'R = (j+1) pi - delta
                const double sum = static_cast<double>(i + j + 2) * pi - delta;
                const double kp = static_cast<double>(j + 1) * pi - delta;
                const double norm = std::sqrt(1.0 + std::sin(2.0 * delta) / (2.0 * kp));
                v = sign * s * (1.0 / diff + 1.0 / sum) / norm;
            }
            a(i, j) = v;
        }
    }
    return a.partialPivLu().determinant();
}

ExponentFit fit_oc_exponent(std::span<const double> particles, std::span<const double> overlaps) {
    if (particles.size() != overlaps.size()) throw UsageError("fit_oc_exponent: N and nu lists differ in length");
    if (particles.size() < 8) throw UsageError("fit_oc_exponent: need at least 8 points");
    const auto [lo, hi] = std::minmax_element(particles.begin(), particles.end());
    if (!(*lo > 0.0) || *hi < 10.0 * *lo) throw UsageError("fit_oc_exponent: N must be positive and span a decade");
    ExponentFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i) {
        double v = overlaps[i];
        if (v <= 0.0) {
            fit.sign_flipped = true;
            v = std::abs(v);
        }
        if (!(v > 0.0) || !std::isfinite(v)) throw NumericalError("fit_oc_exponent: overlap vanishes or is not finite");
        const double x = std::log(particles[i]);
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
    fit.alpha = -2.0 * fit.slope;
    return fit;
}

}  // namespace ocq
