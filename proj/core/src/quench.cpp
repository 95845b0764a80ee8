#include "ocq/quench.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ocq/error.hpp"
#include "ocq/parallel.hpp"

namespace ocq {

TimeGrid TimeGrid::covering(double t_max, double step) {
    if (!(step > 0.0) || !std::isfinite(step) || !(t_max >= 0.0) || !std::isfinite(t_max)) {
        throw UsageError("time grid: need finite t_max >= 0 and step > 0");
    }
    const double intervals = t_max / step;
    const double rounded = std::round(intervals);
    if (std::abs(intervals - rounded) > 1e-9 * std::max(1.0, intervals)) {
        std::ostringstream msg;
        msg << "time grid: step " << step << " does not divide t_max " << t_max;
        throw UsageError(msg.str());
    }
    return TimeGrid{step, static_cast<std::size_t>(rounded) + 1};
}

void QuenchScenario::validate() const {
    if (!spectrum) throw UsageError("quench scenario: missing spectrum");
    if (particles == 0) throw UsageError("quench scenario: need at least one particle");
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
        throw UsageError("quench scenario: temperature must be finite and non-negative");
    }
    const std::size_t K = spectrum->modes();
    if (particles >= K) throw UsageError("quench scenario: particle number must be below the truncation K");
    if (enforce_buffer && (K < particles + 16 || K < 8 * particles)) {
        std::ostringstream msg;
        msg << "quench scenario: K = " << K << " leaves too small a buffer for N = " << particles
            << " (need K - N >= 16 and K >= 8N)";
        throw UsageError(msg.str());
    }
}

void OverlapTrace::check_invariants() const {
    if (values.empty()) throw NumericalError("overlap trace is empty");
    if (std::abs(values.front() - Complex(1.0, 0.0)) > 1e-9) {
        std::ostringstream msg;
        msg << "overlap trace: nu(0) = " << values.front() << " differs from 1";
        throw NumericalError(msg.str());
    }
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (!(std::abs(values[j]) <= 1.0 + 1e-9)) {
            std::ostringstream msg;
            msg << "overlap trace: |nu| = " << std::abs(values[j]) << " > 1 at t = " << grid.time(j);
            throw NumericalError(msg.str());
        }
    }
}

namespace {

// Rows of U(t) = e^{iht} e^{-ih't} restricted to a set of unperturbed modes,
// split into blocks that share no perturbed level.
class PropagatorBlocks {
public:
    PropagatorBlocks(const PerturbedSpectrum& spectrum, const std::vector<std::size_t>& rows) {
        const auto K = static_cast<Eigen::Index>(spectrum.modes());
        const std::size_t r = rows.size();
        std::vector<std::size_t> parent(r);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        for (Eigen::Index k = 0; k < K; ++k) {
            std::size_t first = r;
            for (std::size_t a = 0; a < r; ++a) {
                if (spectrum.overlaps(static_cast<Eigen::Index>(rows[a]), k) == 0.0) continue;
                if (first == r) {
                    first = a;
                } else {
                    parent[find(a)] = find(first);
                }
            }
        }
        std::vector<std::size_t> block_of(r, r);
        for (std::size_t a = 0; a < r; ++a) {
            const std::size_t root = find(a);
            if (block_of[root] == r) {
                block_of[root] = blocks_.size();
                blocks_.emplace_back();
            }
            blocks_[block_of[root]].local_rows.push_back(a);
        }
        for (Block& block : blocks_) {
            for (Eigen::Index k = 0; k < K; ++k) {
                for (std::size_t a : block.local_rows) {
                    if (spectrum.overlaps(static_cast<Eigen::Index>(rows[a]), k) != 0.0) {
                        block.columns.push_back(k);
                        break;
                    }
                }
            }
            const auto nr = static_cast<Eigen::Index>(block.local_rows.size());
            const auto nc = static_cast<Eigen::Index>(block.columns.size());
            block.amplitudes.resize(nr, nc);
            block.row_energies.resize(nr);
            block.column_energies.resize(nc);
            for (Eigen::Index a = 0; a < nr; ++a) {
                const auto n = static_cast<Eigen::Index>(rows[block.local_rows[static_cast<std::size_t>(a)]]);
                block.row_energies[a] = static_cast<double>(n) + 0.5;
                for (Eigen::Index c = 0; c < nc; ++c) {
                    block.amplitudes(a, c) = spectrum.overlaps(n, block.columns[static_cast<std::size_t>(c)]);
                }
            }
            for (Eigen::Index c = 0; c < nc; ++c) {
                block.column_energies[c] = spectrum.energies[block.columns[static_cast<std::size_t>(c)]];
            }
        }
    }

    struct Block {
        std::vector<std::size_t> local_rows;  // indices into the row set
        std::vector<Eigen::Index> columns;    // perturbed levels touched
        Eigen::MatrixXd amplitudes;           // S restricted to block
        Eigen::VectorXd row_energies;
        Eigen::VectorXd column_energies;

        [[nodiscard]] Eigen::MatrixXcd propagator(double t) const {
            const Eigen::Index nr = amplitudes.rows();
            if (nr == 1 && amplitudes.cols() == 1) {
                // single untouched orbital: phases cancel exactly when E' = E
                const double s = amplitudes(0, 0);
                return Eigen::MatrixXcd::Constant(1, 1, s * s * std::polar(1.0, (row_energies[0] - column_energies[0]) * t));
            }
            const Eigen::ArrayXd phase = column_energies.array() * t;
            const Eigen::MatrixXd cos_part =
                (amplitudes * phase.cos().matrix().asDiagonal()) * amplitudes.transpose();
            const Eigen::MatrixXd sin_part =
                (amplitudes * phase.sin().matrix().asDiagonal()) * amplitudes.transpose();
            Eigen::MatrixXcd u(nr, nr);
            for (Eigen::Index a = 0; a < nr; ++a) {
                const Complex row_phase = std::polar(1.0, row_energies[a] * t);
                for (Eigen::Index b = 0; b < nr; ++b) {
                    u(a, b) = row_phase * Complex(cos_part(a, b), -sin_part(a, b));
                }
            }
            return u;
        }
    };

    [[nodiscard]] const std::vector<Block>& blocks() const noexcept { return blocks_; }

private:
    std::vector<Block> blocks_;
};

Complex determinant(const Eigen::MatrixXcd& m) {
    if (m.rows() == 1) return m(0, 0);
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

OverlapTrace make_trace(const QuenchScenario& scenario, const TimeGrid& grid) {
    OverlapTrace trace;
    trace.grid = grid;
    trace.values.resize(grid.samples);
    trace.particles = scenario.particles;
    trace.temperature = scenario.temperature;
    trace.potential = scenario.spectrum->potential;
    trace.modes = scenario.spectrum->modes();
    return trace;
}

}  // namespace

std::vector<Complex> nu_zero_temperature_at(const QuenchScenario& scenario, std::span<const double> times,
                                            unsigned threads) {
    scenario.validate();
    if (scenario.ensemble != Ensemble::zero_temperature) {
        throw UsageError("nu_zero_temperature: scenario ensemble is not zero-temperature");
    }
    std::vector<std::size_t> occupied(scenario.particles);
    std::iota(occupied.begin(), occupied.end(), 0);
    const PropagatorBlocks blocks(*scenario.spectrum, occupied);

    std::vector<Complex> values(times.size());
    parallel_for(times.size(), threads, [&](std::size_t j) {
        Complex nu(1.0, 0.0);
        for (const auto& block : blocks.blocks()) nu *= determinant(block.propagator(times[j]));
        values[j] = nu;
    });
    return values;
}

OverlapTrace nu_zero_temperature(const QuenchScenario& scenario, const TimeGrid& grid, unsigned threads) {
    if (grid.samples == 0) throw UsageError("nu_zero_temperature: empty time grid");
    std::vector<double> times(grid.samples);
    for (std::size_t j = 0; j < grid.samples; ++j) times[j] = grid.time(j);
    auto values = nu_zero_temperature_at(scenario, times, threads);
    OverlapTrace trace = make_trace(scenario, grid);
    trace.values = std::move(values);
    return trace;
}

double solve_chemical_potential(std::span<const double> energies, double particles, double temperature) {
    if (!(temperature > 0.0)) throw UsageError("solve_chemical_potential: temperature must be positive");
    if (!(particles > 0.0) || particles >= static_cast<double>(energies.size())) {
        throw UsageError("solve_chemical_potential: particle number must lie strictly between 0 and the mode count");
    }
    auto filling = [&](double mu) {
        double total = 0.0;
        for (double e : energies) {
            const double x = (e - mu) / temperature;
            total += x > 0.0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
        }
        return total;
    };
    const auto [emin, emax] = std::minmax_element(energies.begin(), energies.end());
    double lo = *emin - 50.0 * temperature - 1.0;
    double hi = *emax + 50.0 * temperature + 1.0;
    if (!(filling(lo) < particles && filling(hi) > particles)) {
        throw NumericalError("solve_chemical_potential: bisection bracket does not enclose the particle number");
    }
    for (int it = 0; it < 500 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        (filling(mid) < particles ? lo : hi) = mid;
    }
    if (hi - lo > 1e-10) throw NumericalError("solve_chemical_potential: bisection did not converge");
    return 0.5 * (lo + hi);
}

OverlapTrace nu_thermal(const QuenchScenario& scenario, const TimeGrid& grid, unsigned threads) {
    scenario.validate();
    if (scenario.ensemble != Ensemble::grand_canonical) {
        throw UsageError("nu_thermal: scenario ensemble is not grand-canonical");
    }
    if (!(scenario.temperature > 0.0)) throw UsageError("nu_thermal: temperature must be positive");
    if (grid.samples == 0) throw UsageError("nu_thermal: empty time grid");

    const Eigen::VectorXd energies = scenario.spectrum->unperturbed_energies();
    const double mu = solve_chemical_potential(std::span<const double>(energies.data(), energies.size()),
                                               static_cast<double>(scenario.particles), scenario.temperature);
    // Rows with negligible occupation are identity rows of 1 - n + nU.
    std::vector<std::size_t> rows;
    std::vector<double> occupation;
    for (Eigen::Index n = 0; n < energies.size(); ++n) {
        const double x = (energies[n] - mu) / scenario.temperature;
        const double f = x > 0.0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x));
        if (f > 1e-18) {
            rows.push_back(static_cast<std::size_t>(n));
            occupation.push_back(f);
        }
    }
    const PropagatorBlocks blocks(*scenario.spectrum, rows);

    OverlapTrace trace = make_trace(scenario, grid);
    parallel_for(grid.samples, threads, [&](std::size_t j) {
        const double t = grid.time(j);
        Complex nu(1.0, 0.0);
        for (const auto& block : blocks.blocks()) {
            Eigen::MatrixXcd m = block.propagator(t);
            for (Eigen::Index a = 0; a < m.rows(); ++a) {
                const double f = occupation[block.local_rows[static_cast<std::size_t>(a)]];
                m.row(a) *= f;
                m(a, a) += 1.0 - f;
            }
            nu *= determinant(m);
        }
        trace.values[j] = nu;
    });
    return trace;
}

double impurity_entropy(double coherence) {
    const double c = std::clamp(coherence, 0.0, 1.0);
    double s = 0.0;
    for (double lambda : {0.5 * (1.0 + c), 0.5 * (1.0 - c)}) {
        if (lambda > 0.0) s -= lambda * std::log2(lambda);
    }
    return s;
}

ImpurityState impurity_observables(const OverlapTrace& trace) {
    if (trace.values.size() != trace.grid.samples) throw UsageError("impurity_observables: malformed trace");
    ImpurityState state;
    state.grid = trace.grid;
    state.coherence.reserve(trace.values.size());
    state.entropy.reserve(trace.values.size());
    state.echo.reserve(trace.values.size());
    for (const Complex& nu : trace.values) {
        const double c = std::abs(nu);
        state.coherence.push_back(c);
        state.entropy.push_back(impurity_entropy(c));
        state.echo.push_back(std::norm(nu));
    }
    return state;
}

std::vector<Revival> revival_times(const ImpurityState& state, const PerturbedSpectrum& spectrum,
                                   const RevivalOptions& options) {
    const std::vector<double>& echo = state.echo;
    const std::size_t n = echo.size();
    std::vector<double> levels = spectrum.coupled_energies();
    if (levels.size() > options.levels) levels.resize(options.levels);

    double max_gap = 0.0;
    std::vector<double> resonances;
    for (std::size_t a = 0; a < levels.size(); ++a) {
        for (std::size_t b = a + 1; b < levels.size(); ++b) {
            const double gap = levels[b] - levels[a];
            if (gap > 1e-9) resonances.push_back(gap);
            max_gap = std::max(max_gap, gap);
        }
    }
    if (n < 3) return {};
    if (max_gap > 0.0 && state.grid.step > std::numbers::pi / max_gap) {
        std::ostringstream msg;
        msg << "revival_times: grid step " << state.grid.step << " cannot resolve level difference " << max_gap;
        throw UsageError(msg.str());
    }

    const auto [lo_it, hi_it] = std::minmax_element(echo.begin() + 1, echo.end());
    const double range = *hi_it - *lo_it;
    if (range <= 1e-12) return {};

    std::vector<Revival> out;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        if (!(echo[j] > echo[j - 1] && echo[j] >= echo[j + 1])) continue;
        double left_min = echo[j];
        for (std::size_t l = j; l-- > 0;) {
            if (echo[l] > echo[j]) break;
            left_min = std::min(left_min, echo[l]);
        }
        double right_min = echo[j];
        bool right_bounded = false;
        for (std::size_t r = j + 1; r < n; ++r) {
            if (echo[r] > echo[j]) {
                right_bounded = true;
                break;
            }
            right_min = std::min(right_min, echo[r]);
        }
        (void)right_bounded;
        const double prominence = echo[j] - std::max(left_min, right_min);
        if (prominence < options.min_prominence * range) continue;

        Revival rev;
        rev.time = state.grid.time(j);
        rev.echo = echo[j];
        rev.residual = std::numeric_limits<double>::infinity();
        for (double gap : resonances) {
            for (int q = 1; q <= options.max_multiple; ++q) {
                const double target = 2.0 * std::numbers::pi * q / gap;
                const double residual = std::abs(rev.time - target) / target;
                if (residual < rev.residual) {
                    rev.residual = residual;
                    rev.resonance = gap;
                    rev.multiple = q;
                }
            }
        }
        out.push_back(rev);
    }
    return out;
}

std::vector<double> echo_fourier_amplitudes(const ImpurityState& state) {
    const std::vector<double>& echo = state.echo;
    const std::size_t n = echo.size();
    if (n < 4) throw UsageError("echo_fourier_amplitudes: trace too short");
    const double mean = std::accumulate(echo.begin(), echo.end(), 0.0) / static_cast<double>(n);
    const double resolution = 2.0 * std::numbers::pi / state.grid.t_max();
    std::vector<double> out(n / 2);
    for (std::size_t q = 1; q <= n / 2; ++q) {
        const double omega = resolution * static_cast<double>(q);
        Complex sum(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double weight = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
            sum += weight * (echo[j] - mean) * std::polar(1.0, omega * state.grid.time(j));
        }
        out[q - 1] = std::abs(sum) * state.grid.step;
    }
    return out;
}

FrequencyPeak dominant_echo_frequency(const ImpurityState& state) {
    const std::vector<double> amplitudes = echo_fourier_amplitudes(state);
    FrequencyPeak peak;
    peak.resolution = 2.0 * std::numbers::pi / state.grid.t_max();
    for (std::size_t q = 0; q < amplitudes.size(); ++q) {
        if (amplitudes[q] > peak.amplitude) {
            peak.amplitude = amplitudes[q];
            peak.frequency = peak.resolution * static_cast<double>(q + 1);
        }
    }
    return peak;
}

}  // namespace ocq
