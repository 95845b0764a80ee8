#include "ocq/secular.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "ocq/error.hpp"

namespace ocq {
namespace {

// Solves the rho > 0 problem. Poles ascending, z nonzero.
RankOneEigensystem solve_positive(std::span<const double> d, std::span<const double> z, double rho) {
    const std::size_t m = d.size();
    double z_norm2 = 0.0;
    for (double zi : z) z_norm2 += zi * zi;
    const double inv_rho = 1.0 / rho;

    std::vector<double> shifted(m);
    // g(tau) = 1/rho + sum_j z_j^2 / ((d_j - d_origin) - tau)
    auto secular = [&](double tau) {
        double sum = inv_rho;
        for (std::size_t j = 0; j < m; ++j) sum += z[j] * z[j] / (shifted[j] - tau);
        return sum;
    };
    auto set_origin = [&](std::size_t origin) {
        for (std::size_t j = 0; j < m; ++j) shifted[j] = d[j] - d[origin];
    };

    RankOneEigensystem out;
    out.roots.resize(m);
    boost::math::tools::eps_tolerance<double> tolerance(50);

    for (std::size_t i = 0; i < m; ++i) {
        std::size_t origin = i;
        double lo = 0.0;
        double hi = 0.0;
        if (i + 1 < m) {
            const double gap = d[i + 1] - d[i];
            set_origin(i);
            if (secular(0.5 * gap) >= 0.0) {
                lo = 0.0;
                hi = 0.5 * gap;
            } else {
                origin = i + 1;
                set_origin(origin);
                lo = -0.5 * gap;
                hi = 0.0;
            }
        } else {
            set_origin(i);
            hi = rho * z_norm2;
        }
        // Step off the pole by a tiny relative amount; the pole term keeps
        // the sign right there.
        const double width = hi - lo;
        if (lo == 0.0) lo = width * 0x1p-900;
        if (hi == 0.0) hi = -width * 0x1p-900;

        auto f = [&](double tau) { return secular(tau); };
        double flo = f(lo);
        double fhi = f(hi);
        if (!(flo <= 0.0 && fhi >= 0.0)) {
            std::ostringstream msg;
            msg << "secular equation: no sign change for root " << i << " on [" << d[origin] + lo << ", "
                << d[origin] + hi << "], f = (" << flo << ", " << fhi << ")";
            throw NumericalError(msg.str());
        }
        double tau;
        if (fhi == 0.0) {
            tau = hi;
        } else {
            std::uintmax_t iterations = 300;
            auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tolerance, iterations);
            tau = 0.5 * (bracket.first + bracket.second);
        }
        out.roots[i] = SecularRoot{origin, tau};
    }

    // diff(i, j) = lambda_i - d_j without cancellation
    auto diff = [&](std::size_t i, std::size_t j) {
        const SecularRoot& r = out.roots[i];
        return (d[r.origin] - d[j]) + r.offset;
    };

    // Gu-Eisenstat: z_hat_j^2 = (lambda_m - d_j)/rho * prod_{i<j} (lambda_i - d_j)/(d_i - d_j)
    //                                         * prod_{j<=i<m-1} (lambda_i - d_j)/(d_{i+1} - d_j)
    std::vector<double> z_hat(m);
    for (std::size_t j = 0; j < m; ++j) {
        double prod = diff(m - 1, j) / rho;
        for (std::size_t i = 0; i < j; ++i) prod *= diff(i, j) / (d[i] - d[j]);
        for (std::size_t i = j; i + 1 < m; ++i) prod *= diff(i, j) / (d[i + 1] - d[j]);
        z_hat[j] = std::copysign(std::sqrt(std::max(prod, 0.0)), z[j]);
    }

    out.values.resize(static_cast<Eigen::Index>(m));
    out.vectors.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        out.values[static_cast<Eigen::Index>(i)] = d[out.roots[i].origin] + out.roots[i].offset;
        auto col = out.vectors.col(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < m; ++j) col[static_cast<Eigen::Index>(j)] = z_hat[j] / diff(i, j);
        col /= col.norm();
    }
    return out;
}

}  // namespace

RankOneEigensystem solve_rank_one(std::span<const double> poles, std::span<const double> z, double rho) {
    const std::size_t m = poles.size();
    if (z.size() != m) throw UsageError("solve_rank_one: poles and z differ in length");
    if (m == 0) return {};
    if (rho == 0.0 || !std::isfinite(rho)) throw UsageError("solve_rank_one: rho must be finite and nonzero");
    for (std::size_t j = 0; j < m; ++j) {
        if (z[j] == 0.0) throw UsageError("solve_rank_one: zero component must be deflated by the caller");
        if (j > 0 && !(poles[j] > poles[j - 1])) throw UsageError("solve_rank_one: poles must be strictly ascending");
    }
    if (rho > 0.0) return solve_positive(poles, z, rho);

    // D + rho z z^T with rho < 0: solve -D + |rho| z z^T on reversed poles.
    std::vector<double> neg_poles(m);
    std::vector<double> rev_z(m);
    for (std::size_t j = 0; j < m; ++j) {
        neg_poles[j] = -poles[m - 1 - j];
        rev_z[j] = z[m - 1 - j];
    }
    RankOneEigensystem flipped = solve_positive(neg_poles, rev_z, -rho);
    RankOneEigensystem out;
    out.roots.resize(m);
    out.values.resize(static_cast<Eigen::Index>(m));
    out.vectors.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t src = m - 1 - i;
        const SecularRoot& r = flipped.roots[src];
        out.roots[i] = SecularRoot{m - 1 - r.origin, -r.offset};
        out.values[static_cast<Eigen::Index>(i)] = -flipped.values[static_cast<Eigen::Index>(src)];
        for (std::size_t j = 0; j < m; ++j) {
            out.vectors(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                flipped.vectors(static_cast<Eigen::Index>(m - 1 - j), static_cast<Eigen::Index>(src));
        }
    }
    return out;
}

}  // namespace ocq
