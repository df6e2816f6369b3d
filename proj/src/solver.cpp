#include "tietime/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tietime/linalg.hpp"
#include "tietime/process.hpp"

namespace tietime {

namespace {

Rational exterior_value(const SolverGrid& grid, std::span<const std::int64_t> state) {
    switch (grid.policy) {
        case BoundaryPolicy::zero:
            return Rational(0);
        case BoundaryPolicy::upper_bound: {
            Rational best = Rational(state[0]) * Rational(state[1]);
            for (std::size_t i = 1; i + 1 < state.size(); ++i) {
                Rational p = Rational(state[i]) * Rational(state[i + 1]);
                if (p < best) best = p;
            }
            return best * grid.m;
        }
        case BoundaryPolicy::closed_form:
            if (grid.m != 3) {
                throw std::invalid_argument("closed-form boundary data exists only for m=3");
            }
            return closed_form_three_teams(state[0], state[1]);
        case BoundaryPolicy::custom:
            if (!grid.custom_value) throw std::invalid_argument("custom policy needs a value function");
            return grid.custom_value(state);
    }
    throw std::logic_error("unreachable");
}

// Precomputed structure of the truncated system: per interior state, the
// interior successor indices plus the constant term collecting the step
// cost and any exterior data.
struct GridSystem {
    int m = 0;
    std::int64_t radius = 0;
    int dims = 0;
    std::size_t size = 0;
    std::vector<std::int32_t> neighbors;        // size * m, -1 if not interior
    std::vector<Rational> exterior_sum;         // sum of exterior successor values
    std::vector<std::vector<int>> deltas;

    explicit GridSystem(const SolverGrid& grid) {
        m = grid.m;
        radius = grid.radius;
        if (m < 3) throw std::invalid_argument("solver needs at least 3 teams");
        if (radius < 1) throw std::invalid_argument("radius must be >= 1");
        dims = m - 1;
        size = 1;
        for (int d = 0; d < dims; ++d) {
            size *= static_cast<std::size_t>(radius);
            if (size > (std::size_t{1} << 26)) {
                throw std::invalid_argument("grid too large");
            }
        }
        for (const auto& sd : step_distribution(m)) deltas.push_back(sd.delta);

        neighbors.assign(size * m, -1);
        exterior_sum.assign(size, Rational(0));
        std::vector<std::int64_t> s(dims, 1), succ(dims);
        for (std::size_t idx = 0;; ++idx) {
            for (int k = 0; k < m; ++k) {
                bool absorbed = false, outside = false;
                for (int d = 0; d < dims; ++d) {
                    succ[d] = s[d] + deltas[k][d];
                    if (succ[d] == 0) absorbed = true;
                    if (succ[d] > radius) outside = true;
                }
                if (absorbed) continue;  // tied: contributes 0
                if (outside) {
                    exterior_sum[idx] += exterior_value(grid, succ);
                } else {
                    neighbors[idx * m + k] = static_cast<std::int32_t>(index_of(succ));
                }
            }
            int d = dims - 1;
            while (d >= 0 && ++s[d] > radius) s[d--] = 1;
            if (d < 0) break;
        }
    }

    std::size_t index_of(std::span<const std::int64_t> state) const {
        std::size_t idx = 0;
        for (int d = 0; d < dims; ++d) {
            idx = idx * static_cast<std::size_t>(radius) + static_cast<std::size_t>(state[d] - 1);
        }
        return idx;
    }

    std::int64_t bandwidth() const {
        std::int64_t b = 1;
        for (int d = 0; d < dims - 1; ++d) b *= radius;
        return b;
    }

    // rhs of v = base + (1/m) sum(interior successors), i.e.
    // base(s) = step_cost + (1/m) * exterior contribution.
    std::vector<double> base_vector(double step_cost, const std::vector<double>& add_field,
                                    double add_scale) const {
        std::vector<double> base(size, step_cost);
        for (std::size_t i = 0; i < size; ++i) {
            base[i] += exterior_sum[i].get_d() / m;
            if (!add_field.empty()) {
                double acc = 0;
                for (int k = 0; k < m; ++k) {
                    const auto nb = neighbors[i * m + k];
                    if (nb >= 0) acc += add_field[nb];
                }
                base[i] += add_scale * acc / m;
            }
        }
        return base;
    }

    double max_residual(const std::vector<double>& v, const std::vector<double>& base) const {
        double worst = 0;
        for (std::size_t i = 0; i < size; ++i) {
            double acc = 0;
            for (int k = 0; k < m; ++k) {
                const auto nb = neighbors[i * m + k];
                if (nb >= 0) acc += v[nb];
            }
            worst = std::max(worst, std::fabs(v[i] - base[i] - acc / m));
        }
        return worst;
    }

    void gauss_seidel(std::vector<double>& v, const std::vector<double>& base,
                      const SolveOptions& opts, double& residual, std::uint64_t& sweeps) const {
        const double omega = opts.relax;
        sweeps = 0;
        residual = max_residual(v, base);
        while (residual > opts.tol) {
            if (sweeps >= opts.max_sweeps) {
                throw std::runtime_error("solver did not converge: residual " +
                                         std::to_string(residual) + " after " +
                                         std::to_string(sweeps) + " sweeps");
            }
            for (std::uint64_t pass = 0; pass < 16 && sweeps < opts.max_sweeps; ++pass, ++sweeps) {
                for (std::size_t i = 0; i < size; ++i) {
                    double acc = 0;
                    for (int k = 0; k < m; ++k) {
                        const auto nb = neighbors[i * m + k];
                        if (nb >= 0) acc += v[nb];
                    }
                    const double next = base[i] + acc / m;
                    v[i] = omega * next + (1.0 - omega) * v[i];
                }
            }
            residual = max_residual(v, base);
        }
    }

    std::vector<double> direct_banded(const std::vector<double>& base) const {
        const std::int64_t band = bandwidth();
        const double mem_mb = static_cast<double>(size) * (2 * band + 1) * 8.0 / (1 << 20);
        if (mem_mb > 1024.0) {
            throw std::invalid_argument("banded direct solve would need " +
                                        std::to_string(static_cast<long>(mem_mb)) +
                                        " MB; use gauss_seidel");
        }
        BandedLU lu(static_cast<int>(size), static_cast<int>(band), static_cast<int>(band));
        std::vector<double> rhs(size);
        for (std::size_t i = 0; i < size; ++i) {
            lu.at(static_cast<int>(i), static_cast<int>(i)) = m;
            for (int k = 0; k < m; ++k) {
                const auto nb = neighbors[i * m + k];
                if (nb >= 0) lu.at(static_cast<int>(i), nb) -= 1.0;
            }
            rhs[i] = m * base[i];
        }
        lu.factor();
        lu.solve(rhs);
        return rhs;
    }

    std::vector<Rational> exact_solve(const std::vector<Rational>& rhs_exact) const {
        if (size > 20000) {
            throw std::invalid_argument("exact mode is limited to 20000 interior states");
        }
        SparseIntSystem sys;
        sys.n = static_cast<int>(size);
        sys.rows.resize(size);
        for (std::size_t i = 0; i < size; ++i) {
            auto& row = sys.rows[i];
            row.push_back({static_cast<int>(i), m});
            for (int k = 0; k < m; ++k) {
                const auto nb = neighbors[i * m + k];
                if (nb >= 0) row.push_back({nb, -1});
            }
            std::sort(row.begin(), row.end());
            // merge duplicate columns (diagonal can also be a successor target)
            std::vector<std::pair<int, long>> merged;
            for (const auto& [col, val] : row) {
                if (!merged.empty() && merged.back().first == col) {
                    merged.back().second += val;
                } else {
                    merged.push_back({col, val});
                }
            }
            row = std::move(merged);
        }
        return solve_sparse_exact(sys, rhs_exact);
    }
};

SolveResult run_solve(const GridSystem& sys, const std::vector<double>& base,
                      const std::vector<Rational>& rhs_exact, const SolveOptions& opts) {
    SolveResult out;
    out.m = sys.m;
    out.radius = sys.radius;
    switch (opts.method) {
        case SolveMethod::gauss_seidel: {
            out.values.assign(sys.size, 0.0);
            sys.gauss_seidel(out.values, base, opts, out.residual, out.iterations);
            break;
        }
        case SolveMethod::direct_banded: {
            out.values = sys.direct_banded(base);
            out.iterations = 1;
            out.residual = sys.max_residual(out.values, base);
            break;
        }
        case SolveMethod::exact_rational: {
            out.exact = sys.exact_solve(rhs_exact);
            out.values.resize(sys.size);
            for (std::size_t i = 0; i < sys.size; ++i) out.values[i] = out.exact[i].get_d();
            out.iterations = 1;
            out.residual = sys.max_residual(out.values, base);
            break;
        }
    }
    return out;
}

}  // namespace

std::size_t SolveResult::index_of(std::span<const std::int64_t> state) const {
    std::size_t idx = 0;
    for (std::size_t d = 0; d < state.size(); ++d) {
        if (state[d] < 1 || state[d] > radius) throw std::out_of_range("state outside grid");
        idx = idx * static_cast<std::size_t>(radius) + static_cast<std::size_t>(state[d] - 1);
    }
    return idx;
}

double SolveResult::value_at(std::span<const std::int64_t> state) const {
    return values[index_of(state)];
}

std::vector<std::int64_t> SolveResult::state_of(std::size_t index) const {
    std::vector<std::int64_t> s(m - 1);
    for (int d = m - 2; d >= 0; --d) {
        s[d] = 1 + static_cast<std::int64_t>(index % radius);
        index /= radius;
    }
    return s;
}

SolveResult solve_expected_time(const SolverGrid& grid, const SolveOptions& opts) {
    if (opts.tol <= 0) throw std::invalid_argument("tolerance must be positive");
    const GridSystem sys(grid);
    const auto base = sys.base_vector(1.0, {}, 0.0);
    std::vector<Rational> rhs_exact;
    if (opts.method == SolveMethod::exact_rational) {
        rhs_exact.assign(sys.size, Rational(0));
        for (std::size_t i = 0; i < sys.size; ++i) {
            rhs_exact[i] = Rational(grid.m) + sys.exterior_sum[i];
        }
    }
    return run_solve(sys, base, rhs_exact, opts);
}

SolveResult solve_second_moment(const SolverGrid& grid, const SolveResult& expected_time,
                                const SolveOptions& opts) {
    if (grid.policy != BoundaryPolicy::zero) {
        throw std::invalid_argument("second-moment bound needs the zero policy");
    }
    if (expected_time.m != grid.m || expected_time.radius != grid.radius) {
        throw std::invalid_argument("expected-time field does not match the grid");
    }
    const GridSystem sys(grid);
    const auto base = sys.base_vector(1.0, expected_time.values, 2.0);
    std::vector<Rational> rhs_exact;
    if (opts.method == SolveMethod::exact_rational) {
        if (expected_time.exact.empty()) {
            throw std::invalid_argument("exact second moment needs an exact expected-time field");
        }
        rhs_exact.assign(sys.size, Rational(0));
        for (std::size_t i = 0; i < sys.size; ++i) {
            Rational acc(grid.m);
            for (int k = 0; k < grid.m; ++k) {
                const auto nb = sys.neighbors[i * grid.m + k];
                if (nb >= 0) acc += 2 * expected_time.exact[nb];
            }
            rhs_exact[i] = acc;
        }
    }
    return run_solve(sys, base, rhs_exact, opts);
}

Bracket bracket_expected_time(int m, const std::vector<std::int64_t>& gaps,
                              std::int64_t radius, const SolveOptions& opts) {
    for (const auto g : gaps) {
        if (g < 1 || g > radius) throw std::invalid_argument("gaps must lie within the radius");
    }
    Bracket out;
    SolverGrid lo{m, radius, BoundaryPolicy::zero, {}};
    SolverGrid hi{m, radius, BoundaryPolicy::upper_bound, {}};
    out.lower = solve_expected_time(lo, opts);
    out.upper = solve_expected_time(hi, opts);
    out.lower_value = out.lower.value_at(gaps);
    out.upper_value = out.upper.value_at(gaps);
    return out;
}

Rational closed_form_three_teams(std::int64_t a, std::int64_t b) {
    if (a < 0 || b < 0) throw std::invalid_argument("gaps must be nonnegative");
    return Rational(3) * Rational(a) * Rational(b);
}

}  // namespace tietime
