#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "dwell/config.hpp"
#include "dwell/dynamics.hpp"
#include "dwell/entanglement.hpp"
#include "dwell/sampling.hpp"
#include "dwell/spectral.hpp"

namespace dwell {

/// One output panel. Rows are ordered by the first `key_columns` columns.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::size_t key_columns = 1;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::size_t column(std::string_view c) const
    {
        const auto it = std::find(columns.begin(), columns.end(), c);
        if (it == columns.end()) throw std::out_of_range("Table " + name + ": no column '" + std::string(c) + "'");
        return static_cast<std::size_t>(it - columns.begin());
    }

    [[nodiscard]] std::vector<double> values(std::string_view c) const
    {
        const auto k = column(c);
        std::vector<double> v;
        v.reserve(rows.size());
        for (const auto& r : rows) v.push_back(r[k]);
        return v;
    }

    void sort_rows()
    {
        std::stable_sort(rows.begin(), rows.end(), [k = key_columns](const auto& a, const auto& b) {
            return std::lexicographical_compare(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), b.begin(),
                                                b.begin() + static_cast<std::ptrdiff_t>(k));
        });
    }
};

/// Least-squares line through (log x, log y): y ~ exp(log_prefactor) x^alpha.
struct PowerLawFit {
    double alpha = 0.0;
    double log_prefactor = 0.0;
    /// Sum of squared residuals in log space.
    double residual = 0.0;
    std::size_t points = 0;
};

inline PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_power_law: need >= 2 paired points");
    const auto m = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_power_law: values must be positive");
        sx += std::log(x[i]);
        sy += std::log(y[i]);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_power_law: x values are all equal");
    PowerLawFit fit;
    fit.alpha = sxy / sxx;
    fit.log_prefactor = my - fit.alpha * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = std::log(y[i]) - fit.log_prefactor - fit.alpha * std::log(x[i]);
        fit.residual += r * r;
    }
    fit.points = x.size();
    return fit;
}

namespace detail {

inline std::string number_tag(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline Table time_series_table(std::string name, std::vector<std::pair<std::string, double>> prefix, const TimeSeries& ts)
{
    Table t;
    t.name = std::move(name);
    for (const auto& [c, _] : prefix) t.columns.push_back(c);
    t.columns.emplace_back("t");
    t.key_columns = t.columns.size();
    for (const auto& [c, _] : ts.channels()) t.columns.push_back(c);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        std::vector<double> row;
        row.reserve(t.columns.size());
        for (const auto& [_, v] : prefix) row.push_back(v);
        row.push_back(ts.times()[k]);
        for (const auto& [_, v] : ts.channels()) row.push_back(v[k]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace detail

/// Pair negativity of Gibbs states over (beta, J/U) per N, with the BEC asymptote.
inline std::vector<Table> run_thermal(const ExperimentConfig& c)
{
    std::vector<Table> out;
    for (int n : c.n) {
        Table t{"thermal_N" + std::to_string(n), {"N", "beta", "j_over_u", "negativity", "bec_asymptote"}, 3, {}};
        const auto basis = sector_basis(n);
        const double asymptote = bec_negativity_closed_form(n);
        for (double j : c.j_over_u) {
            const auto spec = eigh(hamiltonian(basis, {j, 1.0}));
            for (double beta : c.beta)
                t.rows.push_back({double(n), beta, j, negativity_pair(gibbs_state(spec, beta)).value, asymptote});
        }
        t.sort_rows();
        out.push_back(std::move(t));
    }
    return out;
}

/// Condensate negativity vs N and its power-law exponent over N >= fit_min_n.
inline std::vector<Table> run_bec_scaling(const ExperimentConfig& c)
{
    Table values{"bec_scaling", {"N", "negativity", "negativity_numeric", "in_fit"}, 1, {}};
    std::vector<double> xs, ys;
    for (int n : c.n) {
        const double closed = bec_negativity_closed_form(n);
        const auto gs = ground_state(hamiltonian(sector_basis(n), {1.0, 0.0}));
        const double numeric = negativity_pair(DensityMatrix::from_pure(gs.state)).value;
        const bool used = n >= c.fit_min_n;
        values.rows.push_back({double(n), closed, numeric, used ? 1.0 : 0.0});
        if (used) {
            xs.push_back(n);
            ys.push_back(closed);
        }
    }
    values.sort_rows();
    const auto fit = fit_power_law(xs, ys);
    Table summary{"bec_scaling_fit", {"fit_min_n", "points", "alpha", "log_prefactor", "residual"}, 1, {}};
    summary.rows.push_back({double(c.fit_min_n), double(fit.points), fit.alpha, fit.log_prefactor, fit.residual});
    return {values, summary};
}

/// Closed-system quench per N; gs_negativity_evolution is the reference level
/// of the post-quench Hamiltonian's ground state.
inline std::vector<Table> run_quench(const ExperimentConfig& c)
{
    QuenchSpec spec{c.initial, c.evolution, *c.t_max, c.samples, c.allow_degenerate};
    std::vector<Table> out;
    for (int n : c.n) {
        const auto ts = quench_evolve(spec, n);
        const auto ref = ground_state(hamiltonian(sector_basis(n), c.evolution));
        const double ref_neg = negativity_pair(DensityMatrix::from_pure(ref.state)).value;
        auto t = detail::time_series_table("quench_N" + std::to_string(n), {{"N", double(n)}}, ts);
        t.columns.emplace_back("gs_negativity_evolution");
        for (auto& row : t.rows) row.push_back(ref_neg);
        out.push_back(std::move(t));
    }
    return out;
}

/// Dephasing or loss runs per (N, gamma), horizon t_max or t_max_gamma_units / gamma.
/// Ground-state mode prepares and evolves with H(hamiltonian).
inline std::vector<Table> run_dissipative(const ExperimentConfig& c, DissipationChannel channel)
{
    std::vector<Table> out;
    for (int n : c.n)
        for (double gamma : c.gamma) {
            const bool decay = c.mode == RunMode::GroundState;
            QuenchSpec spec{decay ? c.hamiltonian : c.initial, decay ? c.hamiltonian : c.evolution, c.horizon(gamma),
                            c.samples, c.allow_degenerate};
            const auto ts = quenched_open_run(spec, channel, gamma, n, c.integrator);
            out.push_back(detail::time_series_table(std::string(to_string(channel)) + "_N" + std::to_string(n) + "_gamma"
                                                        + detail::number_tag(gamma),
                                                    {{"N", double(n)}, {"gamma", gamma}}, ts));
        }
    return out;
}

/// EoF lower bounds of ground states over J/U per N. Degenerate ground states
/// (J = 0 at odd N) are kept and flagged.
inline std::vector<Table> run_eof(const ExperimentConfig& c)
{
    std::vector<Table> out;
    for (int n : c.n) {
        Table t{"eof_N" + std::to_string(n), {"N", "j_over_u", "F", "G", "s", "bound", "negativity", "degenerate"}, 2, {}};
        const auto basis = sector_basis(n);
        for (double j : c.j_over_u) {
            const auto gs = ground_state(hamiltonian(basis, {j, 1.0}));
            const auto rho = DensityMatrix::from_pure(gs.state);
            const auto r = eof_bound(rho, c.s_reading);
            t.rows.push_back(
                {double(n), j, r.F, r.G, r.s, r.bound, negativity_pair(rho).value, gs.degenerate ? 1.0 : 0.0});
        }
        t.sort_rows();
        out.push_back(std::move(t));
    }
    return out;
}

/// Seeded random-state comparison of the quantifiers against their oracles:
/// pair formula vs partial transpose on mixed states, bound vs entropy on pure states.
inline std::vector<Table> run_selfcheck(const ExperimentConfig& c)
{
    std::mt19937_64 rng(c.seed);
    Table mixed{"selfcheck_mixed", {"N", "trial", "negativity_pair", "negativity_pt", "difference"}, 2, {}};
    Table pure{"selfcheck_pure", {"N", "trial", "F", "G", "s", "bound", "entropy", "margin"}, 2, {}};
    for (int n : c.n) {
        const auto basis = sector_basis(n);
        for (std::size_t k = 0; k < c.trials; ++k) {
            const auto rho = sampling::random_pair_state(basis, rng);
            const double a = negativity_pair(rho).value;
            const double b = negativity_pt_oracle(rho);
            mixed.rows.push_back({double(n), double(k), a, b, std::abs(a - b)});
        }
        for (std::size_t k = 0; k < c.trials; ++k) {
            const auto psi = sampling::random_pure_state(basis, rng);
            const auto r = eof_bound(DensityMatrix::from_pure(psi));
            const double e = pure_state_eof_oracle(psi);
            pure.rows.push_back({double(n), double(k), r.F, r.G, r.s, r.bound, e, e - r.bound});
        }
    }
    mixed.sort_rows();
    pure.sort_rows();
    return {mixed, pure};
}

inline std::vector<Table> run_experiment(const ExperimentConfig& c)
{
    validate(c);
    switch (c.experiment) {
    case Experiment::Thermal: return run_thermal(c);
    case Experiment::BecScaling: return run_bec_scaling(c);
    case Experiment::Quench: return run_quench(c);
    case Experiment::Dephasing: return run_dissipative(c, DissipationChannel::Dephasing);
    case Experiment::Loss: return run_dissipative(c, DissipationChannel::Loss);
    case Experiment::Eof: return run_eof(c);
    case Experiment::Selfcheck: return run_selfcheck(c);
    }
    throw std::logic_error("run_experiment: unhandled experiment");
}

}  // namespace dwell
