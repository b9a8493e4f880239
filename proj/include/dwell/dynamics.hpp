#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "dwell/entanglement.hpp"
#include "dwell/operators.hpp"
#include "dwell/spectral.hpp"

namespace dwell {

/// Prepare the ground state of H(initial), evolve under H(evolution).
/// Times are in units of 1/U (hbar = 1).
struct QuenchSpec {
    ModelParams initial{0.1, 1.0};
    ModelParams evolution{1.0, 1.0};
    double t_max = 50.0;
    std::size_t samples = 1001;
    /// Start from a flagged-degenerate ground state anyway.
    bool allow_degenerate = false;

    void validate() const
    {
        initial.validate();
        evolution.validate();
        if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("QuenchSpec: t_max must be > 0");
        if (samples < 2) throw std::invalid_argument("QuenchSpec: need at least 2 samples");
    }
};

/// Uniform grid 0, t_max/(samples-1), ..., t_max.
inline std::vector<double> uniform_times(double t_max, std::size_t samples)
{
    std::vector<double> t(samples);
    for (std::size_t k = 0; k < samples; ++k) t[k] = t_max * static_cast<double>(k) / static_cast<double>(samples - 1);
    return t;
}

/// Sampled scalar observables along a trajectory. Channel order is insertion order.
class TimeSeries {
public:
    TimeSeries() = default;
    explicit TimeSeries(std::vector<double> times) : times_(std::move(times)) {}

    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    [[nodiscard]] std::size_t size() const { return times_.size(); }
    [[nodiscard]] const std::vector<std::pair<std::string, std::vector<double>>>& channels() const { return channels_; }

    void add(std::string name, std::vector<double> values)
    {
        if (values.size() != times_.size())
            throw std::invalid_argument("TimeSeries: channel '" + name + "' length does not match the time grid");
        if (has(name)) throw std::invalid_argument("TimeSeries: duplicate channel '" + name + "'");
        channels_.emplace_back(std::move(name), std::move(values));
    }

    [[nodiscard]] bool has(std::string_view name) const
    {
        return std::any_of(channels_.begin(), channels_.end(), [&](const auto& c) { return c.first == name; });
    }

    [[nodiscard]] const std::vector<double>& channel(std::string_view name) const
    {
        for (const auto& c : channels_)
            if (c.first == name) return c.second;
        throw std::out_of_range("TimeSeries: no channel '" + std::string(name) + "'");
    }

private:
    std::vector<double> times_;
    std::vector<std::pair<std::string, std::vector<double>>> channels_;
};

/// t^-1 int_0^t f by the trapezoid rule on the sample grid; the t = 0 entry is f(0).
inline std::vector<double> running_average(const std::vector<double>& times, const std::vector<double>& values)
{
    std::vector<double> avg(values.size());
    if (values.empty()) return avg;
    avg[0] = values[0];
    double integral = 0.0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        integral += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
        avg[k] = times[k] > 0.0 ? integral / times[k] : values[k];
    }
    return avg;
}

enum class DissipationChannel { Dephasing, Loss };

inline std::string_view to_string(DissipationChannel c) { return c == DissipationChannel::Dephasing ? "dephasing" : "loss"; }

struct JumpOperator {
    OperatorMatrix op;
    double rate = 0.0;
};

/// drho/dt = -i[H, rho] + sum_k rate_k (L_k rho L_k^+ - {L_k^+ L_k, rho}/2).
struct LindbladModel {
    OperatorMatrix hamiltonian;
    std::vector<JumpOperator> jumps;
    DissipationChannel channel = DissipationChannel::Dephasing;

    /// Jumps n_A, n_B on a Sector basis.
    static LindbladModel dephasing(const OperatorMatrix& h, double gamma_a, double gamma_b)
    {
        if (h.basis()->kind() != BasisKind::Sector)
            throw std::invalid_argument("LindbladModel: dephasing acts on a Sector basis");
        LindbladModel m{h, {{number_op(h.basis(), Well::A), gamma_a}, {number_op(h.basis(), Well::B), gamma_b}},
                        DissipationChannel::Dephasing};
        m.validate();
        return m;
    }
    static LindbladModel dephasing(const OperatorMatrix& h, double gamma) { return dephasing(h, gamma, gamma); }

    /// Jumps b_A, b_B on a Full basis.
    static LindbladModel loss(const OperatorMatrix& h, double gamma_a, double gamma_b)
    {
        if (h.basis()->kind() != BasisKind::Full) throw std::invalid_argument("LindbladModel: loss acts on a Full basis");
        LindbladModel m{h, {{annihilator(h.basis(), Well::A), gamma_a}, {annihilator(h.basis(), Well::B), gamma_b}},
                        DissipationChannel::Loss};
        m.validate();
        return m;
    }
    static LindbladModel loss(const OperatorMatrix& h, double gamma) { return loss(h, gamma, gamma); }

    [[nodiscard]] const BasisPtr& basis() const { return hamiltonian.basis(); }

    void validate() const
    {
        if (!hamiltonian.hermitian()) throw std::invalid_argument("LindbladModel: Hamiltonian is not Hermitian");
        for (const auto& j : jumps) {
            require_same_basis(*hamiltonian.basis(), *j.op.basis(), "LindbladModel");
            if (!(j.rate >= 0.0) || !std::isfinite(j.rate))
                throw std::invalid_argument("LindbladModel: rates must be finite and non-negative");
        }
    }
};

/// Dense Liouvillian acting on column-stacked rho, using vec(A rho B) = (B^T kron A) vec(rho).
inline ComplexMatrix liouvillian(const LindbladModel& model)
{
    model.validate();
    const auto d = static_cast<Eigen::Index>(model.basis()->size());
    if (d * d > 10000)
        throw std::invalid_argument("liouvillian: superoperator dimension " + std::to_string(d * d)
                                    + " exceeds the 10^4 limit");
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    const auto kron = [](const ComplexMatrix& a, const ComplexMatrix& b) {
        ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        return out;
    };
    const Complex i_unit(0.0, 1.0);
    const ComplexMatrix& h = model.hamiltonian.data();
    ComplexMatrix out = -i_unit * (kron(id, h) - kron(h.transpose(), id));
    for (const auto& jump : model.jumps) {
        const ComplexMatrix& l = jump.op.data();
        const ComplexMatrix ldl = l.adjoint() * l;
        out += jump.rate * (kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id));
    }
    return out;
}

namespace detail {

constexpr double kTraceDriftTol = 1e-8;
constexpr double kTrajectoryHermitianTol = 1e-9;
constexpr double kTrajectoryPositivityTol = -1e-7;

/// Collects per-sample observables of rho(t) into named channels.
class ObservableRecorder {
public:
    ObservableRecorder(BasisPtr basis, ComplexMatrix h) : basis_(std::move(basis)), h_(std::move(h)) {}

    void record(const ComplexMatrix& rho)
    {
        const bool full = basis_->kind() == BasisKind::Full;
        if (full) {
            const auto report = block_negativity(*basis_, rho);
            push("negativity", report.value);
            push("energy", (rho * h_).trace().real());
            push("trace", rho.trace().real());
            push("purity", (rho * rho).trace().real());
            push("hermiticity_error", hermiticity_error(rho));
            push("min_eigenvalue", min_eigenvalue(rho));
            double number = 0.0;
            for (const auto& s : sector_slices(*basis_)) {
                double pop = 0.0;
                for (std::size_t i = s.begin; i < s.end; ++i) pop += rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
                number += s.total * pop;
                push("population_N" + std::to_string(s.total), pop);
            }
            push("particle_number", number);
            for (const auto& b : *report.per_block) push("negativity_N" + std::to_string(b.total), b.value);
        } else {
            push("negativity", pair_negativity(rho));
            push("energy", (rho * h_).trace().real());
            push("trace", rho.trace().real());
            push("purity", (rho * rho).trace().real());
            push("hermiticity_error", hermiticity_error(rho));
            push("min_eigenvalue", min_eigenvalue(rho));
        }
    }

    /// negativity, its running average, then everything else in recording order.
    TimeSeries finish(std::vector<double> times) &&
    {
        TimeSeries ts(std::move(times));
        const auto neg = std::find_if(channels_.begin(), channels_.end(), [](const auto& c) { return c.first == "negativity"; });
        auto avg = running_average(ts.times(), neg->second);
        ts.add("negativity", std::move(neg->second));
        ts.add("negativity_avg", std::move(avg));
        for (auto& c : channels_)
            if (c.first != "negativity") ts.add(std::move(c.first), std::move(c.second));
        return ts;
    }

private:
    void push(const std::string& name, double v)
    {
        auto it = std::find_if(channels_.begin(), channels_.end(), [&](const auto& c) { return c.first == name; });
        if (it == channels_.end()) {
            channels_.emplace_back(name, std::vector<double>{});
            it = std::prev(channels_.end());
        }
        it->second.push_back(v);
    }

    BasisPtr basis_;
    ComplexMatrix h_;
    std::vector<std::pair<std::string, std::vector<double>>> channels_;
};

inline void check_trajectory(const TimeSeries& ts, const char* where)
{
    const auto& tr = ts.channel("trace");
    const auto& herm = ts.channel("hermiticity_error");
    const auto& mineig = ts.channel("min_eigenvalue");
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const std::string at = std::string(where) + " at t=" + std::to_string(ts.times()[k]) + ": ";
        if (std::abs(tr[k] - 1.0) > kTraceDriftTol) throw NumericalError(at + "trace drifted to " + std::to_string(tr[k]));
        if (herm[k] > kTrajectoryHermitianTol)
            throw NumericalError(at + "hermiticity error " + std::to_string(herm[k]));
        if (mineig[k] < kTrajectoryPositivityTol)
            throw NumericalError(at + "negative eigenvalue " + std::to_string(mineig[k]));
    }
}

inline void require_valid_start(const LindbladModel& model, const DensityMatrix& rho0, double t_max, std::size_t samples)
{
    require_same_basis(*model.basis(), *rho0.basis(), "lindblad evolution");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("lindblad evolution: t_max must be > 0");
    if (samples < 2) throw std::invalid_argument("lindblad evolution: need at least 2 samples");
}

inline double spectral_norm_hermitian(const ComplexMatrix& m)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> s(m, Eigen::EigenvaluesOnly);
    return s.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Closed-system quench on Sector(n) through the spectrum of H(evolution).
/// Channels: negativity, negativity_avg, energy, trace, purity, hermiticity_error, min_eigenvalue.
inline TimeSeries quench_evolve(const QuenchSpec& spec, int n)
{
    spec.validate();
    const auto basis = sector_basis(n);
    const auto gs = ground_state(hamiltonian(basis, spec.initial));
    if (gs.degenerate && !spec.allow_degenerate)
        throw std::invalid_argument("quench_evolve: ground state of H(J0=" + std::to_string(spec.initial.hopping)
                                    + ", U0=" + std::to_string(spec.initial.interaction)
                                    + ") is degenerate; pass allow_degenerate to proceed");
    const auto h_e = hamiltonian(basis, spec.evolution);
    const auto decomposition = eigh(h_e);

    auto times = uniform_times(spec.t_max, spec.samples);
    detail::ObservableRecorder rec(basis, h_e.data());
    for (double t : times) {
        const auto psi = matrix_exp_hermitian_action(decomposition, Complex(0.0, -t), gs.state);
        rec.record(psi.amplitudes() * psi.amplitudes().adjoint());
    }
    return std::move(rec).finish(std::move(times));
}

struct Rk4Options {
    /// Upper bound on h * (2 ||H||_2 + sum_k rate_k ||L_k^+ L_k||_2).
    double stability = 0.05;
    double trace_tolerance = detail::kTraceDriftTol;
    int max_halvings = 20;
};

/// Fixed-step RK4 on the master equation, sampled on a uniform grid.
/// The step is refined by halving until the trace drift stays within tolerance.
inline TimeSeries lindblad_evolve_rk4(const LindbladModel& model, const DensityMatrix& rho0, double t_max,
                                      std::size_t samples, const Rk4Options& opts = {})
{
    model.validate();
    detail::require_valid_start(model, rho0, t_max, samples);

    const Complex i_unit(0.0, 1.0);
    const ComplexMatrix& h = model.hamiltonian.data();
    std::vector<std::pair<ComplexMatrix, double>> jumps;
    double rate_norm = 2.0 * detail::spectral_norm_hermitian(h);
    for (const auto& j : model.jumps) {
        const ComplexMatrix ldl = j.op.data().adjoint() * j.op.data();
        rate_norm += j.rate * detail::spectral_norm_hermitian(ldl);
        jumps.emplace_back(j.op.data(), j.rate);
    }
    std::vector<ComplexMatrix> half_ldl;
    for (const auto& [l, rate] : jumps) half_ldl.push_back(0.5 * rate * (l.adjoint() * l));

    const auto rhs = [&](const ComplexMatrix& rho) {
        ComplexMatrix out = -i_unit * (h * rho - rho * h);
        for (std::size_t k = 0; k < jumps.size(); ++k) {
            const auto& [l, rate] = jumps[k];
            out += rate * (l * rho * l.adjoint()) - half_ldl[k] * rho - rho * half_ldl[k];
        }
        return out;
    };

    auto times = uniform_times(t_max, samples);
    const double dt = times[1] - times[0];
    std::size_t steps = 1;
    if (rate_norm > 0.0) steps = static_cast<std::size_t>(std::max(1.0, std::ceil(dt * rate_norm / opts.stability)));

    for (int attempt = 0; attempt <= opts.max_halvings; ++attempt, steps *= 2) {
        const double step = dt / static_cast<double>(steps);
        detail::ObservableRecorder rec(model.basis(), h);
        ComplexMatrix rho = rho0.data();
        double drift = std::abs(rho.trace().real() - 1.0);
        rec.record(rho);
        for (std::size_t k = 1; k < samples; ++k) {
            for (std::size_t s = 0; s < steps; ++s) {
                const ComplexMatrix k1 = rhs(rho);
                const ComplexMatrix k2 = rhs(rho + 0.5 * step * k1);
                const ComplexMatrix k3 = rhs(rho + 0.5 * step * k2);
                const ComplexMatrix k4 = rhs(rho + step * k3);
                rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            drift = std::max(drift, std::abs(rho.trace().real() - 1.0));
            rec.record(rho);
        }
        if (drift <= opts.trace_tolerance) {
            auto ts = std::move(rec).finish(std::move(times));
            detail::check_trajectory(ts, "lindblad_evolve_rk4");
            return ts;
        }
    }
    throw NumericalError("lindblad_evolve_rk4: trace drift above " + std::to_string(opts.trace_tolerance) + " after "
                         + std::to_string(opts.max_halvings) + " step halvings (final step count per sample "
                         + std::to_string(steps) + ")");
}

/// Liouvillian condition number above which the eigenvector expansion is abandoned.
constexpr double kDefectiveConditionLimit = 1e10;

/// Evolution through the spectral decomposition of the Liouvillian,
/// vec rho(t) = V exp(Lambda t) V^-1 vec rho(0). Falls back to a
/// scaling-and-squaring propagator exp(L dt) when V is ill-conditioned.
inline TimeSeries lindblad_evolve_exact(const LindbladModel& model, const DensityMatrix& rho0, double t_max,
                                        std::size_t samples)
{
    detail::require_valid_start(model, rho0, t_max, samples);
    const auto d = static_cast<Eigen::Index>(model.basis()->size());
    if (d * d > 2500)
        throw std::invalid_argument("lindblad_evolve_exact: superoperator dimension " + std::to_string(d * d)
                                    + " exceeds the 2500 limit of the spectral path");
    const ComplexMatrix lv = liouvillian(model);
    const ComplexVector vec0 = Eigen::Map<const ComplexVector>(rho0.data().data(), d * d);

    auto times = uniform_times(t_max, samples);
    detail::ObservableRecorder rec(model.basis(), model.hamiltonian.data());

    Eigen::ComplexEigenSolver<ComplexMatrix> es(lv);
    bool spectral = es.info() == Eigen::Success;
    double condition = 0.0;
    if (spectral) {
        const auto sv = es.eigenvectors().bdcSvd().singularValues();
        condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
        spectral = condition <= kDefectiveConditionLimit;
    }

    if (spectral) {
        const ComplexMatrix& v = es.eigenvectors();
        const ComplexVector coeff = v.partialPivLu().solve(vec0);
        for (double t : times) {
            const ComplexVector evolved = v * (es.eigenvalues().array() * t).exp().matrix().cwiseProduct(coeff);
            rec.record(Eigen::Map<const ComplexMatrix>(evolved.data(), d, d));
        }
    } else {
        const ComplexMatrix propagator = (lv * (times[1] - times[0])).exp();
        ComplexVector state = vec0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (k > 0) state = propagator * state;
            rec.record(Eigen::Map<const ComplexMatrix>(state.data(), d, d));
        }
    }
    auto ts = std::move(rec).finish(std::move(times));
    detail::check_trajectory(ts, "lindblad_evolve_exact");
    return ts;
}

enum class Integrator { Rk4, Exact };

/// Ground state of H(initial) on Sector(n), evolved under H(evolution) plus the
/// chosen dissipator with rate gamma on both wells. Loss runs embed the initial
/// state in the top block of Full(n). initial == evolution gives the
/// ground-state-decay experiment.
inline TimeSeries quenched_open_run(const QuenchSpec& spec, DissipationChannel channel, double gamma, int n,
                                    Integrator integrator = Integrator::Rk4)
{
    spec.validate();
    const auto sector = sector_basis(n);
    const auto gs = ground_state(hamiltonian(sector, spec.initial));
    if (gs.degenerate && !spec.allow_degenerate)
        throw std::invalid_argument("quenched_open_run: initial ground state is degenerate; pass allow_degenerate");

    const auto basis = channel == DissipationChannel::Dephasing ? sector : full_basis(n);
    const auto d = static_cast<Eigen::Index>(basis->size());
    ComplexMatrix rho = ComplexMatrix::Zero(d, d);
    rho.topLeftCorner(n + 1, n + 1) = gs.state.amplitudes() * gs.state.amplitudes().adjoint();
    const DensityMatrix rho0(basis, std::move(rho));

    const auto h = hamiltonian(basis, spec.evolution);
    const auto model = channel == DissipationChannel::Dephasing ? LindbladModel::dephasing(h, gamma)
                                                                : LindbladModel::loss(h, gamma);
    return integrator == Integrator::Rk4 ? lindblad_evolve_rk4(model, rho0, spec.t_max, spec.samples)
                                         : lindblad_evolve_exact(model, rho0, spec.t_max, spec.samples);
}

}  // namespace dwell
