#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include <gtest/gtest.h>

#include "dwell/dynamics.hpp"

using namespace dwell;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

DensityMatrix ground_density(int n, ModelParams p)
{
    return DensityMatrix::from_pure(ground_state(hamiltonian(sector_basis(n), p)).state);
}

}  // namespace

TEST(RunningAverage, TrapezoidRule)
{
    const std::vector<double> t{0.0, 1.0, 2.0, 4.0};
    const auto avg = running_average(t, {2.0, 4.0, 0.0, 2.0});
    EXPECT_DOUBLE_EQ(avg[0], 2.0);
    EXPECT_DOUBLE_EQ(avg[1], 3.0);
    EXPECT_DOUBLE_EQ(avg[2], 2.5);
    EXPECT_DOUBLE_EQ(avg[3], 1.75);
}

TEST(TimeSeries, ChannelBookkeeping)
{
    TimeSeries ts({0.0, 1.0});
    ts.add("a", {1.0, 2.0});
    EXPECT_TRUE(ts.has("a"));
    EXPECT_THROW(ts.add("a", {1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW(ts.add("b", {1.0}), std::invalid_argument);
    EXPECT_THROW((void)ts.channel("missing"), std::out_of_range);
}

TEST(QuenchSpec, Validation)
{
    QuenchSpec spec;
    spec.t_max = 0.0;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
    spec.t_max = 1.0;
    spec.samples = 1;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Quench, SingleParticleNegativityIsFlat)
{
    for (auto [j0, je] : {std::pair{0.1, 1.0}, std::pair{2.0, 0.3}, std::pair{0.5, 5.0}}) {
        const auto ts = quench_evolve({{j0, 1.0}, {je, 1.0}, 30.0, 301}, 1);
        for (double v : ts.channel("negativity")) EXPECT_NEAR(v, 0.5, 1e-12);
    }
}

TEST(Quench, EnergyJumpsByKineticTermThenStaysConstant)
{
    for (int n = 1; n <= 6; ++n) {
        const QuenchSpec spec{{0.1, 1.0}, {1.0, 1.0}, 50.0, 501};
        const auto basis = sector_basis(n);
        const auto gs = ground_state(hamiltonian(basis, spec.initial));
        const double expected = gs.energy - (spec.evolution.hopping - spec.initial.hopping) * expectation(hopping_op(basis), gs.state);
        const auto& e = quench_evolve(spec, n).channel("energy");
        for (double v : e) EXPECT_NEAR(v, expected, 1e-10);
        EXPECT_LT(expected, gs.energy);
    }
}

TEST(Quench, NoQuenchKeepsEverythingConstant)
{
    const auto ts = quench_evolve({{0.7, 1.0}, {0.7, 1.0}, 20.0, 201}, 4);
    for (const auto& [name, values] : ts.channels()) {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        EXPECT_LE(*hi - *lo, 1e-10) << name;
    }
}

TEST(Quench, RefusesDegenerateStartUnlessAllowed)
{
    QuenchSpec spec{{0.0, 1.0}, {1.0, 1.0}, 5.0, 11};
    EXPECT_THROW(quench_evolve(spec, 3), std::invalid_argument);
    spec.allow_degenerate = true;
    EXPECT_NO_THROW(quench_evolve(spec, 3));
}

TEST(Quench, TimeAverageStabilizes)
{
    for (int n = 1; n <= 5; ++n) {
        const auto ts = quench_evolve({{0.1, 1.0}, {1.0, 1.0}, 100.0, 2001}, n);
        const auto& avg = ts.channel("negativity_avg");
        const std::vector<double> tail(avg.begin() + static_cast<long>(avg.size() / 2), avg.end());
        const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
        const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
        EXPECT_LT(*hi - *lo, 0.05 * mean) << n;
    }
}

TEST(Liouvillian, ClosedSystemSpectrumIsEnergyDifferences)
{
    const auto h = hamiltonian(sector_basis(3), {0.8, 1.0});
    const auto lv = liouvillian(LindbladModel::dephasing(h, 0.0));
    const auto e = eigh(h).eigenvalues;
    std::vector<double> expected;
    for (Eigen::Index i = 0; i < e.size(); ++i)
        for (Eigen::Index j = 0; j < e.size(); ++j) expected.push_back(-(e(i) - e(j)));
    Eigen::ComplexEigenSolver<ComplexMatrix> es(lv);
    std::vector<double> got;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        EXPECT_NEAR(es.eigenvalues()(k).real(), 0.0, 1e-12);
        got.push_back(es.eigenvalues()(k).imag());
    }
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    EXPECT_LE(max_abs_diff(expected, got), 1e-10);
}

TEST(Liouvillian, MatchesMatrixFormRightHandSide)
{
    const auto f = full_basis(3);
    const auto model = LindbladModel::loss(hamiltonian(f, {0.6, 1.3}), 0.7, 0.2);
    const auto lv = liouvillian(model);
    const auto d = static_cast<Eigen::Index>(f->size());
    ComplexMatrix rho = ComplexMatrix::Random(d, d);
    const ComplexVector vec = Eigen::Map<ComplexVector>(rho.data(), d * d);
    const ComplexVector out = lv * vec;

    const Complex i(0.0, 1.0);
    const ComplexMatrix& h = model.hamiltonian.data();
    ComplexMatrix direct = -i * (h * rho - rho * h);
    for (const auto& j : model.jumps) {
        const ComplexMatrix& l = j.op.data();
        direct += j.rate * (l * rho * l.adjoint() - 0.5 * (l.adjoint() * l * rho + rho * l.adjoint() * l));
    }
    EXPECT_LE((Eigen::Map<const ComplexMatrix>(out.data(), d, d) - direct).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Liouvillian, DimensionGuard)
{
    EXPECT_NO_THROW(liouvillian(LindbladModel::dephasing(hamiltonian(sector_basis(20), {1.0, 1.0}), 1.0)));
    EXPECT_THROW(liouvillian(LindbladModel::dephasing(hamiltonian(sector_basis(100), {1.0, 1.0}), 1.0)),
                 std::invalid_argument);
}

TEST(LindbladModel, ChannelBasisRules)
{
    EXPECT_THROW(LindbladModel::dephasing(hamiltonian(full_basis(2), {1.0, 1.0}), 1.0), std::invalid_argument);
    EXPECT_THROW(LindbladModel::loss(hamiltonian(sector_basis(2), {1.0, 1.0}), 1.0), std::invalid_argument);
    EXPECT_THROW(LindbladModel::dephasing(hamiltonian(sector_basis(2), {1.0, 1.0}), -1.0), std::invalid_argument);
}

// rho_01(t) = rho_01(0) exp(-gamma t) for H = 0 and unit dephasing on one particle.
TEST(TwoLevel, DephasingClosedForm)
{
    const auto b = sector_basis(1);
    const OperatorMatrix zero(b, ComplexMatrix::Zero(2, 2), true);
    const DensityMatrix rho0(b, (ComplexMatrix(2, 2) << 0.5, 0.5, 0.5, 0.5).finished());
    for (double gamma : {0.1, 1.0, 10.0}) {
        const auto model = LindbladModel::dephasing(zero, gamma);
        const double t_max = 5.0 / gamma;
        // RK4 carries its own truncation error; the spectral path is near-exact.
        const std::pair<TimeSeries, double> runs[] = {{lindblad_evolve_exact(model, rho0, t_max, 51), 1e-10},
                                                      {lindblad_evolve_rk4(model, rho0, t_max, 51), 1e-8}};
        for (const auto& [ts, tol] : runs) {
            const auto& neg = ts.channel("negativity");
            for (std::size_t k = 0; k < ts.size(); ++k) EXPECT_NEAR(neg[k], 0.5 * std::exp(-gamma * ts.times()[k]), tol);
        }
    }
}

// Population of |1,0> decays as exp(-gamma t) into the vacuum.
TEST(TwoLevel, AmplitudeDampingClosedForm)
{
    const auto f = full_basis(1);
    const OperatorMatrix zero(f, ComplexMatrix::Zero(3, 3), true);
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 0) = 1.0;
    const DensityMatrix rho0(f, m);
    for (double gamma : {0.1, 1.0, 10.0}) {
        const auto model = LindbladModel::loss(zero, gamma);
        const std::pair<TimeSeries, double> runs[] = {{lindblad_evolve_exact(model, rho0, 4.0 / gamma, 41), 1e-10},
                                                      {lindblad_evolve_rk4(model, rho0, 4.0 / gamma, 41), 1e-8}};
        for (const auto& [ts, tol] : runs) {
            for (std::size_t k = 0; k < ts.size(); ++k) {
                const double p = std::exp(-gamma * ts.times()[k]);
                EXPECT_NEAR(ts.channel("population_N1")[k], p, tol);
                EXPECT_NEAR(ts.channel("population_N0")[k], 1.0 - p, tol);
            }
        }
    }
}

TEST(Rk4, ClosedSystemReproducesQuench)
{
    for (int n = 1; n <= 5; ++n) {
        const QuenchSpec spec{{0.1, 1.0}, {1.0, 1.0}, 10.0, 101};
        const auto coherent = quench_evolve(spec, n);
        const auto open = quenched_open_run(spec, DissipationChannel::Dephasing, 0.0, n);
        for (const char* c : {"negativity", "negativity_avg", "energy", "trace", "purity"})
            EXPECT_LE(max_abs_diff(coherent.channel(c), open.channel(c)), 1e-6) << c << " N=" << n;
    }
}

TEST(Rk4, GammaToZeroLimitOfLossReproducesQuench)
{
    const QuenchSpec spec{{0.1, 1.0}, {1.0, 1.0}, 10.0, 101};
    const auto coherent = quench_evolve(spec, 3);
    const auto open = quenched_open_run(spec, DissipationChannel::Loss, 0.0, 3, Integrator::Exact);
    for (const char* c : {"negativity", "energy", "purity"}) EXPECT_LE(max_abs_diff(coherent.channel(c), open.channel(c)), 1e-8) << c;
}

TEST(Rk4, ReportsHalvingFailure)
{
    const auto model = LindbladModel::dephasing(hamiltonian(sector_basis(2), {1.0, 1.0}), 1.0);
    Rk4Options opts;
    opts.trace_tolerance = -1.0;
    opts.max_halvings = 2;
    EXPECT_THROW(lindblad_evolve_rk4(model, ground_density(2, {1.0, 1.0}), 1.0, 3, opts), NumericalError);
}

TEST(Exact, AgreesWithRk4OnDephasing)
{
    const auto model = LindbladModel::dephasing(hamiltonian(sector_basis(3), {1.0, 1.0}), 1.0);
    const auto rho0 = ground_density(3, {0.1, 1.0});
    const auto a = lindblad_evolve_rk4(model, rho0, 10.0, 201);
    const auto b = lindblad_evolve_exact(model, rho0, 10.0, 201);
    for (const auto& [name, values] : a.channels()) EXPECT_LE(max_abs_diff(values, b.channel(name)), 1e-6) << name;
}

TEST(Exact, UnitaryPurityStaysOne)
{
    const auto model = LindbladModel::dephasing(hamiltonian(sector_basis(4), {1.0, 1.0}), 0.0);
    const auto ts = lindblad_evolve_exact(model, ground_density(4, {0.1, 1.0}), 20.0, 201);
    for (double p : ts.channel("purity")) EXPECT_NEAR(p, 1.0, 1e-10);
}

TEST(Exact, RejectsOversizedSuperoperator)
{
    const auto model = LindbladModel::dephasing(hamiltonian(sector_basis(50), {1.0, 1.0}), 1.0);
    EXPECT_THROW(lindblad_evolve_exact(model, DensityMatrix::maximally_mixed(sector_basis(50)), 1.0, 3), std::invalid_argument);
}

TEST(Dephasing, DiagonalFrozenWhenHamiltonianCommutesWithNumbers)
{
    // J_e = 0: H and all jumps are diagonal, so Fock populations never move.
    const QuenchSpec spec{{1.0, 1.0}, {0.0, 1.0}, 10.0, 101};
    const auto b = sector_basis(4);
    const auto model = LindbladModel::dephasing(hamiltonian(b, spec.evolution), 0.5);
    const auto rho0 = ground_density(4, spec.initial);
    const auto ts = lindblad_evolve_rk4(model, rho0, spec.t_max, spec.samples);
    // Energy is linear in the populations, so its constancy tracks the frozen diagonal.
    const auto& e = ts.channel("energy");
    for (double v : e) EXPECT_NEAR(v, e.front(), 1e-9);
}

TEST(Dephasing, GroundStateCoherenceDecays)
{
    for (int n = 1; n <= 5; ++n) {
        const QuenchSpec spec{{1.0, 1.0}, {1.0, 1.0}, 40.0, 401};
        const auto ts = quenched_open_run(spec, DissipationChannel::Dephasing, 1.0, n);
        const auto& neg = ts.channel("negativity");
        EXPECT_LT(neg.back(), 1e-6 * neg.front()) << n;
        // Envelope: the running maximum over successive quarters shrinks.
        const std::size_t q = neg.size() / 4;
        double prev = INFINITY;
        for (std::size_t part = 0; part < 4; ++part) {
            const double peak = *std::max_element(neg.begin() + static_cast<long>(part * q), neg.begin() + static_cast<long>((part + 1) * q));
            EXPECT_LT(peak, prev);
            prev = peak;
        }
    }
}

TEST(Dephasing, EarlyQuenchKeepsNegativityAboveStart)
{
    // t << 1/gamma: the quench still lifts the negativity above its initial value.
    for (int n = 2; n <= 5; ++n) {
        const QuenchSpec spec{{0.1, 1.0}, {1.0, 1.0}, 1.0, 101};
        const auto ts = quenched_open_run(spec, DissipationChannel::Dephasing, 0.01, n);
        const auto& neg = ts.channel("negativity");
        for (std::size_t k = 1; k < neg.size(); ++k) EXPECT_GT(neg[k], neg.front()) << n << " t=" << ts.times()[k];
    }
}

TEST(Dephasing, StrongRateSuppressesOscillations)
{
    const QuenchSpec spec{{0.1, 1.0}, {1.0, 1.0}, 10.0, 1001};
    const auto count_peaks = [](const std::vector<double>& v) {
        int peaks = 0;
        for (std::size_t k = 1; k + 1 < v.size(); ++k)
            if (v[k] > v[k - 1] && v[k] > v[k + 1]) ++peaks;
        return peaks;
    };
    for (int n = 2; n <= 5; ++n) {
        const int weak = count_peaks(quenched_open_run(spec, DissipationChannel::Dephasing, 0.1, n).channel("negativity"));
        const int strong = count_peaks(quenched_open_run(spec, DissipationChannel::Dephasing, 10.0, n).channel("negativity"));
        EXPECT_GE(weak, 3) << n;
        EXPECT_LT(strong, weak) << n;
    }
}

TEST(Loss, ParticleNumberDecays)
{
    for (int n = 1; n <= 4; ++n) {
        const auto f = full_basis(n);
        const OperatorMatrix zero(f, ComplexMatrix::Zero(static_cast<Eigen::Index>(f->size()), static_cast<Eigen::Index>(f->size())), true);
        ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(f->size()), static_cast<Eigen::Index>(f->size()));
        m.topLeftCorner(n + 1, n + 1) = ground_density(n, {1.0, 1.0}).data();
        const DensityMatrix rho0(f, m);
        const auto ts = lindblad_evolve_rk4(LindbladModel::loss(zero, 0.5), rho0, 10.0, 101);
        const auto& num = ts.channel("particle_number");
        for (std::size_t k = 0; k < ts.size(); ++k) EXPECT_NEAR(num[k], n * std::exp(-0.5 * ts.times()[k]), 1e-6);

        const auto with_h = quenched_open_run({{1.0, 1.0}, {1.0, 1.0}, 10.0, 101}, DissipationChannel::Loss, 0.5, n);
        const auto& num_h = with_h.channel("particle_number");
        for (std::size_t k = 1; k < num_h.size(); ++k) EXPECT_LE(num_h[k], num_h[k - 1] + 1e-12);
    }
}

TEST(Loss, InitialNegativityMatchesSectorState)
{
    const int n = 4;
    const auto ts = quenched_open_run({{1.0, 1.0}, {0.1, 1.0}, 5.0, 11}, DissipationChannel::Loss, 1.0, n);
    const double pair = negativity_pair(ground_density(n, {1.0, 1.0})).value;
    EXPECT_NEAR(ts.channel("negativity").front(), pair, 1e-12);
    EXPECT_NEAR(ts.channel("negativity_N4").front(), pair, 1e-12);
    EXPECT_NEAR(ts.channel("population_N4").front(), 1.0, 1e-12);
}

TEST(Loss, DrainsToVacuum)
{
    for (int n = 1; n <= 4; ++n) {
        const double gamma = 1.0;
        const auto ts = quenched_open_run({{1.0, 1.0}, {1.0, 1.0}, 20.0 / gamma, 201}, DissipationChannel::Loss, gamma, n);
        EXPECT_GE(ts.channel("population_N0").back(), 0.99);
        EXPECT_LT(ts.channel("negativity").back(), 1e-6);
    }
}

TEST(Invariants, HoldAlongBothIntegrators)
{
    for (auto channel : {DissipationChannel::Dephasing, DissipationChannel::Loss})
        for (auto integrator : {Integrator::Rk4, Integrator::Exact}) {
            const auto ts = quenched_open_run({{0.1, 1.0}, {1.0, 1.0}, 10.0, 101}, channel, 1.0, 3, integrator);
            for (std::size_t k = 0; k < ts.size(); ++k) {
                EXPECT_NEAR(ts.channel("trace")[k], 1.0, 1e-8);
                EXPECT_LE(ts.channel("hermiticity_error")[k], 1e-9);
                EXPECT_GE(ts.channel("min_eigenvalue")[k], -1e-7);
            }
        }
}

TEST(Invariants, ClosedEnergyConservation)
{
    const auto ts = quenched_open_run({{0.1, 1.0}, {1.0, 1.0}, 20.0, 201}, DissipationChannel::Dephasing, 0.0, 5);
    const auto& e = ts.channel("energy");
    const double mean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
    double var = 0.0;
    for (double v : e) var += (v - mean) * (v - mean);
    EXPECT_LE(std::sqrt(var / static_cast<double>(e.size())), 1e-8 * std::abs(mean));
}
