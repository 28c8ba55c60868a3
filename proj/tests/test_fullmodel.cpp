#include <qcfd/fullmodel.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace qcfd;

namespace {

ModelParams jcm(double lambda, double Omega = 1.0)
{
	ModelParams p;
	p.lambda = lambda;
	p.Omega = Omega;
	return p;
}

SpinFieldVector up_times(const FieldStateSpec& f, int dim)
{
	return SpinFieldVector::product(Eigen::Vector2cd(1.0, 0.0), build_field_state(f, dim));
}

} // namespace

TEST(Hamiltonian, RealSymmetricAndValidated)
{
	ModelParams p = jcm(0.3);
	p.coupling = Coupling::rabi;
	const auto h = build_hamiltonian(p, 30);
	EXPECT_TRUE(h.is_hermitian());
	EXPECT_EQ(h.dim(), 60);
	EXPECT_EQ(h.matrix().imag().cwiseAbs().maxCoeff(), 0.0);
	p.lambda = -1.0;
	EXPECT_THROW(build_hamiltonian(p, 30), config_error);
	EXPECT_THROW(build_hamiltonian(jcm(0.1), 0), config_error);
}

TEST(ExactEvolver, JcmSplitsIntoTwoLevelBlocks)
{
	const ExactEvolver ev(build_hamiltonian(jcm(0.2), 10));
	EXPECT_EQ(ev.block_count(), 11u); // 9 doublets, |+z,9> and |-z,0>
}

TEST(ExactEvolver, RabiSpectrumFrozen)
{
	// dense diagonalization of the same Hamiltonian at dim 80, computed independently
	ModelParams p = jcm(0.5);
	p.coupling = Coupling::rabi;
	const ExactEvolver ev(build_hamiltonian(p, 80));
	Eigen::VectorXd e = ev.eigenvalues();
	std::sort(e.data(), e.data() + e.size());
	const double expected[] = {-0.6332942354616209, -0.12002383382172743, 0.6953937171281535, 0.825305197023471};
	for(int i = 0; i < 4; ++i)
		EXPECT_NEAR(e(i), expected[i], 1e-11);
}

TEST(ExactEvolver, BlockEigenvaluesMatchDense)
{
	ModelParams p = jcm(0.35);
	p.coupling = Coupling::rabi;
	const auto h = build_hamiltonian(p, 25);
	Eigen::VectorXd blocks = ExactEvolver(h).eigenvalues();
	std::sort(blocks.data(), blocks.data() + blocks.size());
	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> dense(h.matrix());
	EXPECT_LT((blocks - dense.eigenvalues()).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(EvolveExact, JcmCoherentFrozen)
{
	// sum_n p_n cos^2(lambda sqrt(n+1) t), 40-digit arithmetic
	const auto psi0 = up_times(FieldStateSpec::coherent(2.0), 60);
	const double times[] = {10.0, 37.0};
	const auto p = excited_probability_series(ExactEvolver(build_hamiltonian(jcm(0.1), 60)), psi0, times);
	EXPECT_NEAR(p[0], 0.396274491062201, 1e-10);
	EXPECT_NEAR(p[1], 0.5012901942078769, 1e-10);
}

TEST(EvolveExact, DetunedSingleExcitation)
{
	const auto psi0 = up_times(FieldStateSpec::coherent(0.0), 4);
	const double times[] = {3.0, 11.0};
	const auto states = evolve_exact(build_hamiltonian(jcm(0.2, 1.3), 4), psi0, times);
	EXPECT_NEAR(excited_probability(states[0]), 0.702635904533665, 1e-12);
	EXPECT_NEAR(excited_probability(states[1]), 0.9067743277732032, 1e-12);
}

TEST(EvolveExact, TimeZeroIsIdentity)
{
	ModelParams p = jcm(0.1);
	p.coupling = Coupling::rabi;
	const auto psi0 = up_times(FieldStateSpec::displaced_fock(2.0, 1), 60);
	const double t0[] = {0.0};
	const auto s = evolve_exact(build_hamiltonian(p, 60), psi0, t0);
	EXPECT_LT((s[0].amplitudes() - psi0.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EvolveExact, NormPreserved)
{
	for(Coupling c : {Coupling::jcm, Coupling::rabi}) {
		ModelParams p = jcm(0.15);
		p.coupling = c;
		const auto psi0 = up_times(FieldStateSpec::coherent({2.5, 1.0}), 80);
		std::vector<double> times;
		for(int i = 0; i <= 20; ++i)
			times.push_back(7.3 * i);
		for(const auto& s : evolve_exact(build_hamiltonian(p, 80), psi0, times))
			EXPECT_NEAR(s.norm(), 1.0, 1e-9);
	}
}

TEST(EvolveExact, JcmConservesExcitationNumber)
{
	const int dim = 70;
	const auto psi0 = SpinFieldVector::product(Eigen::Vector2cd(0.6, complex{0.0, 0.8}),
	                                           build_field_state(FieldStateSpec::coherent(2.0), dim));
	auto excitations = [dim](const SpinFieldVector& s) {
		double e = 0.0;
		for(int n = 0; n < dim; ++n)
			e += (n + 1) * std::norm(s.up()(n)) + n * std::norm(s.down()(n));
		return e;
	};
	std::vector<double> times{0.0, 5.0, 50.0, 500.0};
	const auto states = evolve_exact(build_hamiltonian(jcm(0.2, 1.4), dim), psi0, times);
	for(const auto& s : states)
		EXPECT_NEAR(excitations(s), excitations(states[0]), 1e-8);
}

TEST(EvolveExact, PopulationSeriesMatchesStates)
{
	ModelParams p = jcm(0.07);
	p.coupling = Coupling::rabi;
	const auto psi0 = up_times(FieldStateSpec::displaced_fock(3.0, 1), 90);
	const ExactEvolver ev(build_hamiltonian(p, 90));
	std::vector<double> times;
	for(int i = 0; i < 300; ++i)
		times.push_back(0.37 * i);
	const auto pop = excited_probability_series(ev, psi0, times);
	const auto states = evolve_exact(ev, psi0, times);
	for(std::size_t i = 0; i < times.size(); ++i)
		EXPECT_NEAR(pop[i], excited_probability(states[i]), 1e-12);
}

TEST(EvolveExact, NoCouplingKeepsSpin)
{
	const auto psi0 = up_times(FieldStateSpec::coherent(3.0), 60);
	const double times[] = {0.0, 10.0, 1000.0};
	for(double p : excited_probability_series(ExactEvolver(build_hamiltonian(jcm(0.0), 60)), psi0, times))
		EXPECT_NEAR(p, 1.0, 1e-12);
}

TEST(EvolveExact, RejectsBadInput)
{
	const ExactEvolver ev(build_hamiltonian(jcm(0.1), 10));
	const auto psi0 = up_times(FieldStateSpec::coherent(0.5), 10);
	const double descending[] = {1.0, 0.5};
	const double negative[] = {-1.0};
	EXPECT_THROW(excited_probability_series(ev, psi0, descending), config_error);
	EXPECT_THROW(excited_probability_series(ev, psi0, negative), config_error);
	const auto wrong = up_times(FieldStateSpec::coherent(0.5), 12);
	EXPECT_THROW(evolve_exact(ev, wrong, std::vector<double>{0.0}), config_error);
	const auto h = OperatorMatrix::general(CMatrix::Identity(4, 4));
	EXPECT_THROW(ExactEvolver{h}, config_error);
	EXPECT_THROW(parse_coupling("dicke"), config_error);
}

TEST(SpectralCache, ReusesDecompositions)
{
	SpectralCache cache;
	ModelParams p = jcm(0.1);
	auto a = cache.get(p, 20);
	p.alpha_mod = 5.0;
	auto b = cache.get(p, 20);
	EXPECT_EQ(a.get(), b.get());
	cache.get(p, 21);
	EXPECT_EQ(cache.size(), 2u);
}
