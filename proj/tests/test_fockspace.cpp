#include <qcfd/fockspace.hpp>

#include <gtest/gtest.h>

using namespace qcfd;

namespace {

// reference values from a 40-digit truncated matrix exponential at dim 60
struct OverlapCase
{
	int m, n;
	complex beta;
	complex expected;
};

const OverlapCase frozen_overlaps[] = {
    {2, 5, {0.3, 0.4}, {0.11705225045815332, 0.04401964974494653}},
    {5, 2, {0.3, 0.4}, {-0.11705225045815332, 0.04401964974494653}},
    {0, 3, {-1.1, 0.25}, {0.24303035010847907, 0.19271188575505646}},
    {4, 4, {1.5, 0.0}, {0.2147969205422675, 0.0}},
};

} // namespace

TEST(Ladder, AnnihilationLowersFockIndex)
{
	const auto a = annihilation_matrix(6);
	for(int n = 0; n < 6; ++n)
		for(int m = 0; m < 6; ++m)
			EXPECT_DOUBLE_EQ(a(m, n).real(), m == n - 1 ? std::sqrt(double(n)) : 0.0);
	EXPECT_THROW(annihilation_matrix(0), config_error);
}

TEST(Ladder, CommutatorIsIdentityAwayFromCutoff)
{
	const int dim = 12;
	const CMatrix a = annihilation_matrix(dim).matrix();
	const CMatrix c = a * a.adjoint() - a.adjoint() * a;
	for(int i = 0; i < dim - 1; ++i)
		EXPECT_NEAR(std::abs(c(i, i) - 1.0), 0.0, 1e-14);
	EXPECT_NEAR(c(dim - 1, dim - 1).real(), -(dim - 1), 1e-12);
}

TEST(Laguerre, FrozenValues)
{
	EXPECT_NEAR(laguerre(5, 2, 1.7), -2.8027922499999995, 1e-13);
	EXPECT_NEAR(laguerre(10, 0, 3.3), -0.21194877672739088, 1e-13);
	EXPECT_DOUBLE_EQ(laguerre(0, 3, 2.0), 1.0);
	EXPECT_DOUBLE_EQ(laguerre(1, 0, 0.25), 0.75);
}

TEST(DisplacedFockOverlap, FrozenValues)
{
	for(const auto& c : frozen_overlaps) {
		const complex got = displaced_fock_overlap(c.m, c.n, c.beta);
		EXPECT_NEAR(std::abs(got - c.expected), 0.0, 1e-14) << "m=" << c.m << " n=" << c.n;
	}
}

TEST(DisplacedFockOverlap, GroundToFirstExcited)
{
	const complex beta{0.7, -0.2};
	const complex expected = -std::conj(beta) * std::exp(-0.5 * std::norm(beta));
	EXPECT_NEAR(std::abs(displaced_fock_overlap(0, 1, beta) - expected), 0.0, 1e-15);
}

TEST(DisplacedFockOverlap, MatchesMatrixExponentialSweep)
{
	const int dim = 90;
	for(complex beta : {complex{0.0, 0.0}, complex{0.5, 0.0}, complex{-1.2, 0.8}, complex{0.3, -2.1}}) {
		const CMatrix d = displacement_matrix(beta, dim).matrix();
		for(int m = 0; m <= 15; ++m)
			for(int n = 0; n <= 15; ++n)
				ASSERT_NEAR(std::abs(displaced_fock_overlap(m, n, beta) - d(m, n)), 0.0, 1e-10)
				    << "m=" << m << " n=" << n << " beta=" << beta;
	}
}

TEST(DisplacedFockOverlap, AdjointIsInverseDisplacement)
{
	const complex beta{1.3, 0.45};
	for(int m = 0; m < 10; ++m)
		for(int n = 0; n < 10; ++n)
			EXPECT_NEAR(std::abs(displaced_fock_overlap(m, n, beta) - std::conj(displaced_fock_overlap(n, m, -beta))),
			            0.0, 1e-14);
}

TEST(DisplacedFockOverlap, LargeArgumentStaysFinite)
{
	const complex v = displaced_fock_overlap(1600, 1602, {40.0, 0.0});
	EXPECT_TRUE(is_finite(v));
	EXPECT_LT(std::abs(v), 1.0);
	EXPECT_THROW(displaced_fock_overlap(-1, 0, 1.0), config_error);
}

TEST(Displacement, MatrixIsUnitaryWhenItFits)
{
	const auto d = displacement_matrix({1.0, 0.5}, 60);
	EXPECT_TRUE(d.is_unitary());
	EXPECT_TRUE(displacement_fits({1.0, 0.5}, 60));
	EXPECT_FALSE(displacement_fits({8.0, 0.0}, 20));
}

TEST(Displacement, CompositionPhase)
{
	const int dim = 80;
	const complex a{0.4, -0.3}, b{-0.2, 0.9};
	const CMatrix lhs = displacement_matrix(a, dim).matrix() * displacement_matrix(b, dim).matrix();
	const CMatrix rhs = displacement_composition_phase(a, b) * displacement_matrix(a + b, dim).matrix();
	EXPECT_LT((lhs - rhs).topLeftCorner(20, 20).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FieldState, CoherentStatistics)
{
	const complex alpha{3.0, -1.0};
	const auto spec = FieldStateSpec::coherent(alpha);
	const auto v = build_field_state(spec, recommended_fock_dim(spec));
	EXPECT_NEAR(v.norm(), 1.0, 1e-9);
	EXPECT_NEAR(v.mean_photon_number(), std::norm(alpha), 1e-8);
	EXPECT_NEAR(std::abs(v.mean_amplitude() - alpha), 0.0, 1e-8);
	EXPECT_NEAR(std::abs(spec.mean_amplitude() - alpha), 0.0, 1e-14);
}

TEST(FieldState, DisplacedFockPhotonNumber)
{
	const auto spec = FieldStateSpec::displaced_fock(4.0, 3);
	const auto v = build_field_state(spec, recommended_fock_dim(spec));
	EXPECT_NEAR(v.mean_photon_number(), 16.0 + 3.0, 1e-8);
	EXPECT_NEAR(std::abs(spec.mean_amplitude() - 4.0), 0.0, 1e-14);
}

TEST(FieldState, DisplacedPairMeanAmplitude)
{
	const auto spec = FieldStateSpec::displaced_pair(10.0, 0.0);
	EXPECT_NEAR(std::abs(spec.mean_amplitude() - 10.5), 0.0, 1e-12);
	const auto v = build_field_state(spec, recommended_fock_dim(spec));
	EXPECT_NEAR(std::abs(v.mean_amplitude() - 10.5), 0.0, 1e-8);
	EXPECT_NEAR(spec.inner_product(spec).real(), 1.0, 1e-14);
}

TEST(FieldState, SuperpositionIsNormalized)
{
	const auto spec = FieldStateSpec::superposition({{2.0, 0, 1.0}, {-2.0, 0, 1.0}});
	EXPECT_NEAR(spec.inner_product(spec).real(), 1.0, 1e-14);
	const auto v = build_field_state(spec, recommended_fock_dim(spec));
	EXPECT_NEAR(v.norm(), 1.0, 1e-9);
	EXPECT_THROW(FieldStateSpec::superposition({}), config_error);
	EXPECT_THROW(FieldStateSpec::superposition({{1.0, 0, 1.0}, {1.0, 0, -1.0}}), config_error);
}

TEST(FieldState, DisplacementExpectationMatchesVector)
{
	const auto spec = FieldStateSpec::displaced_pair({1.5, 0.2}, 0.7);
	const int dim = 60;
	const CVector v = build_field_state(spec, dim).amplitudes();
	const complex delta{0.3, -0.6};
	const complex brute = v.dot(displacement_matrix(delta, dim).matrix() * v);
	EXPECT_NEAR(std::abs(spec.displacement_expectation(delta) - brute), 0.0, 1e-10);
}

TEST(FieldState, DisplacedAppliesOperator)
{
	const auto spec = FieldStateSpec::displaced_fock({0.5, 0.5}, 2);
	const complex gamma{-0.8, 0.1};
	const int dim = 70;
	const CVector direct = build_field_state(spec.displaced(gamma), dim).amplitudes();
	const CVector brute = displacement_matrix(gamma, dim).matrix() * build_field_state(spec, dim).amplitudes();
	EXPECT_LT((direct - brute).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Truncation, RuleAndError)
{
	EXPECT_EQ(fock_dim_for_radius(0.0), 20);
	EXPECT_EQ(fock_dim_for_radius(10.0), 200);
	const auto spec = FieldStateSpec::coherent(6.0);
	try {
		build_field_state(spec, 20);
		FAIL() << "expected truncation_error";
	} catch(const truncation_error& e) {
		EXPECT_GT(e.suggested_dim(), 20);
		EXPECT_NO_THROW(build_field_state(spec, e.suggested_dim()));
	}
	EXPECT_THROW(build_field_state(spec, 0), config_error);
}

TEST(OperatorMatrix, FlagsAreChecked)
{
	CMatrix m(2, 2);
	m << 1.0, complex{0.0, 1.0}, complex{0.0, 1.0}, 2.0;
	EXPECT_THROW(OperatorMatrix::hermitian(m), numeric_error);
	EXPECT_FALSE(OperatorMatrix::general(m).is_hermitian());
	EXPECT_THROW(OperatorMatrix::unitary(m), numeric_error);
	EXPECT_THROW(OperatorMatrix::general(CMatrix(2, 3)), config_error);
}
