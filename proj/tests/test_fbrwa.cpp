#include <qcfd/fbrwa.hpp>

#include <gtest/gtest.h>

using namespace qcfd;

namespace {

ModelParams params(Coupling c, double lambda, double alpha, double Omega = 1.0)
{
	ModelParams p;
	p.coupling = c;
	p.lambda = lambda;
	p.alpha_mod = alpha;
	p.Omega = Omega;
	return p;
}

const Vector2c spin_up{1.0, 0.0};

std::vector<double> exact_series(const ModelParams& p, const Vector2c& spin, const FieldStateSpec& f,
                                 const std::vector<double>& t)
{
	const int dim = recommended_fock_dim(f);
	const auto psi0 = SpinFieldVector::product(spin, build_field_state(f, dim));
	return excited_probability_series(ExactEvolver(build_hamiltonian(p, dim)), psi0, t);
}

std::vector<double> grid(double t_end, int n)
{
	std::vector<double> t;
	for(int i = 0; i <= n; ++i)
		t.push_back(t_end * i / n);
	return t;
}

} // namespace

TEST(LambdaEff, HalfLambdaAtJcmResonance)
{
	for(double lambda : {0.01, 0.05, 0.03}) {
		const auto p = params(Coupling::jcm, lambda, 10.0);
		EXPECT_NEAR(lambda_eff(floquet_solve(p), lambda), lambda / 2, 1e-10);
		EXPECT_NEAR(lambda_eff(jcm_analytic_floquet(p), lambda), lambda / 2, 1e-14);
	}
}

TEST(LambdaEff, RabiBelowHalfLambda)
{
	const auto p = params(Coupling::rabi, 0.02, 10.0);
	const double le = lambda_eff(floquet_solve(p), p.lambda);
	EXPECT_GT(le, 0.0);
	EXPECT_LT(le, p.lambda / 2);
}

TEST(ClosedForm, EqualsFbrwaPipeline)
{
	const auto p = params(Coupling::jcm, 0.05, 10.0);
	const auto sol = floquet_solve(p);
	for(int n : {0, 1, 2, 10}) {
		const auto r = make_fbrwa(sol, p, spin_up, FieldStateSpec::displaced_fock(10.0, n));
		for(double t = 0.0; t <= 120.0; t += 0.7)
			ASSERT_NEAR(p_excited_fbrwa(sol, r, t), p_excited_closed_form(ClosedForm::displaced_fock(n, 10.0), p, t),
			            1e-12)
			    << "n=" << n << " t=" << t;
	}
	const auto coherent = make_fbrwa(sol, p, spin_up, FieldStateSpec::coherent(10.0));
	for(double t = 0.0; t <= 120.0; t += 0.7)
		ASSERT_NEAR(p_excited_fbrwa(sol, coherent, t), p_excited_closed_form(ClosedForm::coherent(10.0), p, t), 1e-12);
}

TEST(ClosedForm, PairUsesBetaNotMeanField)
{
	// the reference is <a> = beta + 1/2, yet the resonant FBRWA curve does not depend on it
	const auto field = FieldStateSpec::displaced_pair(10.0, 0.0);
	auto p = params(Coupling::jcm, 0.05, field.mean_amplitude().real());
	EXPECT_DOUBLE_EQ(p.alpha_mod, 10.5);
	const auto sol = floquet_solve(p);
	const auto r = make_fbrwa(sol, p, spin_up, field);
	for(double t = 0.0; t <= 120.0; t += 0.9)
		ASSERT_NEAR(p_excited_fbrwa(sol, r, t), p_excited_closed_form(ClosedForm::displaced_pair(10.0), p, t), 1e-12);
}

TEST(ClosedForm, StartsExcitedAndRejectsOtherRegimes)
{
	const auto p = params(Coupling::jcm, 0.05, 10.0);
	EXPECT_DOUBLE_EQ(p_excited_closed_form(ClosedForm::coherent(10.0), p, 0.0), 1.0);
	EXPECT_DOUBLE_EQ(p_excited_closed_form(ClosedForm::displaced_pair(10.0), p, 0.0), 1.0);
	EXPECT_THROW(p_excited_closed_form(ClosedForm::coherent(10.0), params(Coupling::rabi, 0.05, 10.0), 1.0),
	             config_error);
	EXPECT_THROW(p_excited_closed_form(ClosedForm::coherent(10.0), params(Coupling::jcm, 0.05, 10.0, 1.2), 1.0),
	             config_error);
}

TEST(Fbrwa, OverlapStartsAtOneAndDecays)
{
	const auto p = params(Coupling::rabi, 0.02, 10.0);
	const auto sol = floquet_solve(p);
	const auto r = make_fbrwa(sol, p, spin_up, FieldStateSpec::coherent(10.0));
	EXPECT_NEAR(std::abs(fbrwa_field_overlap(r, 0.0) - 1.0), 0.0, 1e-14);
	EXPECT_LT(std::abs(fbrwa_field_overlap(r, 400.0)), 1e-6);
	EXPECT_NEAR(std::norm(r.proj_plus) + std::norm(r.proj_minus), 1.0, 1e-12);
}

TEST(Fbrwa, RejectsComplexReference)
{
	auto p = params(Coupling::jcm, 0.05, 10.0);
	const auto sol = floquet_solve(p);
	p.alpha_phase = 0.3;
	EXPECT_THROW(make_fbrwa(sol, p, spin_up, FieldStateSpec::coherent(10.0)), config_error);
	EXPECT_THROW(make_fbrwa(sol, params(Coupling::jcm, 0.05, 10.0), Vector2c::Zero(), FieldStateSpec::coherent(10.0)),
	             config_error);
}

TEST(Fbrwa, TracksExactJcmDuringCollapse)
{
	const auto p = params(Coupling::jcm, 0.02, 20.0);
	const auto field = FieldStateSpec::coherent(20.0);
	const auto t = grid(150.0, 300);
	const auto exact = exact_series(p, spin_up, field, t);
	const auto sol = floquet_solve(p);
	const auto r = make_fbrwa(sol, p, spin_up, field);
	for(std::size_t i = 0; i < t.size(); ++i)
		EXPECT_NEAR(p_excited_fbrwa(sol, r, t[i]), exact[i], 0.03) << "t=" << t[i];
}

TEST(CoefficientTables, MatchDirectProjection)
{
	const auto p = params(Coupling::rabi, 0.05, 6.0, 1.1);
	const auto sol = floquet_solve(p);
	const auto tab = qcfd_coefficient_tables(sol, p);
	for(double t : {0.0, 0.3, 2.9, 11.0}) {
		const auto [plus, minus] = floquet_state_at(sol, t);
		// <Psi_i| sigma_+ |Psi_j> = conj(<+z|Psi_i>) <-z|Psi_j>
		auto el = [](const Vector2c& i, const Vector2c& j) { return std::conj(i(0)) * j(1); };
		const complex co = std::exp(-imag_unit * t), ctr = std::exp(imag_unit * t);
		const auto v = tab(t);
		EXPECT_NEAR(std::abs(v.co_pp - el(plus, plus) * co), 0.0, 1e-10);
		EXPECT_NEAR(std::abs(v.co_pm - el(plus, minus) * co), 0.0, 1e-10);
		EXPECT_NEAR(std::abs(v.co_mp - el(minus, plus) * co), 0.0, 1e-10);
		EXPECT_NEAR(std::abs(v.co_mm - el(minus, minus) * co), 0.0, 1e-10);
		EXPECT_NEAR(std::abs(v.ctr_pp - el(plus, plus) * ctr), 0.0, 1e-10);
		EXPECT_NEAR(std::abs(v.ctr_pm - el(plus, minus) * ctr), 0.0, 1e-10);
		EXPECT_NEAR(std::abs(v.ctr_mp - el(minus, plus) * ctr), 0.0, 1e-10);
		EXPECT_NEAR(std::abs(v.ctr_mm - el(minus, minus) * ctr), 0.0, 1e-10);
	}
	const auto s = tab.static_diagonal();
	EXPECT_NEAR(std::abs(s.co_pp + std::conj(s.ctr_pp) - lambda_eff(sol, 1.0)), 0.0, 1e-12);
}

TEST(Qcfd, FullTablesReproduceExactJcm)
{
	const auto p = params(Coupling::jcm, 0.1, 3.0);
	const auto field = FieldStateSpec::coherent(3.0);
	const auto t = grid(120.0, 240);
	const auto exact = exact_series(p, spin_up, field, t);
	const auto sol = floquet_solve(p);
	const int dim = qcfd_recommended_fock_dim(field, p, lambda_eff(sol, p.lambda), t.back());
	const auto q = qcfd_integrate(sol, p, spin_up, field, t, dim);
	for(std::size_t i = 0; i < t.size(); ++i)
		ASSERT_NEAR(q[i].p_excited, exact[i], 1e-6) << "t=" << t[i];
}

TEST(Qcfd, FullTablesReproduceExactRabi)
{
	const auto p = params(Coupling::rabi, 0.05, 4.0, 0.9);
	const Vector2c spin = Vector2c(1.0, complex{0.0, 1.0}) / std::sqrt(2.0);
	const auto field = FieldStateSpec::displaced_fock(4.0, 1);
	const auto t = grid(60.0, 120);
	const auto exact = exact_series(p, spin, field, t);
	const auto sol = floquet_solve(p);
	const int dim = qcfd_recommended_fock_dim(field, p, lambda_eff(sol, p.lambda), t.back());
	const auto q = qcfd_integrate(sol, p, spin, field, t, dim);
	for(std::size_t i = 0; i < t.size(); ++i)
		ASSERT_NEAR(q[i].p_excited, exact[i], 1e-6) << "t=" << t[i];
}

TEST(Qcfd, StaticTermsReproduceClosedFormFbrwa)
{
	const auto p = params(Coupling::rabi, 0.03, 8.0);
	const auto field = FieldStateSpec::coherent(8.0);
	const auto t = grid(150.0, 150);
	const auto sol = floquet_solve(p);
	const auto r = make_fbrwa(sol, p, spin_up, field);
	QcfdOptions opt;
	opt.terms = QcfdTerms::fbrwa;
	const int dim = qcfd_recommended_fock_dim(field, p, r.lambda_eff, t.back());
	const auto q = qcfd_integrate(sol, p, spin_up, field, t, dim, opt);
	for(std::size_t i = 0; i < t.size(); ++i)
		ASSERT_NEAR(q[i].p_excited, p_excited_fbrwa(sol, r, t[i]), 1e-7) << "t=" << t[i];
}

TEST(Qcfd, ConservesNormAndFlagsSmallTruncation)
{
	const auto p = params(Coupling::rabi, 0.05, 4.0);
	const auto field = FieldStateSpec::coherent(4.0);
	const auto sol = floquet_solve(p);
	const auto t = grid(50.0, 50);
	for(const auto& s : qcfd_integrate(sol, p, spin_up, field, t, 60))
		EXPECT_NEAR(s.state.total_norm(), 1.0, 1e-8);
	EXPECT_THROW(qcfd_integrate(sol, p, spin_up, field, grid(2000.0, 10), 12), numeric_error);
	EXPECT_THROW(qcfd_integrate(sol, p, spin_up, field, t, 1), config_error);
}
