#pragma once

// Field dynamics attached to the semiclassical Floquet states.
//
// The joint state in the field interaction picture, displaced by the reference
// amplitude alpha, is written |Psi_+(t)>|phi_+(t)> + |Psi_-(t)>|phi_-(t)>. The
// quantum interaction H_q^I(t) then acts on the pair of field components through
// time-periodic Floquet-basis coefficient tables. Keeping only the static
// Floquet-diagonal terms (FBRWA) leaves lambda_eff (a + a^dag)(P_+ - P_-), which
// displaces the two components in opposite directions and is solved in closed
// form; integrating the full tables is exact.

#include "errors.hpp"
#include "floquet.hpp"
#include "fockspace.hpp"
#include "fullmodel.hpp"
#include "ode.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qcfd {

/// lambda * sum_k A_{2k} (B_{2k+1} + B_{2k-1}).
inline double lambda_eff(const FloquetSolution& sol, double lambda)
{
	double s = 0.0;
	for(int h = sol.min_a_harmonic(); h <= sol.max_a_harmonic(); h += 2)
		s += sol.A(h) * (sol.B(h + 1) + sol.B(h - 1));
	return lambda * s;
}

inline void require_real_reference(const ModelParams& p)
{
	if(p.alpha_phase != 0.0)
		throw config_error("Floquet-based engines require a real reference displacement (alpha_phase = 0)");
}

/// Everything the closed-form FBRWA solution needs beyond the Floquet pair.
struct FbrwaResult
{
	double lambda_eff = 0.0;
	/// <Psi_+(0)|chi_0> and <Psi_-(0)|chi_0> for the initial spin state chi_0
	complex proj_plus;
	complex proj_minus;
	/// initial field state in the lab frame
	FieldStateSpec field = FieldStateSpec::coherent(0.0);
	/// reference displacement |alpha| (real)
	double alpha_mod = 0.0;

	/// eta_{+-}(t) = -+ i lambda_eff t
	[[nodiscard]] complex eta(int sign, double t) const { return -double(sign) * imag_unit * (lambda_eff * t); }
};

inline Vector2c normalized_spin(const Vector2c& spin)
{
	const double n = spin.norm();
	if(!(n > 0.0) || !std::isfinite(n))
		throw config_error("initial spin state must be a non-zero finite vector");
	return spin / n;
}

inline FbrwaResult make_fbrwa(const FloquetSolution& sol, const ModelParams& p, const Vector2c& spin0,
                              const FieldStateSpec& field)
{
	p.validate();
	require_real_reference(p);
	const Vector2c chi = normalized_spin(spin0);
	const auto [plus, minus] = floquet_state_at(sol, 0.0);
	FbrwaResult r;
	r.lambda_eff = lambda_eff(sol, p.lambda);
	r.proj_plus = plus.dot(chi); // Eigen's dot conjugates the left operand
	r.proj_minus = minus.dot(chi);
	r.field = field;
	r.alpha_mod = p.alpha_mod;
	return r;
}

/// <phi_-(t)|phi_+(t)> = e^{4 i lambda_eff |alpha| t} <phi_0| D^dag(eta_-) D(eta_+) |phi_0>,
/// evaluated from the closed-form displaced Fock matrix elements.
inline complex fbrwa_field_overlap(const FbrwaResult& r, double t)
{
	const complex ep = r.eta(+1, t);
	const complex em = r.eta(-1, t);
	const complex phase = displacement_composition_phase(-em, ep);
	const complex frame = std::exp(imag_unit * (4.0 * r.lambda_eff * r.alpha_mod * t));
	return frame * phase * r.field.displacement_expectation(ep - em);
}

/// P(+z) under the FBRWA for an arbitrary initial spin state:
/// | p+ <+z|Psi_+(t)> |phi_+> + p- <+z|Psi_-(t)> |phi_-> |^2.
inline double p_excited_fbrwa(const FloquetSolution& sol, const FbrwaResult& r, double t)
{
	const complex up = std::exp(-imag_unit * (sol.q_plus * t)) * sol.a_plus(t) * r.proj_plus;
	const complex um = std::exp(-imag_unit * (sol.q_minus * t)) * sol.b_minus(t) * r.proj_minus;
	const complex overlap = fbrwa_field_overlap(r, t); // <phi_-|phi_+>
	return std::norm(up) + std::norm(um) + 2.0 * (std::conj(up) * um * std::conj(overlap)).real();
}

/// Closed forms valid for the resonant JCM with the spin initially in |+z>.
struct ClosedForm
{
	enum class Kind { coherent, displaced_fock, displaced_pair };
	Kind kind = Kind::coherent;
	/// Fock index for displaced_fock
	int n = 0;
	/// |alpha| (coherent, displaced_fock) or |beta| (displaced_pair)
	double amplitude = 0.0;

	static ClosedForm coherent(double amplitude) { return {Kind::coherent, 0, amplitude}; }
	static ClosedForm displaced_fock(int n, double amplitude) { return {Kind::displaced_fock, n, amplitude}; }
	/// (|beta,0> + e^{-i xi}|beta,1>)/sqrt(2) with beta = |beta| e^{-i phi}, xi = phi
	static ClosedForm displaced_pair(double amplitude) { return {Kind::displaced_pair, 0, amplitude}; }
};

inline double p_excited_closed_form(const ClosedForm& form, const ModelParams& p, double t)
{
	p.validate();
	if(p.coupling != Coupling::jcm || !p.resonant())
		throw config_error("closed-form collapse formulas need the resonant jcm; use the fbrwa engine instead");
	const double lt = p.lambda * t;
	const double envelope = std::exp(-0.5 * lt * lt);
	const double phase = 2.0 * p.lambda * form.amplitude * t;
	switch(form.kind) {
	case ClosedForm::Kind::coherent:
		return 0.5 + 0.5 * envelope * std::cos(phase);
	case ClosedForm::Kind::displaced_fock:
		return 0.5 + 0.5 * envelope * laguerre(form.n, 0, lt * lt) * std::cos(phase);
	case ClosedForm::Kind::displaced_pair:
		return 0.5 + 0.5 * envelope * ((1.0 - 0.5 * lt * lt) * std::cos(phase) - lt * std::sin(phase));
	}
	throw config_error("unknown closed form");
}

/// A truncated Fourier series sum_h c_h e^{i h omega0 t}.
class FourierSeries
{
public:
	FourierSeries() = default;
	FourierSeries(int min_h, int max_h) : min_h_{min_h}, coeffs_(static_cast<std::size_t>(max_h - min_h + 1)) {}

	void add(int h, complex c) { coeffs_.at(static_cast<std::size_t>(h - min_h_)) += c; }

	[[nodiscard]] complex coefficient(int h) const
	{
		const int i = h - min_h_;
		return (i >= 0 && i < static_cast<int>(coeffs_.size())) ? coeffs_[static_cast<std::size_t>(i)] : complex{};
	}

	[[nodiscard]] complex operator()(double omega0_t) const
	{
		if(coeffs_.empty())
			return {};
		const complex z = std::exp(imag_unit * omega0_t);
		complex zh = std::exp(imag_unit * (min_h_ * omega0_t));
		complex s{};
		for(const complex& c : coeffs_) {
			s += c * zh;
			zh *= z;
		}
		return s;
	}

	[[nodiscard]] int min_harmonic() const noexcept { return min_h_; }
	[[nodiscard]] int max_harmonic() const noexcept { return min_h_ + static_cast<int>(coeffs_.size()) - 1; }

private:
	int min_h_ = 0;
	std::vector<complex> coeffs_;
};

/// Floquet-basis matrix elements of the two spin-raising interaction terms,
///   co_ij(t)  = <Psi_i(t)| sigma_+ |Psi_j(t)> e^{-i omega0 t}   (multiplies lambda a),
///   ctr_ij(t) = <Psi_i(t)| sigma_+ |Psi_j(t)> e^{+i omega0 t}   (multiplies lambda a^dag, rabi only),
/// stored as the double sums over A_{2k}, B_{2l+1}. Off-diagonal entries carry
/// the additional e^{-+i (q+ - q-) t}.
struct QcfdCoefficientTables
{
	struct Values
	{
		complex co_pp, co_pm, co_mp, co_mm;
		complex ctr_pp, ctr_pm, ctr_mp, ctr_mm;
	};

	double omega0 = 1.0;
	double quasienergy_gap = 0.0; // q+ - q-
	bool counter_rotating = false;
	FourierSeries co_diag;  // co_pp; co_mm = -co_pp
	FourierSeries co_mp;    // times e^{-i gap t}
	FourierSeries co_pm;    // times -e^{+i gap t}
	FourierSeries ctr_diag; // ctr_pp; ctr_mm = -ctr_pp
	FourierSeries ctr_mp;   // times e^{-i gap t}
	FourierSeries ctr_pm;   // times -e^{+i gap t}

	[[nodiscard]] Values operator()(double t) const
	{
		const double wt = omega0 * t;
		const complex down = std::exp(-imag_unit * (quasienergy_gap * t));
		Values v;
		v.co_pp = co_diag(wt);
		v.co_mm = -v.co_pp;
		v.co_mp = down * co_mp(wt);
		v.co_pm = -std::conj(down) * co_pm(wt);
		if(counter_rotating) {
			v.ctr_pp = ctr_diag(wt);
			v.ctr_mm = -v.ctr_pp;
			v.ctr_mp = down * ctr_mp(wt);
			v.ctr_pm = -std::conj(down) * ctr_pm(wt);
		}
		return v;
	}

	/// Zero-frequency Floquet-diagonal part, the only piece the FBRWA keeps.
	[[nodiscard]] Values static_diagonal() const
	{
		Values v;
		v.co_pp = co_diag.coefficient(0);
		v.co_mm = -v.co_pp;
		if(counter_rotating) {
			v.ctr_pp = ctr_diag.coefficient(0);
			v.ctr_mm = -v.ctr_pp;
		}
		return v;
	}
};

inline QcfdCoefficientTables qcfd_coefficient_tables(const FloquetSolution& sol, const ModelParams& p)
{
	QcfdCoefficientTables tab;
	tab.omega0 = sol.omega0;
	tab.quasienergy_gap = sol.q_plus - sol.q_minus;
	tab.counter_rotating = p.coupling == Coupling::rabi;
	if(p.lambda == 0.0)
		return tab; // all tables vanish

	const int amin = sol.min_a_harmonic(), amax = sol.max_a_harmonic();
	const int bmin = sol.min_b_harmonic(), bmax = sol.max_b_harmonic();
	// harmonic ranges of the products below
	const int span = (amax - amin) + (bmax - bmin) + 4;
	tab.co_diag = FourierSeries(-span, span);
	tab.ctr_diag = FourierSeries(-span, span);
	tab.co_mp = FourierSeries(-span, span);
	tab.ctr_mp = FourierSeries(-span, span);
	tab.co_pm = FourierSeries(-span, span);
	tab.ctr_pm = FourierSeries(-span, span);

	for(int ha = amin; ha <= amax; ha += 2) {     // ha = 2k
		for(int hb = bmin; hb <= bmax; hb += 2) { // hb = 2l+1
			const double ab = sol.A(ha) * sol.B(hb);
			tab.co_diag.add(hb - 1 - ha, ab);  // e^{2(l-k) i w t}
			tab.ctr_diag.add(hb + 1 - ha, ab); // e^{2(l-k+1) i w t}
		}
	}
	for(int h1 = bmin; h1 <= bmax; h1 += 2) {
		for(int h2 = bmin; h2 <= bmax; h2 += 2) {
			const double bb = sol.B(h1) * sol.B(h2);
			tab.co_mp.add(h1 + h2 - 1, bb);  // e^{(2k+2l+1) i w t}
			tab.ctr_mp.add(h1 + h2 + 1, bb); // e^{(2k+2l+3) i w t}
		}
	}
	for(int h1 = amin; h1 <= amax; h1 += 2) {
		for(int h2 = amin; h2 <= amax; h2 += 2) {
			const double aa = sol.A(h1) * sol.A(h2);
			tab.co_pm.add(-(h1 + h2 + 1), aa);  // e^{-(2k+2l+1) i w t}
			tab.ctr_pm.add(-(h1 + h2 - 1), aa); // e^{-(2k+2l-1) i w t}
		}
	}
	return tab;
}

/// Which parts of the Floquet-basis interaction drive the field components.
enum class QcfdTerms {
	full,             ///< exact: every table entry
	floquet_diagonal, ///< drop Floquet off-diagonal (transition) terms
	fbrwa,            ///< static Floquet-diagonal terms only
};

struct QcfdOptions
{
	QcfdTerms terms = QcfdTerms::full;
	double rtol = 1e-10;
	double atol = 1e-12;
	/// allowed drift of sum_n |c+^n|^2 + |c-^n|^2
	double norm_tol = 1e-6;
	/// allowed population of the highest Fock level
	double boundary_tol = 1e-8;
};

/// Field amplitudes c_{+-}^n attached to |Psi_{+-}(t)>, in the displaced
/// interaction-picture Fock basis.
struct QcfdState
{
	int fock_dim = 0;
	CVector c_plus;
	CVector c_minus;

	[[nodiscard]] double total_norm() const { return c_plus.squaredNorm() + c_minus.squaredNorm(); }
	[[nodiscard]] double boundary_population() const
	{
		return std::norm(c_plus(fock_dim - 1)) + std::norm(c_minus(fock_dim - 1));
	}
};

struct QcfdSample
{
	double t = 0.0;
	QcfdState state;
	double p_excited = 0.0;
};

/// P(+z) = || <+z|Psi_+(t)> phi_+ + <+z|Psi_-(t)> phi_- ||^2. The field-frame
/// transformations are unitary on the field alone and drop out of the norm.
inline double qcfd_excited_probability(const FloquetSolution& sol, const QcfdState& s, double t)
{
	const complex up = std::exp(-imag_unit * (sol.q_plus * t)) * sol.a_plus(t);
	const complex um = std::exp(-imag_unit * (sol.q_minus * t)) * sol.b_minus(t);
	return (up * s.c_plus + um * s.c_minus).squaredNorm();
}

/// Truncation for the displaced frame: field extent plus the FBRWA drift.
inline int qcfd_recommended_fock_dim(const FieldStateSpec& field, const ModelParams& p, double lam_eff, double t_max)
{
	return fock_dim_for_radius(field.displaced(-p.alpha()).phase_space_extent() + std::abs(lam_eff) * t_max);
}

/// Integrates the coupled field equations
///   i d/dt |phi_+-> = <Psi_+-|H_q^I|Psi_+->|phi_+-> + <Psi_+-|H_q^I|Psi_-+>|phi_-+>
/// with the adaptive Dormand-Prince pair, sampling at `times`.
inline std::vector<QcfdSample> qcfd_integrate(const FloquetSolution& sol, const ModelParams& p, const Vector2c& spin0,
                                              const FieldStateSpec& field, std::span<const double> times,
                                              int fock_dim, const QcfdOptions& opt = {})
{
	p.validate();
	require_real_reference(p);
	check_times(times);
	if(fock_dim < 2)
		throw config_error("qcfd_integrate requires fock_dim >= 2");
	const int N = fock_dim;
	const QcfdCoefficientTables tables = qcfd_coefficient_tables(sol, p);
	const QcfdCoefficientTables::Values fixed = tables.static_diagonal();
	const double r = tables.counter_rotating ? 1.0 : 0.0;

	// initial condition in the displaced frame
	const FockVector chi = build_field_state(field.displaced(-p.alpha()), N);
	const auto [psi_p, psi_m] = floquet_state_at(sol, 0.0);
	const Vector2c spin = normalized_spin(spin0);
	CVector y(2 * N);
	y.head(N) = psi_p.dot(spin) * chi.amplitudes();
	y.tail(N) = psi_m.dot(spin) * chi.amplitudes();

	Eigen::VectorXd sq(N); // sqrt(n)
	for(int n = 0; n < N; ++n)
		sq(n) = std::sqrt(double(n));
	const double lam = p.lambda;
	const QcfdTerms terms = opt.terms;

	auto rhs = [&](double t, const CVector& v) -> CVector {
		QcfdCoefficientTables::Values c = terms == QcfdTerms::fbrwa ? fixed : tables(t);
		if(terms != QcfdTerms::full) {
			c.co_pm = c.co_mp = c.ctr_pm = c.ctr_mp = complex{};
		}
		// coefficients of b and b^dag acting on each component
		const complex x_pp = c.co_pp + r * std::conj(c.ctr_pp), y_pp = std::conj(c.co_pp) + r * c.ctr_pp;
		const complex x_pm = c.co_pm + r * std::conj(c.ctr_mp), y_pm = std::conj(c.co_mp) + r * c.ctr_pm;
		const complex x_mm = c.co_mm + r * std::conj(c.ctr_mm), y_mm = std::conj(c.co_mm) + r * c.ctr_mm;
		const complex x_mp = c.co_mp + r * std::conj(c.ctr_pm), y_mp = std::conj(c.co_pm) + r * c.ctr_mp;
		const complex* cp = v.data();
		const complex* cm = v.data() + N;
		CVector out(2 * N);
		for(int n = 0; n < N; ++n) {
			// (b v)_n = sqrt(n+1) v_{n+1}, (b^dag v)_n = sqrt(n) v_{n-1}
			const complex bp = n + 1 < N ? sq(n + 1) * cp[n + 1] : complex{};
			const complex bm = n + 1 < N ? sq(n + 1) * cm[n + 1] : complex{};
			const complex dp = n > 0 ? sq(n) * cp[n - 1] : complex{};
			const complex dm = n > 0 ? sq(n) * cm[n - 1] : complex{};
			out(n) = -imag_unit * lam * (x_pp * bp + y_pp * dp + x_pm * bm + y_pm * dm);
			out(N + n) = -imag_unit * lam * (x_mm * bm + y_mm * dm + x_mp * bp + y_mp * dp);
		}
		return out;
	};

	OdeOptions ode;
	ode.rtol = opt.rtol;
	ode.atol = opt.atol;
	ode.max_step = sol.omega0 > 0.0 ? 2.0 * std::numbers::pi / sol.omega0 / 16.0 : ode.max_step;
	DormandPrince<CVector> stepper(ode);

	const double n0 = y.squaredNorm();
	std::vector<QcfdSample> out;
	out.reserve(times.size());
	double t = 0.0;
	for(double target : times) {
		stepper.advance(rhs, t, y, target);
		QcfdSample s;
		s.t = target;
		s.state = {N, y.head(N), y.tail(N)};
		if(std::abs(s.state.total_norm() - n0) > opt.norm_tol)
			throw numeric_error("qcfd norm drift " + std::to_string(s.state.total_norm() - n0) + " at t = "
			                    + std::to_string(target) + "; tighten the step tolerance");
		if(s.state.boundary_population() > opt.boundary_tol)
			throw truncation_error("qcfd field reached the Fock boundary at t = " + std::to_string(target),
			                       N + N / 2);
		s.p_excited = qcfd_excited_probability(sol, s.state, target);
		out.push_back(std::move(s));
	}
	return out;
}

} // namespace qcfd
