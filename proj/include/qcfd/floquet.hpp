#pragma once

// Floquet solution of the periodic 2x2 semiclassical Hamiltonian.
//
// Both couplings satisfy H(t + T/2) = sigma_z H(t) sigma_z, so the half-period
// map V = sigma_z U(T/2, 0) commutes with the generalized parity and its
// eigenvectors are Floquet states whose +z component carries only even
// harmonics. V is degenerate exactly when q+ - q- is an odd multiple of omega0,
// while the full monodromy U(T) = V^2 is also degenerate at even multiples
// (e.g. the resonant JCM at lambda |alpha| = omega0/2, where U(T) = 1).

#include "errors.hpp"
#include "fockspace.hpp"
#include "fullmodel.hpp"
#include "ode.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace qcfd {

using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;

/// H_sc(t) = Omega/2 sigma_z + lambda [f(x, x^*) sigma_+ + h.c.], x = |alpha| e^{-i(omega0 t + phi)}.
inline Matrix2c semiclassical_hamiltonian(const ModelParams& p, double t)
{
	const complex x = std::polar(p.alpha_mod, -(p.omega0 * t + p.alpha_phase));
	const complex f = p.coupling == Coupling::jcm ? x : complex{2.0 * x.real()};
	Matrix2c h;
	h << 0.5 * p.Omega, p.lambda * f, p.lambda * std::conj(f), -0.5 * p.Omega;
	return h;
}

inline OdeOptions floquet_ode_options()
{
	OdeOptions opt;
	opt.rtol = 1e-13;
	opt.atol = 1e-15;
	return opt;
}

/// U(t1, t0) applied to `u` (a 2-vector or 2x2 matrix).
template <class State>
State propagate_semiclassical(const ModelParams& p, State u, double t0, double t1,
                              OdeOptions opt = floquet_ode_options())
{
	DormandPrince<State> stepper(opt);
	auto rhs = [&p](double t, const State& y) -> State { return -imag_unit * (semiclassical_hamiltonian(p, t) * y); };
	stepper.advance(rhs, t0, u, t1);
	return u;
}

struct Monodromy
{
	Matrix2c propagator;
	/// integral of tr H_sc over one period; det U = exp(-i * trace_integral)
	double trace_integral = 0.0;
};

/// One-period propagator U(T, 0), T = 2 pi / omega0.
inline Monodromy monodromy(const ModelParams& p)
{
	p.validate();
	const double period = p.period();
	Monodromy m;
	m.propagator = propagate_semiclassical<Matrix2c>(p, Matrix2c::Identity(), 0.0, period);
	const double dev = (m.propagator.adjoint() * m.propagator - Matrix2c::Identity()).cwiseAbs().maxCoeff();
	if(!(dev < 1e-10))
		throw numeric_error("monodromy unitarity violated by " + std::to_string(dev));
	// composite Simpson on tr H_sc
	constexpr int n = 512;
	const double h = period / n;
	double s = 0.0;
	for(int i = 0; i <= n; ++i) {
		const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
		s += w * semiclassical_hamiltonian(p, i * h).trace().real();
	}
	m.trace_integral = s * h / 3.0;
	return m;
}

/// V = sigma_z U(T/2, 0).
inline Matrix2c half_period_map(const ModelParams& p)
{
	Matrix2c v = propagate_semiclassical<Matrix2c>(p, Matrix2c::Identity(), 0.0, 0.5 * p.period());
	v.row(1) *= -1.0;
	return v;
}

/// Quasienergies, real Fourier coefficients A_{2k} (k = -K..K) and
/// B_{2l+1} (l = -K-1..K) of the Floquet pair
///   |Psi_+(t)> = e^{-i q+ t} ( A_+(t)|+z> + B_+(t)|-z>),
///   |Psi_-(t)> = e^{-i q- t} (-A_-(t)|-z> + B_-(t)|+z>),
/// A_{+-}(t) = sum_k A_{2k} e^{+-2k i omega0 t}, B_{+-}(t) = sum_l B_{2l+1} e^{+-(2l+1) i omega0 t}.
struct FloquetSolution
{
	double q_plus = 0.0;
	double q_minus = 0.0;
	double omega0 = 1.0;
	int harmonic_cutoff = 0;
	int samples_per_period = 0;
	std::vector<double> a_coeffs; // A_{2k} at index k + K
	std::vector<double> b_coeffs; // B_{2l+1} at index l + K + 1
	/// largest imaginary part discarded when the coefficients were made real
	double gauge_residual = 0.0;
	/// largest odd harmonic in the +z part or even harmonic in the -z part
	double parity_leakage = 0.0;

	/// A_{h} for even h, zero outside the stored range.
	[[nodiscard]] double A(int h) const
	{
		if(h % 2 != 0)
			return 0.0;
		const int i = h / 2 + harmonic_cutoff;
		return (i >= 0 && i < static_cast<int>(a_coeffs.size())) ? a_coeffs[static_cast<std::size_t>(i)] : 0.0;
	}

	/// B_{h} for odd h, zero outside the stored range.
	[[nodiscard]] double B(int h) const
	{
		if(h % 2 == 0)
			return 0.0;
		const int i = (h - 1) / 2 + harmonic_cutoff + 1;
		return (i >= 0 && i < static_cast<int>(b_coeffs.size())) ? b_coeffs[static_cast<std::size_t>(i)] : 0.0;
	}

	[[nodiscard]] int min_a_harmonic() const { return -2 * harmonic_cutoff; }
	[[nodiscard]] int max_a_harmonic() const { return 2 * harmonic_cutoff; }
	[[nodiscard]] int min_b_harmonic() const { return -2 * harmonic_cutoff - 1; }
	[[nodiscard]] int max_b_harmonic() const { return 2 * harmonic_cutoff + 1; }

	/// sum_k A_{2k}^2 + sum_l B_{2l+1}^2
	[[nodiscard]] double coefficient_norm() const
	{
		double s = 0.0;
		for(double a : a_coeffs)
			s += a * a;
		for(double b : b_coeffs)
			s += b * b;
		return s;
	}

	/// A_+(t); A_-(t) is its complex conjugate.
	[[nodiscard]] complex a_plus(double t) const
	{
		complex s{};
		for(int h = min_a_harmonic(); h <= max_a_harmonic(); h += 2)
			s += A(h) * std::exp(imag_unit * (h * omega0 * t));
		return s;
	}

	/// B_+(t); B_-(t) is its complex conjugate.
	[[nodiscard]] complex b_plus(double t) const
	{
		complex s{};
		for(int h = min_b_harmonic(); h <= max_b_harmonic(); h += 2)
			s += B(h) * std::exp(imag_unit * (h * omega0 * t));
		return s;
	}

	[[nodiscard]] complex a_minus(double t) const { return std::conj(a_plus(t)); }
	[[nodiscard]] complex b_minus(double t) const { return std::conj(b_plus(t)); }
};

namespace detail {

inline void check_floquet_grid(int harmonic_cutoff, int samples_per_period)
{
	if(harmonic_cutoff < 1)
		throw config_error("harmonic cutoff must be >= 1");
	const bool pow2 = samples_per_period > 0 && (samples_per_period & (samples_per_period - 1)) == 0;
	if(!pow2 || samples_per_period < 8 * harmonic_cutoff)
		throw config_error("samples_per_period must be a power of two >= 8 * harmonic_cutoff");
}

inline FloquetSolution empty_solution(const ModelParams& p, int k, int m)
{
	FloquetSolution sol;
	sol.omega0 = p.omega0;
	sol.harmonic_cutoff = k;
	sol.samples_per_period = m;
	sol.a_coeffs.assign(static_cast<std::size_t>(2 * k + 1), 0.0);
	sol.b_coeffs.assign(static_cast<std::size_t>(2 * k + 2), 0.0);
	return sol;
}

struct Branch
{
	double q = 0.0;
	Vector2c u;
	Eigen::Vector2cd eigenvalues;
};

/// Picks the "+" eigenvector of V for one coupling strength, continuing q+ from q_prev.
inline Branch select_branch(const ModelParams& p, double q_prev)
{
	const Matrix2c v = half_period_map(p);
	Eigen::ComplexEigenSolver<Matrix2c> es(v);
	if(es.info() != Eigen::Success)
		throw numeric_error("eigendecomposition of the half-period map failed");
	const double zone = 2.0 * p.omega0;
	Branch best;
	double best_dist = std::numeric_limits<double>::infinity();
	for(int i = 0; i < 2; ++i) {
		// V u = e^{-i q T/2} u with T/2 = pi / omega0
		const double q0 = -p.omega0 / std::numbers::pi * std::arg(es.eigenvalues()(i));
		const double q = q0 + zone * std::round((q_prev - q0) / zone);
		const double d = std::abs(q - q_prev);
		const bool tie = std::abs(d - best_dist) <= 1e-9 * p.omega0;
		// the two labelings are mirror images about q_prev on resonance; take the upper branch
		if((tie && q > best.q) || (!tie && d < best_dist)) {
			best_dist = tie ? std::min(d, best_dist) : d;
			best.q = q;
			best.u = es.eigenvectors().col(i).normalized();
		}
	}
	best.eigenvalues = es.eigenvalues();
	return best;
}

} // namespace detail

/// Number of homotopy steps in lambda used to continue q+ from Omega/2.
inline constexpr int floquet_homotopy_steps = 16;

inline FloquetSolution floquet_solve(const ModelParams& p, int harmonic_cutoff = 16, int samples_per_period = 256)
{
	p.validate();
	detail::check_floquet_grid(harmonic_cutoff, samples_per_period);
	const int K = harmonic_cutoff;
	const int M = samples_per_period;
	FloquetSolution sol = detail::empty_solution(p, K, M);

	if(p.lambda == 0.0 || p.alpha_mod == 0.0) {
		// bare spin states
		sol.q_plus = 0.5 * p.Omega;
		sol.q_minus = -sol.q_plus;
		sol.a_coeffs[static_cast<std::size_t>(K)] = 1.0;
		return sol;
	}

	detail::Branch branch;
	double q_prev = 0.5 * p.Omega;
	for(int j = 1; j <= floquet_homotopy_steps; ++j) {
		ModelParams step = p;
		step.lambda = p.lambda * j / floquet_homotopy_steps;
		branch = detail::select_branch(step, q_prev);
		q_prev = branch.q;
	}
	if(std::abs(branch.eigenvalues(0) - branch.eigenvalues(1)) < 1e-7) {
		const int order = static_cast<int>(std::lround(2.0 * branch.q / p.omega0));
		throw resonance_error("quasienergy crossing: half-period map is degenerate", order);
	}
	sol.q_plus = branch.q;
	sol.q_minus = -branch.q;

	// periodic part psi_+(t_j) = e^{i q t_j} U(t_j, 0) u on M samples
	const double period = p.period();
	std::vector<Vector2c> samples(static_cast<std::size_t>(M));
	DormandPrince<Vector2c> stepper(floquet_ode_options());
	auto rhs = [&p](double t, const Vector2c& y) -> Vector2c {
		return -imag_unit * (semiclassical_hamiltonian(p, t) * y);
	};
	Vector2c y = branch.u;
	double t = 0.0;
	for(int j = 0; j < M; ++j) {
		const double tj = period * j / M;
		stepper.advance(rhs, t, y, tj);
		samples[static_cast<std::size_t>(j)] = std::exp(imag_unit * (sol.q_plus * tj)) * y;
	}

	const int hmax = 2 * K + 1;
	std::vector<complex> up(static_cast<std::size_t>(2 * hmax + 1)), down(up.size());
	for(int h = -hmax; h <= hmax; ++h) {
		complex su{}, sd{};
		for(int j = 0; j < M; ++j) {
			const complex w = std::exp(-imag_unit * (2.0 * std::numbers::pi * h * j / M));
			su += w * samples[static_cast<std::size_t>(j)](0);
			sd += w * samples[static_cast<std::size_t>(j)](1);
		}
		up[static_cast<std::size_t>(h + hmax)] = su / double(M);
		down[static_cast<std::size_t>(h + hmax)] = sd / double(M);
	}
	auto up_at = [&](int h) { return up[static_cast<std::size_t>(h + hmax)]; };
	auto down_at = [&](int h) { return down[static_cast<std::size_t>(h + hmax)]; };

	// gauge: largest A coefficient real positive
	complex largest{};
	for(int k = -K; k <= K; ++k)
		if(std::abs(up_at(2 * k)) > std::abs(largest))
			largest = up_at(2 * k);
	const complex gauge = std::conj(largest) / std::abs(largest);

	double residual = 0.0, leakage = 0.0;
	for(int k = -K; k <= K; ++k) {
		const complex a = gauge * up_at(2 * k);
		sol.a_coeffs[static_cast<std::size_t>(k + K)] = a.real();
		residual = std::max(residual, std::abs(a.imag()));
	}
	for(int l = -K - 1; l <= K; ++l) {
		const complex b = gauge * down_at(2 * l + 1);
		sol.b_coeffs[static_cast<std::size_t>(l + K + 1)] = b.real();
		residual = std::max(residual, std::abs(b.imag()));
	}
	for(int h = -hmax; h <= hmax; ++h)
		leakage = std::max(leakage, std::abs(h % 2 ? up_at(h) : down_at(h)));
	sol.gauge_residual = residual;
	sol.parity_leakage = leakage;
	if(!(residual < 1e-6))
		throw numeric_error("Floquet coefficients cannot be made real (residual " + std::to_string(residual) + ")");
	return sol;
}

/// Closed-form Floquet pair of the JCM semiclassical Hamiltonian, which is
/// static in the frame rotating at omega0. The branch matches floquet_solve.
inline FloquetSolution jcm_analytic_floquet(const ModelParams& p, int harmonic_cutoff = 16)
{
	p.validate();
	if(p.coupling != Coupling::jcm)
		throw config_error("analytic Floquet solution exists only for the jcm coupling");
	if(p.alpha_phase != 0.0)
		throw config_error("analytic Floquet solution requires a real reference displacement");
	FloquetSolution sol = detail::empty_solution(p, harmonic_cutoff, 8 * harmonic_cutoff);
	const double detuning = p.Omega - p.omega0;
	const double g = p.lambda * p.alpha_mod;
	const double w = 0.5 * std::hypot(detuning, 2.0 * g);
	// branch continuous from q+ = Omega/2; the upper one on resonance
	const double s = detuning >= 0.0 ? 1.0 : -1.0;
	sol.q_plus = 0.5 * p.omega0 + s * w;
	sol.q_minus = -sol.q_plus;
	double a0 = 1.0, b1 = 0.0;
	if(g != 0.0) {
		// eigenvector of [[d/2, g], [g, -d/2]] for eigenvalue s w
		const double x = 0.5 * detuning + s * w;
		const double norm = std::hypot(x, g);
		a0 = x / norm;
		b1 = g / norm;
		if(a0 < 0.0 || (a0 == 0.0 && b1 < 0.0)) {
			a0 = -a0;
			b1 = -b1;
		}
	}
	sol.a_coeffs[static_cast<std::size_t>(harmonic_cutoff)] = a0;
	sol.b_coeffs[static_cast<std::size_t>(harmonic_cutoff + 1)] = b1;
	return sol;
}

/// (|Psi_+(t)>, |Psi_-(t)>) in the (+z, -z) basis, including e^{-i q t}.
inline std::pair<Vector2c, Vector2c> floquet_state_at(const FloquetSolution& sol, double t)
{
	const complex ap = sol.a_plus(t);
	const complex bp = sol.b_plus(t);
	const complex ep = std::exp(-imag_unit * (sol.q_plus * t));
	const complex em = std::exp(-imag_unit * (sol.q_minus * t));
	Vector2c plus(ep * ap, ep * bp);
	Vector2c minus(em * std::conj(bp), -em * std::conj(ap));
	return {plus, minus};
}

} // namespace qcfd
