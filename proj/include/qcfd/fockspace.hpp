#pragma once

// Truncated single-mode bosonic algebra: Fock vectors, ladder and displacement
// operators, displaced Fock states and associated Laguerre polynomials.

#include "errors.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace qcfd {

using complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr complex imag_unit{0.0, 1.0};

/// Tolerance on the norm deficit of a constructed field state.
inline constexpr double max_truncation_tol = 1e-6;

inline bool is_finite(complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Dense operator on a truncated space. Hermitian and unitary flags are only
/// set after the corresponding check has passed.
class OperatorMatrix
{
public:
	OperatorMatrix() = default;

	static OperatorMatrix general(CMatrix m)
	{
		check_square(m);
		OperatorMatrix op;
		op.entries_ = std::move(m);
		return op;
	}

	static OperatorMatrix hermitian(CMatrix m, double tol = 1e-12)
	{
		check_square(m);
		const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
		if(!(dev < tol))
			throw numeric_error("operator flagged Hermitian deviates by " + std::to_string(dev));
		OperatorMatrix op;
		op.entries_ = std::move(m);
		op.hermitian_ = true;
		return op;
	}

	static OperatorMatrix unitary(CMatrix m, double tol = 1e-10)
	{
		check_square(m);
		const auto n = m.rows();
		const double dev = (m.adjoint() * m - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
		if(!(dev < tol))
			throw numeric_error("operator flagged unitary deviates by " + std::to_string(dev));
		OperatorMatrix op;
		op.entries_ = std::move(m);
		op.unitary_ = true;
		return op;
	}

	[[nodiscard]] int dim() const noexcept { return static_cast<int>(entries_.rows()); }
	[[nodiscard]] const CMatrix& matrix() const noexcept { return entries_; }
	[[nodiscard]] complex operator()(int row, int col) const { return entries_(row, col); }
	[[nodiscard]] bool is_hermitian() const noexcept { return hermitian_; }
	[[nodiscard]] bool is_unitary() const noexcept { return unitary_; }

	/// Set when the truncation is known to be too small for the represented operator.
	[[nodiscard]] bool truncation_warning() const noexcept { return truncation_warning_; }
	void set_truncation_warning(bool w) noexcept { truncation_warning_ = w; }

private:
	static void check_square(const CMatrix& m)
	{
		if(m.rows() != m.cols() || m.rows() == 0)
			throw config_error("operator matrix must be square and non-empty");
	}

	CMatrix entries_;
	bool hermitian_ = false;
	bool unitary_ = false;
	bool truncation_warning_ = false;
};

/// Amplitudes over |0>, ..., |dim-1>.
class FockVector
{
public:
	FockVector() = default;

	explicit FockVector(CVector amplitudes, double truncation_tol = 0.0)
	    : amps_{std::move(amplitudes)}, truncation_tol_{truncation_tol}
	{
		if(amps_.size() < 1)
			throw config_error("FockVector requires dim >= 1");
	}

	[[nodiscard]] int dim() const noexcept { return static_cast<int>(amps_.size()); }
	[[nodiscard]] const CVector& amplitudes() const noexcept { return amps_; }
	[[nodiscard]] complex operator[](int n) const { return amps_(n); }
	[[nodiscard]] double norm() const { return amps_.norm(); }

	/// 1 - ||psi||^2 of the truncated representation of a unit state.
	[[nodiscard]] double truncation_tol() const noexcept { return truncation_tol_; }

	[[nodiscard]] double mean_photon_number() const
	{
		double s = 0.0;
		for(int n = 1; n < dim(); ++n)
			s += n * std::norm(amps_(n));
		return s;
	}

	/// <a> on the truncated space.
	[[nodiscard]] complex mean_amplitude() const
	{
		complex s{};
		for(int n = 1; n < dim(); ++n)
			s += std::conj(amps_(n - 1)) * std::sqrt(double(n)) * amps_(n);
		return s;
	}

private:
	CVector amps_;
	double truncation_tol_ = 0.0;
};

/// Ladder operator a with a|n> = sqrt(n)|n-1>.
inline OperatorMatrix annihilation_matrix(int dim)
{
	if(dim < 1)
		throw config_error("invalid dimension " + std::to_string(dim) + " for annihilation operator");
	CMatrix a = CMatrix::Zero(dim, dim);
	for(int n = 1; n < dim; ++n)
		a(n - 1, n) = std::sqrt(double(n));
	return OperatorMatrix::general(std::move(a));
}

inline bool displacement_fits(complex beta, int dim)
{
	const double r = std::abs(beta);
	return r * r + 6.0 * r + 10.0 <= dim;
}

/// D(beta) = exp(beta a^dag - beta^* a) on the truncated space, via Pade
/// scaling-and-squaring of the anti-Hermitian generator.
inline OperatorMatrix displacement_matrix(complex beta, int dim)
{
	if(!is_finite(beta))
		throw config_error("displacement amplitude must be finite");
	const CMatrix a = annihilation_matrix(dim).matrix();
	const CMatrix gen = beta * a.adjoint() - std::conj(beta) * a;
	CMatrix d = gen.exp();
	auto op = OperatorMatrix::unitary(std::move(d));
	op.set_truncation_warning(!displacement_fits(beta, dim));
	return op;
}

/// Associated Laguerre polynomial L_n^{(k)}(x) by upward recurrence in n.
inline double laguerre(int n, int k, double x)
{
	if(n <= 0)
		return 1.0;
	double prev = 1.0;
	double cur = 1.0 + k - x;
	for(int j = 1; j < n; ++j) {
		const double next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
		prev = cur;
		cur = next;
	}
	return cur;
}

namespace detail {

/// L_n^{(k)}(x) = mantissa * e^{log_scale}, rescaling the recurrence before it overflows.
inline std::pair<double, double> laguerre_scaled(int n, int k, double x)
{
	if(n <= 0)
		return {1.0, 0.0};
	double prev = 1.0;
	double cur = 1.0 + k - x;
	double log_scale = 0.0;
	for(int j = 1; j < n; ++j) {
		const double next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
		prev = cur;
		cur = next;
		const double big = std::max(std::abs(prev), std::abs(cur));
		if(big > 1e150) {
			prev /= big;
			cur /= big;
			log_scale += std::log(big);
		}
	}
	return {cur, log_scale};
}

} // namespace detail

/// <m|D(beta)|n> in closed form.
///
/// For m >= n this is sqrt(n!/m!) beta^{m-n} e^{-|beta|^2/2} L_n^{(m-n)}(|beta|^2);
/// the m < n branch uses <m|D(beta)|n> = conj(<n|D(-beta)|m>). The prefactor is
/// accumulated in log space so that large |beta| and large |m - n| do not overflow.
inline complex displaced_fock_overlap(int m, int n, complex beta)
{
	if(!is_finite(beta))
		throw config_error("displacement amplitude must be finite");
	if(m < 0 || n < 0)
		throw config_error("Fock indices must be non-negative");
	const double r2 = std::norm(beta);
	if(r2 == 0.0)
		return m == n ? complex{1.0} : complex{};

	const bool upper = m >= n;
	const int lo = upper ? n : m;
	const int hi = upper ? m : n;
	const int diff = hi - lo;
	const double log_r = 0.5 * std::log(r2);
	const double log_mag = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) + diff * log_r - 0.5 * r2;
	const double arg = std::arg(beta);
	// beta^{m-n} above the diagonal, (-beta^*)^{n-m} below it
	const double phase = upper ? diff * arg : diff * (std::numbers::pi - arg);
	const auto [mantissa, log_scale] = detail::laguerre_scaled(lo, diff, r2);
	return std::polar(std::exp(log_mag + log_scale), phase) * mantissa;
}

/// exp((a b^* - a^* b)/2), the phase in D(a)D(b) = phase * D(a+b).
inline complex displacement_composition_phase(complex a, complex b)
{
	return std::exp(imag_unit * (a * std::conj(b)).imag());
}

struct DisplacedFockTerm
{
	complex displacement;
	int n = 0;
	complex weight{1.0};
};

/// A field state built from displaced Fock components sum_j w_j D(beta_j)|n_j>.
/// Weights are normalized analytically, independent of any truncation.
class FieldStateSpec
{
public:
	enum class Kind { coherent, displaced_fock, superposition };

	static FieldStateSpec coherent(complex alpha)
	{
		return FieldStateSpec(Kind::coherent, {{alpha, 0, 1.0}});
	}

	static FieldStateSpec displaced_fock(complex alpha, int n)
	{
		if(n < 0)
			throw config_error("displaced Fock index must be non-negative");
		return FieldStateSpec(Kind::displaced_fock, {{alpha, n, 1.0}});
	}

	static FieldStateSpec superposition(std::vector<DisplacedFockTerm> terms)
	{
		if(terms.empty())
			throw config_error("superposition needs at least one term");
		return FieldStateSpec(Kind::superposition, std::move(terms));
	}

	/// (|beta,0> + e^{-i xi}|beta,1>)/sqrt(2).
	static FieldStateSpec displaced_pair(complex beta, double xi)
	{
		const double s = std::numbers::sqrt2 / 2.0;
		return superposition({{beta, 0, s}, {beta, 1, s * std::exp(-imag_unit * xi)}});
	}

	[[nodiscard]] Kind kind() const noexcept { return kind_; }
	[[nodiscard]] const std::vector<DisplacedFockTerm>& terms() const noexcept { return terms_; }

	/// <other|D(delta)|this>, evaluated term by term.
	[[nodiscard]] complex matrix_element(const FieldStateSpec& bra, complex delta) const
	{
		complex s{};
		for(const auto& ti : bra.terms_)
			for(const auto& tj : terms_)
				s += std::conj(ti.weight) * tj.weight * term_element(ti, tj, delta);
		return s;
	}

	[[nodiscard]] complex displacement_expectation(complex delta) const { return matrix_element(*this, delta); }

	[[nodiscard]] complex inner_product(const FieldStateSpec& bra) const { return matrix_element(bra, 0.0); }

	/// <a>, exact (no truncation).
	[[nodiscard]] complex mean_amplitude() const
	{
		// a D(b)|n> = D(b)(b|n> + sqrt(n)|n-1>)
		complex s{};
		for(const auto& ti : terms_)
			for(const auto& tj : terms_) {
				const complex w = std::conj(ti.weight) * tj.weight;
				s += w * tj.displacement * term_element(ti, tj, 0.0);
				if(tj.n > 0) {
					DisplacedFockTerm lowered = tj;
					--lowered.n;
					s += w * std::sqrt(double(tj.n)) * term_element(ti, lowered, 0.0);
				}
			}
		return s;
	}

	/// The state D(gamma)|this>.
	[[nodiscard]] FieldStateSpec displaced(complex gamma) const
	{
		FieldStateSpec out = *this;
		for(auto& t : out.terms_) {
			t.weight *= displacement_composition_phase(gamma, t.displacement);
			t.displacement += gamma;
		}
		return out;
	}

	[[nodiscard]] double max_displacement() const
	{
		double r = 0.0;
		for(const auto& t : terms_)
			r = std::max(r, std::abs(t.displacement));
		return r;
	}

	[[nodiscard]] int max_fock_index() const
	{
		int n = 0;
		for(const auto& t : terms_)
			n = std::max(n, t.n);
		return n;
	}

	/// Phase-space radius that bounds the bulk of the state.
	[[nodiscard]] double phase_space_extent() const
	{
		double r = 0.0;
		for(const auto& t : terms_)
			r = std::max(r, std::abs(t.displacement) + std::sqrt(double(t.n)));
		return r;
	}

private:
	FieldStateSpec(Kind kind, std::vector<DisplacedFockTerm> terms) : kind_{kind}, terms_{std::move(terms)}
	{
		for(const auto& t : terms_)
			if(!is_finite(t.displacement) || !is_finite(t.weight) || t.n < 0)
				throw config_error("field state terms must be finite with n >= 0");
		const double norm2 = matrix_element(*this, 0.0).real();
		if(!(norm2 > 0.0) || !std::isfinite(norm2))
			throw config_error("field state superposition has zero norm");
		const double scale = 1.0 / std::sqrt(norm2);
		for(auto& t : terms_)
			t.weight *= scale;
	}

	// <b_i, n_i| D(delta) |b_j, n_j>
	static complex term_element(const DisplacedFockTerm& ti, const DisplacedFockTerm& tj, complex delta)
	{
		const complex shifted = delta + tj.displacement;
		const complex phase = displacement_composition_phase(delta, tj.displacement)
		                      * displacement_composition_phase(-ti.displacement, shifted);
		return phase * displaced_fock_overlap(ti.n, tj.n, shifted - ti.displacement);
	}

	Kind kind_;
	std::vector<DisplacedFockTerm> terms_;
};

/// Truncation rule ceil(r^2 + 8r + 20) for a phase-space radius r.
inline int fock_dim_for_radius(double r)
{
	return static_cast<int>(std::ceil(r * r + 8.0 * r + 20.0));
}

inline int recommended_fock_dim(const FieldStateSpec& spec)
{
	return fock_dim_for_radius(spec.phase_space_extent());
}

/// Materializes the state on |0>..|dim-1>. Amplitudes come from the closed-form
/// matrix elements <m|D(beta)|n>; the norm deficit is recorded as truncation_tol.
inline FockVector build_field_state(const FieldStateSpec& spec, int dim)
{
	if(dim < 1)
		throw config_error("invalid dimension " + std::to_string(dim) + " for field state");
	CVector v = CVector::Zero(dim);
	for(const auto& t : spec.terms())
		for(int m = 0; m < dim; ++m)
			v(m) += t.weight * displaced_fock_overlap(m, t.n, t.displacement);
	const double deficit = std::max(0.0, 1.0 - v.squaredNorm());
	if(deficit > max_truncation_tol)
		throw truncation_error("field state loses " + std::to_string(deficit) + " of its norm at fock_dim "
		                           + std::to_string(dim),
		                       std::max(recommended_fock_dim(spec), dim + dim / 2));
	return FockVector(std::move(v), deficit);
}

} // namespace qcfd
