#pragma once

// Exact reference engine: the spin-boson Hamiltonian on spin (x) truncated Fock
// space and its time evolution by spectral decomposition.

#include "errors.hpp"
#include "fockspace.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace qcfd {

enum class Coupling { jcm, rabi };

inline std::string to_string(Coupling c) { return c == Coupling::jcm ? "jcm" : "rabi"; }

inline Coupling parse_coupling(const std::string& s)
{
	if(s == "jcm")
		return Coupling::jcm;
	if(s == "rabi")
		return Coupling::rabi;
	throw config_error("unknown coupling '" + s + "' (expected jcm or rabi)");
}

/// Physical constants of the model plus the reference displacement
/// alpha = alpha_mod * e^{i alpha_phase} used by the Floquet-based engines.
struct ModelParams
{
	double omega0 = 1.0;
	double Omega = 1.0;
	double lambda = 0.0;
	Coupling coupling = Coupling::jcm;
	double alpha_mod = 0.0;
	double alpha_phase = 0.0;

	void validate() const
	{
		if(!(omega0 > 0.0) || !std::isfinite(omega0))
			throw config_error("omega0 must be positive");
		if(!(lambda >= 0.0) || !std::isfinite(lambda))
			throw config_error("lambda must be non-negative");
		if(!(Omega >= 0.0) || !std::isfinite(Omega))
			throw config_error("Omega must be non-negative");
		if(!(alpha_mod >= 0.0) || !std::isfinite(alpha_mod) || !std::isfinite(alpha_phase))
			throw config_error("alpha must be finite with non-negative modulus");
	}

	/// lambda |alpha| / (2 Omega); the semiclassical expansion parameter.
	[[nodiscard]] double epsilon() const
	{
		return Omega > 0.0 ? lambda * alpha_mod / (2.0 * Omega) : std::numeric_limits<double>::quiet_NaN();
	}

	[[nodiscard]] complex alpha() const { return std::polar(alpha_mod, alpha_phase); }

	[[nodiscard]] bool resonant(double tol = 1e-12) const { return std::abs(Omega - omega0) <= tol * omega0; }

	[[nodiscard]] double period() const { return 2.0 * std::numbers::pi / omega0; }

	auto operator<=>(const ModelParams&) const = default;
};

/// Amplitudes on spin (x) Fock, spin-major: [(+z, n = 0..N-1), (-z, n = 0..N-1)].
class SpinFieldVector
{
public:
	SpinFieldVector() = default;

	SpinFieldVector(int fock_dim, CVector amplitudes) : fock_dim_{fock_dim}, amps_{std::move(amplitudes)}
	{
		if(fock_dim_ < 1 || amps_.size() != 2 * fock_dim_)
			throw config_error("spin-field vector must have length 2 * fock_dim");
	}

	static SpinFieldVector product(const Eigen::Vector2cd& spin, const FockVector& field)
	{
		const int n = field.dim();
		CVector v(2 * n);
		v.head(n) = spin(0) * field.amplitudes();
		v.tail(n) = spin(1) * field.amplitudes();
		return {n, std::move(v)};
	}

	[[nodiscard]] int fock_dim() const noexcept { return fock_dim_; }
	[[nodiscard]] const CVector& amplitudes() const noexcept { return amps_; }
	[[nodiscard]] auto up() const { return amps_.head(fock_dim_); }
	[[nodiscard]] auto down() const { return amps_.tail(fock_dim_); }
	[[nodiscard]] double norm() const { return amps_.norm(); }

private:
	int fock_dim_ = 0;
	CVector amps_;
};

inline int spin_field_index(int spin, int n, int fock_dim) { return spin * fock_dim + n; }

/// H = omega0 a^dag a + Omega/2 sigma_z + lambda (f sigma_+ + f^dag sigma_-),
/// f = a (jcm) or a + a^dag (rabi).
inline OperatorMatrix build_hamiltonian(const ModelParams& p, int fock_dim)
{
	p.validate();
	if(fock_dim < 2)
		throw config_error("build_hamiltonian requires fock_dim >= 2");
	const int N = fock_dim;
	CMatrix h = CMatrix::Zero(2 * N, 2 * N);
	for(int n = 0; n < N; ++n) {
		h(n, n) = p.omega0 * n + 0.5 * p.Omega;
		h(N + n, N + n) = p.omega0 * n - 0.5 * p.Omega;
	}
	// sigma_+ = |+z><-z| couples column (-z, m) to row (+z, n) through f_{nm}
	for(int m = 1; m < N; ++m) {
		const double g = p.lambda * std::sqrt(double(m));
		h(m - 1, N + m) += g; // a
		h(N + m, m - 1) += g;
		if(p.coupling == Coupling::rabi) {
			h(m, N + m - 1) += g; // a^dag
			h(N + m - 1, m) += g;
		}
	}
	return OperatorMatrix::hermitian(std::move(h));
}

/// |<+z|psi>|^2 summed over the field.
inline double excited_probability(const SpinFieldVector& psi) { return psi.up().squaredNorm(); }

/// One-time eigendecomposition of a Hermitian H. The nonzero pattern is split
/// into connected components first (excitation-number blocks for jcm, parity
/// blocks for rabi) and each block is diagonalized densely; real Hamiltonians
/// use the real symmetric solver.
class ExactEvolver
{
public:
	explicit ExactEvolver(const OperatorMatrix& h)
	{
		if(!h.is_hermitian())
			throw config_error("evolve_exact requires a Hermitian operator");
		dim_ = h.dim();
		const CMatrix& m = h.matrix();
		const bool real = m.imag().cwiseAbs().maxCoeff() == 0.0;
		for(auto& idx : connected_components(m)) {
			Block b;
			b.indices = std::move(idx);
			const auto n = static_cast<Eigen::Index>(b.indices.size());
			CMatrix sub(n, n);
			for(Eigen::Index i = 0; i < n; ++i)
				for(Eigen::Index j = 0; j < n; ++j)
					sub(i, j) = m(b.indices[i], b.indices[j]);
			if(real) {
				Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub.real());
				check(es.info(), sub);
				b.energies = es.eigenvalues();
				b.real_vectors = es.eigenvectors();
				b.is_real = true;
			} else {
				Eigen::SelfAdjointEigenSolver<CMatrix> es(sub);
				check(es.info(), sub);
				b.energies = es.eigenvalues();
				b.complex_vectors = es.eigenvectors();
			}
			blocks_.push_back(std::move(b));
		}
	}

	[[nodiscard]] int dim() const noexcept { return dim_; }
	[[nodiscard]] std::size_t block_count() const noexcept { return blocks_.size(); }

	[[nodiscard]] Eigen::VectorXd eigenvalues() const
	{
		std::vector<double> e;
		for(const auto& b : blocks_)
			e.insert(e.end(), b.energies.data(), b.energies.data() + b.energies.size());
		std::sort(e.begin(), e.end());
		return Eigen::Map<Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
	}

	[[nodiscard]] CVector evolve(const CVector& psi0, double t) const
	{
		CVector out = CVector::Zero(dim_);
		for(const auto& b : blocks_) {
			const CVector c = b.project(psi0);
			CVector phased(c.size());
			for(Eigen::Index j = 0; j < c.size(); ++j)
				phased(j) = std::exp(-imag_unit * (b.energies(j) * t)) * c(j);
			const CVector local = b.is_real ? CVector(b.real_vectors.cast<complex>() * phased)
			                                : CVector(b.complex_vectors * phased);
			for(std::size_t i = 0; i < b.indices.size(); ++i)
				out(b.indices[i]) = local(static_cast<Eigen::Index>(i));
		}
		return out;
	}

	/// sum over rows r < up_rows of |psi_r(t)|^2 for every t, without forming
	/// the full states.
	[[nodiscard]] std::vector<double> population_series(const CVector& psi0, std::span<const double> times,
	                                                    int up_rows) const
	{
		constexpr Eigen::Index chunk = 256;
		const auto nt = static_cast<Eigen::Index>(times.size());
		std::vector<double> p(times.size(), 0.0);
		for(const auto& b : blocks_) {
			std::vector<Eigen::Index> rows;
			for(std::size_t i = 0; i < b.indices.size(); ++i)
				if(b.indices[i] < up_rows)
					rows.push_back(static_cast<Eigen::Index>(i));
			if(rows.empty())
				continue;
			const CVector c = b.project(psi0);
			if(c.squaredNorm() == 0.0)
				continue;
			const auto nb = c.size();
			const auto nr = static_cast<Eigen::Index>(rows.size());
			Eigen::MatrixXd vr_real, vr_imag;
			CMatrix vr_complex;
			if(b.is_real) {
				vr_real.resize(nr, nb);
				for(Eigen::Index r = 0; r < nr; ++r)
					vr_real.row(r) = b.real_vectors.row(rows[r]);
			} else {
				vr_complex.resize(nr, nb);
				for(Eigen::Index r = 0; r < nr; ++r)
					vr_complex.row(r) = b.complex_vectors.row(rows[r]);
			}
			for(Eigen::Index t0 = 0; t0 < nt; t0 += chunk) {
				const Eigen::Index nc = std::min(chunk, nt - t0);
				CMatrix phases(nb, nc);
				for(Eigen::Index k = 0; k < nc; ++k)
					for(Eigen::Index j = 0; j < nb; ++j)
						phases(j, k) = std::exp(-imag_unit * (b.energies(j) * times[t0 + k])) * c(j);
				if(b.is_real) {
					const Eigen::MatrixXd re = vr_real * phases.real();
					const Eigen::MatrixXd im = vr_real * phases.imag();
					for(Eigen::Index k = 0; k < nc; ++k)
						p[t0 + k] += re.col(k).squaredNorm() + im.col(k).squaredNorm();
				} else {
					const CMatrix amp = vr_complex * phases;
					for(Eigen::Index k = 0; k < nc; ++k)
						p[t0 + k] += amp.col(k).squaredNorm();
				}
			}
		}
		return p;
	}

private:
	struct Block
	{
		std::vector<int> indices;
		Eigen::VectorXd energies;
		Eigen::MatrixXd real_vectors;
		CMatrix complex_vectors;
		bool is_real = false;

		CVector project(const CVector& psi) const
		{
			CVector local(static_cast<Eigen::Index>(indices.size()));
			for(std::size_t i = 0; i < indices.size(); ++i)
				local(static_cast<Eigen::Index>(i)) = psi(indices[i]);
			return is_real ? CVector(real_vectors.transpose().cast<complex>() * local)
			               : CVector(complex_vectors.adjoint() * local);
		}
	};

	static std::vector<std::vector<int>> connected_components(const CMatrix& m)
	{
		const int n = static_cast<int>(m.rows());
		std::vector<int> parent(n);
		std::iota(parent.begin(), parent.end(), 0);
		auto find = [&](int x) {
			while(parent[x] != x)
				x = parent[x] = parent[parent[x]];
			return x;
		};
		for(int j = 0; j < n; ++j)
			for(int i = 0; i < j; ++i)
				if(m(i, j) != complex{})
					parent[find(i)] = find(j);
		std::map<int, std::vector<int>> groups;
		for(int i = 0; i < n; ++i)
			groups[find(i)].push_back(i);
		std::vector<std::vector<int>> out;
		out.reserve(groups.size());
		for(auto& [root, idx] : groups)
			out.push_back(std::move(idx));
		return out;
	}

	static void check(Eigen::ComputationInfo info, const CMatrix& sub)
	{
		if(info != Eigen::Success)
			throw numeric_error("eigendecomposition failed on block of size " + std::to_string(sub.rows())
			                    + " (max |H_ij| = " + std::to_string(sub.cwiseAbs().maxCoeff()) + ")");
	}

	int dim_ = 0;
	std::vector<Block> blocks_;
};

inline void check_times(std::span<const double> times)
{
	for(std::size_t i = 0; i < times.size(); ++i) {
		if(!(times[i] >= 0.0) || !std::isfinite(times[i]))
			throw config_error("evolution times must be finite and non-negative");
		if(i > 0 && times[i] < times[i - 1])
			throw config_error("evolution times must be ascending");
	}
}

/// psi(t) = sum_j e^{-i E_j t} <v_j|psi0> |v_j> at every requested time.
inline std::vector<SpinFieldVector> evolve_exact(const ExactEvolver& evolver, const SpinFieldVector& psi0,
                                                 std::span<const double> times)
{
	if(psi0.amplitudes().size() != evolver.dim())
		throw config_error("initial state dimension does not match the Hamiltonian");
	check_times(times);
	const double n0 = psi0.norm();
	std::vector<SpinFieldVector> out;
	out.reserve(times.size());
	for(double t : times) {
		SpinFieldVector psi(psi0.fock_dim(), t == 0.0 ? psi0.amplitudes() : evolver.evolve(psi0.amplitudes(), t));
		if(std::abs(psi.norm() - n0) > 1e-9)
			throw numeric_error("exact evolution lost unitarity at t = " + std::to_string(t));
		out.push_back(std::move(psi));
	}
	return out;
}

inline std::vector<SpinFieldVector> evolve_exact(const OperatorMatrix& h, const SpinFieldVector& psi0,
                                                 std::span<const double> times)
{
	return evolve_exact(ExactEvolver(h), psi0, times);
}

/// P(+z)(t) on a time grid via the spectral route.
inline std::vector<double> excited_probability_series(const ExactEvolver& evolver, const SpinFieldVector& psi0,
                                                      std::span<const double> times)
{
	if(psi0.amplitudes().size() != evolver.dim())
		throw config_error("initial state dimension does not match the Hamiltonian");
	check_times(times);
	return evolver.population_series(psi0.amplitudes(), times, psi0.fock_dim());
}

/// Eigendecompositions keyed by (params, fock_dim), shared between scenarios.
class SpectralCache
{
public:
	std::shared_ptr<const ExactEvolver> get(const ModelParams& p, int fock_dim)
	{
		// the reference displacement does not enter H
		const Key key{p.omega0, p.Omega, p.lambda, p.coupling, fock_dim};
		{
			std::shared_lock lock(mutex_);
			if(auto it = cache_.find(key); it != cache_.end())
				return it->second;
		}
		auto evolver = std::make_shared<const ExactEvolver>(build_hamiltonian(p, fock_dim));
		std::unique_lock lock(mutex_);
		return cache_.try_emplace(key, std::move(evolver)).first->second;
	}

	[[nodiscard]] std::size_t size() const
	{
		std::shared_lock lock(mutex_);
		return cache_.size();
	}

private:
	using Key = std::tuple<double, double, double, Coupling, int>;
	mutable std::shared_mutex mutex_;
	std::map<Key, std::shared_ptr<const ExactEvolver>> cache_;
};

} // namespace qcfd
