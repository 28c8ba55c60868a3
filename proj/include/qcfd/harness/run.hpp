#pragma once

// Runs the selected engines over a scenario and compares the resulting curves.

#include "../fbrwa.hpp"
#include "scenario.hpp"

#include <atomic>
#include <complex>
#include <cstdlib>
#include <exception>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace qcfd::harness {

struct SeriesInfo
{
	std::string params_hash;
	/// 0 when the engine works without a Fock basis
	int fock_dim = 0;
	/// norm lost when the initial field was truncated
	double truncation_deficit = 0.0;
	/// population of the highest retained Fock level at the end of the run
	double boundary_population = 0.0;
	/// NaN unless the engine solved the Floquet problem
	double lambda_eff = std::numeric_limits<double>::quiet_NaN();
};

struct TimeSeries
{
	std::string engine;
	std::vector<double> t;
	std::vector<double> p;
	SeriesInfo info;

	void validate() const
	{
		if(t.size() != p.size())
			throw numeric_error("series '" + engine + "' has " + std::to_string(t.size()) + " times but "
			                    + std::to_string(p.size()) + " values");
		for(std::size_t i = 0; i < p.size(); ++i)
			if(!(p[i] >= -1e-9 && p[i] <= 1.0 + 1e-9))
				throw numeric_error("series '" + engine + "' leaves [0, 1] at t = " + std::to_string(t[i]) + ": "
				                    + std::to_string(p[i]));
	}
};

/// Fock truncation for a Fock-basis engine: the config, then QCFD_FOCK_DIM, then `automatic`.
inline int resolve_fock_dim(const ScenarioConfig& c, int automatic)
{
	if(c.fock_dim)
		return *c.fock_dim;
	if(const char* env = std::getenv("QCFD_FOCK_DIM"); env && *env) {
		const int n = detail::parse_int("QCFD_FOCK_DIM", env);
		if(n < 2)
			throw config_error("QCFD_FOCK_DIM must be at least 2");
		return n;
	}
	return automatic;
}

namespace detail {

inline bool spin_is_up(const Vector2c& s) { return std::abs(s(1)) <= 1e-14 * std::abs(s(0)); }

inline ClosedForm closed_form_for(const ScenarioConfig& c)
{
	const ModelParams& p = c.params;
	if(p.coupling != Coupling::jcm || !p.resonant())
		throw config_error("closed_form engine needs the resonant jcm coupling; use the fbrwa engine for this regime");
	if(!spin_is_up(c.spin))
		throw config_error("closed_form engine needs the spin initially up; use the fbrwa engine for other spin states");
	switch(c.field.kind) {
	case FieldConfig::Kind::coherent: return ClosedForm::coherent(c.field.amplitude);
	case FieldConfig::Kind::displaced_fock: return ClosedForm::displaced_fock(c.field.n, c.field.amplitude);
	case FieldConfig::Kind::superposition: {
		const complex w = std::exp(imag_unit * (c.field.xi + c.field.phase));
		if(std::abs(w - 1.0) > 1e-12)
			throw config_error("closed_form engine needs xi = -alpha_phase for the superposition; use the fbrwa engine");
		return ClosedForm::displaced_pair(c.field.amplitude);
	}
	}
	throw config_error("unknown field kind");
}

inline ModelParams floquet_model(const ScenarioConfig& c)
{
	ModelParams m = c.model();
	if(m.alpha_phase != 0.0)
		throw config_error("fbrwa and qcfd engines need a real mean field amplitude (alpha_phase = 0); use the exact engine");
	return m;
}

inline TimeSeries run_exact(const ScenarioConfig& c, const std::vector<double>& times, SpectralCache* cache)
{
	const FieldStateSpec spec = c.field.spec();
	const int dim = resolve_fock_dim(c, recommended_fock_dim(spec));
	const FockVector field = build_field_state(spec, dim);
	const SpinFieldVector psi0 = SpinFieldVector::product(normalized_spin(c.spin), field);

	std::shared_ptr<const ExactEvolver> evolver;
	if(cache)
		evolver = cache->get(c.params, dim);
	else
		evolver = std::make_shared<const ExactEvolver>(build_hamiltonian(c.params, dim));

	TimeSeries s;
	s.engine = "exact";
	s.t = times;
	s.p = excited_probability_series(*evolver, psi0, times);
	const double last = times.back();
	const SpinFieldVector end = evolve_exact(*evolver, psi0, std::span<const double>(&last, 1)).front();
	s.info.fock_dim = dim;
	s.info.truncation_deficit = field.truncation_tol();
	s.info.boundary_population = std::norm(end.up()(dim - 1)) + std::norm(end.down()(dim - 1));
	if(s.info.boundary_population > max_truncation_tol)
		throw truncation_error("exact evolution reaches the Fock cutoff (boundary population "
		                           + std::to_string(s.info.boundary_population) + ")",
		                       dim + dim / 2);
	return s;
}

inline TimeSeries run_closed_form(const ScenarioConfig& c, const std::vector<double>& times)
{
	const ClosedForm form = closed_form_for(c);
	TimeSeries s;
	s.engine = "closed_form";
	s.t = times;
	s.p.reserve(times.size());
	for(double t : times)
		s.p.push_back(p_excited_closed_form(form, c.params, t));
	return s;
}

inline TimeSeries run_fbrwa(const ScenarioConfig& c, const std::vector<double>& times)
{
	const ModelParams m = floquet_model(c);
	const FloquetSolution sol = floquet_solve(m, c.harmonic_cutoff, c.samples_per_period);
	const FbrwaResult r = make_fbrwa(sol, m, c.spin, c.field.spec());
	TimeSeries s;
	s.engine = "fbrwa";
	s.t = times;
	s.p.reserve(times.size());
	for(double t : times)
		s.p.push_back(p_excited_fbrwa(sol, r, t));
	s.info.lambda_eff = r.lambda_eff;
	return s;
}

inline TimeSeries run_qcfd(const ScenarioConfig& c, const std::vector<double>& times)
{
	const ModelParams m = floquet_model(c);
	const FieldStateSpec spec = c.field.spec();
	const FloquetSolution sol = floquet_solve(m, c.harmonic_cutoff, c.samples_per_period);
	const double le = lambda_eff(sol, m.lambda);
	const int dim = resolve_fock_dim(c, qcfd_recommended_fock_dim(spec, m, le, times.back()));
	const auto samples = qcfd_integrate(sol, m, c.spin, spec, times, dim);
	TimeSeries s;
	s.engine = "qcfd";
	s.t = times;
	s.p.reserve(samples.size());
	for(const auto& x : samples)
		s.p.push_back(x.p_excited);
	s.info.fock_dim = dim;
	s.info.truncation_deficit = build_field_state(spec.displaced(-m.alpha()), dim).truncation_tol();
	s.info.boundary_population = samples.back().state.boundary_population();
	s.info.lambda_eff = le;
	return s;
}

} // namespace detail

/// One TimeSeries per selected engine, in the order the engines are listed.
inline std::vector<TimeSeries> run_scenario(const ScenarioConfig& c, SpectralCache* cache = nullptr)
{
	c.validate();
	const std::vector<double> times = c.grid.times();
	const std::string hash = params_hash(c);
	std::vector<TimeSeries> out;
	for(Engine e : c.engines) {
		TimeSeries s;
		switch(e) {
		case Engine::exact: s = detail::run_exact(c, times, cache); break;
		case Engine::closed_form: s = detail::run_closed_form(c, times); break;
		case Engine::fbrwa: s = detail::run_fbrwa(c, times); break;
		case Engine::qcfd: s = detail::run_qcfd(c, times); break;
		}
		s.info.params_hash = hash;
		s.validate();
		out.push_back(std::move(s));
	}
	return out;
}

/// Runs independent scenarios on a small worker pool; results keep the input order.
/// The first failure (in input order) is rethrown once every worker has finished.
inline std::vector<std::vector<TimeSeries>> run_scenarios(const std::vector<ScenarioConfig>& configs,
                                                          unsigned threads = std::thread::hardware_concurrency())
{
	std::vector<std::vector<TimeSeries>> results(configs.size());
	std::vector<std::exception_ptr> errors(configs.size());
	SpectralCache cache;
	std::atomic<std::size_t> next{0};
	auto work = [&] {
		for(std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
			try {
				results[i] = run_scenario(configs[i], &cache);
			} catch(...) {
				errors[i] = std::current_exception();
			}
		}
	};
	threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::max<std::size_t>(configs.size(), 1)));
	{
		std::vector<std::jthread> pool;
		for(unsigned k = 1; k < threads; ++k)
			pool.emplace_back(work);
		work();
	}
	for(auto& e : errors)
		if(e)
			std::rethrow_exception(e);
	return results;
}

// ---- comparison -------------------------------------------------------------

struct TimeWindow
{
	double t_min = -std::numeric_limits<double>::infinity();
	double t_max = std::numeric_limits<double>::infinity();
};

struct ComparisonMetrics
{
	std::size_t samples = 0;
	double sup_norm = 0.0;
	double rmse = 0.0;
	/// angular frequency of the largest DFT peak of each detrended, windowed signal
	double dominant_frequency_a = std::numeric_limits<double>::quiet_NaN();
	double dominant_frequency_b = std::numeric_limits<double>::quiet_NaN();
	/// |dominant_frequency_a - dominant_frequency_b|
	double frequency_shift = std::numeric_limits<double>::quiet_NaN();
	/// DFT bin width 2 pi / (N dt)
	double frequency_bin = std::numeric_limits<double>::quiet_NaN();
};

/// Angular frequency of the largest non-DC DFT bin after removing a least-squares line.
/// Returns 0 for a signal that is exactly linear. Needs a uniform grid.
inline double dominant_frequency(std::span<const double> t, std::span<const double> y)
{
	const std::size_t n = t.size();
	if(n != y.size())
		throw grid_error("dominant_frequency: time and value arrays differ in length");
	if(n < 4)
		throw grid_error("dominant_frequency needs at least 4 samples");
	const double dt = (t[n - 1] - t[0]) / double(n - 1);
	for(std::size_t i = 1; i < n; ++i)
		if(std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt)
			throw grid_error("dominant_frequency needs a uniform time grid");

	double st = 0, sy = 0, stt = 0, sty = 0;
	for(std::size_t i = 0; i < n; ++i) {
		st += t[i];
		sy += y[i];
		stt += t[i] * t[i];
		sty += t[i] * y[i];
	}
	const double slope = (n * sty - st * sy) / (n * stt - st * st);
	const double icpt = (sy - slope * st) / n;

	std::vector<double> r(n);
	for(std::size_t i = 0; i < n; ++i)
		r[i] = y[i] - (icpt + slope * t[i]);

	double best = 0.0;
	std::size_t best_k = 0;
	for(std::size_t k = 1; k <= n / 2; ++k) {
		// twiddle by recurrence, renormalised to stay on the unit circle
		const complex w = std::polar(1.0, -2.0 * std::numbers::pi * double(k) / double(n));
		complex z{1.0, 0.0}, acc{};
		for(std::size_t i = 0; i < n; ++i) {
			acc += r[i] * z;
			z *= w;
			if((i & 63) == 63)
				z /= std::abs(z);
		}
		if(std::norm(acc) > best) {
			best = std::norm(acc);
			best_k = k;
		}
	}
	return 2.0 * std::numbers::pi * double(best_k) / (double(n) * dt);
}

inline ComparisonMetrics compare(const TimeSeries& a, const TimeSeries& b, std::optional<TimeWindow> window = {})
{
	if(a.t.size() != a.p.size() || b.t.size() != b.p.size())
		throw grid_error("series with mismatched time and value arrays");
	if(a.t.size() != b.t.size())
		throw grid_error("cannot compare '" + a.engine + "' (" + std::to_string(a.t.size()) + " points) with '"
		                 + b.engine + "' (" + std::to_string(b.t.size()) + " points); resample onto one grid first");
	for(std::size_t i = 0; i < a.t.size(); ++i)
		if(std::abs(a.t[i] - b.t[i]) > 1e-12 * std::max(1.0, std::abs(a.t[i])))
			throw grid_error("time grids of '" + a.engine + "' and '" + b.engine + "' differ at index "
			                 + std::to_string(i));

	const TimeWindow w = window.value_or(TimeWindow{});
	std::vector<double> t, pa, pb;
	for(std::size_t i = 0; i < a.t.size(); ++i)
		if(a.t[i] >= w.t_min && a.t[i] <= w.t_max) {
			t.push_back(a.t[i]);
			pa.push_back(a.p[i]);
			pb.push_back(b.p[i]);
		}

	ComparisonMetrics m;
	m.samples = t.size();
	if(t.empty())
		return m;
	double ss = 0.0;
	for(std::size_t i = 0; i < t.size(); ++i) {
		const double d = std::abs(pa[i] - pb[i]);
		m.sup_norm = std::max(m.sup_norm, d);
		ss += d * d;
	}
	m.rmse = std::sqrt(ss / double(t.size()));
	if(t.size() >= 4) {
		const double dt = (t.back() - t.front()) / double(t.size() - 1);
		m.frequency_bin = 2.0 * std::numbers::pi / (double(t.size()) * dt);
		m.dominant_frequency_a = dominant_frequency(t, pa);
		m.dominant_frequency_b = dominant_frequency(t, pb);
		m.frequency_shift = std::abs(m.dominant_frequency_a - m.dominant_frequency_b);
	}
	return m;
}

} // namespace qcfd::harness
