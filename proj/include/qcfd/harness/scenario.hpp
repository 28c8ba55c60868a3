#pragma once

// Scenario description: model parameters, initial state, time grid and the
// engines to run. Stored as flat `key = value` text.

#include "../errors.hpp"
#include "../floquet.hpp"
#include "../fockspace.hpp"
#include "../fullmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace qcfd::harness {

enum class Engine { exact, fbrwa, closed_form, qcfd };

inline const char* to_string(Engine e)
{
	switch(e) {
	case Engine::exact: return "exact";
	case Engine::fbrwa: return "fbrwa";
	case Engine::closed_form: return "closed_form";
	case Engine::qcfd: return "qcfd";
	}
	return "?";
}

inline Engine parse_engine(std::string_view s)
{
	for(Engine e : {Engine::exact, Engine::fbrwa, Engine::closed_form, Engine::qcfd})
		if(s == to_string(e))
			return e;
	throw config_error("unknown engine '" + std::string(s) + "' (expected exact, fbrwa, closed_form or qcfd)");
}

enum class OutputFormat { csv, svg, both };

inline const char* to_string(OutputFormat f)
{
	switch(f) {
	case OutputFormat::csv: return "csv";
	case OutputFormat::svg: return "svg";
	case OutputFormat::both: return "both";
	}
	return "?";
}

inline OutputFormat parse_output_format(std::string_view s)
{
	if(s == "csv")
		return OutputFormat::csv;
	if(s == "svg")
		return OutputFormat::svg;
	if(s == "both")
		return OutputFormat::both;
	throw config_error("unknown output format '" + std::string(s) + "' (expected csv, svg or both)");
}

/// Initial field state in the lab frame.
struct FieldConfig
{
	enum class Kind { coherent, displaced_fock, superposition };
	Kind kind = Kind::coherent;
	/// |beta|
	double amplitude = 0.0;
	/// arg(beta)
	double phase = 0.0;
	/// Fock index for displaced_fock
	int n = 0;
	/// relative phase of the superposition (|beta,0> + e^{-i xi}|beta,1>)/sqrt(2)
	double xi = 0.0;

	[[nodiscard]] complex beta() const { return std::polar(amplitude, phase); }

	[[nodiscard]] FieldStateSpec spec() const
	{
		switch(kind) {
		case Kind::coherent: return FieldStateSpec::coherent(beta());
		case Kind::displaced_fock: return FieldStateSpec::displaced_fock(beta(), n);
		case Kind::superposition: return FieldStateSpec::displaced_pair(beta(), xi);
		}
		throw config_error("unknown field kind");
	}

	bool operator==(const FieldConfig&) const = default;
};

inline const char* to_string(FieldConfig::Kind k)
{
	switch(k) {
	case FieldConfig::Kind::coherent: return "coherent";
	case FieldConfig::Kind::displaced_fock: return "displaced_fock";
	case FieldConfig::Kind::superposition: return "superposition";
	}
	return "?";
}

inline FieldConfig::Kind parse_field_kind(std::string_view s)
{
	if(s == "coherent")
		return FieldConfig::Kind::coherent;
	if(s == "displaced_fock")
		return FieldConfig::Kind::displaced_fock;
	if(s == "superposition")
		return FieldConfig::Kind::superposition;
	throw config_error("unknown field '" + std::string(s) + "' (expected coherent, displaced_fock or superposition)");
}

struct TimeGrid
{
	double t_start = 0.0;
	double t_end = 1.0;
	int n_points = 2;

	void validate() const
	{
		if(!std::isfinite(t_start) || !std::isfinite(t_end) || t_start < 0.0)
			throw config_error("time grid needs finite t_start >= 0");
		if(n_points < 1)
			throw config_error("n_points must be positive");
		// a single sample is allowed only for a degenerate window
		if(n_points == 1 ? t_end != t_start : !(t_end > t_start))
			throw config_error("time grid needs t_end > t_start and n_points >= 2, or t_end == t_start with n_points = 1");
	}

	[[nodiscard]] std::vector<double> times() const
	{
		std::vector<double> t(static_cast<std::size_t>(n_points));
		if(n_points == 1) {
			t[0] = t_start;
			return t;
		}
		const double span = t_end - t_start;
		for(int i = 0; i < n_points; ++i)
			t[static_cast<std::size_t>(i)] = t_start + span * i / (n_points - 1);
		t.back() = t_end;
		return t;
	}

	bool operator==(const TimeGrid&) const = default;
};

struct ScenarioConfig
{
	std::string name = "scenario";
	/// alpha_mod and alpha_phase are ignored here: the reference amplitude is <a> of the field
	ModelParams params;
	FieldConfig field;
	Vector2c spin{1.0, 0.0};
	TimeGrid grid;
	std::vector<Engine> engines{Engine::exact};
	std::optional<int> fock_dim;
	int harmonic_cutoff = 16;
	int samples_per_period = 256;
	std::string output;
	OutputFormat format = OutputFormat::csv;

	void validate() const
	{
		params.validate();
		grid.validate();
		if(engines.empty())
			throw config_error("at least one engine must be selected");
		for(std::size_t i = 0; i < engines.size(); ++i)
			for(std::size_t j = i + 1; j < engines.size(); ++j)
				if(engines[i] == engines[j])
					throw config_error(std::string("engine listed twice: ") + to_string(engines[i]));
		if(fock_dim && *fock_dim < 2)
			throw config_error("fock_dim must be at least 2");
		if(!(field.amplitude >= 0.0) || !std::isfinite(field.amplitude) || !std::isfinite(field.phase)
		   || !std::isfinite(field.xi) || field.n < 0)
			throw config_error("field needs finite alpha >= 0 and fock_n >= 0");
		if(!(spin.norm() > 0.0) || !spin.allFinite())
			throw config_error("initial spin must be a non-zero finite vector");
		detail::check_floquet_grid(harmonic_cutoff, samples_per_period);
	}

	/// Model parameters with the reference displacement set to <a> of the initial field.
	[[nodiscard]] ModelParams model() const
	{
		ModelParams p = params;
		complex mean = field.spec().mean_amplitude();
		if(std::abs(mean.imag()) <= 1e-14 * std::abs(mean))
			mean.imag(0.0);
		p.alpha_mod = std::abs(mean);
		p.alpha_phase = p.alpha_mod > 0.0 ? std::arg(mean) : 0.0;
		return p;
	}

	bool operator==(const ScenarioConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s)
{
	const auto b = s.find_first_not_of(" \t\r");
	if(b == std::string_view::npos)
		return {};
	const auto e = s.find_last_not_of(" \t\r");
	return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(std::string_view key, std::string_view v)
{
	double x = 0.0;
	const auto* end = v.data() + v.size();
	auto [ptr, ec] = std::from_chars(v.data(), end, x);
	if(ec != std::errc{} || ptr != end || !std::isfinite(x))
		throw config_error("'" + std::string(key) + "' expects a finite number, got '" + std::string(v) + "'");
	return x;
}

inline int parse_int(std::string_view key, std::string_view v)
{
	int x = 0;
	const auto* end = v.data() + v.size();
	auto [ptr, ec] = std::from_chars(v.data(), end, x);
	if(ec != std::errc{} || ptr != end)
		throw config_error("'" + std::string(key) + "' expects an integer, got '" + std::string(v) + "'");
	return x;
}

inline std::string format_double(double x)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.17g", x);
	return buf;
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
	std::vector<std::string> out;
	std::size_t start = 0;
	while(true) {
		const auto pos = s.find(sep, start);
		out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
		if(pos == std::string_view::npos)
			break;
		start = pos + 1;
	}
	return out;
}

inline Vector2c parse_spin(std::string_view v)
{
	if(v == "up")
		return {1.0, 0.0};
	if(v == "down")
		return {0.0, 1.0};
	if(v == "x")
		return Vector2c(1.0, 1.0) / std::numbers::sqrt2;
	std::istringstream in{std::string(v)};
	double c[4];
	for(double& x : c)
		if(!(in >> x))
			throw config_error("'spin' expects up, down, x or four numbers 're0 im0 re1 im1'");
	std::string rest;
	if(in >> rest)
		throw config_error("'spin' has trailing input '" + rest + "'");
	return {complex{c[0], c[1]}, complex{c[2], c[3]}};
}

inline std::string format_spin(const Vector2c& s)
{
	if(s == Vector2c(1.0, 0.0))
		return "up";
	if(s == Vector2c(0.0, 1.0))
		return "down";
	if(s == Vector2c(1.0, 1.0) / std::numbers::sqrt2)
		return "x";
	return format_double(s(0).real()) + " " + format_double(s(0).imag()) + " " + format_double(s(1).real()) + " "
	       + format_double(s(1).imag());
}

} // namespace detail

/// Sets one key. Shared by the file parser and command-line overrides.
inline void apply_setting(ScenarioConfig& c, const std::string& key, const std::string& value)
{
	using detail::parse_double;
	using detail::parse_int;
	if(key == "name")
		c.name = value;
	else if(key == "coupling")
		c.params.coupling = parse_coupling(value);
	else if(key == "omega0")
		c.params.omega0 = parse_double(key, value);
	else if(key == "Omega")
		c.params.Omega = parse_double(key, value);
	else if(key == "lambda")
		c.params.lambda = parse_double(key, value);
	else if(key == "field")
		c.field.kind = parse_field_kind(value);
	else if(key == "alpha")
		c.field.amplitude = parse_double(key, value);
	else if(key == "alpha_phase")
		c.field.phase = parse_double(key, value);
	else if(key == "fock_n")
		c.field.n = parse_int(key, value);
	else if(key == "xi")
		c.field.xi = parse_double(key, value);
	else if(key == "spin")
		c.spin = detail::parse_spin(value);
	else if(key == "t_start")
		c.grid.t_start = parse_double(key, value);
	else if(key == "t_end")
		c.grid.t_end = parse_double(key, value);
	else if(key == "n_points")
		c.grid.n_points = parse_int(key, value);
	else if(key == "engines") {
		c.engines.clear();
		for(const auto& e : detail::split(value, ','))
			c.engines.push_back(parse_engine(e));
	} else if(key == "fock_dim") {
		if(value == "auto")
			c.fock_dim.reset();
		else
			c.fock_dim = parse_int(key, value);
	} else if(key == "harmonic_cutoff")
		c.harmonic_cutoff = parse_int(key, value);
	else if(key == "samples_per_period")
		c.samples_per_period = parse_int(key, value);
	else if(key == "output")
		c.output = value;
	else if(key == "format")
		c.format = parse_output_format(value);
	else
		throw config_error("unknown key '" + key + "'");
}

inline ScenarioConfig parse_config(std::string_view text, const std::string& source = "<config>")
{
	ScenarioConfig c;
	std::vector<std::string> seen;
	std::istringstream in{std::string(text)};
	std::string line;
	int lineno = 0;
	while(std::getline(in, line)) {
		++lineno;
		const auto hash = line.find('#');
		const std::string body = detail::trim(std::string_view(line).substr(0, hash));
		if(body.empty())
			continue;
		const auto eq = body.find('=');
		const std::string where = source + ":" + std::to_string(lineno) + ": ";
		if(eq == std::string::npos)
			throw config_error(where + "expected key = value");
		const std::string key = detail::trim(std::string_view(body).substr(0, eq));
		const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
		if(std::find(seen.begin(), seen.end(), key) != seen.end())
			throw config_error(where + "duplicate key '" + key + "'");
		seen.push_back(key);
		try {
			apply_setting(c, key, value);
		} catch(const config_error& e) {
			throw config_error(where + e.what());
		}
	}
	c.validate();
	return c;
}

inline ScenarioConfig load_config(const std::string& path)
{
	std::ifstream in(path);
	if(!in)
		throw io_error("cannot open config '" + path + "'");
	std::stringstream ss;
	ss << in.rdbuf();
	if(in.bad())
		throw io_error("error reading config '" + path + "'");
	return parse_config(ss.str(), path);
}

namespace detail {

// every key that affects the computed curves
inline std::string physics_text(const ScenarioConfig& c)
{
	std::string s;
	auto put = [&](const char* k, const std::string& v) { s.append(k).append(" = ").append(v).append("\n"); };
	put("coupling", to_string(c.params.coupling));
	put("omega0", format_double(c.params.omega0));
	put("Omega", format_double(c.params.Omega));
	put("lambda", format_double(c.params.lambda));
	put("field", to_string(c.field.kind));
	put("alpha", format_double(c.field.amplitude));
	put("alpha_phase", format_double(c.field.phase));
	put("fock_n", std::to_string(c.field.n));
	put("xi", format_double(c.field.xi));
	put("spin", format_spin(c.spin));
	put("t_start", format_double(c.grid.t_start));
	put("t_end", format_double(c.grid.t_end));
	put("n_points", std::to_string(c.grid.n_points));
	put("fock_dim", c.fock_dim ? std::to_string(*c.fock_dim) : "auto");
	put("harmonic_cutoff", std::to_string(c.harmonic_cutoff));
	put("samples_per_period", std::to_string(c.samples_per_period));
	return s;
}

} // namespace detail

/// Canonical key = value text; parse_config(format_config(c)) == c.
inline std::string format_config(const ScenarioConfig& c)
{
	std::string engines;
	for(Engine e : c.engines)
		engines += (engines.empty() ? "" : ",") + std::string(to_string(e));
	std::string s = "name = " + c.name + "\n" + detail::physics_text(c) + "engines = " + engines + "\n";
	if(!c.output.empty())
		s += "output = " + c.output + "\n";
	s += "format = " + std::string(to_string(c.format)) + "\n";
	return s;
}

/// 64-bit FNV-1a of the physics keys, as 16 hex digits.
inline std::string params_hash(const ScenarioConfig& c)
{
	std::uint64_t h = 14695981039346656037ull;
	for(unsigned char ch : detail::physics_text(c)) {
		h ^= ch;
		h *= 1099511628211ull;
	}
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
	return buf;
}

// ---- figure presets -------------------------------------------------------

inline const std::vector<std::string>& preset_names()
{
	static const std::vector<std::string> names{"fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig3"};
	return names;
}

/// One full collapse: t_end = 4 sqrt(2) / lambda.
inline double collapse_time(double lambda) { return 4.0 * std::numbers::sqrt2 / lambda; }

inline ScenarioConfig preset(const std::string& name)
{
	ScenarioConfig c;
	c.name = name;
	c.params.omega0 = 1.0;
	c.params.Omega = 1.0;
	c.field.kind = FieldConfig::Kind::displaced_fock;
	c.output = name + ".csv";

	auto fig1 = [&](int n) {
		c.params.coupling = Coupling::jcm;
		c.params.lambda = 0.05;
		c.field.amplitude = 10.0;
		c.field.n = n;
		c.engines = {Engine::exact, Engine::closed_form, Engine::fbrwa};
		c.grid = {0.0, collapse_time(0.05), 2001};
	};
	auto fig2 = [&](double lambda, double alpha) {
		c.params.coupling = Coupling::rabi;
		c.params.lambda = lambda;
		c.field.amplitude = alpha;
		c.field.n = 1;
		c.engines = {Engine::exact, Engine::fbrwa};
		c.grid = {0.0, collapse_time(lambda), 4001};
	};

	if(name == "fig1a")
		fig1(0);
	else if(name == "fig1b")
		fig1(1);
	else if(name == "fig1c")
		fig1(2);
	else if(name == "fig1d")
		fig1(10);
	else if(name == "fig2a")
		fig2(0.02, 10.0);
	else if(name == "fig2b")
		fig2(0.02, 20.0);
	else if(name == "fig2c")
		fig2(0.01, 40.0);
	else if(name == "fig3") {
		c.params.coupling = Coupling::jcm;
		c.params.lambda = 0.05;
		c.field.kind = FieldConfig::Kind::superposition;
		c.field.amplitude = 10.0;
		c.field.xi = 0.0;
		c.engines = {Engine::exact, Engine::closed_form, Engine::fbrwa};
		c.grid = {0.0, collapse_time(0.05), 2001};
	} else {
		std::string known;
		for(const auto& n : preset_names())
			known += " " + n;
		throw config_error("unknown figure '" + name + "' (known:" + known + ")");
	}
	c.validate();
	return c;
}

} // namespace qcfd::harness
