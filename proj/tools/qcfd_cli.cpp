// qcfd: run spin-boson scenarios, reproduce the figure presets, print Floquet
// data and compare CSV outputs.

#include <qcfd/qcfd.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qcfd;
using namespace qcfd::harness;

enum exit_code { ok = 0, bad_config = 2, bad_numeric = 3, bad_io = 4 };

struct Overrides
{
	std::map<std::string, std::string> values;

	void attach(CLI::App* cmd)
	{
		static const std::pair<const char*, const char*> flags[] = {
		    {"--lambda", "lambda"},   {"--alpha", "alpha"},       {"--coupling", "coupling"},
		    {"--field", "field"},     {"--engine", "engines"},    {"--t-end", "t_end"},
		    {"--n-points", "n_points"}, {"--out", "output"},       {"--format", "format"},
		};
		for(const auto& [flag, key] : flags)
			cmd->add_option_function<std::string>(
			    flag, [this, key = std::string(key)](const std::string& v) { values[key] = v; },
			    "override '" + std::string(key) + "'");
	}

	void apply(ScenarioConfig& c) const
	{
		for(const auto& [k, v] : values)
			apply_setting(c, k, v);
		c.validate();
	}
};

void print_summary(const ScenarioConfig& c, const std::vector<TimeSeries>& series)
{
	std::fprintf(stderr, "%s [%s]\n", c.name.c_str(), params_hash(c).c_str());
	const TimeSeries* exact = nullptr;
	for(const auto& s : series)
		if(s.engine == "exact")
			exact = &s;
	for(const auto& s : series) {
		std::fprintf(stderr, "  %-12s", s.engine.c_str());
		if(s.info.fock_dim)
			std::fprintf(stderr, " fock_dim=%d", s.info.fock_dim);
		if(std::isfinite(s.info.lambda_eff))
			std::fprintf(stderr, " lambda_eff=%.10g", s.info.lambda_eff);
		if(exact && &s != exact)
			std::fprintf(stderr, " sup|p - exact|=%.3e", compare(s, *exact).sup_norm);
		std::fprintf(stderr, "\n");
	}
}

void write_output(const ScenarioConfig& c, const std::vector<TimeSeries>& series)
{
	if(c.output.empty() || c.output == "-") {
		if(c.format == OutputFormat::both)
			throw config_error("format 'both' needs an output path");
		std::cout << (c.format == OutputFormat::svg ? format_svg(series, c.name) : format_csv(series));
		return;
	}
	for(const auto& path : emit(series, c.format, c.output, c.name))
		std::fprintf(stderr, "wrote %s\n", path.c_str());
}

int simulate(const std::string& path, const Overrides& o)
{
	ScenarioConfig c = load_config(path);
	o.apply(c);
	const auto series = run_scenario(c);
	print_summary(c, series);
	write_output(c, series);
	return ok;
}

int figure(const std::string& name, const Overrides& o, bool dump, unsigned threads)
{
	std::vector<ScenarioConfig> configs;
	if(name == "all") {
		for(const auto& n : preset_names())
			configs.push_back(preset(n));
	} else {
		configs.push_back(preset(name));
	}
	for(auto& c : configs) {
		o.apply(c);
		if(configs.size() > 1 && o.values.count("output"))
			throw config_error("--out cannot be combined with 'figure all'");
	}
	if(dump) {
		for(const auto& c : configs)
			std::cout << format_config(c) << (configs.size() > 1 ? "\n" : "");
		return ok;
	}
	const auto results = run_scenarios(configs, threads);
	for(std::size_t i = 0; i < configs.size(); ++i) {
		print_summary(configs[i], results[i]);
		write_output(configs[i], results[i]);
	}
	return ok;
}

int floquet(const std::string& path, const Overrides& o)
{
	ScenarioConfig c = load_config(path);
	o.apply(c);
	const ModelParams m = c.model();
	require_real_reference(m);
	const FloquetSolution sol = floquet_solve(m, c.harmonic_cutoff, c.samples_per_period);
	std::string out = "quantity,harmonic,value\n";
	char buf[96];
	auto row = [&](const char* q, const std::string& h, double v) {
		std::snprintf(buf, sizeof buf, "%.17g", v);
		out += std::string(q) + "," + h + "," + buf + "\n";
	};
	row("q_plus", "", sol.q_plus);
	row("q_minus", "", sol.q_minus);
	row("lambda_eff", "", lambda_eff(sol, m.lambda));
	row("alpha_ref", "", m.alpha_mod);
	for(int h = sol.min_a_harmonic(); h <= sol.max_a_harmonic(); h += 2)
		row("A", std::to_string(h), sol.A(h));
	for(int h = sol.min_b_harmonic(); h <= sol.max_b_harmonic(); h += 2)
		row("B", std::to_string(h), sol.B(h));
	const auto dest = o.values.find("output");
	if(dest == o.values.end() || dest->second.empty() || dest->second == "-")
		std::cout << out;
	else
		harness::detail::write_file(dest->second, out);
	return ok;
}

const TimeSeries& pick(const std::vector<TimeSeries>& all, const std::string& engine, const std::string& path)
{
	if(all.empty())
		throw config_error("'" + path + "' holds no series");
	if(engine.empty())
		return all.front();
	for(const auto& s : all)
		if(s.engine == engine)
			return s;
	throw config_error("'" + path + "' has no series for engine '" + engine + "'");
}

int compare_files(const std::string& a_path, const std::string& b_path, const std::string& ea,
                  const std::string& eb, std::optional<double> t_min, std::optional<double> t_max)
{
	const auto a_all = read_csv(a_path);
	const auto b_all = read_csv(b_path);
	const TimeSeries& a = pick(a_all, ea, a_path);
	// the same file twice with no engine named: compare its first two series
	const TimeSeries& b = (eb.empty() && a_path == b_path && ea.empty() && b_all.size() > 1) ? b_all[1]
	                                                                                       : pick(b_all, eb, b_path);
	TimeWindow w;
	if(t_min)
		w.t_min = *t_min;
	if(t_max)
		w.t_max = *t_max;
	const ComparisonMetrics m = compare(a, b, w);
	std::printf("metric,value\n");
	std::printf("engine_a,%s\nengine_b,%s\n", a.engine.c_str(), b.engine.c_str());
	std::printf("samples,%zu\n", m.samples);
	std::printf("sup_norm,%.17g\nrmse,%.17g\n", m.sup_norm, m.rmse);
	std::printf("dominant_frequency_a,%.17g\ndominant_frequency_b,%.17g\n", m.dominant_frequency_a,
	            m.dominant_frequency_b);
	std::printf("frequency_shift,%.17g\nfrequency_bin,%.17g\n", m.frequency_shift, m.frequency_bin);
	return ok;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Spin-boson collapse and revival: exact, Floquet and closed-form engines"};
	app.require_subcommand(1);

	std::string config_path, figure_name, csv_a, csv_b, engine_a, engine_b;
	Overrides sim_o, fig_o, flq_o;
	bool dump = false;
	unsigned threads = 1;
	std::optional<double> t_min, t_max;

	auto* sim = app.add_subcommand("simulate", "run the engines of a scenario config");
	sim->add_option("config", config_path, "key = value scenario file")->required();
	sim_o.attach(sim);

	auto* fig = app.add_subcommand("figure", "run a figure preset (fig1a..fig1d, fig2a..fig2c, fig3, all)");
	fig->add_option("name", figure_name)->required();
	fig->add_flag("--dump-config", dump, "print the preset as a config file instead of running it");
	fig->add_option("--threads", threads, "worker threads for 'all'")->check(CLI::PositiveNumber);
	fig_o.attach(fig);

	auto* flq = app.add_subcommand("floquet", "print q+-, A, B and lambda_eff of a scenario as CSV");
	flq->add_option("config", config_path)->required();
	flq_o.attach(flq);

	auto* cmp = app.add_subcommand("compare", "sup-norm, RMSE and dominant frequencies of two CSV series");
	cmp->add_option("csv_a", csv_a)->required();
	cmp->add_option("csv_b", csv_b)->required();
	cmp->add_option("--engine-a", engine_a, "series to take from csv_a (default: first)");
	cmp->add_option("--engine-b", engine_b, "series to take from csv_b (default: first)");
	cmp->add_option("--t-min", t_min);
	cmp->add_option("--t-max", t_max);

	try {
		app.parse(argc, argv);
	} catch(const CLI::ParseError& e) {
		return app.exit(e) == 0 ? ok : bad_config;
	}

	try {
		if(*sim)
			return simulate(config_path, sim_o);
		if(*fig)
			return figure(figure_name, fig_o, dump, threads);
		if(*flq)
			return floquet(config_path, flq_o);
		if(*cmp)
			return compare_files(csv_a, csv_b, engine_a, engine_b, t_min, t_max);
	} catch(const config_error& e) {
		std::fprintf(stderr, "qcfd: configuration error: %s\n", e.what());
		return bad_config;
	} catch(const numeric_error& e) {
		std::fprintf(stderr, "qcfd: numeric error: %s\n", e.what());
		return bad_numeric;
	} catch(const io_error& e) {
		std::fprintf(stderr, "qcfd: I/O error: %s\n", e.what());
		return bad_io;
	}
	return ok;
}
