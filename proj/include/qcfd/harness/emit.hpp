#pragma once

// CSV and SVG output for time series, plus the CSV reader used by `compare`.

#include "run.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

namespace qcfd::harness {

inline const char* csv_header = "t,engine,p,params_hash";

/// One row per (t, engine), grouped by engine, 17 significant digits.
inline std::string format_csv(const std::vector<TimeSeries>& series)
{
	std::string out = std::string(csv_header) + "\n";
	char buf[96];
	for(const auto& s : series) {
		s.validate();
		if(s.engine.find_first_of(",\n\"") != std::string::npos)
			throw config_error("engine label '" + s.engine + "' cannot be written to CSV");
		for(std::size_t i = 0; i < s.t.size(); ++i) {
			std::snprintf(buf, sizeof buf, "%.17g", s.t[i]);
			out += buf;
			out += ',';
			out += s.engine;
			std::snprintf(buf, sizeof buf, ",%.17g,", s.p[i]);
			out += buf;
			out += s.info.params_hash;
			out += '\n';
		}
	}
	return out;
}

/// Inverse of format_csv. Rows of one engine need not be contiguous; series come
/// back in order of first appearance.
inline std::vector<TimeSeries> parse_csv(const std::string& text, const std::string& source = "<csv>")
{
	std::istringstream in(text);
	std::string line;
	if(!std::getline(in, line) || detail::trim(line) != csv_header)
		throw config_error(source + ": expected header '" + csv_header + "'");
	std::vector<TimeSeries> out;
	std::map<std::string, std::size_t> index;
	int lineno = 1;
	while(std::getline(in, line)) {
		++lineno;
		if(detail::trim(line).empty())
			continue;
		const auto f = detail::split(line, ',');
		const std::string where = source + ":" + std::to_string(lineno) + ": ";
		if(f.size() != 4)
			throw config_error(where + "expected 4 fields");
		auto [it, fresh] = index.try_emplace(f[1], out.size());
		if(fresh) {
			out.emplace_back();
			out.back().engine = f[1];
			out.back().info.params_hash = f[3];
		}
		TimeSeries& s = out[it->second];
		try {
			s.t.push_back(detail::parse_double("t", f[0]));
			s.p.push_back(detail::parse_double("p", f[2]));
		} catch(const config_error& e) {
			throw config_error(where + e.what());
		}
		if(s.info.params_hash != f[3])
			throw config_error(where + "params_hash changes within series '" + f[1] + "'");
	}
	return out;
}

namespace detail {

inline std::string svg_escape(const std::string& s)
{
	std::string out;
	for(char c : s) {
		switch(c) {
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		default: out += c;
		}
	}
	return out;
}

inline std::string num(double x, int prec = 6)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.*g", prec, x);
	return buf;
}

} // namespace detail

/// Self-contained SVG line plot: axes with ticks, one polyline per series, legend.
inline std::string format_svg(const std::vector<TimeSeries>& series, const std::string& title = "")
{
	using detail::num;
	constexpr double W = 800, H = 480, left = 70, right = 170, top = 40, bottom = 60;
	constexpr double pw = W - left - right, ph = H - top - bottom;
	static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

	double t0 = std::numeric_limits<double>::infinity(), t1 = -t0;
	for(const auto& s : series) {
		s.validate();
		if(!s.t.empty()) {
			t0 = std::min(t0, s.t.front());
			t1 = std::max(t1, s.t.back());
		}
	}
	if(!(t1 > t0)) {
		t0 = std::isfinite(t0) ? t0 : 0.0;
		t1 = t0 + 1.0;
	}
	auto x = [&](double t) { return left + pw * (t - t0) / (t1 - t0); };
	auto y = [&](double p) { return top + ph * (1.0 - p); };

	std::ostringstream o;
	o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
	  << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
	  << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
	  << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
	if(!title.empty())
		o << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
		  << detail::svg_escape(title) << "</text>\n";

	o << "<g stroke=\"black\" stroke-width=\"1\">\n"
	  << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\"/>\n"
	  << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n";
	for(int i = 0; i <= 5; ++i) {
		const double tx = x(t0 + (t1 - t0) * i / 5.0);
		const double py = y(i / 5.0);
		o << "<line x1=\"" << num(tx) << "\" y1=\"" << top + ph << "\" x2=\"" << num(tx) << "\" y2=\"" << top + ph + 5
		  << "\"/>\n"
		  << "<line x1=\"" << left - 5 << "\" y1=\"" << num(py) << "\" x2=\"" << left << "\" y2=\"" << num(py) << "\"/>\n";
	}
	o << "</g>\n<g fill=\"black\">\n";
	for(int i = 0; i <= 5; ++i) {
		o << "<text x=\"" << num(x(t0 + (t1 - t0) * i / 5.0)) << "\" y=\"" << top + ph + 20
		  << "\" text-anchor=\"middle\">" << num(t0 + (t1 - t0) * i / 5.0, 4) << "</text>\n"
		  << "<text x=\"" << left - 9 << "\" y=\"" << num(y(i / 5.0) + 4) << "\" text-anchor=\"end\">" << num(i / 5.0)
		  << "</text>\n";
	}
	o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">t</text>\n"
	  << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << top + ph / 2
	  << ")\">P(+z)</text>\n</g>\n";

	for(std::size_t k = 0; k < series.size(); ++k) {
		const auto& s = series[k];
		const char* color = colors[k % std::size(colors)];
		o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
		for(std::size_t i = 0; i < s.t.size(); ++i)
			o << (i ? " " : "") << num(x(s.t[i])) << ',' << num(y(std::clamp(s.p[i], 0.0, 1.0)));
		o << "\"/>\n";
		const double ly = top + 10 + 20.0 * double(k);
		o << "<line x1=\"" << W - right + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 45 << "\" y2=\"" << ly
		  << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
		  << "<text x=\"" << W - right + 52 << "\" y=\"" << ly + 4 << "\">" << detail::svg_escape(s.engine)
		  << "</text>\n";
	}
	o << "</svg>\n";
	return o.str();
}

namespace detail {

inline std::mutex& path_mutex(const std::string& path)
{
	static std::mutex guard;
	static std::map<std::string, std::unique_ptr<std::mutex>> locks;
	std::scoped_lock lock(guard);
	auto& m = locks[path];
	if(!m)
		m = std::make_unique<std::mutex>();
	return *m;
}

inline void write_file(const std::string& path, const std::string& content)
{
	std::scoped_lock lock(path_mutex(std::filesystem::absolute(path).lexically_normal().string()));
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if(!out)
		throw io_error("cannot open '" + path + "' for writing");
	out << content;
	out.close();
	if(!out)
		throw io_error("error writing '" + path + "'");
}

} // namespace detail

inline std::vector<TimeSeries> read_csv(const std::string& path)
{
	std::ifstream in(path, std::ios::binary);
	if(!in)
		throw io_error("cannot open '" + path + "'");
	std::stringstream ss;
	ss << in.rdbuf();
	return parse_csv(ss.str(), path);
}

/// Writes the series and returns the paths written. `both` derives .csv and .svg
/// siblings from `path`.
inline std::vector<std::string> emit(const std::vector<TimeSeries>& series, OutputFormat format,
                                     const std::string& path, const std::string& title = "")
{
	if(series.empty())
		throw config_error("nothing to emit: the series list is empty");
	if(path.empty())
		throw config_error("no output path given");
	std::vector<std::string> written;
	if(format == OutputFormat::csv) {
		const std::string text = format_csv(series);
		detail::write_file(path, text);
		written.push_back(path);
	} else if(format == OutputFormat::svg) {
		const std::string text = format_svg(series, title);
		detail::write_file(path, text);
		written.push_back(path);
	} else {
		const std::string csv = std::filesystem::path(path).replace_extension(".csv").string();
		const std::string svg = std::filesystem::path(path).replace_extension(".svg").string();
		const std::string csv_text = format_csv(series), svg_text = format_svg(series, title);
		detail::write_file(csv, csv_text);
		detail::write_file(svg, svg_text);
		written = {csv, svg};
	}
	return written;
}

} // namespace qcfd::harness
