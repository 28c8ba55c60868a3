#pragma once

// Embedded Runge-Kutta 5(4) pair of Dormand and Prince with FSAL and
// standard step-size control. State is any Eigen dense vector/matrix type.

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qcfd {

struct OdeOptions
{
	double rtol = 1e-10;
	double atol = 1e-12;
	double max_step = std::numeric_limits<double>::infinity();
	long max_steps = 50'000'000;
};

struct OdeStats
{
	long accepted = 0;
	long rejected = 0;
	long rhs_evaluations = 0;
};

template <class State>
class DormandPrince
{
public:
	explicit DormandPrince(OdeOptions opt = {}) : opt_{opt} {}

	/// Advances (t, y) to t_end. The step size carries over between calls, so
	/// repeated calls over a fine output grid cost about the same as one call.
	template <class Rhs>
	void advance(Rhs&& rhs, double& t, State& y, double t_end)
	{
		if(t_end < t)
			throw numeric_error("integrator cannot step backwards");
		if(t_end == t)
			return;
		if(!have_k1_ || t != t_k1_) {
			k1_ = rhs(t, y);
			++stats_.rhs_evaluations;
			have_k1_ = true;
		}
		if(h_ <= 0.0)
			h_ = std::min({opt_.max_step, 1e-3 * std::max(1.0, std::abs(t_end - t)), t_end - t});

		while(t < t_end) {
			if(stats_.accepted + stats_.rejected > opt_.max_steps)
				throw numeric_error("integrator exceeded max_steps");
			const double remaining = t_end - t;
			const bool last = h_ >= remaining;
			const double h = last ? remaining : h_;
			if(h < 1e-14 * std::max(1.0, std::abs(t)))
				throw numeric_error("integrator step size underflow at t = " + std::to_string(t));

			const State k2 = rhs(t + h * c2, y + h * (a21 * k1_));
			const State k3 = rhs(t + h * c3, y + h * (a31 * k1_ + a32 * k2));
			const State k4 = rhs(t + h * c4, y + h * (a41 * k1_ + a42 * k2 + a43 * k3));
			const State k5 = rhs(t + h * c5, y + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
			const State k6 = rhs(t + h, y + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
			State y_new = y + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
			const State k7 = rhs(t + h, y_new);
			stats_.rhs_evaluations += 6;

			const State err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
			const auto scale = opt_.atol + opt_.rtol * y.array().abs().max(y_new.array().abs());
			const double err_norm = std::sqrt((err.array().abs() / scale).square().mean());

			if(!std::isfinite(err_norm))
				throw numeric_error("integrator produced a non-finite state");

			if(err_norm <= 1.0) {
				++stats_.accepted;
				t = last ? t_end : t + h;
				y = std::move(y_new);
				k1_ = k7;
				t_k1_ = t;
				const double fac = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
				// a clipped final step says nothing about the natural step size
				if(!last || h >= h_)
					h_ = std::min(opt_.max_step, h * fac);
			} else {
				++stats_.rejected;
				h_ = h * std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
			}
		}
	}

	[[nodiscard]] const OdeStats& stats() const noexcept { return stats_; }

private:
	static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
	static constexpr double a21 = 1.0 / 5;
	static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
	static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
	static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
	                        a54 = -212.0 / 729;
	static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
	                        a65 = -5103.0 / 18656;
	static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
	                        a76 = 11.0 / 84;
	static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
	                        e6 = 22.0 / 525, e7 = -1.0 / 40;

	OdeOptions opt_;
	OdeStats stats_;
	State k1_;
	double t_k1_ = 0.0;
	bool have_k1_ = false;
	double h_ = 0.0;
};

} // namespace qcfd
