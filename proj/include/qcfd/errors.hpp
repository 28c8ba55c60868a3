#pragma once

#include <stdexcept>
#include <string>

namespace qcfd {

/// Base class for every error raised by the library.
class error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

/// Bad user input: invalid parameters, engine/regime mismatch, malformed config.
class config_error : public error
{
public:
	using error::error;
};

/// Two time series sampled on different grids.
class grid_error : public config_error
{
public:
	using config_error::config_error;
};

/// Numerical failure: integrator tolerance, eigensolver, gauge or norm drift.
class numeric_error : public error
{
public:
	using error::error;
};

/// The Fock truncation is too small for the requested state or time window.
class truncation_error : public numeric_error
{
public:
	truncation_error(const std::string& what, int suggested_dim)
	    : numeric_error(what + " (suggested fock_dim >= " + std::to_string(suggested_dim) + ")"),
	      suggested_dim_{suggested_dim}
	{
	}

	[[nodiscard]] int suggested_dim() const noexcept { return suggested_dim_; }

private:
	int suggested_dim_;
};

/// Quasienergy crossing q+ - q- = m * omega0 with m odd.
class resonance_error : public numeric_error
{
public:
	resonance_error(const std::string& what, int harmonic_order)
	    : numeric_error(what + " (q+ - q- = " + std::to_string(harmonic_order) + " * omega0)"),
	      order_{harmonic_order}
	{
	}

	/// The odd integer 2k + 2l + 1 at which the crossing occurs.
	[[nodiscard]] int harmonic_order() const noexcept { return order_; }

private:
	int order_;
};

class io_error : public error
{
public:
	using error::error;
};

} // namespace qcfd
