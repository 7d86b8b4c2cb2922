#pragma once

#include <stdexcept>
#include <string>

namespace hybridflow {

/// Operands disagree in Hilbert-space or phase-space dimension.
class DimensionError : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

/// Input violates a structural requirement (self-adjointness, positivity, parameter range).
class ValidationError : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed: non-convergence, non-finite values.
class NumericalError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_same_dim(std::size_t a, std::size_t b, const char* what)
{
	if (a != b) {
		throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
	}
}

} // namespace detail

} // namespace hybridflow
