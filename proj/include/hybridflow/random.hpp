#pragma once

#include <cstdint>
#include <limits>

namespace hybridflow {

/// xoshiro256** seeded through splitmix64. Bit-reproducible on every platform,
/// as are the uniform and normal draws built on it (std distributions are not).
class Rng {
public:
	using result_type = std::uint64_t;

	explicit Rng(std::uint64_t seed);

	static constexpr result_type min() { return 0; }
	static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
	result_type operator()();

	/// Uniform on [0, 1) with 53 random bits.
	double uniform();
	/// Standard normal via Box–Muller.
	double normal();

private:
	std::uint64_t s_[4];
	double spare_ = 0.0;
	bool has_spare_ = false;
};

} // namespace hybridflow
