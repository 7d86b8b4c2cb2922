#include "hybridflow/random.hpp"

#include <cmath>
#include <numbers>

namespace hybridflow {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
	std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
	z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
	z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
	return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

Rng::Rng(std::uint64_t seed)
{
	for (auto& s : s_) {
		s = splitmix64(seed);
	}
}

Rng::result_type Rng::operator()()
{
	const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
	const std::uint64_t t = s_[1] << 17;
	s_[2] ^= s_[0];
	s_[3] ^= s_[1];
	s_[1] ^= s_[2];
	s_[0] ^= s_[3];
	s_[2] ^= t;
	s_[3] = rotl(s_[3], 45);
	return result;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::normal()
{
	if (has_spare_) {
		has_spare_ = false;
		return spare_;
	}
	double u1 = uniform();
	while (u1 == 0.0) {
		u1 = uniform();
	}
	const double u2 = uniform();
	const double r = std::sqrt(-2.0 * std::log(u1));
	const double theta = 2.0 * std::numbers::pi * u2;
	spare_ = r * std::sin(theta);
	has_spare_ = true;
	return r * std::cos(theta);
}

} // namespace hybridflow
