#include "doctest.h"
#include "test_support.hpp"

#include "hybridflow/oscillator_rep.hpp"

#include <bit>
#include <cstdint>

using namespace hybridflow;

namespace {

std::uint64_t ulp_distance(double a, double b)
{
	if (a == b) {
		return 0;
	}
	const auto ia = std::bit_cast<std::int64_t>(a);
	const auto ib = std::bit_cast<std::int64_t>(b);
	if ((ia < 0) != (ib < 0)) {
		return UINT64_MAX;
	}
	return ia > ib ? static_cast<std::uint64_t>(ia - ib) : static_cast<std::uint64_t>(ib - ia);
}

} // namespace

TEST_SUITE("oscillator_rep") {

TEST_CASE("expand_state of basis and imaginary states")
{
	const auto q1 = expand_state(StateVector::basis(3, 0));
	CHECK(q1.X == std::vector<double>{oracle::sqrt2, 0.0, 0.0});
	CHECK(q1.P == std::vector<double>{0.0, 0.0, 0.0});
	const auto q2 = expand_state(StateVector{Complex(0, 1), 0.0, 0.0});
	CHECK(q2.X == std::vector<double>{0.0, 0.0, 0.0});
	CHECK(q2.P == std::vector<double>{oracle::sqrt2, 0.0, 0.0});
}

TEST_CASE("reconstruct_state examples")
{
	const auto a = reconstruct_state(QmCoords({oracle::sqrt2, 0.0}, {0.0, 0.0}));
	CHECK(std::abs(a[0] - Complex(1.0)) <= 1e-16);
	CHECK(a[1] == Complex(0.0));
	const QmCoords q({1.0, 1.0}, {0.0, 0.0});
	const auto b = reconstruct_state(q);
	CHECK(std::abs(b[0] - Complex(1.0 / oracle::sqrt2)) <= 1e-16);
	CHECK(std::abs(b[1] - Complex(1.0 / oracle::sqrt2)) <= 1e-16);
	CHECK(normalization_constraint(q) == 1.0);
}

TEST_CASE("on-sphere coordinates reconstruct to unit vectors")
{
	oracle::Source src(11);
	for (int trial = 0; trial < 50; ++trial) {
		const auto z = oracle::random_point(0, 6, src);
		CHECK(std::abs(reconstruct_state(z.q).norm() - 1.0) <= 1e-12);
	}
}

TEST_CASE("expand and reconstruct are mutually inverse to within one ulp")
{
	oracle::Source src(12);
	std::uint64_t worst = 0;
	for (int trial = 0; trial < 200; ++trial) {
		const auto psi = oracle::random_state(5, src);
		const auto back = reconstruct_state(expand_state(psi));
		for (std::size_t i = 0; i < 5; ++i) {
			worst = std::max({worst, ulp_distance(back[i].real(), psi[i].real()), ulp_distance(back[i].imag(), psi[i].imag())});
		}
		QmCoords q(5);
		for (std::size_t i = 0; i < 5; ++i) {
			q.X[i] = src();
			q.P[i] = src();
		}
		const auto q2 = expand_state(reconstruct_state(q));
		for (std::size_t i = 0; i < 5; ++i) {
			worst = std::max({worst, ulp_distance(q2.X[i], q.X[i]), ulp_distance(q2.P[i], q.P[i])});
		}
	}
	CHECK(worst <= 1);
}

TEST_CASE("dyadic amplitudes round-trip exactly")
{
	const StateVector psi{0.5, Complex(-0.25, 0.75), Complex(0.0, -1.0)};
	CHECK(reconstruct_state(expand_state(psi)) == psi);
}

TEST_CASE("normalization_constraint examples")
{
	CHECK(normalization_constraint(QmCoords({oracle::sqrt2, 0.0, 0.0}, {0.0, 0.0, 0.0})) == doctest::Approx(1.0).epsilon(1e-15));
	CHECK(normalization_constraint(QmCoords(4)) == 0.0);
	const QmCoords q({0.3, -1.2, 0.7}, {0.1, 0.4, -0.9});
	QmCoords s = q;
	for (std::size_t i = 0; i < 3; ++i) {
		s.X[i] *= 3.0;
		s.P[i] *= 3.0;
	}
	CHECK(normalization_constraint(s) == doctest::Approx(9.0 * normalization_constraint(q)).epsilon(1e-15));
	CHECK_THROWS_AS(QmCoords({1.0}, {1.0, 2.0}), DimensionError);
}

TEST_CASE("observable_value of a diagonal operator is a sum of oscillator energies")
{
	oracle::Source src(13);
	const std::vector<double> e{0.5, -1.0, 2.5, 4.0};
	const auto g = HermitianOperator::diagonal(e);
	const auto z = oracle::random_point(0, 4, src);
	double ref = 0.0;
	for (std::size_t i = 0; i < 4; ++i) {
		ref += 0.5 * e[i] * (z.q.X[i] * z.q.X[i] + z.q.P[i] * z.q.P[i]);
	}
	CHECK(observable_value(g, z.q) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("observable_value of the identity is the constraint function")
{
	const QmCoords q({0.3, -1.2, 0.7}, {0.1, 0.4, -0.9});
	CHECK(observable_value(HermitianOperator::identity(3), q) == doctest::Approx(normalization_constraint(q)).epsilon(1e-15));
}

TEST_CASE("observable_value matches the quadratic form double sum, on and off the sphere")
{
	oracle::Source src(14);
	for (int trial = 0; trial < 20; ++trial) {
		const auto g = oracle::random_hermitian(4, src);
		auto q = oracle::random_point(0, 4, src).q;
		CHECK(std::abs(observable_value(g, q) - oracle::quadratic_form(g, q)) <= 1e-12);
		for (auto& v : q.X) {
			v *= 1.7;
		}
		CHECK(std::abs(observable_value(g, q) - oracle::quadratic_form(g, q)) <= 1e-12);
	}
}

TEST_CASE("observable_gradient closed forms")
{
	const QmCoords q({0.3, -1.2, 0.7}, {0.1, 0.4, -0.9});
	const auto gi = observable_gradient(HermitianOperator::identity(3), q);
	CHECK(oracle::max_abs_diff(gi.dX, q.X) <= 1e-15);
	CHECK(oracle::max_abs_diff(gi.dP, q.P) <= 1e-15);
	const std::vector<double> e{2.0, -0.5, 3.0};
	const auto gd = observable_gradient(HermitianOperator::diagonal(e), q);
	for (std::size_t k = 0; k < 3; ++k) {
		CHECK(gd.dX[k] == doctest::Approx(e[k] * q.X[k]).epsilon(1e-15));
		CHECK(gd.dP[k] == doctest::Approx(e[k] * q.P[k]).epsilon(1e-15));
	}
}

TEST_CASE("observable_gradient agrees with central differences at 20 points")
{
	oracle::Source src(15);
	double worst = 0.0;
	for (int trial = 0; trial < 20; ++trial) {
		const auto g = oracle::random_hermitian(5, src);
		const auto z = oracle::random_point(0, 5, src);
		const auto fd = oracle::fd_gradient([&](const HybridPhasePoint& w) { return oracle::quadratic_form(g, w.q); }, z, 1e-5);
		const auto an = observable_gradient(g, z.q);
		worst = std::max({worst, oracle::max_abs_diff(fd.dX, an.dX), oracle::max_abs_diff(fd.dP, an.dP)});
	}
	CHECK(worst <= 1e-6);
}

TEST_CASE("qm_bracket trivial cases")
{
	oracle::Source src(16);
	const auto f = oracle::random_hermitian(4, src);
	const auto q = oracle::random_point(0, 4, src).q;
	CHECK(std::abs(qm_bracket(f, f, q)) <= 1e-15);
	const auto d1 = HermitianOperator::diagonal(std::vector<double>{1.0, 2.0, 3.0, 4.0});
	const auto d2 = HermitianOperator::diagonal(std::vector<double>{-2.0, 0.5, 1.0, 7.0});
	CHECK(std::abs(qm_bracket(d1, d2, q)) <= 1e-14);
}

TEST_CASE("qm_bracket of sigma_x and sigma_y equals 2<sigma_z>")
{
	oracle::Source src(17);
	for (int trial = 0; trial < 10; ++trial) {
		const auto q = oracle::random_point(0, 2, src).q;
		const auto psi = reconstruct_state(q);
		const double ref = 2.0 * oracle::brute_expectation(oracle::sigma_z().matrix(), psi).real();
		CHECK(std::abs(qm_bracket(oracle::sigma_x(), oracle::sigma_y(), q) - ref) <= 1e-14);
	}
}

TEST_CASE("qm_bracket equals the commutator expectation at 100 points")
{
	oracle::Source src(18);
	double worst = 0.0;
	for (int pair = 0; pair < 10; ++pair) {
		const std::size_t n = 2 + static_cast<std::size_t>(pair % 7);
		const auto f = oracle::random_hermitian(n, src);
		const auto g = oracle::random_hermitian(n, src);
		const auto c = commutator(f, g) * Complex(0, -1);
		for (int k = 0; k < 100; ++k) {
			const auto q = oracle::random_point(0, n, src).q;
			const auto ref = oracle::brute_expectation(c, reconstruct_state(q)).real();
			worst = std::max(worst, std::abs(qm_bracket(f, g, q) - ref));
		}
	}
	CHECK(worst <= 1e-12);
}

TEST_CASE("the constraint is a Casimir")
{
	oracle::Source src(19);
	const auto id = HermitianOperator::identity(6);
	for (int trial = 0; trial < 20; ++trial) {
		const auto g = oracle::random_hermitian(6, src);
		const auto q = oracle::random_point(0, 6, src).q;
		CHECK(std::abs(qm_bracket(id, g, q)) <= 1e-13);
	}
}

TEST_CASE("in_basis diagonalises the operator it was built from")
{
	oracle::Source src(20);
	const auto h = oracle::random_hermitian(5, src);
	const auto eig = eigh(h);
	const auto d = in_basis(h, eig);
	CHECK(oracle::max_abs_diff(d.matrix(), ComplexMatrix::diagonal(eig.values)) <= 1e-12);
}

TEST_CASE("dimension mismatches throw")
{
	const QmCoords q(3);
	CHECK_THROWS_AS(observable_value(HermitianOperator::identity(2), q), DimensionError);
	CHECK_THROWS_AS(observable_gradient(HermitianOperator::identity(2), q), DimensionError);
	CHECK_THROWS_AS(qm_bracket(HermitianOperator::identity(3), HermitianOperator::identity(2), q), DimensionError);
}

} // TEST_SUITE
