#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library's numerical kernels beyond constructing value types.

#include "hybridflow/bracket_engine.hpp"
#include "hybridflow/operator_algebra.hpp"
#include "hybridflow/oscillator_rep.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using hybridflow::Complex;
using hybridflow::ComplexMatrix;
using hybridflow::HermitianOperator;
using hybridflow::QmCoords;
using hybridflow::StateVector;

inline const double sqrt2 = std::sqrt(2.0);

inline HermitianOperator sigma_x() { return HermitianOperator(ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}); }
inline HermitianOperator sigma_y() { return HermitianOperator(ComplexMatrix{{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}}); }
inline HermitianOperator sigma_z() { return HermitianOperator(ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}); }

/// Test-side generator, deliberately not the library RNG.
struct Source {
	std::mt19937_64 engine;
	std::normal_distribution<double> normal{0.0, 1.0};
	explicit Source(std::uint64_t seed) : engine(seed) {}
	double operator()() { return normal(engine); }
};

inline ComplexMatrix random_matrix(std::size_t n, Source& src)
{
	ComplexMatrix m(n, n);
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < n; ++j) {
			m(i, j) = Complex(src(), src());
		}
	}
	return m;
}

inline HermitianOperator random_hermitian(std::size_t n, Source& src)
{
	ComplexMatrix m = random_matrix(n, src);
	ComplexMatrix h(n, n);
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < n; ++j) {
			h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
		}
	}
	return HermitianOperator(h);
}

inline StateVector random_state(std::size_t n, Source& src)
{
	std::vector<Complex> a(n);
	double norm2 = 0.0;
	for (auto& c : a) {
		c = Complex(src(), src());
		norm2 += std::norm(c);
	}
	for (auto& c : a) {
		c /= std::sqrt(norm2);
	}
	return StateVector(a);
}

/// Columns of a random unitary by modified Gram-Schmidt.
inline ComplexMatrix random_unitary(std::size_t n, Source& src)
{
	ComplexMatrix m = random_matrix(n, src);
	for (std::size_t j = 0; j < n; ++j) {
		for (std::size_t k = 0; k < j; ++k) {
			Complex dot = 0.0;
			for (std::size_t i = 0; i < n; ++i) {
				dot += std::conj(m(i, k)) * m(i, j);
			}
			for (std::size_t i = 0; i < n; ++i) {
				m(i, j) -= dot * m(i, k);
			}
		}
		double norm2 = 0.0;
		for (std::size_t i = 0; i < n; ++i) {
			norm2 += std::norm(m(i, j));
		}
		for (std::size_t i = 0; i < n; ++i) {
			m(i, j) /= std::sqrt(norm2);
		}
	}
	return m;
}

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b)
{
	ComplexMatrix c(a.rows(), b.cols());
	for (std::size_t i = 0; i < a.rows(); ++i) {
		for (std::size_t j = 0; j < b.cols(); ++j) {
			Complex s = 0.0;
			for (std::size_t k = 0; k < a.cols(); ++k) {
				s += a(i, k) * b(k, j);
			}
			c(i, j) = s;
		}
	}
	return c;
}

inline StateVector apply(const ComplexMatrix& a, const StateVector& v)
{
	StateVector out(a.rows());
	for (std::size_t i = 0; i < a.rows(); ++i) {
		for (std::size_t j = 0; j < a.cols(); ++j) {
			out[i] += a(i, j) * v[j];
		}
	}
	return out;
}

/// Σ_ij conj(ψ_i) A_ij ψ_j.
inline Complex brute_expectation(const ComplexMatrix& a, const StateVector& psi)
{
	Complex s = 0.0;
	for (std::size_t i = 0; i < psi.size(); ++i) {
		for (std::size_t j = 0; j < psi.size(); ++j) {
			s += std::conj(psi[i]) * a(i, j) * psi[j];
		}
	}
	return s;
}

/// ½ Σ_ij G_ij (X_i − iP_i)(X_j + iP_j), the quadratic form in canonical coordinates.
inline double quadratic_form(const HermitianOperator& g, const QmCoords& q)
{
	Complex s = 0.0;
	for (std::size_t i = 0; i < q.size(); ++i) {
		for (std::size_t j = 0; j < q.size(); ++j) {
			s += g(i, j) * Complex(q.X[i], -q.P[i]) * Complex(q.X[j], q.P[j]);
		}
	}
	return 0.5 * s.real();
}

/// Determinant by LU with partial pivoting.
inline Complex determinant(ComplexMatrix m)
{
	const std::size_t n = m.rows();
	Complex det = 1.0;
	for (std::size_t k = 0; k < n; ++k) {
		std::size_t piv = k;
		for (std::size_t i = k + 1; i < n; ++i) {
			if (std::abs(m(i, k)) > std::abs(m(piv, k))) {
				piv = i;
			}
		}
		if (piv != k) {
			for (std::size_t j = 0; j < n; ++j) {
				std::swap(m(k, j), m(piv, j));
			}
			det = -det;
		}
		det *= m(k, k);
		if (m(k, k) == 0.0) {
			return 0.0;
		}
		for (std::size_t i = k + 1; i < n; ++i) {
			const Complex f = m(i, k) / m(k, k);
			for (std::size_t j = k; j < n; ++j) {
				m(i, j) -= f * m(k, j);
			}
		}
	}
	return det;
}

/// exp(−iHt) by Taylor series with scaling and squaring.
inline ComplexMatrix propagator(const HermitianOperator& h, double t)
{
	const std::size_t n = h.dim();
	ComplexMatrix a(n, n);
	double norm = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < n; ++j) {
			a(i, j) = Complex(0, -t) * h(i, j);
			norm = std::max(norm, std::abs(a(i, j)) * static_cast<double>(n));
		}
	}
	int squarings = 0;
	while (norm > 0.25) {
		norm *= 0.5;
		++squarings;
	}
	const double scale = std::ldexp(1.0, -squarings);
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < n; ++j) {
			a(i, j) *= scale;
		}
	}
	ComplexMatrix result = ComplexMatrix::identity(n);
	ComplexMatrix term = ComplexMatrix::identity(n);
	for (int k = 1; k <= 30; ++k) {
		term = multiply(term, a);
		for (std::size_t i = 0; i < n; ++i) {
			for (std::size_t j = 0; j < n; ++j) {
				term(i, j) /= static_cast<double>(k);
				result(i, j) += term(i, j);
			}
		}
	}
	for (int s = 0; s < squarings; ++s) {
		result = multiply(result, result);
	}
	return result;
}

/// Central differences over every coordinate of a phase point, laid out as (dx, dp, dX, dP).
inline hybridflow::HybridGradient fd_gradient(const std::function<double(const hybridflow::HybridPhasePoint&)>& f,
                                              const hybridflow::HybridPhasePoint& z, double h)
{
	hybridflow::HybridGradient g;
	using Point = hybridflow::HybridPhasePoint;
	auto diff = [&](std::vector<double>& (*slot)(Point&), std::size_t i) {
		auto zp = z;
		auto zm = z;
		slot(zp)[i] += h;
		slot(zm)[i] -= h;
		return (f(zp) - f(zm)) / (2.0 * h);
	};
	for (std::size_t i = 0; i < z.x.size(); ++i) {
		g.dx.push_back(diff([](Point& w) -> std::vector<double>& { return w.x; }, i));
		g.dp.push_back(diff([](Point& w) -> std::vector<double>& { return w.p; }, i));
	}
	for (std::size_t i = 0; i < z.q.size(); ++i) {
		g.dX.push_back(diff([](Point& w) -> std::vector<double>& { return w.q.X; }, i));
		g.dP.push_back(diff([](Point& w) -> std::vector<double>& { return w.q.P; }, i));
	}
	return g;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
	double m = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		m = std::max(m, std::abs(a[i] - b[i]));
	}
	return m;
}

inline double max_abs_diff(const hybridflow::HybridGradient& a, const hybridflow::HybridGradient& b)
{
	return std::max({max_abs_diff(a.dx, b.dx), max_abs_diff(a.dp, b.dp), max_abs_diff(a.dX, b.dX), max_abs_diff(a.dP, b.dP)});
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b)
{
	double m = 0.0;
	for (std::size_t i = 0; i < a.rows(); ++i) {
		for (std::size_t j = 0; j < a.cols(); ++j) {
			m = std::max(m, std::abs(a(i, j) - b(i, j)));
		}
	}
	return m;
}

/// Point with n classical coordinates drawn N(0,1) and an on-sphere quantum part.
inline hybridflow::HybridPhasePoint random_point(std::size_t n, std::size_t N, Source& src)
{
	hybridflow::HybridPhasePoint z;
	for (std::size_t k = 0; k < n; ++k) {
		z.x.push_back(src());
		z.p.push_back(src());
	}
	const auto psi = random_state(N, src);
	z.q = QmCoords(N);
	for (std::size_t i = 0; i < N; ++i) {
		z.q.X[i] = sqrt2 * psi[i].real();
		z.q.P[i] = sqrt2 * psi[i].imag();
	}
	return z;
}

} // namespace oracle
