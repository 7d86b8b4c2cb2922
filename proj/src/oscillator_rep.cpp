#include "hybridflow/oscillator_rep.hpp"

#include "hybridflow/errors.hpp"

#include <cmath>
#include <numbers>

namespace hybridflow {

namespace {

constexpr double sqrt2 = std::numbers::sqrt2;

std::vector<Complex> amplitudes_of(const QmCoords& q)
{
	std::vector<Complex> c(q.size());
	for (std::size_t i = 0; i < q.size(); ++i) {
		c[i] = Complex(q.X[i] / sqrt2, q.P[i] / sqrt2);
	}
	return c;
}

std::vector<Complex> apply(const HermitianOperator& g, const std::vector<Complex>& c)
{
	const std::size_t n = c.size();
	std::vector<Complex> out(n);
	for (std::size_t i = 0; i < n; ++i) {
		Complex s = 0.0;
		for (std::size_t j = 0; j < n; ++j) {
			s += g(i, j) * c[j];
		}
		out[i] = s;
	}
	return out;
}

} // namespace

QmCoords::QmCoords(std::vector<double> x, std::vector<double> p)
	: X(std::move(x)), P(std::move(p))
{
	detail::require_same_dim(X.size(), P.size(), "QmCoords");
}

QmCoords expand_state(const StateVector& psi)
{
	QmCoords q(psi.size());
	for (std::size_t i = 0; i < psi.size(); ++i) {
		q.X[i] = sqrt2 * psi[i].real();
		q.P[i] = sqrt2 * psi[i].imag();
	}
	return q;
}

StateVector reconstruct_state(const QmCoords& q)
{
	detail::require_same_dim(q.X.size(), q.P.size(), "reconstruct_state");
	return StateVector(amplitudes_of(q));
}

double normalization_constraint(const QmCoords& q)
{
	double s = 0.0;
	for (std::size_t i = 0; i < q.size(); ++i) {
		s += q.X[i] * q.X[i] + q.P[i] * q.P[i];
	}
	return 0.5 * s;
}

bool on_sphere(const QmCoords& q, double tol) { return std::abs(normalization_constraint(q) - 1.0) <= tol; }

double observable_value(const HermitianOperator& g, const QmCoords& q)
{
	detail::require_same_dim(g.dim(), q.size(), "observable_value");
	const auto c = amplitudes_of(q);
	const auto gc = apply(g, c);
	double s = 0.0;
	for (std::size_t i = 0; i < c.size(); ++i) {
		// Re(conj(c_i)·(Gc)_i); the imaginary part cancels exactly for Hermitian G.
		s += c[i].real() * gc[i].real() + c[i].imag() * gc[i].imag();
	}
	return s;
}

QmGradient observable_gradient(const HermitianOperator& g, const QmCoords& q)
{
	detail::require_same_dim(g.dim(), q.size(), "observable_gradient");
	const auto gc = apply(g, amplitudes_of(q));
	QmGradient grad{std::vector<double>(q.size()), std::vector<double>(q.size())};
	for (std::size_t k = 0; k < q.size(); ++k) {
		grad.dX[k] = sqrt2 * gc[k].real();
		grad.dP[k] = sqrt2 * gc[k].imag();
	}
	return grad;
}

double qm_bracket(const HermitianOperator& f, const HermitianOperator& g, const QmCoords& q)
{
	const auto df = observable_gradient(f, q);
	const auto dg = observable_gradient(g, q);
	double s = 0.0;
	for (std::size_t i = 0; i < q.size(); ++i) {
		s += df.dX[i] * dg.dP[i] - df.dP[i] * dg.dX[i];
	}
	return s;
}

HermitianOperator in_basis(const HermitianOperator& a, const EigenDecomposition& basis)
{
	detail::require_same_dim(a.dim(), basis.vectors.rows(), "in_basis");
	return HermitianOperator(basis.vectors.adjoint() * a.matrix() * basis.vectors);
}

} // namespace hybridflow
