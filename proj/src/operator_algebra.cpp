#include "hybridflow/operator_algebra.hpp"

#include "hybridflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hybridflow {

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
	: rows_(rows), cols_(cols), data_(rows * cols)
{
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
{
	rows_ = rows.size();
	cols_ = rows_ == 0 ? 0 : rows.begin()->size();
	data_.reserve(rows_ * cols_);
	for (const auto& row : rows) {
		if (row.size() != cols_) {
			throw DimensionError("ComplexMatrix: ragged initializer");
		}
		data_.insert(data_.end(), row.begin(), row.end());
	}
}

ComplexMatrix ComplexMatrix::identity(std::size_t n)
{
	ComplexMatrix m(n, n);
	for (std::size_t i = 0; i < n; ++i) {
		m(i, i) = 1.0;
	}
	return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values)
{
	ComplexMatrix m(values.size(), values.size());
	for (std::size_t i = 0; i < values.size(); ++i) {
		m(i, i) = values[i];
	}
	return m;
}

ComplexMatrix ComplexMatrix::adjoint() const
{
	ComplexMatrix out(cols_, rows_);
	for (std::size_t i = 0; i < rows_; ++i) {
		for (std::size_t j = 0; j < cols_; ++j) {
			out(j, i) = std::conj((*this)(i, j));
		}
	}
	return out;
}

double ComplexMatrix::max_abs() const
{
	double m = 0.0;
	for (const auto& z : data_) {
		m = std::max(m, std::abs(z));
	}
	return m;
}

double ComplexMatrix::frobenius_norm() const
{
	double s = 0.0;
	for (const auto& z : data_) {
		s += std::norm(z);
	}
	return std::sqrt(s);
}

Complex ComplexMatrix::trace() const
{
	Complex t = 0.0;
	for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
		t += (*this)(i, i);
	}
	return t;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other)
{
	detail::require_same_dim(rows_, other.rows_, "matrix addition");
	detail::require_same_dim(cols_, other.cols_, "matrix addition");
	for (std::size_t k = 0; k < data_.size(); ++k) {
		data_[k] += other.data_[k];
	}
	return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other)
{
	detail::require_same_dim(rows_, other.rows_, "matrix subtraction");
	detail::require_same_dim(cols_, other.cols_, "matrix subtraction");
	for (std::size_t k = 0; k < data_.size(); ++k) {
		data_[k] -= other.data_[k];
	}
	return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale)
{
	for (auto& z : data_) {
		z *= scale;
	}
	return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b)
{
	detail::require_same_dim(a.cols(), b.rows(), "matrix product");
	ComplexMatrix out(a.rows(), b.cols());
	for (std::size_t i = 0; i < a.rows(); ++i) {
		for (std::size_t k = 0; k < a.cols(); ++k) {
			const Complex aik = a(i, k);
			for (std::size_t j = 0; j < b.cols(); ++j) {
				out(i, j) += aik * b(k, j);
			}
		}
	}
	return out;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector StateVector::basis(std::size_t dim, std::size_t index)
{
	if (index >= dim) {
		throw DimensionError("StateVector::basis: index out of range");
	}
	StateVector v(dim);
	v[index] = 1.0;
	return v;
}

double StateVector::norm_squared() const
{
	double s = 0.0;
	for (const auto& z : amplitudes_) {
		s += std::norm(z);
	}
	return s;
}

double StateVector::norm() const { return std::sqrt(norm_squared()); }

bool StateVector::normalized() const { return std::abs(norm_squared() - 1.0) <= 1e-12; }

StateVector StateVector::normalized_copy() const
{
	const double n = norm();
	if (!(n > 0.0) || !std::isfinite(n)) {
		throw ValidationError("StateVector: cannot normalise a zero or non-finite vector");
	}
	StateVector out = *this;
	for (auto& z : out.amplitudes_) {
		z /= n;
	}
	return out;
}

Complex StateVector::inner(const StateVector& other) const
{
	detail::require_same_dim(size(), other.size(), "inner product");
	Complex s = 0.0;
	for (std::size_t i = 0; i < size(); ++i) {
		s += std::conj(amplitudes_[i]) * other.amplitudes_[i];
	}
	return s;
}

StateVector operator*(const ComplexMatrix& a, const StateVector& v)
{
	detail::require_same_dim(a.cols(), v.size(), "matrix-vector product");
	StateVector out(a.rows());
	for (std::size_t i = 0; i < a.rows(); ++i) {
		Complex s = 0.0;
		for (std::size_t j = 0; j < a.cols(); ++j) {
			s += a(i, j) * v[j];
		}
		out[i] = s;
	}
	return out;
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(ComplexMatrix matrix)
	: matrix_(std::move(matrix))
{
	if (!matrix_.square()) {
		throw DimensionError("HermitianOperator: matrix is not square");
	}
	const std::size_t n = matrix_.rows();
	const double tol = 1e-12 * std::max(1.0, matrix_.max_abs());
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = i; j < n; ++j) {
			const Complex a = matrix_(i, j);
			const Complex b = std::conj(matrix_(j, i));
			if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
				throw ValidationError("HermitianOperator: non-finite entry");
			}
			if (std::abs(a - b) > tol) {
				std::ostringstream msg;
				msg << "HermitianOperator: not self-adjoint at (" << i << ", " << j << "), |A_ij - conj(A_ji)| = "
				    << std::abs(a - b);
				throw ValidationError(msg.str());
			}
			const Complex sym = 0.5 * (a + b);
			matrix_(i, j) = sym;
			matrix_(j, i) = std::conj(sym);
		}
		matrix_(i, i) = matrix_(i, i).real();
	}
}

HermitianOperator HermitianOperator::identity(std::size_t n) { return HermitianOperator(ComplexMatrix::identity(n)); }

HermitianOperator HermitianOperator::zero(std::size_t n) { return HermitianOperator(ComplexMatrix(n, n)); }

HermitianOperator HermitianOperator::diagonal(std::span<const double> values)
{
	return HermitianOperator(ComplexMatrix::diagonal(values));
}

bool HermitianOperator::is_zero() const { return matrix_.max_abs() == 0.0; }

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& other)
{
	matrix_ += other.matrix_;
	return *this;
}

HermitianOperator HermitianOperator::scaled(double s) const
{
	HermitianOperator out = *this;
	out.matrix_ *= s;
	return out;
}

// ---------------------------------------------------------------------------
// Algebra

ComplexMatrix commutator(const HermitianOperator& a, const HermitianOperator& b)
{
	detail::require_same_dim(a.dim(), b.dim(), "commutator");
	return a.matrix() * b.matrix() - b.matrix() * a.matrix();
}

HermitianOperator bracket_operator(const HermitianOperator& a, const HermitianOperator& b)
{
	return HermitianOperator(commutator(a, b) * Complex(0.0, -1.0));
}

double expectation(const HermitianOperator& a, const StateVector& psi)
{
	detail::require_same_dim(a.dim(), psi.size(), "expectation");
	const std::size_t n = psi.size();
	Complex s = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		Complex row = 0.0;
		for (std::size_t j = 0; j < n; ++j) {
			row += a(i, j) * psi[j];
		}
		s += std::conj(psi[i]) * row;
	}
	const double scale = std::max(1.0, a.matrix().max_abs() * psi.norm_squared() * static_cast<double>(n));
	if (std::abs(s.imag()) > 1e-10 * scale) {
		std::ostringstream msg;
		msg << "expectation: imaginary part " << s.imag() << " indicates a non-self-adjoint operator";
		throw NumericalError(msg.str());
	}
	return s.real();
}

StateVector EigenDecomposition::vector(std::size_t k) const
{
	StateVector v(vectors.rows());
	for (std::size_t i = 0; i < vectors.rows(); ++i) {
		v[i] = vectors(i, k);
	}
	return v;
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a)
{
	double s = 0.0;
	for (std::size_t i = 0; i < a.rows(); ++i) {
		for (std::size_t j = 0; j < a.cols(); ++j) {
			if (i != j) {
				s += std::norm(a(i, j));
			}
		}
	}
	return std::sqrt(s);
}

// Apply A ← U†AU and V ← VU for the unitary U acting on the (p, q) plane.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q)
{
	const Complex apq = a(p, q);
	const double g = std::abs(apq);
	if (g == 0.0) {
		return;
	}
	const Complex phase = apq / g;
	const double app = a(p, p).real();
	const double aqq = a(q, q).real();
	const double theta = (aqq - app) / (2.0 * g);
	double t;
	if (std::abs(theta) > 1e150) {
		t = 0.5 / theta;
	} else {
		t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
	}
	const double c = 1.0 / std::sqrt(t * t + 1.0);
	const double s = t * c;

	const Complex u_pp = c;
	const Complex u_pq = s;
	const Complex u_qp = -s * std::conj(phase);
	const Complex u_qq = c * std::conj(phase);

	const std::size_t n = a.rows();
	for (std::size_t k = 0; k < n; ++k) {
		const Complex akp = a(k, p);
		const Complex akq = a(k, q);
		a(k, p) = akp * u_pp + akq * u_qp;
		a(k, q) = akp * u_pq + akq * u_qq;
	}
	for (std::size_t k = 0; k < n; ++k) {
		const Complex apk = a(p, k);
		const Complex aqk = a(q, k);
		a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
		a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
	}
	a(p, q) = 0.0;
	a(q, p) = 0.0;
	a(p, p) = a(p, p).real();
	a(q, q) = a(q, q).real();

	for (std::size_t k = 0; k < n; ++k) {
		const Complex vkp = v(k, p);
		const Complex vkq = v(k, q);
		v(k, p) = vkp * u_pp + vkq * u_qp;
		v(k, q) = vkp * u_pq + vkq * u_qq;
	}
}

std::vector<Complex> phase_fixed_column(const ComplexMatrix& v, std::size_t k)
{
	const std::size_t n = v.rows();
	std::vector<Complex> col(n);
	double largest = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		col[i] = v(i, k);
		largest = std::max(largest, std::abs(col[i]));
	}
	// First component within rounding of the maximum magnitude is the anchor.
	std::size_t anchor = 0;
	for (std::size_t i = 0; i < n; ++i) {
		if (std::abs(col[i]) >= largest * (1.0 - 1e-12)) {
			anchor = i;
			break;
		}
	}
	const Complex rot = std::conj(col[anchor]) / std::abs(col[anchor]);
	for (auto& z : col) {
		z *= rot;
	}
	col[anchor] = std::abs(col[anchor]);
	return col;
}

bool lexicographic_less(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
	for (std::size_t i = 0; i < a.size(); ++i) {
		if (a[i].real() != b[i].real()) {
			return a[i].real() < b[i].real();
		}
		if (a[i].imag() != b[i].imag()) {
			return a[i].imag() < b[i].imag();
		}
	}
	return false;
}

} // namespace

EigenDecomposition eigh(const HermitianOperator& op, const JacobiOptions& options)
{
	const std::size_t n = op.dim();
	ComplexMatrix a = op.matrix();
	ComplexMatrix v = ComplexMatrix::identity(n);
	const double threshold = options.relative_threshold * a.frobenius_norm();

	std::size_t sweeps = 0;
	double off = off_diagonal_norm(a);
	while (off > threshold) {
		if (sweeps == options.max_sweeps) {
			std::ostringstream msg;
			msg << "eigh: Jacobi iteration did not converge after " << sweeps << " sweeps, off-diagonal norm " << off;
			throw NumericalError(msg.str());
		}
		for (std::size_t p = 0; p + 1 < n; ++p) {
			for (std::size_t q = p + 1; q < n; ++q) {
				rotate(a, v, p, q);
			}
		}
		++sweeps;
		off = off_diagonal_norm(a);
	}

	struct Pair {
		double value;
		std::vector<Complex> vec;
	};
	std::vector<Pair> pairs(n);
	for (std::size_t k = 0; k < n; ++k) {
		pairs[k] = {a(k, k).real(), phase_fixed_column(v, k)};
	}
	std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.value < y.value; });

	// Degenerate clusters: order vectors lexicographically, keep values ascending.
	const double degeneracy_tol = 1e-10 * std::max(1.0, op.matrix().max_abs());
	for (std::size_t begin = 0; begin < n;) {
		std::size_t end = begin + 1;
		while (end < n && pairs[end].value - pairs[end - 1].value <= degeneracy_tol) {
			++end;
		}
		if (end - begin > 1) {
			std::vector<double> values;
			for (std::size_t k = begin; k < end; ++k) {
				values.push_back(pairs[k].value);
			}
			std::sort(pairs.begin() + static_cast<std::ptrdiff_t>(begin), pairs.begin() + static_cast<std::ptrdiff_t>(end),
			          [](const Pair& x, const Pair& y) { return lexicographic_less(x.vec, y.vec); });
			for (std::size_t k = begin; k < end; ++k) {
				pairs[k].value = values[k - begin];
			}
		}
		begin = end;
	}

	EigenDecomposition out;
	out.values.resize(n);
	out.vectors = ComplexMatrix(n, n);
	out.sweeps = sweeps;
	for (std::size_t k = 0; k < n; ++k) {
		out.values[k] = pairs[k].value;
		for (std::size_t i = 0; i < n; ++i) {
			out.vectors(i, k) = pairs[k].vec[i];
		}
	}
	return out;
}

StateVector exact_propagate(const EigenDecomposition& eig, const StateVector& psi0, double t)
{
	const std::size_t n = eig.values.size();
	detail::require_same_dim(n, psi0.size(), "exact_propagate");
	std::vector<Complex> coeff(n);
	for (std::size_t k = 0; k < n; ++k) {
		Complex s = 0.0;
		for (std::size_t i = 0; i < n; ++i) {
			s += std::conj(eig.vectors(i, k)) * psi0[i];
		}
		coeff[k] = s * std::polar(1.0, -eig.values[k] * t);
	}
	StateVector out(n);
	for (std::size_t i = 0; i < n; ++i) {
		Complex s = 0.0;
		for (std::size_t k = 0; k < n; ++k) {
			s += eig.vectors(i, k) * coeff[k];
		}
		out[i] = s;
	}
	return out;
}

StateVector exact_propagate(const HermitianOperator& h, const StateVector& psi0, double t)
{
	detail::require_same_dim(h.dim(), psi0.size(), "exact_propagate");
	return exact_propagate(eigh(h), psi0, t);
}

} // namespace hybridflow
