#pragma once

#include "hybridflow/errors.hpp"

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hybridflow {

using Complex = std::complex<double>;

/// Dense row-major complex matrix. Small sizes only (N up to a few dozen).
class ComplexMatrix {
public:
	ComplexMatrix() = default;
	ComplexMatrix(std::size_t rows, std::size_t cols);
	ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

	static ComplexMatrix identity(std::size_t n);
	static ComplexMatrix diagonal(std::span<const double> values);

	std::size_t rows() const { return rows_; }
	std::size_t cols() const { return cols_; }
	bool square() const { return rows_ == cols_; }

	Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
	const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

	std::span<const Complex> data() const { return data_; }

	ComplexMatrix adjoint() const;
	/// Largest absolute entry.
	double max_abs() const;
	double frobenius_norm() const;
	Complex trace() const;

	ComplexMatrix& operator+=(const ComplexMatrix& other);
	ComplexMatrix& operator-=(const ComplexMatrix& other);
	ComplexMatrix& operator*=(Complex scale);

	friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
	friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
	friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
	friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
	friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

private:
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	std::vector<Complex> data_;
};

/// Complex amplitudes of a Hilbert-space vector in a fixed orthonormal basis.
class StateVector {
public:
	StateVector() = default;
	explicit StateVector(std::size_t dim) : amplitudes_(dim) {}
	explicit StateVector(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {}
	StateVector(std::initializer_list<Complex> amplitudes) : amplitudes_(amplitudes) {}

	static StateVector basis(std::size_t dim, std::size_t index);

	std::size_t size() const { return amplitudes_.size(); }
	Complex& operator[](std::size_t i) { return amplitudes_[i]; }
	const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
	std::span<const Complex> amplitudes() const { return amplitudes_; }
	std::span<Complex> amplitudes() { return amplitudes_; }

	double norm_squared() const;
	double norm() const;
	/// |norm² − 1| ≤ 1e-12.
	bool normalized() const;
	StateVector normalized_copy() const;

	Complex inner(const StateVector& other) const;

	friend bool operator==(const StateVector&, const StateVector&) = default;

private:
	std::vector<Complex> amplitudes_;
};

StateVector operator*(const ComplexMatrix& a, const StateVector& v);

/// Self-adjoint N×N operator. The constructor rejects matrices whose
/// entries violate A_ij = conj(A_ji) by more than 1e-12 (scaled by max(1, ‖A‖_max)),
/// then stores the exactly symmetrised matrix.
class HermitianOperator {
public:
	HermitianOperator() = default;
	explicit HermitianOperator(ComplexMatrix matrix);

	static HermitianOperator identity(std::size_t n);
	static HermitianOperator zero(std::size_t n);
	static HermitianOperator diagonal(std::span<const double> values);

	std::size_t dim() const { return matrix_.rows(); }
	const ComplexMatrix& matrix() const { return matrix_; }
	const Complex& operator()(std::size_t i, std::size_t j) const { return matrix_(i, j); }
	bool is_zero() const;

	HermitianOperator& operator+=(const HermitianOperator& other);
	HermitianOperator scaled(double s) const;

private:
	ComplexMatrix matrix_;
};

/// Real eigenvalues ascending, eigenvectors as columns of `vectors`.
struct EigenDecomposition {
	std::vector<double> values;
	ComplexMatrix vectors;
	std::size_t sweeps = 0;

	StateVector vector(std::size_t k) const;
};

/// AB − BA. The result is anti-Hermitian for Hermitian A, B.
ComplexMatrix commutator(const HermitianOperator& a, const HermitianOperator& b);

/// The Hermitian operator (1/i)[A, B].
HermitianOperator bracket_operator(const HermitianOperator& a, const HermitianOperator& b);

/// ⟨ψ|A|ψ⟩. Throws NumericalError if the imaginary part exceeds 1e-10 (scaled).
double expectation(const HermitianOperator& a, const StateVector& psi);

struct JacobiOptions {
	/// Convergence when off-diagonal Frobenius norm ≤ relative_threshold·‖A‖_F.
	double relative_threshold = 1e-14;
	std::size_t max_sweeps = 100;
};

/// Cyclic complex Jacobi diagonalisation. Eigenvectors are phase-fixed so that
/// the largest-magnitude component is real positive; degenerate eigenvalues are
/// ordered lexicographically by their phase-fixed eigenvectors.
EigenDecomposition eigh(const HermitianOperator& a, const JacobiOptions& options = {});

/// exp(−iHt)ψ₀ via the eigendecomposition of H.
StateVector exact_propagate(const HermitianOperator& h, const StateVector& psi0, double t);
StateVector exact_propagate(const EigenDecomposition& eig, const StateVector& psi0, double t);

} // namespace hybridflow
