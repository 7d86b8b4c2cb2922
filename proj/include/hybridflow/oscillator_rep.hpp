#pragma once

#include "hybridflow/operator_algebra.hpp"

#include <vector>

namespace hybridflow {

/// Canonical quantum coordinates: ψ_i = (X_i + iP_i)/√2 (ħ = 1).
struct QmCoords {
	std::vector<double> X;
	std::vector<double> P;

	QmCoords() = default;
	explicit QmCoords(std::size_t dim) : X(dim, 0.0), P(dim, 0.0) {}
	QmCoords(std::vector<double> x, std::vector<double> p);

	std::size_t size() const { return X.size(); }

	friend bool operator==(const QmCoords&, const QmCoords&) = default;
};

/// Gradient of a function of (X, P).
struct QmGradient {
	std::vector<double> dX;
	std::vector<double> dP;
};

QmCoords expand_state(const StateVector& psi);
StateVector reconstruct_state(const QmCoords& q);

/// C(X, P) = ½ Σ (X_i² + P_i²), equal to ⟨ψ|ψ⟩.
double normalization_constraint(const QmCoords& q);
bool on_sphere(const QmCoords& q, double tol = 1e-10);

/// The quadratic form ⟨ψ(q)|G|ψ(q)⟩. Defined on all of (X, P)-space.
double observable_value(const HermitianOperator& g, const QmCoords& q);

/// ∂/∂X_k and ∂/∂P_k of observable_value: with c = ψ(q), dX = √2 Re(Gc), dP = √2 Im(Gc).
QmGradient observable_gradient(const HermitianOperator& g, const QmCoords& q);

/// Σ_i (∂F/∂X_i ∂G/∂P_i − ∂F/∂P_i ∂G/∂X_i).
double qm_bracket(const HermitianOperator& f, const HermitianOperator& g, const QmCoords& q);

/// Operator re-expressed in the eigenbasis given by `basis` (V†AV).
HermitianOperator in_basis(const HermitianOperator& a, const EigenDecomposition& basis);

} // namespace hybridflow
