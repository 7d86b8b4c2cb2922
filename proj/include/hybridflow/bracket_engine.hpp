#pragma once

#include "hybridflow/operator_algebra.hpp"
#include "hybridflow/oscillator_rep.hpp"

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace hybridflow {

/// One point (x_k, p_k; X_i, P_i) of the product state space.
struct HybridPhasePoint {
	std::vector<double> x;
	std::vector<double> p;
	QmCoords q;

	std::size_t classical_dim() const { return x.size(); }
	std::size_t quantum_dim() const { return q.size(); }
	bool finite() const;

	friend bool operator==(const HybridPhasePoint&, const HybridPhasePoint&) = default;
};

/// Partial derivatives of a hybrid function, or a tangent vector of the same shape.
struct HybridGradient {
	std::vector<double> dx;
	std::vector<double> dp;
	std::vector<double> dX;
	std::vector<double> dP;

	static HybridGradient zeros(std::size_t n, std::size_t N);
};

/// x_k^a p_k^b product term of a classical polynomial.
struct Monomial {
	double coefficient = 0.0;
	std::vector<unsigned> x_powers;
	std::vector<unsigned> p_powers;
};

/// Smooth real function of the classical coordinates with an analytic gradient.
class PhaseFunction {
public:
	using Coords = std::span<const double>;
	using ValueFn = std::function<double(Coords x, Coords p)>;
	/// Adds scale·∂f/∂x into dx and scale·∂f/∂p into dp.
	using GradientFn = std::function<void(Coords x, Coords p, double scale, std::span<double> dx, std::span<double> dp)>;

	/// The zero function.
	PhaseFunction() = default;

	static PhaseFunction constant(double value);
	static PhaseFunction polynomial(std::vector<Monomial> terms);
	/// Caller-supplied function; the gradient must be exact and side-effect free.
	static PhaseFunction custom(ValueFn value, GradientFn gradient);

	static PhaseFunction position(std::size_t k, double scale = 1.0);
	static PhaseFunction momentum(std::size_t k, double scale = 1.0);
	/// p_k²/2m + mω²x_k²/2.
	static PhaseFunction harmonic(double mass, double omega, std::size_t k = 0);
	/// p_k²/2m.
	static PhaseFunction kinetic(double mass, std::size_t k = 0);

	double operator()(Coords x, Coords p) const;
	void accumulate_gradient(Coords x, Coords p, double scale, std::span<double> dx, std::span<double> dp) const;

	bool is_zero() const { return kind_ == Kind::zero; }
	bool is_constant() const { return kind_ != Kind::general; }

	PhaseFunction scaled(double s) const;
	friend PhaseFunction operator+(const PhaseFunction& a, const PhaseFunction& b);

private:
	enum class Kind { zero, constant, general };

	Kind kind_ = Kind::zero;
	double constant_ = 0.0;
	ValueFn value_;
	GradientFn gradient_;
};

/// Classical bracket of two functions of (x, p).
double classical_bracket(const PhaseFunction& f, const PhaseFunction& g, PhaseFunction::Coords x, PhaseFunction::Coords p);

struct CouplingTerm {
	PhaseFunction coefficient;
	HermitianOperator op;
};

enum class SectorTag { classical, quantum, hybrid };

std::string_view to_string(SectorTag tag);

/// A(x, p; X, P) = f(x, p) + ⟨ψ(X, P)|M(x, p)|ψ(X, P)⟩ with M(x, p) = Σ_t c_t(x, p) Ĝ_t.
class HybridObservable {
public:
	/// The zero observable.
	HybridObservable() = default;

	static HybridObservable classical(PhaseFunction f);
	static HybridObservable quantum(HermitianOperator m);
	static HybridObservable coupling(PhaseFunction coefficient, HermitianOperator m);

	const PhaseFunction& classical_part() const { return classical_; }
	const std::vector<CouplingTerm>& qm_terms() const { return terms_; }
	/// Hilbert-space dimension, or 0 when there is no quantum part.
	std::size_t qm_dim() const { return terms_.empty() ? 0 : terms_.front().op.dim(); }

	/// The operator-valued coefficient M(x, p).
	HermitianOperator qm_operator(PhaseFunction::Coords x, PhaseFunction::Coords p) const;

	SectorTag sector() const;

	HybridObservable scaled(double s) const;
	friend HybridObservable operator+(const HybridObservable& a, const HybridObservable& b);

private:
	PhaseFunction classical_;
	std::vector<CouplingTerm> terms_;
};

double evaluate(const HybridObservable& a, const HybridPhasePoint& z);

HybridGradient hybrid_gradient(const HybridObservable& a, const HybridPhasePoint& z);
/// out += scale·∇A(z). `out` must already have the shape of z.
void accumulate_gradient(const HybridObservable& a, const HybridPhasePoint& z, double scale, HybridGradient& out);

/// Symplectic pairing Σ_k (a.dx b.dp − a.dp b.dx) + Σ_i (a.dX b.dP − a.dP b.dX).
double symplectic_pairing(const HybridGradient& a, const HybridGradient& b);

/// {A, B}_× = {A, B}_CL + {A, B}_QM.
double hybrid_bracket(const HybridObservable& a, const HybridObservable& b, const HybridPhasePoint& z);

/// First-order canonical transformation generated by g with parameter dalpha.
HybridPhasePoint canonical_step(const HybridObservable& g, const HybridPhasePoint& z, double dalpha);

/// Central-difference gradient of an arbitrary scalar function of the phase point.
HybridGradient numeric_gradient(const std::function<double(const HybridPhasePoint&)>& f, const HybridPhasePoint& z, double step);

struct AxiomCheckOptions {
	/// Finite-difference step for the gradient of the pointwise product BC.
	double leibniz_step = 1e-5;
	/// Finite-difference step for the outer brackets of the Jacobi identity, near cbrt(eps).
	double jacobi_step = 6e-6;
};

/// Maximum residuals over the sample points.
struct AxiomReport {
	double antisymmetry = 0.0;
	double leibniz = 0.0;
	double jacobi = 0.0;
	std::size_t points = 0;
};

AxiomReport bracket_axiom_check(const HybridObservable& a, const HybridObservable& b, const HybridObservable& c,
                                std::span<const HybridPhasePoint> zs, const AxiomCheckOptions& options = {});

} // namespace hybridflow
