#pragma once

#include "hybridflow/bracket_engine.hpp"
#include "hybridflow/errors.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace hybridflow {

/// H_Σ = H_CL(x, p) + H_QM(X, P) + I(x, p; X, P).
class HybridHamiltonian {
public:
	HybridHamiltonian() = default;
	/// Throws ValidationError unless `classical` is a CL-sector observable and
	/// `quantum` a QM-sector one (either may be zero).
	HybridHamiltonian(HybridObservable classical, HybridObservable quantum, HybridObservable interaction = {});

	const HybridObservable& classical() const { return classical_; }
	const HybridObservable& quantum() const { return quantum_; }
	const HybridObservable& interaction() const { return interaction_; }
	HybridObservable total() const { return classical_ + quantum_ + interaction_; }

	/// True unless the interaction term is identically zero.
	bool has_interaction() const;

	double energy(const HybridPhasePoint& z) const;
	/// ∇H_Σ(z), accumulated part by part.
	HybridGradient gradient(const HybridPhasePoint& z) const;

private:
	HybridObservable classical_;
	HybridObservable quantum_;
	HybridObservable interaction_;
};

enum class IntegratorMethod { implicit_midpoint, rk4 };

std::string_view to_string(IntegratorMethod method);
IntegratorMethod parse_integrator_method(std::string_view name);

struct IntegratorConfig {
	double dt = 1e-3;
	IntegratorMethod method = IntegratorMethod::implicit_midpoint;
	/// Fixed-point increment tolerance, relative to max(1, max|z|).
	double fp_tol = 1e-12;
	std::size_t fp_max_iter = 50;

	void validate() const;
};

/// Phase-space velocity (ẋ, ṗ, Ẋ, Ṗ) stored in the gradient layout.
using PhaseVelocity = HybridGradient;

/// Hamilton's equations generated by H_Σ through the hybrid bracket.
PhaseVelocity equations_of_motion(const HybridHamiltonian& h, const HybridPhasePoint& z);

struct StepInfo {
	std::size_t iterations = 0;
	double residual = 0.0;
};

/// One step of size cfg.dt.
HybridPhasePoint step(const HybridHamiltonian& h, const HybridPhasePoint& z, const IntegratorConfig& cfg, StepInfo* info = nullptr);
/// One step of signed size dt with the method and tolerances of cfg (used for reverse-time checks).
HybridPhasePoint step_by(const HybridHamiltonian& h, const HybridPhasePoint& z, const IntegratorConfig& cfg, double dt,
                         StepInfo* info = nullptr);

struct Trajectory {
	std::vector<double> times;
	std::vector<HybridPhasePoint> points;
	std::vector<double> energy;
	std::vector<double> constraint;
	/// observables[j][k] is observable j at times[k].
	std::vector<std::vector<double>> observables;
	std::vector<std::size_t> fp_iterations;

	std::size_t steps = 0;
	double initial_energy = 0.0;
	/// Maxima over every step, recorded or not.
	double max_relative_energy_drift = 0.0;
	double max_constraint_drift = 0.0;
};

struct IntegrateOptions {
	/// Record every k-th step (the final point is always recorded).
	std::size_t record_every = 1;
	/// Require |C(q0) − 1| ≤ 1e-10.
	bool require_on_sphere = true;
};

/// Thrown when a step fails mid-run; carries everything recorded so far.
class IntegrationError : public NumericalError {
public:
	IntegrationError(const std::string& what, Trajectory partial)
		: NumericalError(what), partial_(std::move(partial))
	{
	}
	const Trajectory& partial() const { return partial_; }

private:
	Trajectory partial_;
};

/// Fixed-step march from t = 0 to t_final.
Trajectory integrate(const HybridHamiltonian& h, const HybridPhasePoint& z0, double t_final, const IntegratorConfig& cfg,
                     std::span<const HybridObservable> observables = {}, const IntegrateOptions& options = {});

} // namespace hybridflow
