#pragma once

#include "hybridflow/bracket_engine.hpp"
#include "hybridflow/hybrid_dynamics.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hybridflow {

/// A characteristic of the Liouville flow carrying a fixed probability mass.
struct EnsembleMember {
	HybridPhasePoint z;
	double weight = 0.0;

	friend bool operator==(const EnsembleMember&, const EnsembleMember&) = default;
};

struct EnsembleMeta {
	std::uint64_t seed = 0;
	std::string sampler;
	double time = 0.0;

	friend bool operator==(const EnsembleMeta&, const EnsembleMeta&) = default;
};

/// Sample representation of a hybrid phase-space density.
struct Ensemble {
	std::vector<EnsembleMember> members;
	EnsembleMeta meta;

	std::size_t size() const { return members.size(); }
	/// Pairwise sum over member index.
	double weight_sum() const;

	friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> values);

/// `count` points uniform on the sphere C = 1 in 2N dimensions (radius √2).
std::vector<QmCoords> sample_sphere_uniform(std::size_t dim, std::size_t count, std::uint64_t seed);

/// Multivariate normal over the classical coordinates, ordered (x_1..x_n, p_1..p_n).
struct GaussianDensity {
	std::vector<double> mean;
	std::vector<std::vector<double>> covariance;

	std::size_t classical_dim() const { return mean.size() / 2; }
};

/// Component weight w_j(x, p) ∈ [0, 1].
class WeightFunction {
public:
	static WeightFunction constant(double value);
	/// σ(a·x + b·p + c), or 1 − σ(·) when `complement` is set.
	static WeightFunction logistic(std::vector<double> x_slope, std::vector<double> p_slope, double offset, bool complement = false);

	double operator()(std::span<const double> x, std::span<const double> p) const;

	bool is_constant() const { return kind_ == Kind::constant; }
	double constant_value() const { return value_; }
	const std::vector<double>& x_slope() const { return x_slope_; }
	const std::vector<double>& p_slope() const { return p_slope_; }
	double offset() const { return offset_; }
	bool complement() const { return complement_; }

private:
	enum class Kind { constant, logistic };
	Kind kind_ = Kind::constant;
	double value_ = 1.0;
	std::vector<double> x_slope_;
	std::vector<double> p_slope_;
	double offset_ = 0.0;
	bool complement_ = false;
};

struct DensityComponent {
	WeightFunction weight;
	StateVector state;
};

/// ρ(x, p; X, P) = g(x, p) Σ_j [w_j(x, p)/Σ_k w_k(x, p)] |⟨j|ψ(X, P)⟩|² with g the classical density.
struct HybridDensitySpec {
	GaussianDensity classical;
	std::vector<DensityComponent> components;

	/// Throws ValidationError when the density is not normalisable or a weight leaves [0, 1].
	void validate() const;
	std::size_t classical_dim() const { return classical.classical_dim(); }
	std::size_t quantum_dim() const { return components.empty() ? 0 : components.front().state.size(); }
};

Ensemble sample_ensemble(const HybridDensitySpec& spec, std::size_t count, std::uint64_t seed);

struct EvolveOptions {
	/// Worker threads; 0 selects the hardware concurrency.
	std::size_t threads = 0;
};

/// Advances every member along its characteristic; weights are carried unchanged.
Ensemble evolve_ensemble(const HybridHamiltonian& h, const Ensemble& e, double t_final, const IntegratorConfig& cfg,
                         const EvolveOptions& options = {});

using ClassicalWindow = std::function<bool(std::span<const double> x, std::span<const double> p)>;

/// Conditional density operator with entry-wise Monte Carlo standard errors
/// (real and imaginary parts reported separately in the respective components).
struct DensityEstimate {
	ComplexMatrix rho;
	ComplexMatrix standard_error;
	std::size_t members = 0;
	double weight = 0.0;
};

/// Self-normalised weighted average of the projectors |ψ⟩⟨ψ|/⟨ψ|ψ⟩ over the
/// members whose classical point passes `window` (all members if empty).
DensityEstimate reconstruct_qm_density(const Ensemble& e, const ClassicalWindow& window = {});

struct Estimate {
	double value = 0.0;
	double standard_error = 0.0;
};

/// Σ_m w_m A(z_m) with a jackknife standard error.
Estimate ensemble_expectation(const Ensemble& e, const HybridObservable& a);
Estimate ensemble_expectation(const Ensemble& e, const std::function<double(const HybridPhasePoint&)>& f);

/// Malformed JSON or schema violation; `offset()` is the byte position when known.
class ParseError : public ValidationError {
public:
	ParseError(const std::string& what, std::size_t offset) : ValidationError(what), offset_(offset) {}
	std::size_t offset() const { return offset_; }

private:
	std::size_t offset_;
};

/// {meta:{seed, sampler, time}, members:[{x:[...], p:[...], X:[...], P:[...], w}]}
std::string ensemble_to_json(const Ensemble& e);
Ensemble ensemble_from_json(std::string_view text);

} // namespace hybridflow
