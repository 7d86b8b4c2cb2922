#pragma once

#include "hybridflow/hybrid_dynamics.hpp"
#include "hybridflow/random.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hybridflow {

/// Classical oscillator bilinearly coupled to a truncated quantum oscillator.
struct PeresTernoModel {
	double m_cl = 1.0;
	double omega_cl = 1.0;
	double omega_qm = 1.0;
	double lambda = 0.1;
	/// Fock-space truncation N.
	std::size_t levels = 32;
	Complex alpha0 = 1.0;
	double x0 = 1.0;
	double p0 = 0.0;

	/// Throws ValidationError for unusable parameters; returns warnings for
	/// settings that merely risk truncation leakage.
	std::vector<std::string> validate() const;
	/// 4(|α₀|² + 3|α₀| + 2).
	std::size_t recommended_levels() const;
};

struct TruncatedOscillator {
	ComplexMatrix annihilation;
	HermitianOperator position;  ///< (a + a†)/√2
	HermitianOperator momentum;  ///< (a − a†)/(i√2)
	HermitianOperator number;
	HermitianOperator hamiltonian; ///< ω(n + ½)
};

TruncatedOscillator truncated_oscillator(std::size_t levels, double omega);

/// Coherent state |α⟩ truncated to `levels` Fock states and renormalised.
StateVector coherent_state(std::size_t levels, Complex alpha);

struct PeresTernoSystem {
	HybridHamiltonian hamiltonian;
	HybridPhasePoint initial;
	TruncatedOscillator oscillator;
};

PeresTernoSystem build_peres_terno(const PeresTernoModel& model);

struct Metric {
	std::string name;
	double max = 0.0;
	double rms = 0.0;
	/// Informational metrics carry no tolerance.
	std::optional<double> tolerance;

	bool pass() const { return !tolerance || max <= *tolerance; }
};

struct SeriesTable {
	std::vector<std::string> columns;
	std::vector<std::vector<double>> rows;
};

struct BenchmarkReport {
	std::string name;
	bool applicable = true;
	std::vector<Metric> metrics;
	std::vector<std::string> warnings;
	std::vector<std::string> notes;
	std::map<std::string, std::string> parameters;
	SeriesTable series;

	/// Applicable and every toleranced metric within bounds.
	bool pass() const;
	const Metric* metric(const std::string& name) const;
};

struct EhrenfestOptions {
	double tolerance = 1e-6;
	/// Population of the top two Fock levels above which a warning is issued.
	double leakage_warning = 1e-8;
	std::size_t record_every = 1;
};

/// Hybrid first moments (x, p, ⟨q̂⟩, ⟨p̂⟩) against the closed classical
/// reference system integrated with the same method and step.
BenchmarkReport ehrenfest_residual(const PeresTernoModel& model, double t_final, const IntegratorConfig& cfg,
                                   const EhrenfestOptions& options = {});

/// Runs the four I = 0 combinations of two classical and two quantum
/// Hamiltonians and requires bit-identical sector series under cross-sector swaps.
/// Reports "not applicable" when `interaction` is non-zero.
BenchmarkReport separability_suite(const HybridObservable& h_cl_a, const HybridObservable& h_cl_b,
                                   const HybridObservable& h_qm_a, const HybridObservable& h_qm_b,
                                   const HybridPhasePoint& z0, double t_final, const IntegratorConfig& cfg,
                                   const HybridObservable& interaction = {});

struct ConservationOptions {
	double energy_tolerance = 1e-8;
	double constraint_tolerance = 1e-10;
	std::size_t record_every = 100;
};

/// Maximum relative energy deviation and |C − 1| along a trajectory.
BenchmarkReport conservation_report(const HybridHamiltonian& h, const HybridPhasePoint& z0, double t_final,
                                    const IntegratorConfig& cfg, const ConservationOptions& options = {});

struct BracketBenchConfig {
	std::uint64_t seed = 7;
	std::size_t quantum_dim = 4;
	std::size_t classical_dim = 2;
	std::size_t points = 20;
};

/// Antisymmetry, bilinearity, Leibniz and Jacobi residuals, cross-sector
/// separability and commutator equivalence on random observables.
BenchmarkReport bracket_benchmark(const BracketBenchConfig& config);

/// Hermitian matrix with independent N(0, scale²) real and imaginary parts.
HermitianOperator random_hermitian(std::size_t dim, Rng& rng, double scale = 1.0);
StateVector random_state(std::size_t dim, Rng& rng);

std::string report_to_json(const BenchmarkReport& report);
/// Header row then one row per sample; numbers in shortest round-trip form.
std::string series_to_csv(const SeriesTable& table);
/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

} // namespace hybridflow
