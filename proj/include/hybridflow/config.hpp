#pragma once

#include "hybridflow/bench_suite.hpp"
#include "hybridflow/hybrid_dynamics.hpp"
#include "hybridflow/liouville_ensemble.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hybridflow {

/// Invalid configuration. `key()` is the dotted path of the offending entry.
class ConfigError : public ValidationError {
public:
	ConfigError(std::string key, const std::string& message)
		: ValidationError(key.empty() ? message : key + ": " + message), key_(std::move(key))
	{
	}
	const std::string& key() const { return key_; }

private:
	std::string key_;
};

struct NamedObservable {
	std::string name;
	HybridObservable observable;
};

struct EnsembleConfig {
	HybridDensitySpec spec;
	std::size_t count = 0;
	std::uint64_t seed = 0;
};

struct OutputConfig {
	std::string directory;
	bool csv = true;
	bool json = true;
	std::size_t record_every = 1;
};

/// Fully validated simulation configuration with the model already built.
struct SimulationConfig {
	std::string model_name;
	std::optional<PeresTernoModel> peres_terno;
	HybridHamiltonian hamiltonian;
	HybridPhasePoint initial;
	IntegratorConfig integrator;
	double t_final = 0.0;
	std::optional<EnsembleConfig> ensemble;
	OutputConfig outputs;
	std::vector<NamedObservable> observables;
	/// Canonical (compact, key-sorted) JSON of the input document.
	std::string resolved_json;
};

/// Parses and validates a JSON configuration document. Throws ConfigError
/// (with line/column for syntax errors, dotted key paths otherwise).
SimulationConfig parse_simulation_config(std::string_view text);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

} // namespace hybridflow
