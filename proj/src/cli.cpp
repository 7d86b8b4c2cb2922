#include "hybridflow/cli.hpp"

#include "hybridflow/bench_suite.hpp"
#include "hybridflow/config.hpp"
#include "hybridflow/liouville_ensemble.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#ifndef HYBRIDFLOW_VERSION
#define HYBRIDFLOW_VERSION "0.0.0"
#endif

namespace hybridflow {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw UsageError("cannot read '" + path + "'");
	}
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_file(const fs::path& path, const std::string& text)
{
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	out << text;
	if (!out) {
		throw std::runtime_error("cannot write '" + path.string() + "'");
	}
}

std::string utc_now()
{
	const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
	std::tm tm{};
	gmtime_r(&now, &tm);
	char buf[32];
	std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
	return buf;
}

std::string compiler_id()
{
#if defined(__clang__)
	return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
	return std::string("gcc ") + __VERSION__;
#else
	return "unknown";
#endif
}

/// Column labels for the classical coordinates: x, p for one degree of freedom, x1.., p1.. otherwise.
std::vector<std::string> coordinate_labels(std::size_t n)
{
	std::vector<std::string> labels;
	for (const char* stem : {"x", "p"}) {
		for (std::size_t k = 0; k < n; ++k) {
			labels.push_back(n == 1 ? std::string(stem) : stem + std::to_string(k + 1));
		}
	}
	return labels;
}

// ---------------------------------------------------------------------------
// run

class Manifest {
public:
	Manifest(fs::path dir, std::vector<std::string> command, std::string config_path, const SimulationConfig& cfg)
		: dir_(std::move(dir)), started_(std::chrono::steady_clock::now())
	{
		doc_["tool"] = "hybridflow";
		doc_["version"] = HYBRIDFLOW_VERSION;
		doc_["compiler"] = compiler_id();
		doc_["status"] = "running";
		doc_["command"] = std::move(command);
		doc_["config_path"] = std::move(config_path);
		doc_["config_hash"] = "fnv1a64:" + fnv1a_hex(cfg.resolved_json);
		doc_["seed"] = cfg.ensemble ? ojson(cfg.ensemble->seed) : ojson(nullptr);
		doc_["started_utc"] = utc_now();
		doc_["wall_clock_seconds"] = nullptr;
		doc_["outputs"] = ojson::array();
		doc_["resolved_config"] = ojson::parse(cfg.resolved_json);
		write();
	}

	void add_output(const std::string& name) { doc_["outputs"].push_back(name); }

	void finish(const std::string& status, const std::string& error = {})
	{
		doc_["status"] = status;
		if (!error.empty()) {
			doc_["error"] = error;
		}
		doc_["finished_utc"] = utc_now();
		doc_["wall_clock_seconds"] =
		    std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
		add_output("manifest.json");
		write();
	}

private:
	void write() const { write_file(dir_ / "manifest.json", doc_.dump(2) + "\n"); }

	fs::path dir_;
	std::chrono::steady_clock::time_point started_;
	ojson doc_;
};

struct RunResult {
	SeriesTable series;
	ojson report;
	std::vector<std::pair<std::string, std::string>> extra_files;
};

RunResult run_trajectory(const SimulationConfig& cfg)
{
	std::vector<HybridObservable> obs;
	for (const auto& o : cfg.observables) {
		obs.push_back(o.observable);
	}
	IntegrateOptions opts;
	opts.record_every = cfg.outputs.record_every;
	const auto traj = integrate(cfg.hamiltonian, cfg.initial, cfg.t_final, cfg.integrator, obs, opts);

	RunResult r;
	const std::size_t n = cfg.initial.x.size();
	r.series.columns = {"t"};
	for (const auto& l : coordinate_labels(n)) {
		r.series.columns.push_back(l);
	}
	r.series.columns.insert(r.series.columns.end(), {"E", "C"});
	for (const auto& o : cfg.observables) {
		r.series.columns.push_back(o.name);
	}
	for (std::size_t k = 0; k < traj.times.size(); ++k) {
		std::vector<double> row{traj.times[k]};
		const auto& z = traj.points[k];
		row.insert(row.end(), z.x.begin(), z.x.end());
		row.insert(row.end(), z.p.begin(), z.p.end());
		row.push_back(traj.energy[k]);
		row.push_back(traj.constraint[k]);
		for (const auto& series : traj.observables) {
			row.push_back(series[k]);
		}
		r.series.rows.push_back(std::move(row));
	}

	std::size_t max_iter = 0;
	for (auto it : traj.fp_iterations) {
		max_iter = std::max(max_iter, it);
	}
	r.report = {
	    {"mode", "trajectory"},
	    {"model", cfg.model_name},
	    {"method", std::string(to_string(cfg.integrator.method))},
	    {"dt", cfg.integrator.dt},
	    {"t_final", cfg.t_final},
	    {"steps", traj.steps},
	    {"initial_energy", traj.initial_energy},
	    {"final_energy", traj.energy.back()},
	    {"max_relative_energy_drift", traj.max_relative_energy_drift},
	    {"max_constraint_drift", traj.max_constraint_drift},
	    {"max_fixed_point_iterations", max_iter},
	};
	return r;
}

RunResult run_ensemble(const SimulationConfig& cfg)
{
	const auto& ec = *cfg.ensemble;
	Ensemble ens = sample_ensemble(ec.spec, ec.count, ec.seed);
	RunResult r;
	r.extra_files.emplace_back("ensemble_initial.json", ensemble_to_json(ens));
	const double initial_weight = ens.weight_sum();

	const std::size_t n = cfg.initial.x.size();
	std::vector<std::pair<std::string, std::function<double(const HybridPhasePoint&)>>> columns;
	const auto labels = coordinate_labels(n);
	for (std::size_t k = 0; k < n; ++k) {
		columns.emplace_back(labels[k], [k](const HybridPhasePoint& z) { return z.x[k]; });
		columns.emplace_back(labels[n + k], [k](const HybridPhasePoint& z) { return z.p[k]; });
	}
	const auto& h = cfg.hamiltonian;
	columns.emplace_back("E", [&h](const HybridPhasePoint& z) { return h.energy(z); });
	columns.emplace_back("C", [](const HybridPhasePoint& z) { return normalization_constraint(z.q); });
	for (const auto& o : cfg.observables) {
		const HybridObservable* a = &o.observable;
		columns.emplace_back(o.name, [a](const HybridPhasePoint& z) { return evaluate(*a, z); });
	}

	r.series.columns = {"t", "weight_sum"};
	for (const auto& c : columns) {
		r.series.columns.push_back(c.first);
		r.series.columns.push_back(c.first + "_se");
	}
	auto record = [&](double t) {
		std::vector<double> row{t, ens.weight_sum()};
		for (const auto& c : columns) {
			const auto est = ensemble_expectation(ens, c.second);
			row.push_back(est.value);
			row.push_back(est.standard_error);
		}
		r.series.rows.push_back(std::move(row));
	};

	// Advance in chunks of record_every steps so the series shares the
	// trajectory-mode time grid.
	const double chunk = static_cast<double>(cfg.outputs.record_every) * cfg.integrator.dt;
	const auto chunks = static_cast<std::size_t>(std::ceil(cfg.t_final / chunk - 1e-9));
	record(0.0);
	for (std::size_t k = 0; k < chunks; ++k) {
		const double t0 = static_cast<double>(k) * chunk;
		const double t1 = k + 1 == chunks ? cfg.t_final : static_cast<double>(k + 1) * chunk;
		ens = evolve_ensemble(h, ens, t1 - t0, cfg.integrator);
		ens.meta.time = t1;
		record(t1);
	}
	r.extra_files.emplace_back("ensemble.json", ensemble_to_json(ens));

	ojson final_values = ojson::object();
	const auto& last = r.series.rows.back();
	for (std::size_t c = 0; c < columns.size(); ++c) {
		final_values[columns[c].first] = {{"mean", last[2 + 2 * c]}, {"standard_error", last[3 + 2 * c]}};
	}
	r.report = {
	    {"mode", "ensemble"},
	    {"model", cfg.model_name},
	    {"method", std::string(to_string(cfg.integrator.method))},
	    {"dt", cfg.integrator.dt},
	    {"t_final", cfg.t_final},
	    {"members", ens.size()},
	    {"seed", ec.seed},
	    {"initial_weight_sum", initial_weight},
	    {"final_weight_sum", ens.weight_sum()},
	    {"final", std::move(final_values)},
	};
	return r;
}

int cmd_run(const std::string& config_path, const std::string& out_override, std::optional<std::uint64_t> seed,
            const std::vector<std::string>& command, std::ostream& out, std::ostream& err)
{
	SimulationConfig cfg;
	try {
		std::string text = read_file(config_path);
		if (seed) {
			// Fold the override into the document so the hash and manifest describe what actually ran.
			nlohmann::json doc;
			try {
				doc = nlohmann::json::parse(text);
			} catch (const nlohmann::json::parse_error&) {
				doc = nullptr;
			}
			if (doc.is_object()) {
				if (!doc.contains("ensemble")) {
					throw ConfigError("ensemble", "--seed given but the config has no ensemble section");
				}
				if (doc["ensemble"].is_object()) {
					doc["ensemble"]["seed"] = *seed;
					text = doc.dump();
				}
			}
		}
		cfg = parse_simulation_config(text);
	} catch (const UsageError& e) {
		err << "error: " << e.what() << "\n";
		return exit_usage;
	} catch (const std::invalid_argument& e) {
		err << "config error: " << e.what() << "\n";
		return exit_usage;
	}

	const fs::path dir = !out_override.empty() ? fs::path(out_override) : fs::path(cfg.outputs.directory);
	if (dir.empty()) {
		err << "error: no output directory (use --out or outputs.directory)\n";
		return exit_usage;
	}
	std::error_code ec;
	fs::create_directories(dir, ec);
	if (ec) {
		err << "error: cannot create '" << dir.string() << "': " << ec.message() << "\n";
		return exit_usage;
	}

	Manifest manifest(dir, command, config_path, cfg);
	if (cfg.peres_terno) {
		for (const auto& w : cfg.peres_terno->validate()) {
			err << "warning: " << w << "\n";
		}
	}

	RunResult result;
	try {
		result = cfg.ensemble ? run_ensemble(cfg) : run_trajectory(cfg);
	} catch (const NumericalError& e) {
		err << "numerical failure: " << e.what() << "\n";
		manifest.finish("failed", e.what());
		return exit_numerical;
	}

	if (cfg.outputs.csv) {
		write_file(dir / "series.csv", series_to_csv(result.series));
		manifest.add_output("series.csv");
	}
	if (cfg.outputs.json) {
		write_file(dir / "report.json", result.report.dump(2) + "\n");
		manifest.add_output("report.json");
	}
	for (const auto& [name, text] : result.extra_files) {
		write_file(dir / name, text);
		manifest.add_output(name);
	}
	manifest.finish("completed");
	out << "run complete: " << result.series.rows.size() << " samples written to " << dir.string() << "\n";
	return exit_success;
}

// ---------------------------------------------------------------------------
// bench

class Overrides {
public:
	explicit Overrides(const std::vector<std::string>& items)
	{
		for (const auto& item : items) {
			const auto eq = item.find('=');
			if (eq == std::string::npos || eq == 0) {
				throw UsageError("--set expects key=value, got '" + item + "'");
			}
			values_[item.substr(0, eq)] = item.substr(eq + 1);
		}
	}

	double number(const std::string& key, double fallback)
	{
		const auto* v = take(key);
		if (!v) {
			return fallback;
		}
		double d = 0.0;
		const auto res = std::from_chars(v->data(), v->data() + v->size(), d);
		if (res.ec != std::errc{} || res.ptr != v->data() + v->size() || !std::isfinite(d)) {
			throw UsageError("--set " + key + ": expected a number, got '" + *v + "'");
		}
		return d;
	}

	std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
	{
		const auto* v = take(key);
		if (!v) {
			return fallback;
		}
		std::uint64_t u = 0;
		const auto res = std::from_chars(v->data(), v->data() + v->size(), u);
		if (res.ec != std::errc{} || res.ptr != v->data() + v->size()) {
			throw UsageError("--set " + key + ": expected a non-negative integer, got '" + *v + "'");
		}
		return u;
	}

	std::string text(const std::string& key, const std::string& fallback)
	{
		const auto* v = take(key);
		return v ? *v : fallback;
	}

	void finish(const std::string& bench) const
	{
		for (const auto& [key, value] : values_) {
			if (!used_.contains(key)) {
				throw UsageError("unknown --set key '" + key + "' for benchmark " + bench);
			}
		}
	}

private:
	const std::string* take(const std::string& key)
	{
		used_.insert(key);
		const auto it = values_.find(key);
		return it == values_.end() ? nullptr : &it->second;
	}

	std::map<std::string, std::string> values_;
	std::set<std::string> used_;
};

IntegratorConfig integrator_overrides(Overrides& o, IntegratorMethod method)
{
	IntegratorConfig cfg;
	cfg.dt = o.number("dt", 1e-3);
	const auto name = o.text("method", std::string(to_string(method)));
	try {
		cfg.method = parse_integrator_method(name);
	} catch (const ValidationError& e) {
		throw UsageError(std::string("--set method: ") + e.what());
	}
	cfg.fp_tol = o.number("fp_tol", cfg.fp_tol);
	cfg.fp_max_iter = o.unsigned_integer("fp_max_iter", cfg.fp_max_iter);
	return cfg;
}

PeresTernoModel model_overrides(Overrides& o)
{
	PeresTernoModel m;
	m.m_cl = o.number("m_cl", m.m_cl);
	m.omega_cl = o.number("omega_cl", m.omega_cl);
	m.omega_qm = o.number("omega_qm", m.omega_qm);
	m.lambda = o.number("lambda", m.lambda);
	m.levels = o.unsigned_integer("N", m.levels);
	m.alpha0 = Complex(o.number("alpha0", m.alpha0.real()), o.number("alpha0_im", m.alpha0.imag()));
	m.x0 = o.number("x0", m.x0);
	m.p0 = o.number("p0", m.p0);
	return m;
}

BenchmarkReport bench_peres_terno(Overrides& o)
{
	const auto model = model_overrides(o);
	const double t_final = o.number("t_final", 20.0);
	EhrenfestOptions opts;
	opts.tolerance = o.number("tolerance", opts.tolerance);
	opts.record_every = o.unsigned_integer("record_every", 10);
	const auto cfg = integrator_overrides(o, IntegratorMethod::rk4);
	o.finish("peres-terno");
	return ehrenfest_residual(model, t_final, cfg, opts);
}

BenchmarkReport bench_conservation(Overrides& o)
{
	const auto model = model_overrides(o);
	const double t_final = o.number("t_final", 100.0);
	ConservationOptions opts;
	opts.energy_tolerance = o.number("energy_tolerance", opts.energy_tolerance);
	opts.constraint_tolerance = o.number("constraint_tolerance", opts.constraint_tolerance);
	opts.record_every = o.unsigned_integer("record_every", opts.record_every);
	const auto cfg = integrator_overrides(o, IntegratorMethod::implicit_midpoint);
	o.finish("conservation");
	auto warnings = model.validate();
	const auto sys = build_peres_terno(model);
	auto report = conservation_report(sys.hamiltonian, sys.initial, t_final, cfg, opts);
	report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
	report.parameters["lambda"] = format_double(model.lambda);
	report.parameters["N"] = std::to_string(model.levels);
	return report;
}

BenchmarkReport bench_separability(Overrides& o)
{
	const double lambda = o.number("lambda", 0.0);
	const std::size_t levels = o.unsigned_integer("N", 4);
	const std::uint64_t seed = o.unsigned_integer("seed", 11);
	const double t_final = o.number("t_final", 10.0);
	const auto cfg = integrator_overrides(o, IntegratorMethod::implicit_midpoint);
	o.finish("separability");
	if (levels == 0) {
		throw UsageError("--set N: must be positive");
	}

	Rng rng(seed);
	const auto osc = truncated_oscillator(levels, 1.0);
	const auto cl_a = HybridObservable::classical(PhaseFunction::harmonic(1.0, 1.0));
	// ½p² + ¼x⁴: anharmonic so the two classical flows differ qualitatively.
	const auto cl_b = HybridObservable::classical(PhaseFunction::polynomial({{0.5, {}, {2}}, {0.25, {4}, {}}}));
	const auto qm_a = HybridObservable::quantum(osc.hamiltonian);
	const auto qm_b = HybridObservable::quantum(random_hermitian(levels, rng));
	HybridPhasePoint z0{{1.0}, {0.0}, expand_state(random_state(levels, rng))};
	HybridObservable interaction;
	if (lambda != 0.0) {
		interaction = HybridObservable::coupling(PhaseFunction::position(0, lambda), osc.position);
	}
	auto report = separability_suite(cl_a, cl_b, qm_a, qm_b, z0, t_final, cfg, interaction);
	report.parameters["N"] = std::to_string(levels);
	report.parameters["seed"] = std::to_string(seed);
	report.parameters["lambda"] = format_double(lambda);
	return report;
}

BenchmarkReport bench_brackets(Overrides& o)
{
	BracketBenchConfig cfg;
	cfg.seed = o.unsigned_integer("seed", cfg.seed);
	cfg.quantum_dim = o.unsigned_integer("quantum_dim", cfg.quantum_dim);
	cfg.classical_dim = o.unsigned_integer("classical_dim", cfg.classical_dim);
	cfg.points = o.unsigned_integer("points", cfg.points);
	o.finish("brackets");
	return bracket_benchmark(cfg);
}

void print_report(const BenchmarkReport& r, std::ostream& out)
{
	out << "benchmark " << r.name << "\n";
	for (const auto& [k, v] : r.parameters) {
		out << "  " << k << " = " << v << "\n";
	}
	if (!r.metrics.empty()) {
		out << std::left << std::setw(26) << "  metric" << std::setw(24) << "max" << std::setw(24) << "rms"
		    << std::setw(12) << "tolerance"
		    << "status\n";
	}
	for (const auto& m : r.metrics) {
		out << "  " << std::left << std::setw(24) << m.name << std::setw(24) << format_double(m.max) << std::setw(24)
		    << format_double(m.rms) << std::setw(12) << (m.tolerance ? format_double(*m.tolerance) : "-")
		    << (m.tolerance ? (m.pass() ? "ok" : "FAIL") : "info") << "\n";
	}
	for (const auto& w : r.warnings) {
		out << "  warning: " << w << "\n";
	}
	for (const auto& n : r.notes) {
		out << "  note: " << n << "\n";
	}
	out << (!r.applicable ? "NOT APPLICABLE" : r.pass() ? "PASS" : "FAIL") << "\n";
}

int cmd_bench(const std::string& name, const std::vector<std::string>& sets, const std::string& out_dir,
              std::ostream& out, std::ostream& err)
{
	static const std::map<std::string, BenchmarkReport (*)(Overrides&)> suites = {
	    {"peres-terno", bench_peres_terno},
	    {"conservation", bench_conservation},
	    {"separability", bench_separability},
	    {"brackets", bench_brackets},
	};
	const auto it = suites.find(name);
	if (it == suites.end()) {
		err << "error: unknown benchmark '" << name << "' (expected peres-terno, conservation, separability or brackets)\n";
		return exit_usage;
	}

	BenchmarkReport report;
	try {
		Overrides overrides(sets);
		report = it->second(overrides);
	} catch (const UsageError& e) {
		err << "error: " << e.what() << "\n";
		return exit_usage;
	} catch (const NumericalError& e) {
		err << "numerical failure: " << e.what() << "\n";
		return exit_numerical;
	} catch (const std::invalid_argument& e) {
		err << "error: " << e.what() << "\n";
		return exit_usage;
	}

	print_report(report, out);
	if (!out_dir.empty()) {
		std::error_code ec;
		fs::create_directories(out_dir, ec);
		if (ec) {
			err << "error: cannot create '" << out_dir << "': " << ec.message() << "\n";
			return exit_usage;
		}
		write_file(fs::path(out_dir) / "report.json", report_to_json(report));
		if (!report.series.columns.empty()) {
			write_file(fs::path(out_dir) / "series.csv", series_to_csv(report.series));
		}
	}
	if (!report.applicable) {
		return exit_usage;
	}
	return report.pass() ? exit_success : exit_failed;
}

// ---------------------------------------------------------------------------
// inspect

int cmd_inspect(const std::string& path, std::ostream& out, std::ostream& err)
{
	Ensemble e;
	try {
		e = ensemble_from_json(read_file(path));
	} catch (const UsageError& ex) {
		err << "error: " << ex.what() << "\n";
		return exit_usage;
	} catch (const ParseError& ex) {
		err << "parse error at byte " << ex.offset() << ": " << ex.what() << "\n";
		return exit_usage;
	}

	out << "members      " << e.size() << "\n";
	out << "seed         " << e.meta.seed << "\n";
	out << "sampler      " << e.meta.sampler << "\n";
	out << "time         " << format_double(e.meta.time) << "\n";
	out << "weight sum   " << format_double(e.weight_sum()) << "\n";
	if (e.members.empty()) {
		return exit_success;
	}

	std::vector<double> c;
	for (const auto& m : e.members) {
		c.push_back(normalization_constraint(m.z.q));
	}
	const auto [cmin, cmax] = std::minmax_element(c.begin(), c.end());
	double dev = 0.0;
	for (double v : c) {
		dev = std::max(dev, std::abs(v - 1.0));
	}
	const double w = e.weight_sum();
	auto weighted_mean = [&](const std::function<double(const EnsembleMember&)>& f) {
		std::vector<double> terms;
		for (const auto& m : e.members) {
			terms.push_back(m.weight * f(m));
		}
		return pairwise_sum(terms) / w;
	};
	out << "C mean       " << format_double(weighted_mean([](const EnsembleMember& m) {
		    return normalization_constraint(m.z.q);
	    })) << "\n";
	out << "C min/max    " << format_double(*cmin) << " " << format_double(*cmax) << "\n";
	out << "max |C - 1|  " << format_double(dev) << "\n";

	const std::size_t n = e.members.front().z.x.size();
	const auto labels = coordinate_labels(n);
	for (std::size_t k = 0; k < 2 * n; ++k) {
		auto coord = [k, n](const EnsembleMember& m) { return k < n ? m.z.x[k] : m.z.p[k - n]; };
		const double mean = weighted_mean(coord);
		const double var = weighted_mean([&](const EnsembleMember& m) {
			const double d = coord(m) - mean;
			return d * d;
		});
		out << std::left << std::setw(13) << labels[k] << "mean " << format_double(mean) << "  variance "
		    << format_double(var) << "\n";
	}
	return exit_success;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
	CLI::App app{"Quantum-classical hybrid dynamics on a unified phase space (hbar = 1)", "hybridflow"};
	app.set_version_flag("--version", HYBRIDFLOW_VERSION);
	app.require_subcommand(1);

	std::string config_path;
	std::string run_out;
	std::optional<std::uint64_t> seed;
	auto* run = app.add_subcommand("run", "Integrate a trajectory or ensemble described by a JSON config");
	run->add_option("--config", config_path, "Configuration file")->required();
	run->add_option("--out", run_out, "Output directory (overrides outputs.directory)");
	run->add_option("--seed", seed, "Ensemble sampling seed (overrides ensemble.seed)");

	std::string bench_name;
	std::vector<std::string> sets;
	std::string bench_out;
	auto* bench = app.add_subcommand("bench", "Run a benchmark suite: peres-terno, conservation, separability, brackets");
	bench->add_option("name", bench_name, "Benchmark name")->required();
	bench->add_option("--set", sets, "Parameter override key=value (repeatable)")->allow_extra_args(false);
	bench->add_option("--out", bench_out, "Directory for report.json and series.csv");

	std::string inspect_path;
	auto* inspect = app.add_subcommand("inspect", "Summarise an ensemble snapshot");
	inspect->add_option("file", inspect_path, "Ensemble JSON file")->required();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		return app.exit(e, out, err) == 0 ? exit_success : exit_usage;
	}

	try {
		if (*run) {
			return cmd_run(config_path, run_out, seed, std::vector<std::string>(argv, argv + argc), out, err);
		}
		if (*bench) {
			return cmd_bench(bench_name, sets, bench_out, out, err);
		}
		return cmd_inspect(inspect_path, out, err);
	} catch (const std::exception& e) {
		err << "error: " << e.what() << "\n";
		return exit_numerical;
	}
}

} // namespace hybridflow
