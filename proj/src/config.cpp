#include "hybridflow/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace hybridflow {

namespace {

using json = nlohmann::json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be rejected.
class Section {
public:
	Section(const json& node, std::string path)
		: node_(node), path_(std::move(path))
	{
		if (!node_.is_object()) {
			throw ConfigError(path_, "expected an object");
		}
	}

	const std::string& path() const { return path_; }
	bool has(const std::string& key) const { return node_.contains(key); }

	const json& at(const std::string& key)
	{
		if (!node_.contains(key)) {
			throw ConfigError(join(path_, key), "missing required key");
		}
		used_.insert(key);
		return node_.at(key);
	}

	double number(const std::string& key)
	{
		const auto& v = at(key);
		if (!v.is_number()) {
			throw ConfigError(join(path_, key), "expected a number");
		}
		const double d = v.get<double>();
		if (!std::isfinite(d)) {
			throw ConfigError(join(path_, key), "expected a finite number");
		}
		return d;
	}

	double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

	std::uint64_t unsigned_integer(const std::string& key)
	{
		const auto& v = at(key);
		if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
			throw ConfigError(join(path_, key), "expected a non-negative integer");
		}
		return v.get<std::uint64_t>();
	}

	std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
	{
		return has(key) ? unsigned_integer(key) : fallback;
	}

	std::string string(const std::string& key)
	{
		const auto& v = at(key);
		if (!v.is_string()) {
			throw ConfigError(join(path_, key), "expected a string");
		}
		return v.get<std::string>();
	}

	std::string string(const std::string& key, const std::string& fallback) { return has(key) ? string(key) : fallback; }

	bool boolean(const std::string& key, bool fallback)
	{
		if (!has(key)) {
			return fallback;
		}
		const auto& v = at(key);
		if (!v.is_boolean()) {
			throw ConfigError(join(path_, key), "expected true or false");
		}
		return v.get<bool>();
	}

	Section object(const std::string& key) { return Section(at(key), join(path_, key)); }

	void finish() const
	{
		for (const auto& item : node_.items()) {
			if (!used_.contains(item.key())) {
				throw ConfigError(join(path_, item.key()), "unknown key");
			}
		}
	}

private:
	const json& node_;
	std::string path_;
	std::set<std::string> used_;
};

Complex parse_complex(const json& v, const std::string& path)
{
	if (v.is_number()) {
		return v.get<double>();
	}
	if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
		return {v[0].get<double>(), v[1].get<double>()};
	}
	throw ConfigError(path, "expected a number or a [re, im] pair");
}

std::vector<double> parse_reals(const json& v, const std::string& path)
{
	if (v.is_number()) {
		return {v.get<double>()};
	}
	if (!v.is_array()) {
		throw ConfigError(path, "expected a number or an array of numbers");
	}
	std::vector<double> out;
	for (std::size_t i = 0; i < v.size(); ++i) {
		if (!v[i].is_number()) {
			throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
		}
		out.push_back(v[i].get<double>());
	}
	return out;
}

StateVector parse_state(const json& v, const std::string& path)
{
	if (!v.is_array() || v.empty()) {
		throw ConfigError(path, "expected a non-empty array of amplitudes");
	}
	StateVector psi(v.size());
	for (std::size_t i = 0; i < v.size(); ++i) {
		psi[i] = parse_complex(v[i], path + "[" + std::to_string(i) + "]");
	}
	return psi;
}

HermitianOperator parse_operator(const json& v, const std::string& path)
{
	if (!v.is_array() || v.empty()) {
		throw ConfigError(path, "expected a square matrix (array of rows)");
	}
	const std::size_t n = v.size();
	ComplexMatrix m(n, n);
	for (std::size_t i = 0; i < n; ++i) {
		if (!v[i].is_array() || v[i].size() != n) {
			throw ConfigError(path + "[" + std::to_string(i) + "]", "row length must equal the number of rows");
		}
		for (std::size_t j = 0; j < n; ++j) {
			m(i, j) = parse_complex(v[i][j], path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
		}
	}
	try {
		return HermitianOperator(std::move(m));
	} catch (const ValidationError& e) {
		throw ConfigError(path, e.what());
	}
}

struct BuiltModel {
	std::string name;
	std::optional<PeresTernoModel> peres_terno;
	HybridHamiltonian hamiltonian;
	HybridPhasePoint initial;
	std::vector<NamedObservable> builtin;
	std::vector<std::string> default_observables;
};

BuiltModel parse_peres_terno(Section& model)
{
	PeresTernoModel pt;
	if (model.has("params")) {
		auto params = model.object("params");
		pt.m_cl = params.number("m_cl", pt.m_cl);
		pt.omega_cl = params.number("omega_cl", pt.omega_cl);
		pt.omega_qm = params.number("omega_qm", pt.omega_qm);
		pt.lambda = params.number("lambda", pt.lambda);
		pt.levels = params.unsigned_integer("N", pt.levels);
		if (params.has("alpha0")) {
			pt.alpha0 = parse_complex(params.at("alpha0"), join(params.path(), "alpha0"));
		}
		pt.x0 = params.number("x0", pt.x0);
		pt.p0 = params.number("p0", pt.p0);
		params.finish();
	}
	try {
		pt.validate();
	} catch (const ValidationError& e) {
		throw ConfigError(join(model.path(), "params"), e.what());
	}
	auto sys = build_peres_terno(pt);
	BuiltModel out{"peres-terno", pt, std::move(sys.hamiltonian), std::move(sys.initial), {}, {"q_exp", "p_exp"}};
	out.builtin.push_back({"q_exp", HybridObservable::quantum(sys.oscillator.position)});
	out.builtin.push_back({"p_exp", HybridObservable::quantum(sys.oscillator.momentum)});
	out.builtin.push_back({"n_exp", HybridObservable::quantum(sys.oscillator.number)});
	return out;
}

BuiltModel parse_explicit(Section& model)
{
	BuiltModel out;
	out.name = "explicit";

	auto cl = model.object("classical");
	const std::string kind = cl.string("kind");
	PhaseFunction h_cl;
	std::size_t n = 1;
	if (kind == "harmonic") {
		const double mass = cl.number("mass", 1.0);
		const double omega = cl.number("omega", 1.0);
		if (!(mass > 0.0)) {
			throw ConfigError(join(cl.path(), "mass"), "must be positive");
		}
		h_cl = PhaseFunction::harmonic(mass, omega);
	} else if (kind == "free") {
		const double mass = cl.number("mass", 1.0);
		if (!(mass > 0.0)) {
			throw ConfigError(join(cl.path(), "mass"), "must be positive");
		}
		h_cl = PhaseFunction::kinetic(mass);
	} else if (kind == "none") {
		n = 0;
	} else {
		throw ConfigError(join(cl.path(), "kind"), "expected harmonic, free or none");
	}
	cl.finish();

	auto qm = model.object("quantum");
	const auto h_qm = parse_operator(qm.at("hamiltonian"), join(qm.path(), "hamiltonian"));
	qm.finish();
	const std::size_t N = h_qm.dim();

	HybridObservable interaction;
	if (model.has("interaction")) {
		const auto& terms = model.at("interaction");
		const std::string path = join(model.path(), "interaction");
		if (!terms.is_array()) {
			throw ConfigError(path, "expected an array of coupling terms");
		}
		for (std::size_t t = 0; t < terms.size(); ++t) {
			Section term(terms[t], path + "[" + std::to_string(t) + "]");
			const double lambda = term.number("lambda");
			const std::string coord = term.string("coordinate", "x");
			const auto op = parse_operator(term.at("operator"), join(term.path(), "operator"));
			term.finish();
			if (op.dim() != N) {
				throw ConfigError(join(term.path(), "operator"), "dimension differs from quantum.hamiltonian");
			}
			if (n == 0) {
				throw ConfigError(term.path(), "coupling requires a classical degree of freedom");
			}
			PhaseFunction coeff;
			if (coord == "x") {
				coeff = PhaseFunction::position(0, lambda);
			} else if (coord == "p") {
				coeff = PhaseFunction::momentum(0, lambda);
			} else {
				throw ConfigError(join(term.path(), "coordinate"), "expected \"x\" or \"p\"");
			}
			interaction = interaction + HybridObservable::coupling(coeff, op);
		}
	}

	auto init = model.object("initial");
	HybridPhasePoint z0;
	if (n == 1) {
		z0.x = {init.number("x", 0.0)};
		z0.p = {init.number("p", 0.0)};
	}
	const auto psi = parse_state(init.at("psi"), join(init.path(), "psi"));
	if (psi.size() != N) {
		throw ConfigError(join(init.path(), "psi"), "length differs from quantum.hamiltonian dimension");
	}
	const double norm2 = psi.norm_squared();
	if (std::abs(norm2 - 1.0) > 1e-10) {
		throw ConfigError(join(init.path(), "psi"), "state must be normalised (|norm^2 - 1| <= 1e-10)");
	}
	z0.q = expand_state(psi);
	init.finish();

	out.hamiltonian = HybridHamiltonian(HybridObservable::classical(h_cl), HybridObservable::quantum(h_qm), interaction);
	out.initial = std::move(z0);
	return out;
}

WeightFunction parse_weight(const json& v, const std::string& path, std::size_t n)
{
	if (v.is_number()) {
		return WeightFunction::constant(v.get<double>());
	}
	Section w(v, path);
	auto lg = w.object("logistic");
	auto xs = parse_reals(lg.at("x_slope"), join(lg.path(), "x_slope"));
	auto ps = parse_reals(lg.at("p_slope"), join(lg.path(), "p_slope"));
	const double offset = lg.number("offset", 0.0);
	const bool complement = lg.boolean("complement", false);
	lg.finish();
	w.finish();
	if (xs.size() != n || ps.size() != n) {
		throw ConfigError(join(path, "logistic"), "slopes must have one entry per classical coordinate");
	}
	return WeightFunction::logistic(std::move(xs), std::move(ps), offset, complement);
}

EnsembleConfig parse_ensemble(Section& ens, const HybridPhasePoint& initial)
{
	EnsembleConfig out;
	out.count = ens.unsigned_integer("count");
	if (out.count == 0) {
		throw ConfigError(join(ens.path(), "count"), "must be positive");
	}
	out.seed = ens.unsigned_integer("seed", 0);
	const std::size_t n = initial.x.size();

	auto cl = ens.object("classical");
	out.spec.classical.mean = parse_reals(cl.at("mean"), join(cl.path(), "mean"));
	const auto& cov = cl.at("covariance");
	if (!cov.is_array()) {
		throw ConfigError(join(cl.path(), "covariance"), "expected a matrix");
	}
	for (std::size_t i = 0; i < cov.size(); ++i) {
		out.spec.classical.covariance.push_back(
		    parse_reals(cov[i], join(cl.path(), "covariance") + "[" + std::to_string(i) + "]"));
	}
	cl.finish();
	if (out.spec.classical.mean.size() != 2 * n) {
		throw ConfigError(join(cl.path(), "mean"), "expected " + std::to_string(2 * n) + " entries (x then p)");
	}

	const auto& comps = ens.at("components");
	const std::string cpath = join(ens.path(), "components");
	if (!comps.is_array() || comps.empty()) {
		throw ConfigError(cpath, "expected a non-empty array");
	}
	for (std::size_t j = 0; j < comps.size(); ++j) {
		Section c(comps[j], cpath + "[" + std::to_string(j) + "]");
		DensityComponent comp;
		comp.weight = c.has("weight") ? parse_weight(c.at("weight"), join(c.path(), "weight"), n) : WeightFunction::constant(1.0);
		const auto& st = c.at("state");
		if (st.is_string() && st.get<std::string>() == "initial") {
			comp.state = reconstruct_state(initial.q);
		} else {
			comp.state = parse_state(st, join(c.path(), "state"));
		}
		if (comp.state.size() != initial.q.size()) {
			throw ConfigError(join(c.path(), "state"), "dimension differs from the model's quantum dimension");
		}
		c.finish();
		out.spec.components.push_back(std::move(comp));
	}
	try {
		out.spec.validate();
	} catch (const std::invalid_argument& e) {
		throw ConfigError(ens.path(), e.what());
	}
	return out;
}

} // namespace

std::string fnv1a_hex(std::string_view data)
{
	std::uint64_t h = 0xcbf29ce484222325ULL;
	for (unsigned char c : data) {
		h ^= c;
		h *= 0x100000001b3ULL;
	}
	char buf[17];
	std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
	return buf;
}

SimulationConfig parse_simulation_config(std::string_view text)
{
	json doc;
	try {
		doc = json::parse(text.begin(), text.end());
	} catch (const json::parse_error& e) {
		throw ConfigError("", std::string("syntax error: ") + e.what());
	}

	Section root(doc, "");
	if (root.has("units")) {
		if (root.string("units") != "hbar=1") {
			throw ConfigError("units", "only \"hbar=1\" is supported");
		}
	}
	if (root.has("description")) {
		root.string("description");
	}

	SimulationConfig cfg;
	auto model = root.object("model");
	const std::string name = model.string("name");
	BuiltModel built;
	if (name == "peres-terno") {
		built = parse_peres_terno(model);
	} else if (name == "explicit") {
		built = parse_explicit(model);
	} else {
		throw ConfigError("model.name", "unknown model '" + name + "' (expected peres-terno or explicit)");
	}
	model.finish();
	cfg.model_name = built.name;
	cfg.peres_terno = built.peres_terno;
	cfg.hamiltonian = std::move(built.hamiltonian);
	cfg.initial = std::move(built.initial);

	auto integ = root.object("integrator");
	cfg.integrator.dt = integ.number("dt");
	cfg.t_final = integ.number("t_final");
	try {
		cfg.integrator.method = parse_integrator_method(integ.string("method", "implicit_midpoint"));
	} catch (const ValidationError& e) {
		throw ConfigError("integrator.method", e.what());
	}
	cfg.integrator.fp_tol = integ.number("fp_tol", cfg.integrator.fp_tol);
	cfg.integrator.fp_max_iter = integ.unsigned_integer("fp_max_iter", cfg.integrator.fp_max_iter);
	integ.finish();
	if (!(cfg.integrator.dt > 0.0)) {
		throw ConfigError("integrator.dt", "must be positive");
	}
	if (!(cfg.t_final >= 0.0)) {
		throw ConfigError("integrator.t_final", "must be non-negative");
	}
	try {
		cfg.integrator.validate();
	} catch (const ValidationError& e) {
		throw ConfigError("integrator", e.what());
	}

	if (root.has("ensemble")) {
		auto ens = root.object("ensemble");
		cfg.ensemble = parse_ensemble(ens, cfg.initial);
		ens.finish();
	}

	std::vector<std::string> requested = built.default_observables;
	if (root.has("outputs")) {
		auto out = root.object("outputs");
		cfg.outputs.directory = out.string("directory", "");
		cfg.outputs.record_every = out.unsigned_integer("record_every", 1);
		if (cfg.outputs.record_every == 0) {
			throw ConfigError("outputs.record_every", "must be at least 1");
		}
		if (out.has("formats")) {
			const auto& f = out.at("formats");
			if (!f.is_array()) {
				throw ConfigError("outputs.formats", "expected an array of \"csv\" / \"json\"");
			}
			cfg.outputs.csv = false;
			cfg.outputs.json = false;
			for (const auto& item : f) {
				const std::string s = item.is_string() ? item.get<std::string>() : "";
				if (s == "csv") {
					cfg.outputs.csv = true;
				} else if (s == "json") {
					cfg.outputs.json = true;
				} else {
					throw ConfigError("outputs.formats", "unknown format (expected \"csv\" or \"json\")");
				}
			}
		}
		if (out.has("observables")) {
			const auto& obs = out.at("observables");
			if (!obs.is_array()) {
				throw ConfigError("outputs.observables", "expected an array");
			}
			requested.clear();
			for (std::size_t i = 0; i < obs.size(); ++i) {
				const std::string path = "outputs.observables[" + std::to_string(i) + "]";
				if (obs[i].is_string()) {
					requested.push_back(obs[i].get<std::string>());
					continue;
				}
				Section o(obs[i], path);
				NamedObservable named{o.string("name"), {}};
				const auto op = parse_operator(o.at("operator"), join(path, "operator"));
				o.finish();
				if (op.dim() != cfg.initial.q.size()) {
					throw ConfigError(join(path, "operator"), "dimension differs from the model's quantum dimension");
				}
				named.observable = HybridObservable::quantum(op);
				cfg.observables.push_back(std::move(named));
			}
		}
		out.finish();
	}
	// Named observables available for every model.
	built.builtin.push_back({"E_cl", cfg.hamiltonian.classical()});
	built.builtin.push_back({"E_qm", cfg.hamiltonian.quantum()});
	built.builtin.push_back({"E_int", cfg.hamiltonian.interaction()});
	std::vector<NamedObservable> resolved;
	for (const auto& r : requested) {
		auto it = std::find_if(built.builtin.begin(), built.builtin.end(), [&](const NamedObservable& o) { return o.name == r; });
		if (it == built.builtin.end()) {
			throw ConfigError("outputs.observables", "unknown observable '" + r + "' for model " + cfg.model_name);
		}
		resolved.push_back(*it);
	}
	resolved.insert(resolved.end(), cfg.observables.begin(), cfg.observables.end());
	cfg.observables = std::move(resolved);
	root.finish();

	cfg.resolved_json = doc.dump();
	return cfg;
}

} // namespace hybridflow
