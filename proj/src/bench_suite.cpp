#include "hybridflow/bench_suite.hpp"

#include "hybridflow/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

namespace hybridflow {

// ---------------------------------------------------------------------------
// Peres-Terno model

std::size_t PeresTernoModel::recommended_levels() const
{
	const double a = std::abs(alpha0);
	return static_cast<std::size_t>(std::ceil(4.0 * (a * a + 3.0 * a + 2.0)));
}

std::vector<std::string> PeresTernoModel::validate() const
{
	auto positive = [](double v, const char* name) {
		if (!(v > 0.0) || !std::isfinite(v)) {
			throw ValidationError(std::string("peres-terno: ") + name + " must be positive and finite");
		}
	};
	positive(m_cl, "m_cl");
	positive(omega_cl, "omega_cl");
	positive(omega_qm, "omega_qm");
	if (!std::isfinite(lambda) || !std::isfinite(x0) || !std::isfinite(p0) || !std::isfinite(alpha0.real()) ||
	    !std::isfinite(alpha0.imag())) {
		throw ValidationError("peres-terno: lambda, x0, p0 and alpha0 must be finite");
	}
	if (levels < 2) {
		throw ValidationError("peres-terno: N must be at least 2");
	}
	std::vector<std::string> warnings;
	if (levels < recommended_levels()) {
		std::ostringstream msg;
		msg << "truncation: N = " << levels << " is below 4(|alpha0|^2 + 3|alpha0| + 2) = " << recommended_levels()
		    << "; expect truncation leakage";
		warnings.push_back(msg.str());
	}
	return warnings;
}

TruncatedOscillator truncated_oscillator(std::size_t levels, double omega)
{
	ComplexMatrix a(levels, levels);
	for (std::size_t n = 1; n < levels; ++n) {
		a(n - 1, n) = std::sqrt(static_cast<double>(n));
	}
	const ComplexMatrix ad = a.adjoint();
	std::vector<double> number(levels);
	std::vector<double> energy(levels);
	for (std::size_t n = 0; n < levels; ++n) {
		number[n] = static_cast<double>(n);
		energy[n] = omega * (static_cast<double>(n) + 0.5);
	}
	return {
	    a,
	    HermitianOperator((a + ad) * Complex(1.0 / std::sqrt(2.0))),
	    HermitianOperator((a - ad) * Complex(0.0, -1.0 / std::sqrt(2.0))),
	    HermitianOperator::diagonal(number),
	    HermitianOperator::diagonal(energy),
	};
}

StateVector coherent_state(std::size_t levels, Complex alpha)
{
	if (levels == 0) {
		throw ValidationError("coherent_state: at least one level is required");
	}
	StateVector psi(levels);
	Complex c = std::exp(-0.5 * std::norm(alpha));
	for (std::size_t n = 0; n < levels; ++n) {
		psi[n] = c;
		c *= alpha / std::sqrt(static_cast<double>(n + 1));
	}
	return psi.normalized_copy();
}

PeresTernoSystem build_peres_terno(const PeresTernoModel& model)
{
	model.validate();
	auto osc = truncated_oscillator(model.levels, model.omega_qm);
	HybridHamiltonian h(HybridObservable::classical(PhaseFunction::harmonic(model.m_cl, model.omega_cl)),
	                    HybridObservable::quantum(osc.hamiltonian),
	                    HybridObservable::coupling(PhaseFunction::position(0, model.lambda), osc.position));
	HybridPhasePoint z0{{model.x0}, {model.p0}, expand_state(coherent_state(model.levels, model.alpha0))};
	return {std::move(h), std::move(z0), std::move(osc)};
}

// ---------------------------------------------------------------------------
// Reports

bool BenchmarkReport::pass() const
{
	return applicable && std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass(); });
}

const Metric* BenchmarkReport::metric(const std::string& name) const
{
	for (const auto& m : metrics) {
		if (m.name == name) {
			return &m;
		}
	}
	return nullptr;
}

namespace {

Metric summarise(std::string name, const std::vector<double>& values, std::optional<double> tolerance)
{
	Metric m{std::move(name), 0.0, 0.0, tolerance};
	double sq = 0.0;
	for (double v : values) {
		m.max = std::max(m.max, v);
		sq += v * v;
	}
	m.rms = values.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(values.size()));
	return m;
}

/// A single-sample metric, so its rms is the value itself.
Metric scalar(std::string name, double value, std::optional<double> tolerance)
{
	return {std::move(name), value, std::abs(value), tolerance};
}

std::string to_text(double v) { return format_double(v); }

} // namespace

BenchmarkReport ehrenfest_residual(const PeresTernoModel& model, double t_final, const IntegratorConfig& cfg,
                                   const EhrenfestOptions& options)
{
	BenchmarkReport report;
	report.name = "peres-terno";
	report.warnings = model.validate();
	const auto sys = build_peres_terno(model);

	const std::vector<HybridObservable> moments{HybridObservable::quantum(sys.oscillator.position),
	                                            HybridObservable::quantum(sys.oscillator.momentum)};
	IntegrateOptions opts;
	opts.record_every = options.record_every;
	const auto hybrid = integrate(sys.hamiltonian, sys.initial, t_final, cfg, moments, opts);

	// Closed first-moment system: H_ref = H_CL(x, p) + ω_qm(Q² + P²)/2 + λxQ with (Q, P) = (⟨q̂⟩, ⟨p̂⟩).
	const double w = model.omega_qm;
	const auto h_ref = PhaseFunction::polynomial({
	    {0.5 / model.m_cl, {}, {2, 0}},
	    {0.5 * model.m_cl * model.omega_cl * model.omega_cl, {2, 0}, {}},
	    {0.5 * w, {0, 2}, {}},
	    {0.5 * w, {}, {0, 2}},
	    {model.lambda, {1, 1}, {}},
	});
	const HybridHamiltonian reference(HybridObservable::classical(h_ref), {}, {});
	HybridPhasePoint r0{{model.x0, hybrid.observables[0][0]}, {model.p0, hybrid.observables[1][0]}, QmCoords(0)};
	IntegrateOptions ref_opts = opts;
	ref_opts.require_on_sphere = false;
	const auto ref = integrate(reference, r0, t_final, cfg, {}, ref_opts);

	report.series.columns = {"t", "x", "p", "E", "C", "q_exp", "p_exp", "ref_q", "ref_p", "residual"};
	std::vector<double> residuals;
	std::vector<double> leakage;
	const std::size_t N = model.levels;
	for (std::size_t k = 0; k < hybrid.times.size(); ++k) {
		const auto& z = hybrid.points[k];
		const auto& r = ref.points[k];
		const double q = hybrid.observables[0][k];
		const double p = hybrid.observables[1][k];
		const double res = std::max({std::abs(z.x[0] - r.x[0]), std::abs(z.p[0] - r.p[0]), std::abs(q - r.x[1]),
		                             std::abs(p - r.p[1])});
		residuals.push_back(res);
		double top = 0.0;
		for (std::size_t i = N >= 2 ? N - 2 : 0; i < N; ++i) {
			top += 0.5 * (z.q.X[i] * z.q.X[i] + z.q.P[i] * z.q.P[i]);
		}
		leakage.push_back(top);
		report.series.rows.push_back({hybrid.times[k], z.x[0], z.p[0], hybrid.energy[k], hybrid.constraint[k], q, p, r.x[1],
		                              r.p[1], res});
	}

	report.metrics.push_back(summarise("ehrenfest_residual", residuals, options.tolerance));
	report.metrics.push_back(scalar("relative_energy_drift", hybrid.max_relative_energy_drift, std::nullopt));
	report.metrics.push_back(scalar("constraint_drift", hybrid.max_constraint_drift, std::nullopt));
	const auto leak = summarise("truncation_leakage", leakage, std::nullopt);
	report.metrics.push_back(leak);
	if (leak.max > options.leakage_warning) {
		report.warnings.push_back("truncation: population of the top two Fock levels reached " + to_text(leak.max) +
		                          " (> " + to_text(options.leakage_warning) + ")");
	}

	report.parameters = {
	    {"m_cl", to_text(model.m_cl)},           {"omega_cl", to_text(model.omega_cl)},
	    {"omega_qm", to_text(model.omega_qm)},   {"lambda", to_text(model.lambda)},
	    {"N", std::to_string(model.levels)},     {"alpha0_re", to_text(model.alpha0.real())},
	    {"alpha0_im", to_text(model.alpha0.imag())}, {"x0", to_text(model.x0)},
	    {"p0", to_text(model.p0)},               {"t_final", to_text(t_final)},
	    {"dt", to_text(cfg.dt)},                 {"method", std::string(to_string(cfg.method))},
	};
	return report;
}

namespace {

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

struct SeriesComparison {
	std::size_t mismatches = 0;
	double max_difference = 0.0;

	void add(const std::vector<double>& a, const std::vector<double>& b)
	{
		for (std::size_t i = 0; i < a.size(); ++i) {
			if (!same_bits(a[i], b[i])) {
				++mismatches;
				max_difference = std::max(max_difference, std::abs(a[i] - b[i]));
			}
		}
	}
};

} // namespace

BenchmarkReport separability_suite(const HybridObservable& h_cl_a, const HybridObservable& h_cl_b,
                                   const HybridObservable& h_qm_a, const HybridObservable& h_qm_b,
                                   const HybridPhasePoint& z0, double t_final, const IntegratorConfig& cfg,
                                   const HybridObservable& interaction)
{
	BenchmarkReport report;
	report.name = "separability";
	report.parameters = {{"t_final", to_text(t_final)}, {"dt", to_text(cfg.dt)}, {"method", std::string(to_string(cfg.method))}};
	if (!interaction.classical_part().is_zero() || !interaction.qm_terms().empty()) {
		report.applicable = false;
		report.notes.push_back("not applicable: an interaction term is present; separability is only defined for I = 0");
		return report;
	}

	const HybridObservable* cls[2] = {&h_cl_a, &h_cl_b};
	const HybridObservable* qms[2] = {&h_qm_a, &h_qm_b};
	Trajectory runs[2][2];
	for (int c = 0; c < 2; ++c) {
		for (int q = 0; q < 2; ++q) {
			runs[c][q] = integrate(HybridHamiltonian(*cls[c], *qms[q]), z0, t_final, cfg);
		}
	}

	SeriesComparison qm_cmp;
	SeriesComparison cl_cmp;
	for (int q = 0; q < 2; ++q) {
		const auto& a = runs[0][q];
		const auto& b = runs[1][q];
		for (std::size_t k = 0; k < a.points.size(); ++k) {
			qm_cmp.add(a.points[k].q.X, b.points[k].q.X);
			qm_cmp.add(a.points[k].q.P, b.points[k].q.P);
		}
	}
	for (int c = 0; c < 2; ++c) {
		const auto& a = runs[c][0];
		const auto& b = runs[c][1];
		for (std::size_t k = 0; k < a.points.size(); ++k) {
			cl_cmp.add(a.points[k].x, b.points[k].x);
			cl_cmp.add(a.points[k].p, b.points[k].p);
		}
	}
	report.metrics.push_back(scalar("qm_series_mismatches", static_cast<double>(qm_cmp.mismatches), 0.0));
	report.metrics.push_back(scalar("cl_series_mismatches", static_cast<double>(cl_cmp.mismatches), 0.0));
	report.metrics.push_back(scalar("qm_max_difference", qm_cmp.max_difference, std::nullopt));
	report.metrics.push_back(scalar("cl_max_difference", cl_cmp.max_difference, std::nullopt));
	if (qm_cmp.mismatches == 0 && cl_cmp.mismatches == 0) {
		report.notes.push_back("bit-identical: QM series unchanged under classical Hamiltonian swaps and CL series unchanged "
		                       "under quantum Hamiltonian swaps");
	}

	report.series.columns = {"t", "x_aa", "x_ba", "X0_aa", "X0_ab", "X0_ba"};
	const auto& aa = runs[0][0];
	for (std::size_t k = 0; k < aa.times.size(); ++k) {
		const double x_aa = aa.points[k].x.empty() ? 0.0 : aa.points[k].x[0];
		const double x_ba = runs[1][0].points[k].x.empty() ? 0.0 : runs[1][0].points[k].x[0];
		const double X_aa = aa.points[k].q.X.empty() ? 0.0 : aa.points[k].q.X[0];
		const double X_ab = runs[0][1].points[k].q.X.empty() ? 0.0 : runs[0][1].points[k].q.X[0];
		const double X_ba = runs[1][0].points[k].q.X.empty() ? 0.0 : runs[1][0].points[k].q.X[0];
		report.series.rows.push_back({aa.times[k], x_aa, x_ba, X_aa, X_ab, X_ba});
	}
	return report;
}

BenchmarkReport conservation_report(const HybridHamiltonian& h, const HybridPhasePoint& z0, double t_final,
                                    const IntegratorConfig& cfg, const ConservationOptions& options)
{
	BenchmarkReport report;
	report.name = "conservation";
	IntegrateOptions opts;
	opts.record_every = options.record_every;
	const auto traj = integrate(h, z0, t_final, cfg, {}, opts);

	report.metrics.push_back(scalar("relative_energy_drift", traj.max_relative_energy_drift, options.energy_tolerance));
	report.metrics.push_back(scalar("constraint_drift", traj.max_constraint_drift, options.constraint_tolerance));

	// Change of the window-averaged energy between the first and last tenth of
	// the record; separates secular drift from the bounded oscillation.
	const std::size_t count = traj.energy.size();
	const std::size_t window = std::max<std::size_t>(1, count / 10);
	double first = 0.0;
	double last = 0.0;
	for (std::size_t k = 0; k < window; ++k) {
		first += traj.energy[k];
		last += traj.energy[count - window + k];
	}
	const double scale = traj.initial_energy != 0.0 ? std::abs(traj.initial_energy) : 1.0;
	report.metrics.push_back(
	    scalar("secular_energy_drift", std::abs(last - first) / static_cast<double>(window) / scale, std::nullopt));

	report.series.columns = {"t", "E", "C"};
	for (std::size_t k = 0; k < traj.times.size(); ++k) {
		report.series.rows.push_back({traj.times[k], traj.energy[k], traj.constraint[k]});
	}
	report.parameters = {{"t_final", to_text(t_final)},
	                     {"dt", to_text(cfg.dt)},
	                     {"method", std::string(to_string(cfg.method))},
	                     {"steps", std::to_string(traj.steps)}};
	return report;
}

// ---------------------------------------------------------------------------
// Bracket battery

HermitianOperator random_hermitian(std::size_t dim, Rng& rng, double scale)
{
	ComplexMatrix m(dim, dim);
	for (std::size_t i = 0; i < dim; ++i) {
		m(i, i) = scale * rng.normal();
		for (std::size_t j = i + 1; j < dim; ++j) {
			const Complex z(scale * rng.normal(), scale * rng.normal());
			m(i, j) = z;
			m(j, i) = std::conj(z);
		}
	}
	return HermitianOperator(std::move(m));
}

StateVector random_state(std::size_t dim, Rng& rng)
{
	StateVector psi(dim);
	for (std::size_t i = 0; i < dim; ++i) {
		psi[i] = Complex(rng.normal(), rng.normal());
	}
	return psi.normalized_copy();
}

BenchmarkReport bracket_benchmark(const BracketBenchConfig& config)
{
	if (config.quantum_dim == 0 || config.classical_dim == 0 || config.points == 0) {
		throw ValidationError("brackets: dimensions and point count must be positive");
	}
	const std::size_t n = config.classical_dim;
	const std::size_t N = config.quantum_dim;
	Rng rng(config.seed);

	auto random_poly = [&]() {
		std::vector<Monomial> terms;
		for (std::size_t t = 0; t < 3; ++t) {
			Monomial m{rng.normal(), std::vector<unsigned>(n, 0), std::vector<unsigned>(n, 0)};
			m.x_powers[static_cast<std::size_t>(rng() % n)] += 1 + static_cast<unsigned>(rng() % 2);
			m.p_powers[static_cast<std::size_t>(rng() % n)] += static_cast<unsigned>(rng() % 3);
			terms.push_back(std::move(m));
		}
		return PhaseFunction::polynomial(std::move(terms));
	};

	const auto f1 = random_poly();
	const auto f2 = random_poly();
	const auto g1 = random_hermitian(N, rng);
	const auto g2 = random_hermitian(N, rng);
	const auto g3 = random_hermitian(N, rng);
	const auto cl_a = HybridObservable::classical(f1);
	const auto cl_b = HybridObservable::classical(f2);
	const auto qm_a = HybridObservable::quantum(g1);
	const auto qm_b = HybridObservable::quantum(g2);
	const auto hyb = HybridObservable::classical(random_poly()) + HybridObservable::coupling(PhaseFunction::position(0), g3);
	const std::vector<const HybridObservable*> all{&cl_a, &cl_b, &qm_a, &qm_b, &hyb};

	std::vector<HybridPhasePoint> zs;
	for (std::size_t k = 0; k < config.points; ++k) {
		HybridPhasePoint z;
		for (std::size_t i = 0; i < n; ++i) {
			z.x.push_back(rng.normal());
			z.p.push_back(rng.normal());
		}
		z.q = expand_state(random_state(N, rng));
		zs.push_back(std::move(z));
	}

	std::vector<double> antisym, bilinear, cross, cl_reduce, qm_reduce, commutator_eq;
	const double a = 0.7;
	const double b = -1.3;
	const auto comb = qm_a.scaled(a) + hyb.scaled(b);
	const auto g1g2 = bracket_operator(g1, g2);
	for (const auto& z : zs) {
		for (const auto* u : all) {
			for (const auto* v : all) {
				antisym.push_back(std::abs(hybrid_bracket(*u, *v, z) + hybrid_bracket(*v, *u, z)));
			}
			bilinear.push_back(std::abs(hybrid_bracket(comb, *u, z) - a * hybrid_bracket(qm_a, *u, z) - b * hybrid_bracket(hyb, *u, z)));
		}
		cross.push_back(std::abs(hybrid_bracket(cl_a, qm_a, z)));
		cross.push_back(std::abs(hybrid_bracket(qm_b, cl_b, z)));
		cl_reduce.push_back(std::abs(hybrid_bracket(cl_a, cl_b, z) - classical_bracket(f1, f2, z.x, z.p)));
		qm_reduce.push_back(std::abs(hybrid_bracket(qm_a, qm_b, z) - qm_bracket(g1, g2, z.q)));
		commutator_eq.push_back(std::abs(qm_bracket(g1, g2, z.q) - expectation(g1g2, reconstruct_state(z.q))));
	}

	const auto leibniz = bracket_axiom_check(qm_a, hyb, qm_b, zs);
	const auto jacobi = bracket_axiom_check(qm_a, qm_b, hyb, zs);

	BenchmarkReport report;
	report.name = "brackets";
	report.metrics.push_back(summarise("antisymmetry", antisym, 1e-12));
	report.metrics.push_back(summarise("bilinearity", bilinear, 1e-12));
	report.metrics.push_back(summarise("cross_sector_bracket", cross, 0.0));
	report.metrics.push_back(summarise("classical_reduction", cl_reduce, 1e-12));
	report.metrics.push_back(summarise("quantum_reduction", qm_reduce, 1e-12));
	report.metrics.push_back(summarise("commutator_equivalence", commutator_eq, 1e-12));
	report.metrics.push_back(scalar("leibniz", leibniz.leibniz, 1e-8));
	report.metrics.push_back(scalar("jacobi", jacobi.jacobi, 1e-5));
	report.parameters = {{"seed", std::to_string(config.seed)},
	                     {"N", std::to_string(N)},
	                     {"n", std::to_string(n)},
	                     {"points", std::to_string(config.points)}};
	return report;
}

// ---------------------------------------------------------------------------
// Serialisation

std::string format_double(double value)
{
	char buf[32];
	const auto res = std::to_chars(buf, buf + sizeof(buf), value);
	return std::string(buf, res.ptr);
}

std::string series_to_csv(const SeriesTable& table)
{
	std::string out;
	for (std::size_t c = 0; c < table.columns.size(); ++c) {
		out += (c == 0 ? "" : ",") + table.columns[c];
	}
	out += '\n';
	for (const auto& row : table.rows) {
		for (std::size_t c = 0; c < row.size(); ++c) {
			if (c != 0) {
				out += ',';
			}
			out += format_double(row[c]);
		}
		out += '\n';
	}
	return out;
}

std::string report_to_json(const BenchmarkReport& report)
{
	nlohmann::ordered_json metrics = nlohmann::ordered_json::array();
	for (const auto& m : report.metrics) {
		nlohmann::ordered_json j = {{"name", m.name}, {"max", m.max}, {"rms", m.rms}};
		j["tolerance"] = m.tolerance ? nlohmann::ordered_json(*m.tolerance) : nlohmann::ordered_json(nullptr);
		j["pass"] = m.pass();
		metrics.push_back(std::move(j));
	}
	nlohmann::ordered_json doc = {
	    {"name", report.name},
	    {"applicable", report.applicable},
	    {"pass", report.pass()},
	    {"metrics", std::move(metrics)},
	    {"warnings", report.warnings},
	    {"notes", report.notes},
	    {"parameters", report.parameters},
	};
	return doc.dump(2) + "\n";
}

} // namespace hybridflow
