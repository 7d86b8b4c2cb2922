#include "hybridflow/liouville_ensemble.hpp"

#include "hybridflow/errors.hpp"
#include "hybridflow/random.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

namespace hybridflow {

namespace {

constexpr std::size_t pairwise_block = 32;

// Pairwise reduction over [begin, end): leaves of up to `pairwise_block`
// members are accumulated sequentially, then halves are merged.
template <typename Acc, typename Zero, typename Add>
Acc pairwise_accumulate(std::size_t begin, std::size_t end, const Zero& zero, const Add& add)
{
	if (end - begin <= pairwise_block) {
		Acc acc = zero();
		for (std::size_t m = begin; m < end; ++m) {
			add(m, acc);
		}
		return acc;
	}
	const std::size_t mid = begin + (end - begin) / 2;
	Acc left = pairwise_accumulate<Acc>(begin, mid, zero, add);
	const Acc right = pairwise_accumulate<Acc>(mid, end, zero, add);
	left += right;
	return left;
}

// Lower-triangular L with LLᵀ = cov; tolerates exactly singular directions.
std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& cov)
{
	const std::size_t d = cov.size();
	double scale = 0.0;
	for (const auto& row : cov) {
		for (double v : row) {
			scale = std::max(scale, std::abs(v));
		}
	}
	const double tol = 1e-12 * std::max(scale, 1e-300);
	std::vector<std::vector<double>> l(d, std::vector<double>(d, 0.0));
	for (std::size_t j = 0; j < d; ++j) {
		double diag = cov[j][j];
		for (std::size_t k = 0; k < j; ++k) {
			diag -= l[j][k] * l[j][k];
		}
		if (diag < -tol) {
			throw ValidationError("classical density: covariance is not positive semi-definite");
		}
		if (diag <= tol) {
			// Degenerate direction: the remaining column must vanish as well.
			for (std::size_t i = j + 1; i < d; ++i) {
				double off = cov[i][j];
				for (std::size_t k = 0; k < j; ++k) {
					off -= l[i][k] * l[j][k];
				}
				if (std::abs(off) > 1e-9 * std::max(scale, 1e-300)) {
					throw ValidationError("classical density: covariance is not positive semi-definite");
				}
			}
			continue;
		}
		l[j][j] = std::sqrt(diag);
		for (std::size_t i = j + 1; i < d; ++i) {
			double off = cov[i][j];
			for (std::size_t k = 0; k < j; ++k) {
				off -= l[i][k] * l[j][k];
			}
			l[i][j] = off / l[j][j];
		}
	}
	return l;
}

double dot(std::span<const double> a, std::span<const double> b)
{
	double s = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		s += a[i] * b[i];
	}
	return s;
}

} // namespace

double pairwise_sum(std::span<const double> values)
{
	if (values.empty()) {
		return 0.0;
	}
	return pairwise_accumulate<double>(
	    0, values.size(), [] { return 0.0; }, [&](std::size_t m, double& acc) { acc += values[m]; });
}

double Ensemble::weight_sum() const
{
	std::vector<double> w(members.size());
	for (std::size_t m = 0; m < members.size(); ++m) {
		w[m] = members[m].weight;
	}
	return pairwise_sum(w);
}

std::vector<QmCoords> sample_sphere_uniform(std::size_t dim, std::size_t count, std::uint64_t seed)
{
	if (count == 0 || dim == 0) {
		throw ValidationError("sample_sphere_uniform: dimension and count must be positive");
	}
	Rng rng(seed);
	std::vector<QmCoords> out;
	out.reserve(count);
	while (out.size() < count) {
		QmCoords q(dim);
		double r2 = 0.0;
		for (std::size_t i = 0; i < dim; ++i) {
			q.X[i] = rng.normal();
			q.P[i] = rng.normal();
			r2 += q.X[i] * q.X[i] + q.P[i] * q.P[i];
		}
		if (r2 == 0.0) {
			continue;
		}
		const double s = std::numbers::sqrt2 / std::sqrt(r2);
		for (std::size_t i = 0; i < dim; ++i) {
			q.X[i] *= s;
			q.P[i] *= s;
		}
		out.push_back(std::move(q));
	}
	return out;
}

// ---------------------------------------------------------------------------
// Density specification

WeightFunction WeightFunction::constant(double value)
{
	WeightFunction w;
	w.kind_ = Kind::constant;
	w.value_ = value;
	return w;
}

WeightFunction WeightFunction::logistic(std::vector<double> x_slope, std::vector<double> p_slope, double offset, bool complement)
{
	detail::require_same_dim(x_slope.size(), p_slope.size(), "logistic weight");
	WeightFunction w;
	w.kind_ = Kind::logistic;
	w.x_slope_ = std::move(x_slope);
	w.p_slope_ = std::move(p_slope);
	w.offset_ = offset;
	w.complement_ = complement;
	return w;
}

double WeightFunction::operator()(std::span<const double> x, std::span<const double> p) const
{
	if (kind_ == Kind::constant) {
		return value_;
	}
	detail::require_same_dim(x.size(), x_slope_.size(), "logistic weight");
	const double s = dot(x_slope_, x) + dot(p_slope_, p) + offset_;
	// σ(−s) = 1 − σ(s), evaluated without cancellation.
	const double arg = complement_ ? -s : s;
	return 1.0 / (1.0 + std::exp(-arg));
}

void HybridDensitySpec::validate() const
{
	const std::size_t d = classical.mean.size();
	if (d % 2 != 0) {
		throw ValidationError("density spec: classical mean must list x then p (even length)");
	}
	if (classical.covariance.size() != d) {
		throw ValidationError("density spec: covariance must be " + std::to_string(d) + "x" + std::to_string(d));
	}
	for (std::size_t i = 0; i < d; ++i) {
		if (classical.covariance[i].size() != d) {
			throw ValidationError("density spec: covariance row " + std::to_string(i) + " has the wrong length");
		}
		for (std::size_t j = 0; j < d; ++j) {
			const double a = classical.covariance[i][j];
			const double b = classical.covariance[j][i];
			if (!std::isfinite(a) || std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
				throw ValidationError("density spec: covariance must be finite and symmetric");
			}
		}
		if (!std::isfinite(classical.mean[i])) {
			throw ValidationError("density spec: classical mean must be finite");
		}
	}
	cholesky(classical.covariance);

	if (components.empty()) {
		throw ValidationError("density spec: at least one quantum component is required");
	}
	const std::size_t n = d / 2;
	const std::size_t N = components.front().state.size();
	bool all_constant = true;
	double constant_total = 0.0;
	for (std::size_t j = 0; j < components.size(); ++j) {
		const auto& c = components[j];
		if (c.state.size() != N || N == 0) {
			throw DimensionError("density spec: component states must share one positive dimension");
		}
		const double norm = c.state.norm();
		if (!(norm > 0.0) || !std::isfinite(norm)) {
			throw ValidationError("density spec: component " + std::to_string(j) + " has a zero or non-finite state");
		}
		if (c.weight.is_constant()) {
			const double v = c.weight.constant_value();
			if (!(v >= 0.0 && v <= 1.0)) {
				throw ValidationError("density spec: constant weight of component " + std::to_string(j) + " lies outside [0, 1]");
			}
			constant_total += v;
		} else {
			all_constant = false;
			if (c.weight.x_slope().size() != n) {
				throw DimensionError("density spec: logistic weight slopes must match the classical dimension");
			}
		}
	}
	// Logistic weights are strictly positive, so Σ_k w_k > 0 fails only for all-zero constants.
	if (all_constant && !(constant_total > 0.0)) {
		throw ValidationError("density spec: component weights sum to zero; the density is not normalisable");
	}
}

Ensemble sample_ensemble(const HybridDensitySpec& spec, std::size_t count, std::uint64_t seed)
{
	spec.validate();
	if (count == 0) {
		throw ValidationError("sample_ensemble: count must be positive");
	}
	const std::size_t n = spec.classical_dim();
	const auto l = cholesky(spec.classical.covariance);
	std::vector<QmCoords> coords;
	for (const auto& c : spec.components) {
		coords.push_back(expand_state(c.state.normalized_copy()));
	}

	Rng rng(seed);
	Ensemble e;
	e.meta.seed = seed;
	e.meta.sampler = "gaussian+component-mixture/xoshiro256**";
	e.members.reserve(count);
	std::vector<double> g(2 * n);
	std::vector<double> w(spec.components.size());
	for (std::size_t m = 0; m < count; ++m) {
		for (auto& v : g) {
			v = rng.normal();
		}
		HybridPhasePoint z;
		z.x.resize(n);
		z.p.resize(n);
		for (std::size_t i = 0; i < 2 * n; ++i) {
			double v = spec.classical.mean[i];
			for (std::size_t k = 0; k <= i; ++k) {
				v += l[i][k] * g[k];
			}
			(i < n ? z.x[i] : z.p[i - n]) = v;
		}
		double total = 0.0;
		for (std::size_t j = 0; j < w.size(); ++j) {
			w[j] = spec.components[j].weight(z.x, z.p);
			total += w[j];
		}
		if (!(total > 0.0)) {
			throw NumericalError("sample_ensemble: component weights vanish at a sampled classical point");
		}
		const double u = rng.uniform() * total;
		std::size_t chosen = w.size() - 1;
		double acc = 0.0;
		for (std::size_t j = 0; j < w.size(); ++j) {
			acc += w[j];
			if (u < acc) {
				chosen = j;
				break;
			}
		}
		z.q = coords[chosen];
		e.members.push_back({std::move(z), 1.0 / static_cast<double>(count)});
	}
	return e;
}

Ensemble evolve_ensemble(const HybridHamiltonian& h, const Ensemble& e, double t_final, const IntegratorConfig& cfg,
                         const EvolveOptions& options)
{
	cfg.validate();
	Ensemble out = e;
	out.meta.time = e.meta.time + t_final;
	const std::size_t count = e.members.size();
	if (count == 0) {
		return out;
	}
	std::size_t threads = options.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : options.threads;
	threads = std::min(threads, count);

	IntegrateOptions opts;
	opts.record_every = std::numeric_limits<std::size_t>::max();

	std::vector<std::exception_ptr> errors(count);
	auto worker = [&](std::size_t begin, std::size_t end) {
		for (std::size_t m = begin; m < end; ++m) {
			try {
				auto traj = integrate(h, e.members[m].z, t_final, cfg, {}, opts);
				out.members[m].z = std::move(traj.points.back());
			} catch (...) {
				errors[m] = std::current_exception();
			}
		}
	};
	if (threads <= 1) {
		worker(0, count);
	} else {
		std::vector<std::jthread> pool;
		const std::size_t chunk = (count + threads - 1) / threads;
		for (std::size_t begin = 0; begin < count; begin += chunk) {
			pool.emplace_back(worker, begin, std::min(count, begin + chunk));
		}
	}
	for (std::size_t m = 0; m < count; ++m) {
		if (errors[m]) {
			try {
				std::rethrow_exception(errors[m]);
			} catch (const std::exception& ex) {
				throw NumericalError("evolve_ensemble: member " + std::to_string(m) + ": " + ex.what());
			}
		}
	}
	return out;
}

// ---------------------------------------------------------------------------
// Estimators

namespace {

struct MatrixAcc {
	ComplexMatrix m;
	MatrixAcc& operator+=(const MatrixAcc& o)
	{
		m += o.m;
		return *this;
	}
};

struct Projector {
	std::vector<Complex> psi;
	double inv_norm2 = 0.0;

	Complex operator()(std::size_t i, std::size_t j) const { return psi[i] * std::conj(psi[j]) * inv_norm2; }
};

Projector projector_of(const QmCoords& q)
{
	Projector p;
	p.psi.resize(q.size());
	double n2 = 0.0;
	for (std::size_t i = 0; i < q.size(); ++i) {
		p.psi[i] = Complex(q.X[i] / std::numbers::sqrt2, q.P[i] / std::numbers::sqrt2);
		n2 += std::norm(p.psi[i]);
	}
	if (!(n2 > 0.0)) {
		throw NumericalError("reconstruct_qm_density: member with vanishing quantum amplitudes");
	}
	p.inv_norm2 = 1.0 / n2;
	return p;
}

Estimate weighted_estimate(std::span<const double> weights, std::span<const double> values)
{
	const std::size_t count = values.size();
	std::vector<double> wa(count);
	for (std::size_t m = 0; m < count; ++m) {
		wa[m] = weights[m] * values[m];
	}
	const double s_wa = pairwise_sum(wa);
	const double s_w = pairwise_sum(weights);
	Estimate est{s_wa, 0.0};
	if (count < 2) {
		return est;
	}
	// Jackknife over leave-one-out self-normalised means.
	std::vector<double> loo(count);
	for (std::size_t m = 0; m < count; ++m) {
		const double rest = s_w - weights[m];
		loo[m] = rest > 0.0 ? (s_wa - wa[m]) / rest : s_wa / s_w;
	}
	const double mean = pairwise_sum(loo) / static_cast<double>(count);
	std::vector<double> dev(count);
	for (std::size_t m = 0; m < count; ++m) {
		dev[m] = (loo[m] - mean) * (loo[m] - mean);
	}
	const double factor = static_cast<double>(count - 1) / static_cast<double>(count);
	est.standard_error = std::sqrt(factor * pairwise_sum(dev));
	return est;
}

} // namespace

DensityEstimate reconstruct_qm_density(const Ensemble& e, const ClassicalWindow& window)
{
	std::vector<std::size_t> selected;
	for (std::size_t m = 0; m < e.members.size(); ++m) {
		const auto& z = e.members[m].z;
		if (!window || window(z.x, z.p)) {
			selected.push_back(m);
		}
	}
	if (selected.empty()) {
		throw ValidationError("reconstruct_qm_density: no ensemble member falls inside the classical window");
	}
	const std::size_t N = e.members[selected.front()].z.q.size();
	std::vector<Projector> proj;
	std::vector<double> w;
	proj.reserve(selected.size());
	for (std::size_t m : selected) {
		detail::require_same_dim(e.members[m].z.q.size(), N, "reconstruct_qm_density");
		proj.push_back(projector_of(e.members[m].z.q));
		w.push_back(e.members[m].weight);
	}
	const double total = pairwise_sum(w);
	if (!(total > 0.0)) {
		throw ValidationError("reconstruct_qm_density: members inside the window carry zero weight");
	}

	auto zero = [N] { return MatrixAcc{ComplexMatrix(N, N)}; };
	// Upper triangle only; the lower one is mirrored so the result is exactly Hermitian.
	const auto sum = pairwise_accumulate<MatrixAcc>(0, proj.size(), zero, [&](std::size_t k, MatrixAcc& acc) {
		for (std::size_t i = 0; i < N; ++i) {
			for (std::size_t j = i; j < N; ++j) {
				acc.m(i, j) += w[k] * proj[k](i, j);
			}
		}
	});

	DensityEstimate out;
	out.members = selected.size();
	out.weight = total;
	out.rho = ComplexMatrix(N, N);
	for (std::size_t i = 0; i < N; ++i) {
		out.rho(i, i) = sum.m(i, i).real() / total;
		for (std::size_t j = i + 1; j < N; ++j) {
			out.rho(i, j) = sum.m(i, j) / total;
			out.rho(j, i) = std::conj(out.rho(i, j));
		}
	}

	// Delta-method standard error of the self-normalised mean, per real/imag part.
	const auto var = pairwise_accumulate<MatrixAcc>(0, proj.size(), zero, [&](std::size_t k, MatrixAcc& acc) {
		for (std::size_t i = 0; i < N; ++i) {
			for (std::size_t j = i; j < N; ++j) {
				const Complex d = proj[k](i, j) - out.rho(i, j);
				acc.m(i, j) += Complex(w[k] * w[k] * d.real() * d.real(), w[k] * w[k] * d.imag() * d.imag());
			}
		}
	});
	out.standard_error = ComplexMatrix(N, N);
	for (std::size_t i = 0; i < N; ++i) {
		for (std::size_t j = i; j < N; ++j) {
			const Complex se(std::sqrt(var.m(i, j).real()) / total, std::sqrt(var.m(i, j).imag()) / total);
			out.standard_error(i, j) = se;
			out.standard_error(j, i) = se;
		}
	}
	return out;
}

Estimate ensemble_expectation(const Ensemble& e, const std::function<double(const HybridPhasePoint&)>& f)
{
	if (e.members.empty()) {
		throw ValidationError("ensemble_expectation: empty ensemble");
	}
	std::vector<double> w(e.members.size());
	std::vector<double> v(e.members.size());
	for (std::size_t m = 0; m < e.members.size(); ++m) {
		w[m] = e.members[m].weight;
		v[m] = f(e.members[m].z);
	}
	return weighted_estimate(w, v);
}

Estimate ensemble_expectation(const Ensemble& e, const HybridObservable& a)
{
	return ensemble_expectation(e, [&a](const HybridPhasePoint& z) { return evaluate(a, z); });
}

// ---------------------------------------------------------------------------
// JSON snapshots

std::string ensemble_to_json(const Ensemble& e)
{
	nlohmann::ordered_json members = nlohmann::ordered_json::array();
	for (const auto& m : e.members) {
		members.push_back({{"x", m.z.x}, {"p", m.z.p}, {"X", m.z.q.X}, {"P", m.z.q.P}, {"w", m.weight}});
	}
	nlohmann::ordered_json doc = {
	    {"meta", {{"seed", e.meta.seed}, {"sampler", e.meta.sampler}, {"time", e.meta.time}}},
	    {"members", std::move(members)},
	};
	return doc.dump(1);
}

Ensemble ensemble_from_json(std::string_view text)
{
	nlohmann::json doc;
	try {
		doc = nlohmann::json::parse(text.begin(), text.end());
	} catch (const nlohmann::json::parse_error& ex) {
		throw ParseError(std::string("ensemble snapshot: ") + ex.what(), ex.byte);
	}
	auto fail = [](const std::string& what) -> ParseError { return ParseError("ensemble snapshot: " + what, 0); };
	try {
		Ensemble e;
		const auto& meta = doc.at("meta");
		e.meta.seed = meta.at("seed").get<std::uint64_t>();
		e.meta.sampler = meta.at("sampler").get<std::string>();
		e.meta.time = meta.at("time").get<double>();
		for (const auto& m : doc.at("members")) {
			EnsembleMember member;
			member.z.x = m.at("x").get<std::vector<double>>();
			member.z.p = m.at("p").get<std::vector<double>>();
			member.z.q.X = m.at("X").get<std::vector<double>>();
			member.z.q.P = m.at("P").get<std::vector<double>>();
			member.weight = m.at("w").get<double>();
			if (member.z.x.size() != member.z.p.size() || member.z.q.X.size() != member.z.q.P.size()) {
				throw fail("member " + std::to_string(e.members.size()) + " has mismatched coordinate lengths");
			}
			if (!(member.weight >= 0.0)) {
				throw fail("member " + std::to_string(e.members.size()) + " has a negative weight");
			}
			e.members.push_back(std::move(member));
		}
		return e;
	} catch (const nlohmann::json::exception& ex) {
		throw fail(ex.what());
	}
}

} // namespace hybridflow
