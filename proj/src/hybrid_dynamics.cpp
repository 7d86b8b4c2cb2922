#include "hybridflow/hybrid_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hybridflow {

HybridHamiltonian::HybridHamiltonian(HybridObservable classical, HybridObservable quantum, HybridObservable interaction)
	: classical_(std::move(classical)), quantum_(std::move(quantum)), interaction_(std::move(interaction))
{
	if (classical_.sector() != SectorTag::classical) {
		throw ValidationError("HybridHamiltonian: the classical part must belong to the CL sector");
	}
	const bool quantum_ok = quantum_.sector() == SectorTag::quantum ||
	                        (quantum_.qm_terms().empty() && quantum_.classical_part().is_constant());
	if (!quantum_ok) {
		throw ValidationError("HybridHamiltonian: the quantum part must belong to the QM sector");
	}
	if (quantum_.qm_dim() != 0 && interaction_.qm_dim() != 0) {
		detail::require_same_dim(quantum_.qm_dim(), interaction_.qm_dim(), "HybridHamiltonian");
	}
}

bool HybridHamiltonian::has_interaction() const
{
	return !interaction_.classical_part().is_zero() || !interaction_.qm_terms().empty();
}

double HybridHamiltonian::energy(const HybridPhasePoint& z) const
{
	return evaluate(classical_, z) + evaluate(quantum_, z) + evaluate(interaction_, z);
}

HybridGradient HybridHamiltonian::gradient(const HybridPhasePoint& z) const
{
	auto g = HybridGradient::zeros(z.x.size(), z.q.size());
	accumulate_gradient(classical_, z, 1.0, g);
	accumulate_gradient(quantum_, z, 1.0, g);
	accumulate_gradient(interaction_, z, 1.0, g);
	return g;
}

std::string_view to_string(IntegratorMethod method)
{
	switch (method) {
	case IntegratorMethod::implicit_midpoint:
		return "implicit_midpoint";
	case IntegratorMethod::rk4:
		return "rk4";
	}
	return "?";
}

IntegratorMethod parse_integrator_method(std::string_view name)
{
	if (name == "implicit_midpoint" || name == "midpoint") {
		return IntegratorMethod::implicit_midpoint;
	}
	if (name == "rk4") {
		return IntegratorMethod::rk4;
	}
	throw ValidationError("unknown integrator method '" + std::string(name) + "' (expected implicit_midpoint or rk4)");
}

void IntegratorConfig::validate() const
{
	if (!(dt > 0.0) || !std::isfinite(dt)) {
		throw ValidationError("integrator: dt must be positive and finite");
	}
	if (!(fp_tol > 0.0)) {
		throw ValidationError("integrator: fp_tol must be positive");
	}
	if (fp_max_iter == 0) {
		throw ValidationError("integrator: fp_max_iter must be at least 1");
	}
}

PhaseVelocity equations_of_motion(const HybridHamiltonian& h, const HybridPhasePoint& z)
{
	const auto g = h.gradient(z);
	PhaseVelocity v{g.dp, g.dx, g.dP, g.dX};
	for (auto& d : v.dp) {
		d = -d;
	}
	for (auto& d : v.dP) {
		d = -d;
	}
	auto check = [](const std::vector<double>& values, const char* name) {
		for (std::size_t k = 0; k < values.size(); ++k) {
			if (!std::isfinite(values[k])) {
				std::ostringstream msg;
				msg << "equations_of_motion: non-finite rate for " << name << "[" << k << "]";
				throw NumericalError(msg.str());
			}
		}
	};
	check(v.dx, "x");
	check(v.dp, "p");
	check(v.dX, "X");
	check(v.dP, "P");
	return v;
}

namespace {

// Flat layout [x, p, X, P].
std::vector<double> flatten(const HybridPhasePoint& z)
{
	std::vector<double> out;
	out.reserve(2 * (z.x.size() + z.q.size()));
	out.insert(out.end(), z.x.begin(), z.x.end());
	out.insert(out.end(), z.p.begin(), z.p.end());
	out.insert(out.end(), z.q.X.begin(), z.q.X.end());
	out.insert(out.end(), z.q.P.begin(), z.q.P.end());
	return out;
}

void unflatten(const std::vector<double>& flat, HybridPhasePoint& z)
{
	const std::size_t n = z.x.size();
	const std::size_t N = z.q.size();
	auto it = flat.begin();
	std::copy(it, it + n, z.x.begin());
	std::copy(it + n, it + 2 * n, z.p.begin());
	std::copy(it + 2 * n, it + 2 * n + N, z.q.X.begin());
	std::copy(it + 2 * n + N, it + 2 * n + 2 * N, z.q.P.begin());
}

std::vector<double> flatten(const PhaseVelocity& v)
{
	std::vector<double> out;
	out.reserve(2 * (v.dx.size() + v.dX.size()));
	out.insert(out.end(), v.dx.begin(), v.dx.end());
	out.insert(out.end(), v.dp.begin(), v.dp.end());
	out.insert(out.end(), v.dX.begin(), v.dX.end());
	out.insert(out.end(), v.dP.begin(), v.dP.end());
	return out;
}

class FlatSystem {
public:
	FlatSystem(const HybridHamiltonian& h, const HybridPhasePoint& shape)
		: h_(h), work_(shape)
	{
	}

	std::vector<double> rate(const std::vector<double>& flat)
	{
		unflatten(flat, work_);
		return flatten(equations_of_motion(h_, work_));
	}

private:
	const HybridHamiltonian& h_;
	HybridPhasePoint work_;
};

struct Block {
	std::size_t begin;
	std::size_t end;
};

std::vector<double> rk4_step(FlatSystem& sys, const std::vector<double>& y, double dt)
{
	const std::size_t m = y.size();
	auto axpy = [m](const std::vector<double>& base, const std::vector<double>& k, double a) {
		std::vector<double> out(m);
		for (std::size_t i = 0; i < m; ++i) {
			out[i] = base[i] + a * k[i];
		}
		return out;
	};
	const auto k1 = sys.rate(y);
	const auto k2 = sys.rate(axpy(y, k1, 0.5 * dt));
	const auto k3 = sys.rate(axpy(y, k2, 0.5 * dt));
	const auto k4 = sys.rate(axpy(y, k3, dt));
	std::vector<double> out(m);
	for (std::size_t i = 0; i < m; ++i) {
		out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
	}
	return out;
}

// Solves y' = y + dt·F((y + y')/2) by fixed-point iteration. Each block
// converges independently; with decoupled sectors this makes one sector's
// result independent of how many sweeps the other needed.
std::vector<double> midpoint_step(FlatSystem& sys, const std::vector<double>& y, double dt, const IntegratorConfig& cfg,
                                  const std::vector<Block>& blocks, StepInfo& info)
{
	const std::size_t m = y.size();
	std::vector<double> next = sys.rate(y);
	for (std::size_t i = 0; i < m; ++i) {
		next[i] = y[i] + dt * next[i];
	}
	std::vector<bool> active(blocks.size(), true);
	std::vector<double> mid(m);
	double residual = 0.0;
	for (std::size_t iter = 1; iter <= cfg.fp_max_iter; ++iter) {
		for (std::size_t i = 0; i < m; ++i) {
			mid[i] = 0.5 * (y[i] + next[i]);
		}
		const auto f = sys.rate(mid);
		bool any_active = false;
		residual = 0.0;
		for (std::size_t b = 0; b < blocks.size(); ++b) {
			if (!active[b]) {
				continue;
			}
			double increment = 0.0;
			double scale = 1.0;
			for (std::size_t i = blocks[b].begin; i < blocks[b].end; ++i) {
				const double updated = y[i] + dt * f[i];
				increment = std::max(increment, std::abs(updated - next[i]));
				scale = std::max(scale, std::abs(updated));
				next[i] = updated;
			}
			residual = std::max(residual, increment / scale);
			if (increment <= cfg.fp_tol * scale) {
				active[b] = false;
			} else {
				any_active = true;
			}
		}
		info.iterations = iter;
		if (!any_active) {
			info.residual = residual;
			return next;
		}
	}
	info.residual = residual;
	std::ostringstream msg;
	msg << "implicit midpoint: fixed-point iteration did not converge in " << cfg.fp_max_iter
	    << " iterations (relative residual " << residual << ")";
	throw NumericalError(msg.str());
}

std::vector<Block> blocks_for(const HybridHamiltonian& h, const HybridPhasePoint& z)
{
	const std::size_t cl = 2 * z.x.size();
	const std::size_t total = cl + 2 * z.q.size();
	if (h.interaction().sector() == SectorTag::hybrid) {
		return {{0, total}};
	}
	std::vector<Block> blocks;
	if (cl > 0) {
		blocks.push_back({0, cl});
	}
	if (total > cl) {
		blocks.push_back({cl, total});
	}
	return blocks;
}

} // namespace

HybridPhasePoint step_by(const HybridHamiltonian& h, const HybridPhasePoint& z, const IntegratorConfig& cfg, double dt,
                         StepInfo* info)
{
	detail::require_same_dim(z.x.size(), z.p.size(), "step");
	detail::require_same_dim(z.q.X.size(), z.q.P.size(), "step");
	FlatSystem sys(h, z);
	const auto y = flatten(z);
	StepInfo local;
	std::vector<double> next;
	switch (cfg.method) {
	case IntegratorMethod::implicit_midpoint:
		next = midpoint_step(sys, y, dt, cfg, blocks_for(h, z), local);
		break;
	case IntegratorMethod::rk4:
		next = rk4_step(sys, y, dt);
		local.iterations = 4;
		break;
	}
	if (info != nullptr) {
		*info = local;
	}
	HybridPhasePoint out = z;
	unflatten(next, out);
	return out;
}

HybridPhasePoint step(const HybridHamiltonian& h, const HybridPhasePoint& z, const IntegratorConfig& cfg, StepInfo* info)
{
	cfg.validate();
	return step_by(h, z, cfg, cfg.dt, info);
}

Trajectory integrate(const HybridHamiltonian& h, const HybridPhasePoint& z0, double t_final, const IntegratorConfig& cfg,
                     std::span<const HybridObservable> observables, const IntegrateOptions& options)
{
	cfg.validate();
	if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
		throw ValidationError("integrate: t_final must be finite and non-negative");
	}
	if (options.record_every == 0) {
		throw ValidationError("integrate: record_every must be at least 1");
	}
	if (options.require_on_sphere && !on_sphere(z0.q, 1e-10)) {
		std::ostringstream msg;
		msg << "integrate: initial quantum coordinates are off the sphere, |C - 1| = "
		    << std::abs(normalization_constraint(z0.q) - 1.0);
		throw ValidationError(msg.str());
	}

	Trajectory traj;
	traj.observables.resize(observables.size());
	traj.initial_energy = h.energy(z0);
	const double energy_scale = traj.initial_energy != 0.0 ? std::abs(traj.initial_energy) : 1.0;

	auto record = [&](double t, const HybridPhasePoint& z, double energy, double constraint, std::size_t iterations) {
		traj.times.push_back(t);
		traj.points.push_back(z);
		traj.energy.push_back(energy);
		traj.constraint.push_back(constraint);
		traj.fp_iterations.push_back(iterations);
		for (std::size_t j = 0; j < observables.size(); ++j) {
			traj.observables[j].push_back(evaluate(observables[j], z));
		}
	};
	const double c0 = normalization_constraint(z0.q);
	traj.max_constraint_drift = z0.q.size() > 0 ? std::abs(c0 - 1.0) : 0.0;
	record(0.0, z0, traj.initial_energy, c0, 0);

	// Number of fixed steps; the last one is shortened to land on t_final.
	const auto n_steps = static_cast<std::size_t>(std::ceil(t_final / cfg.dt - 1e-9));
	HybridPhasePoint z = z0;
	for (std::size_t k = 1; k <= n_steps; ++k) {
		const double t_prev = static_cast<double>(k - 1) * cfg.dt;
		const double t = k == n_steps ? t_final : static_cast<double>(k) * cfg.dt;
		StepInfo info;
		try {
			z = step_by(h, z, cfg, t - t_prev, &info);
		} catch (const NumericalError& e) {
			std::ostringstream msg;
			msg << "integrate: step " << k << " (t = " << t_prev << ") failed: " << e.what();
			throw IntegrationError(msg.str(), std::move(traj));
		}
		++traj.steps;
		const double energy = h.energy(z);
		const double constraint = normalization_constraint(z.q);
		traj.max_relative_energy_drift = std::max(traj.max_relative_energy_drift, std::abs(energy - traj.initial_energy) / energy_scale);
		if (z.q.size() > 0) {
			traj.max_constraint_drift = std::max(traj.max_constraint_drift, std::abs(constraint - 1.0));
		}
		if (k % options.record_every == 0 || k == n_steps) {
			record(t, z, energy, constraint, info.iterations);
		}
	}
	return traj;
}

} // namespace hybridflow
