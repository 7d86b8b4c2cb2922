#include "hybridflow/bracket_engine.hpp"

#include "hybridflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hybridflow {

namespace {

double ipow(double base, unsigned exponent)
{
	double r = 1.0;
	for (unsigned i = 0; i < exponent; ++i) {
		r *= base;
	}
	return r;
}

void check_classical(PhaseFunction::Coords x, PhaseFunction::Coords p)
{
	detail::require_same_dim(x.size(), p.size(), "classical coordinates");
}

void check_point(const HybridObservable& a, const HybridPhasePoint& z)
{
	check_classical(z.x, z.p);
	detail::require_same_dim(z.q.X.size(), z.q.P.size(), "quantum coordinates");
	if (a.qm_dim() != 0) {
		detail::require_same_dim(a.qm_dim(), z.q.size(), "hybrid observable");
	}
}

} // namespace

bool HybridPhasePoint::finite() const
{
	auto ok = [](const std::vector<double>& v) {
		return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
	};
	return ok(x) && ok(p) && ok(q.X) && ok(q.P);
}

HybridGradient HybridGradient::zeros(std::size_t n, std::size_t N)
{
	return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(N, 0.0),
	        std::vector<double>(N, 0.0)};
}

// ---------------------------------------------------------------------------
// PhaseFunction

PhaseFunction PhaseFunction::constant(double value)
{
	PhaseFunction f;
	if (value != 0.0) {
		f.kind_ = Kind::constant;
		f.constant_ = value;
	}
	return f;
}

PhaseFunction PhaseFunction::polynomial(std::vector<Monomial> terms)
{
	std::erase_if(terms, [](const Monomial& m) { return m.coefficient == 0.0; });
	if (terms.empty()) {
		return {};
	}
	const bool all_constant = std::all_of(terms.begin(), terms.end(), [](const Monomial& m) {
		auto zero = [](unsigned e) { return e == 0; };
		return std::all_of(m.x_powers.begin(), m.x_powers.end(), zero) && std::all_of(m.p_powers.begin(), m.p_powers.end(), zero);
	});
	if (all_constant) {
		double c = 0.0;
		for (const auto& m : terms) {
			c += m.coefficient;
		}
		return constant(c);
	}

	auto check = [](const Monomial& m, Coords x) {
		auto beyond = [&](const std::vector<unsigned>& powers) {
			for (std::size_t k = x.size(); k < powers.size(); ++k) {
				if (powers[k] != 0) {
					return true;
				}
			}
			return false;
		};
		if (beyond(m.x_powers) || beyond(m.p_powers)) {
			throw DimensionError("polynomial: monomial references a classical coordinate beyond the point's dimension");
		}
	};
	auto power = [](const std::vector<unsigned>& powers, std::size_t k) -> unsigned {
		return k < powers.size() ? powers[k] : 0U;
	};

	auto value = [terms, check, power](Coords x, Coords p) {
		double s = 0.0;
		for (const auto& m : terms) {
			check(m, x);
			double t = m.coefficient;
			for (std::size_t k = 0; k < x.size(); ++k) {
				t *= ipow(x[k], power(m.x_powers, k)) * ipow(p[k], power(m.p_powers, k));
			}
			s += t;
		}
		return s;
	};
	auto gradient = [terms, check, power](Coords x, Coords p, double scale, std::span<double> dx, std::span<double> dp) {
		const std::size_t n = x.size();
		for (const auto& m : terms) {
			check(m, x);
			// ∂/∂u of Π u^a: replace the u factor by a·u^(a−1).
			for (std::size_t target = 0; target < 2 * n; ++target) {
				const bool is_x = target < n;
				const std::size_t k = is_x ? target : target - n;
				const unsigned a = power(is_x ? m.x_powers : m.p_powers, k);
				if (a == 0) {
					continue;
				}
				double t = m.coefficient * scale * static_cast<double>(a);
				for (std::size_t j = 0; j < n; ++j) {
					const unsigned ax = power(m.x_powers, j);
					const unsigned ap = power(m.p_powers, j);
					t *= (is_x && j == k) ? ipow(x[j], ax - 1) : ipow(x[j], ax);
					t *= (!is_x && j == k) ? ipow(p[j], ap - 1) : ipow(p[j], ap);
				}
				(is_x ? dx : dp)[k] += t;
			}
		}
	};
	return custom(std::move(value), std::move(gradient));
}

PhaseFunction PhaseFunction::custom(ValueFn value, GradientFn gradient)
{
	if (!value || !gradient) {
		throw ValidationError("PhaseFunction::custom: value and gradient callables are required");
	}
	PhaseFunction f;
	f.kind_ = Kind::general;
	f.value_ = std::move(value);
	f.gradient_ = std::move(gradient);
	return f;
}

PhaseFunction PhaseFunction::position(std::size_t k, double scale)
{
	Monomial m{scale, std::vector<unsigned>(k + 1, 0), {}};
	m.x_powers[k] = 1;
	return polynomial({m});
}

PhaseFunction PhaseFunction::momentum(std::size_t k, double scale)
{
	Monomial m{scale, {}, std::vector<unsigned>(k + 1, 0)};
	m.p_powers[k] = 1;
	return polynomial({m});
}

PhaseFunction PhaseFunction::harmonic(double mass, double omega, std::size_t k)
{
	if (!(mass > 0.0)) {
		throw ValidationError("harmonic: mass must be positive");
	}
	Monomial kin{0.5 / mass, {}, std::vector<unsigned>(k + 1, 0)};
	kin.p_powers[k] = 2;
	Monomial pot{0.5 * mass * omega * omega, std::vector<unsigned>(k + 1, 0), {}};
	pot.x_powers[k] = 2;
	return polynomial({kin, pot});
}

PhaseFunction PhaseFunction::kinetic(double mass, std::size_t k)
{
	return harmonic(mass, 0.0, k);
}

double PhaseFunction::operator()(Coords x, Coords p) const
{
	switch (kind_) {
	case Kind::zero:
		return 0.0;
	case Kind::constant:
		return constant_;
	case Kind::general:
		break;
	}
	check_classical(x, p);
	return value_(x, p);
}

void PhaseFunction::accumulate_gradient(Coords x, Coords p, double scale, std::span<double> dx, std::span<double> dp) const
{
	if (kind_ != Kind::general) {
		return;
	}
	check_classical(x, p);
	detail::require_same_dim(x.size(), dx.size(), "PhaseFunction gradient");
	detail::require_same_dim(p.size(), dp.size(), "PhaseFunction gradient");
	gradient_(x, p, scale, dx, dp);
}

PhaseFunction PhaseFunction::scaled(double s) const
{
	if (kind_ != Kind::general || s == 0.0) {
		return constant(constant_ * s);
	}
	auto value = [f = *this, s](Coords x, Coords p) { return s * f(x, p); };
	auto gradient = [f = *this, s](Coords x, Coords p, double scale, std::span<double> dx, std::span<double> dp) {
		f.accumulate_gradient(x, p, s * scale, dx, dp);
	};
	return custom(std::move(value), std::move(gradient));
}

PhaseFunction operator+(const PhaseFunction& a, const PhaseFunction& b)
{
	if (a.is_zero()) {
		return b;
	}
	if (b.is_zero()) {
		return a;
	}
	if (a.is_constant() && b.is_constant()) {
		return PhaseFunction::constant(a.constant_ + b.constant_);
	}
	auto value = [a, b](PhaseFunction::Coords x, PhaseFunction::Coords p) { return a(x, p) + b(x, p); };
	auto gradient = [a, b](PhaseFunction::Coords x, PhaseFunction::Coords p, double scale, std::span<double> dx,
	                       std::span<double> dp) {
		a.accumulate_gradient(x, p, scale, dx, dp);
		b.accumulate_gradient(x, p, scale, dx, dp);
	};
	return PhaseFunction::custom(std::move(value), std::move(gradient));
}

double classical_bracket(const PhaseFunction& f, const PhaseFunction& g, PhaseFunction::Coords x, PhaseFunction::Coords p)
{
	check_classical(x, p);
	const std::size_t n = x.size();
	std::vector<double> fx(n, 0.0), fp(n, 0.0), gx(n, 0.0), gp(n, 0.0);
	f.accumulate_gradient(x, p, 1.0, fx, fp);
	g.accumulate_gradient(x, p, 1.0, gx, gp);
	double s = 0.0;
	for (std::size_t k = 0; k < n; ++k) {
		s += fx[k] * gp[k] - fp[k] * gx[k];
	}
	return s;
}

// ---------------------------------------------------------------------------
// HybridObservable

std::string_view to_string(SectorTag tag)
{
	switch (tag) {
	case SectorTag::classical:
		return "CL";
	case SectorTag::quantum:
		return "QM";
	case SectorTag::hybrid:
		return "HYBRID";
	}
	return "?";
}

HybridObservable HybridObservable::classical(PhaseFunction f)
{
	HybridObservable a;
	a.classical_ = std::move(f);
	return a;
}

HybridObservable HybridObservable::quantum(HermitianOperator m)
{
	return coupling(PhaseFunction::constant(1.0), std::move(m));
}

HybridObservable HybridObservable::coupling(PhaseFunction coefficient, HermitianOperator m)
{
	HybridObservable a;
	if (!coefficient.is_zero() && !m.is_zero()) {
		a.terms_.push_back({std::move(coefficient), std::move(m)});
	}
	return a;
}

HermitianOperator HybridObservable::qm_operator(PhaseFunction::Coords x, PhaseFunction::Coords p) const
{
	if (terms_.empty()) {
		throw DimensionError("qm_operator: observable has no quantum part");
	}
	HermitianOperator m = HermitianOperator::zero(qm_dim());
	for (const auto& t : terms_) {
		m += t.op.scaled(t.coefficient(x, p));
	}
	return m;
}

SectorTag HybridObservable::sector() const
{
	if (terms_.empty()) {
		return SectorTag::classical;
	}
	const bool constant_coefficients =
	    std::all_of(terms_.begin(), terms_.end(), [](const CouplingTerm& t) { return t.coefficient.is_constant(); });
	if (classical_.is_constant() && constant_coefficients) {
		return SectorTag::quantum;
	}
	return SectorTag::hybrid;
}

HybridObservable HybridObservable::scaled(double s) const
{
	HybridObservable out;
	out.classical_ = classical_.scaled(s);
	if (s != 0.0) {
		for (const auto& t : terms_) {
			out.terms_.push_back({t.coefficient.scaled(s), t.op});
		}
	}
	return out;
}

HybridObservable operator+(const HybridObservable& a, const HybridObservable& b)
{
	if (a.qm_dim() != 0 && b.qm_dim() != 0) {
		detail::require_same_dim(a.qm_dim(), b.qm_dim(), "observable sum");
	}
	HybridObservable out;
	out.classical_ = a.classical_ + b.classical_;
	out.terms_ = a.terms_;
	out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
	return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// Accumulates everything derived from the quantum part: value contribution,
// classical gradient via ⟨∂M⟩, and the (X, P) gradient of ⟨M⟩.
double accumulate_quantum(const HybridObservable& a, const HybridPhasePoint& z, double scale, HybridGradient* out)
{
	const auto& terms = a.qm_terms();
	if (terms.empty()) {
		return 0.0;
	}
	const std::size_t N = z.q.size();
	std::vector<Complex> c(N);
	for (std::size_t i = 0; i < N; ++i) {
		c[i] = Complex(z.q.X[i] / std::numbers::sqrt2, z.q.P[i] / std::numbers::sqrt2);
	}
	std::vector<Complex> mc(N, 0.0);
	std::vector<Complex> gc(N);
	double value = 0.0;
	for (const auto& t : terms) {
		double expect = 0.0;
		for (std::size_t i = 0; i < N; ++i) {
			Complex s = 0.0;
			for (std::size_t j = 0; j < N; ++j) {
				s += t.op(i, j) * c[j];
			}
			gc[i] = s;
			expect += c[i].real() * s.real() + c[i].imag() * s.imag();
		}
		const double coeff = t.coefficient(z.x, z.p);
		value += coeff * expect;
		if (out != nullptr) {
			t.coefficient.accumulate_gradient(z.x, z.p, scale * expect, out->dx, out->dp);
			for (std::size_t i = 0; i < N; ++i) {
				mc[i] += coeff * gc[i];
			}
		}
	}
	if (out != nullptr) {
		for (std::size_t k = 0; k < N; ++k) {
			out->dX[k] += scale * std::numbers::sqrt2 * mc[k].real();
			out->dP[k] += scale * std::numbers::sqrt2 * mc[k].imag();
		}
	}
	return value;
}

} // namespace

double evaluate(const HybridObservable& a, const HybridPhasePoint& z)
{
	check_point(a, z);
	return a.classical_part()(z.x, z.p) + accumulate_quantum(a, z, 1.0, nullptr);
}

void accumulate_gradient(const HybridObservable& a, const HybridPhasePoint& z, double scale, HybridGradient& out)
{
	check_point(a, z);
	detail::require_same_dim(out.dx.size(), z.x.size(), "gradient buffer");
	detail::require_same_dim(out.dX.size(), z.q.size(), "gradient buffer");
	a.classical_part().accumulate_gradient(z.x, z.p, scale, out.dx, out.dp);
	accumulate_quantum(a, z, scale, &out);
}

HybridGradient hybrid_gradient(const HybridObservable& a, const HybridPhasePoint& z)
{
	auto g = HybridGradient::zeros(z.x.size(), z.q.size());
	accumulate_gradient(a, z, 1.0, g);
	return g;
}

double symplectic_pairing(const HybridGradient& a, const HybridGradient& b)
{
	double cl = 0.0;
	for (std::size_t k = 0; k < a.dx.size(); ++k) {
		cl += a.dx[k] * b.dp[k] - a.dp[k] * b.dx[k];
	}
	double qm = 0.0;
	for (std::size_t i = 0; i < a.dX.size(); ++i) {
		qm += a.dX[i] * b.dP[i] - a.dP[i] * b.dX[i];
	}
	return cl + qm;
}

double hybrid_bracket(const HybridObservable& a, const HybridObservable& b, const HybridPhasePoint& z)
{
	return symplectic_pairing(hybrid_gradient(a, z), hybrid_gradient(b, z));
}

HybridPhasePoint canonical_step(const HybridObservable& g, const HybridPhasePoint& z, double dalpha)
{
	const auto grad = hybrid_gradient(g, z);
	HybridPhasePoint out = z;
	for (std::size_t k = 0; k < z.x.size(); ++k) {
		out.x[k] += grad.dp[k] * dalpha;
		out.p[k] -= grad.dx[k] * dalpha;
	}
	for (std::size_t i = 0; i < z.q.size(); ++i) {
		out.q.X[i] += grad.dP[i] * dalpha;
		out.q.P[i] -= grad.dX[i] * dalpha;
	}
	return out;
}

HybridGradient numeric_gradient(const std::function<double(const HybridPhasePoint&)>& f, const HybridPhasePoint& z, double step)
{
	auto g = HybridGradient::zeros(z.x.size(), z.q.size());
	HybridPhasePoint w = z;
	auto central = [&](double& coord) {
		const double saved = coord;
		coord = saved + step;
		const double up = f(w);
		coord = saved - step;
		const double down = f(w);
		coord = saved;
		return (up - down) / (2.0 * step);
	};
	for (std::size_t k = 0; k < z.x.size(); ++k) {
		g.dx[k] = central(w.x[k]);
		g.dp[k] = central(w.p[k]);
	}
	for (std::size_t i = 0; i < z.q.size(); ++i) {
		g.dX[i] = central(w.q.X[i]);
		g.dP[i] = central(w.q.P[i]);
	}
	return g;
}

AxiomReport bracket_axiom_check(const HybridObservable& a, const HybridObservable& b, const HybridObservable& c,
                                std::span<const HybridPhasePoint> zs, const AxiomCheckOptions& options)
{
	AxiomReport report;
	auto bracket_fn = [](const HybridObservable& u, const HybridObservable& v) {
		return [&u, &v](const HybridPhasePoint& w) { return hybrid_bracket(u, v, w); };
	};
	const auto bc = bracket_fn(b, c);
	const auto ca = bracket_fn(c, a);
	const auto ab = bracket_fn(a, b);

	for (const auto& z : zs) {
		const auto ga = hybrid_gradient(a, z);
		const auto gb = hybrid_gradient(b, z);
		const auto gc = hybrid_gradient(c, z);

		const double a_b = symplectic_pairing(ga, gb);
		const double b_a = symplectic_pairing(gb, ga);
		report.antisymmetry = std::max(report.antisymmetry, std::abs(a_b + b_a));

		const auto product = [&](const HybridPhasePoint& w) { return evaluate(b, w) * evaluate(c, w); };
		const double a_bc = symplectic_pairing(ga, numeric_gradient(product, z, options.leibniz_step));
		const double leibniz = a_bc - evaluate(b, z) * symplectic_pairing(ga, gc) - a_b * evaluate(c, z);
		report.leibniz = std::max(report.leibniz, std::abs(leibniz));

		const double h = options.jacobi_step;
		const double jacobi = symplectic_pairing(ga, numeric_gradient(bc, z, h)) +
		                      symplectic_pairing(gb, numeric_gradient(ca, z, h)) +
		                      symplectic_pairing(gc, numeric_gradient(ab, z, h));
		report.jacobi = std::max(report.jacobi, std::abs(jacobi));
		++report.points;
	}
	return report;
}

} // namespace hybridflow
