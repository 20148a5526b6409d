#include "epiassim/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "epiassim/errors.hpp"

namespace epiassim {

void ModelParams::validate() const
{
    auto fail = [](const char* what) { throw DomainError(std::string("model params: ") + what); };
    if (!(n_pop > 0)) fail("n_pop must be > 0");
    if (!(b0 > 0)) fail("b0 must be > 0");
    if (!(b1 >= 0 && b1 < 1)) fail("b1 must lie in [0, 1)");
    if (!(lambda > 0)) fail("lambda must be > 0");
    if (!(m >= 0)) fail("m must be >= 0");
    if (!(rho > 0 && rho <= 1)) fail("rho must lie in (0, 1]");
}

double transmission_rate(double t, double b0, double b1)
{
    return b0 * (1.0 + b1 * std::cos(2.0 * std::numbers::pi * t));
}

double beta_at(const BetaSource& source, double t)
{
    if (const auto* seasonal = std::get_if<SeasonalBeta>(&source)) {
        return transmission_rate(t, seasonal->b0, seasonal->b1);
    }
    return std::get<ConstantBeta>(source).beta;
}

StateRate sir_rhs(double t, const EpidemicState& state, const ModelParams& params,
                  const BetaSource& beta)
{
    const double infection = beta_at(beta, t) * state.i * state.s / params.n_pop;
    return {
        params.m * params.n_pop - infection - params.m * state.s,
        infection - params.lambda * state.i - params.m * state.i,
        infection,
    };
}

EpidemicState reset_incidence(EpidemicState state)
{
    state.c = 0.0;
    state.incidence_tracked = true;
    return state;
}

namespace {

using Vec3 = std::array<double, 3>;

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
// b - b_hat
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

class SirSystem {
public:
    SirSystem(const ModelParams& params, const BetaSource& beta) : params_(params), beta_(beta) {}

    Vec3 operator()(double t, const Vec3& y) const
    {
        const StateRate r = sir_rhs(t, EpidemicState{y[0], y[1], y[2]}, params_, beta_);
        return {r.ds, r.di, r.dc};
    }

private:
    const ModelParams& params_;
    const BetaSource& beta_;
};

Vec3 axpy(const Vec3& y, double h, std::initializer_list<std::pair<double, const Vec3*>> terms)
{
    Vec3 out = y;
    for (const auto& [coef, k] : terms) {
        for (std::size_t d = 0; d < 3; ++d) out[d] += h * coef * (*k)[d];
    }
    return out;
}

double error_norm(const Vec3& err, const Vec3& y0, const Vec3& y1, const Tolerances& tol)
{
    double sum = 0.0;
    for (std::size_t d = 0; d < 3; ++d) {
        const double scale = tol.abs + tol.rel * std::max(std::abs(y0[d]), std::abs(y1[d]));
        const double r = err[d] / scale;
        sum += r * r;
    }
    return std::sqrt(sum / 3.0);
}

double initial_step(const SirSystem& f, double t0, const Vec3& y0, const Vec3& k1, double span,
                    const Tolerances& tol)
{
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t d = 0; d < 3; ++d) {
        const double sc = tol.abs + tol.rel * std::abs(y0[d]);
        d0 += (y0[d] / sc) * (y0[d] / sc);
        d1 += (k1[d] / sc) * (k1[d] / sc);
    }
    d0 = std::sqrt(d0 / 3.0);
    d1 = std::sqrt(d1 / 3.0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const Vec3 y1 = axpy(y0, h0, {{1.0, &k1}});
    const Vec3 k2 = f(t0 + h0, y1);
    double d2 = 0.0;
    for (std::size_t d = 0; d < 3; ++d) {
        const double sc = tol.abs + tol.rel * std::abs(y0[d]);
        d2 += ((k2[d] - k1[d]) / sc) * ((k2[d] - k1[d]) / sc);
    }
    d2 = std::sqrt(d2 / 3.0) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    return std::max(std::min({100.0 * h0, h1, span}), tol.min_step);
}

}  // namespace

EpidemicState integrate(const EpidemicState& state, const ModelParams& params, double t0, double t1,
                        const BetaSource& beta, const Tolerances& tol, const StepObserver& observer)
{
    if (!(t1 > t0)) throw DomainError("integrate: t1 must exceed t0");
    if (!(tol.rel > 0 && tol.abs > 0 && tol.min_step > 0)) {
        throw DomainError("integrate: tolerances must be positive");
    }

    const SirSystem f(params, beta);
    Vec3 y{state.s, state.i, state.c};
    double t = t0;
    Vec3 k1 = f(t, y);
    double h = initial_step(f, t, y, k1, t1 - t0, tol);
    std::size_t steps = 0;

    constexpr double safety = 0.9;
    constexpr double max_growth = 5.0;
    constexpr double min_shrink = 0.2;

    while (t < t1) {
        if (++steps > tol.max_steps) {
            throw StepSizeUnderflow("integrate: step budget exhausted", t, h);
        }
        const bool last = t + h >= t1;
        const double step = last ? t1 - t : h;

        const Vec3 k2 = f(t + c2 * step, axpy(y, step, {{a21, &k1}}));
        const Vec3 k3 = f(t + c3 * step, axpy(y, step, {{a31, &k1}, {a32, &k2}}));
        const Vec3 k4 = f(t + c4 * step, axpy(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec3 k5 =
            f(t + c5 * step, axpy(y, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec3 k6 = f(t + step, axpy(y, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4},
                                                    {a65, &k5}}));
        Vec3 y_new = axpy(y, step, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const double t_new = last ? t1 : t + step;
        const Vec3 k7 = f(t_new, y_new);

        Vec3 err{};
        for (std::size_t d = 0; d < 3; ++d) {
            err[d] = step * (e1 * k1[d] + e3 * k3[d] + e4 * k4[d] + e5 * k5[d] + e6 * k6[d] +
                             e7 * k7[d]);
        }
        const double norm = error_norm(err, y, y_new, tol);
        if (!std::isfinite(norm)) {
            if (step <= tol.min_step) throw StepSizeUnderflow("integrate: non-finite state", t, step);
            h = std::max(step * min_shrink, tol.min_step);
            continue;
        }
        if (norm > 1.0) {
            if (step <= tol.min_step) {
                throw StepSizeUnderflow("integrate: tolerance unmet at minimum step", t, step);
            }
            h = std::max(step * std::max(min_shrink, safety * std::pow(norm, -0.2)), tol.min_step);
            continue;
        }

        const bool negative = y_new[0] < 0.0 || y_new[1] < 0.0;
        const bool accumulator_drop = y_new[2] < y[2];
        if (negative || accumulator_drop) {
            if (step > tol.min_step) {
                h = std::max(step * 0.5, tol.min_step);
                continue;
            }
            if (y_new[0] < -tol.abs || y_new[1] < -tol.abs) {
                std::ostringstream msg;
                msg << "integrate: state left the nonnegative orthant (s=" << y_new[0]
                    << ", i=" << y_new[1] << ")";
                throw StepSizeUnderflow(msg.str(), t, step);
            }
            y_new[0] = std::max(y_new[0], 0.0);
            y_new[1] = std::max(y_new[1], 0.0);
            y_new[2] = std::max(y_new[2], y[2]);
            k1 = f(t_new, y_new);
        } else {
            k1 = k7;
        }

        t = t_new;
        y = y_new;
        if (observer) observer(t, EpidemicState{y[0], y[1], y[2], state.incidence_tracked});

        const double growth =
            norm == 0.0 ? max_growth : std::min(max_growth, safety * std::pow(norm, -0.2));
        h = std::max(step * std::max(growth, min_shrink), tol.min_step);
    }

    return EpidemicState{y[0], y[1], y[2], state.incidence_tracked};
}

BurnInResult burn_in(const ModelParams& params, const BurnInOptions& options)
{
    params.validate();
    const double fs = options.init_fraction_s;
    const double fi = options.init_fraction_i;
    if (!(fs > 0 && fs < 1 && fi > 0 && fi < 1 && fs + fi <= 1)) {
        throw DomainError("burn_in: initial fractions must lie in (0, 1) and sum to at most 1");
    }
    if (options.max_years < 1 || options.samples_per_year < 1 || options.max_period < 1) {
        throw DomainError("burn_in: max_years, samples_per_year and max_period must be positive");
    }

    const BetaSource beta = SeasonalBeta{params.b0, params.b1};
    EpidemicState state{fs * params.n_pop, fi * params.n_pop, 0.0, false};

    // annual_means[k] holds year k's means; index 0 is the initial state.
    std::vector<std::array<double, 2>> annual_means{{state.s, state.i}};
    const double dt = 1.0 / options.samples_per_year;
    double last_change = std::numeric_limits<double>::infinity();

    auto rel_change = [](double now, double before) {
        const double denom = std::abs(before);
        if (denom == 0.0) return now == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return std::abs(now - before) / denom;
    };

    for (int year = 0; year < options.max_years; ++year) {
        double sum_s = 0.0, sum_i = 0.0;
        for (int k = 0; k < options.samples_per_year; ++k) {
            const double ta = year + k * dt;
            const double tb = (k + 1 == options.samples_per_year) ? year + 1.0 : ta + dt;
            state = integrate(state, params, ta, tb, beta, options.tol);
            state.c = 0.0;
            sum_s += state.s;
            sum_i += state.i;
        }
        annual_means.push_back({sum_s / options.samples_per_year, sum_i / options.samples_per_year});
        const auto& now = annual_means.back();
        const int completed = year + 1;

        double best = std::numeric_limits<double>::infinity();
        int best_period = 0;
        for (int p = 1; p <= options.max_period && p <= completed; ++p) {
            const auto& before = annual_means[completed - p];
            const double change = std::max(rel_change(now[0], before[0]), rel_change(now[1], before[1]));
            if (change < options.threshold) {
                best = change;
                best_period = p;
                break;
            }
            best = std::min(best, change);
        }
        last_change = best;
        if (best_period > 0) {
            return BurnInResult{reset_incidence(state), completed, best_period, best};
        }
    }

    std::ostringstream msg;
    msg << "burn_in: annual means still changing by " << last_change << " after "
        << options.max_years << " years";
    throw NonConvergence(msg.str(), last_change);
}

}  // namespace epiassim
