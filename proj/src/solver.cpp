#include "hyperflow/solver.hpp"

#include <Eigen/SparseCholesky>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>

namespace hyperflow {

const char* to_string(FlowMethod m)
{
    switch (m) {
        case FlowMethod::euler: return "euler";
        case FlowMethod::rk4: return "rk4";
        case FlowMethod::adaptive: return "adaptive";
    }
    return "?";
}

const char* to_string(SolveStatus s)
{
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_time: return "max_time";
        case SolveStatus::newton_converged: return "newton_converged";
        case SolveStatus::diverged_error: return "diverged_error";
    }
    return "?";
}

void FlowConfig::check() const
{
    if (!(step > 0.0)) throw std::invalid_argument("FlowConfig: step must be positive");
    if (!(t_max > 0.0)) throw std::invalid_argument("FlowConfig: t_max must be positive");
    if (!(tol_curvature > 0.0))
        throw std::invalid_argument("FlowConfig: tol_curvature must be positive");
    if (record_every < 1) throw std::invalid_argument("FlowConfig: record_every must be >= 1");
}

namespace {

void check_flow_inputs(const Triangulation& tri, const MetricVector& l0,
                       const CurvatureVector& target, const FlowConfig& config)
{
    config.check();
    if (l0.size() != tri.num_edges())
        throw std::invalid_argument("flow: initial metric has the wrong dimension");
    if (target.size() != tri.num_edges())
        throw std::invalid_argument("flow: target curvature has the wrong dimension");
    if ((target.array() >= 2.0 * std::numbers::pi).any())
        throw std::invalid_argument("flow: target curvature entries must be below 2 pi");
}

class WallClock {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// One RK4 step of l' = f(l); k1 = f(l) is passed in so the convergence
// check and the stepper share an evaluation.
MetricVector rk4_step(const std::function<CurvatureVector(const MetricVector&)>& f,
                      const MetricVector& l, const CurvatureVector& k1, double h)
{
    const CurvatureVector k2 = f(l + 0.5 * h * k1);
    const CurvatureVector k3 = f(l + 0.5 * h * k2);
    const CurvatureVector k4 = f(l + h * k3);
    return l + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Region/clamp bookkeeping between steps.
struct EventTracker {
    std::vector<bool> in_omega;   // per tet x 3
    std::vector<bool> clamped;    // per edge class

    EventTracker(const Triangulation& tri, const MetricVector& l0,
                 const std::vector<Region>& regions)
        : in_omega(static_cast<std::size_t>(3 * tri.num_tets()), false),
          clamped(static_cast<std::size_t>(tri.num_edges()), false)
    {
        update_silent(l0, regions);
    }

    static int omega_index(Region r)
    {
        if (r == Region::Omega1) return 0;
        if (r == Region::Omega2) return 1;
        if (r == Region::Omega3) return 2;
        return -1;
    }

    void update_silent(const MetricVector& l, const std::vector<Region>& regions)
    {
        for (std::size_t t = 0; t < regions.size(); ++t)
            for (int k = 0; k < 3; ++k)
                in_omega[3 * t + static_cast<std::size_t>(k)] = omega_index(regions[t]) == k;
        for (int e = 0; e < l.size(); ++e) clamped[static_cast<std::size_t>(e)] = l[e] <= 0.0;
    }

    void update(double t_now, const MetricVector& l, const std::vector<Region>& regions,
                std::vector<FlowEvent>& events)
    {
        static const char* entered[3] = {"entered_Omega1", "entered_Omega2", "entered_Omega3"};
        static const char* left[3] = {"left_Omega1", "left_Omega2", "left_Omega3"};
        for (std::size_t t = 0; t < regions.size(); ++t) {
            const int now = omega_index(regions[t]);
            for (int k = 0; k < 3; ++k) {
                const bool was = in_omega[3 * t + static_cast<std::size_t>(k)];
                const bool is = now == k;
                if (is && !was) events.push_back({t_now, entered[k], static_cast<int>(t)});
                if (was && !is) events.push_back({t_now, left[k], static_cast<int>(t)});
                in_omega[3 * t + static_cast<std::size_t>(k)] = is;
            }
        }
        for (int e = 0; e < l.size(); ++e) {
            const bool is = l[e] <= 0.0;
            if (is && !clamped[static_cast<std::size_t>(e)])
                events.push_back({t_now, "clamped_coordinate", e});
            clamped[static_cast<std::size_t>(e)] = is;
        }
    }
};

struct FlowOutcome {
    FlowTrace trace;
    SolveReport report;
    bool handoff_requested = false;
};

// Core integrator. `monitor`, when set, is evaluated at every recorded
// sample; returning true suspends integration with the current state in
// report.final_metric (used by the hybrid driver).
FlowOutcome flow_impl(const Triangulation& tri, const MetricVector& l0,
                      const CurvatureVector& target, const FlowConfig& config,
                      const std::function<bool(const FlowSample&)>& monitor)
{
    check_flow_inputs(tri, l0, target, config);
    const WallClock clock;

    auto deriv = [&](const MetricVector& l) -> CurvatureVector {
        return extended_curvature(tri, l) - target;
    };

    FlowOutcome out;
    MetricVector l = l0;
    double t = 0.0;
    long steps = 0;
    double h_adaptive = config.step;

    auto record = [&](const CurvatureVector& r, const std::vector<Region>& regions) {
        FlowSample s;
        s.t = t;
        s.metric = l;
        s.curvature_norm = r.lpNorm<Eigen::Infinity>();
        s.energy = energy(tri, l, target, config.quad_tol);
        s.tet_regions = regions;
        out.trace.samples.push_back(std::move(s));
    };

    auto finish = [&](SolveStatus status, double res, const std::string& msg) {
        out.report.status = status;
        out.report.final_metric = l;
        out.report.final_curvature_norm = res;
        out.report.steps = steps;
        out.report.message = msg;
        out.report.wall_time_sec = clock.seconds();
    };

    if (!l.allFinite()) {
        out.report.status = SolveStatus::diverged_error;
        out.report.final_metric = l;
        out.report.message = "initial metric contains a non-finite entry";
        out.report.wall_time_sec = clock.seconds();
        return out;
    }

    CurvatureVector r = deriv(l);
    NondegeneracyReport survey = survey_regions(tri, l);
    EventTracker tracker(tri, l, survey.tet_regions);
    record(r, survey.tet_regions);
    if (monitor && monitor(out.trace.samples.back())) {
        out.handoff_requested = true;
        finish(SolveStatus::max_time, r.lpNorm<Eigen::Infinity>(), "handoff");
        return out;
    }

    while (true) {
        const double res = r.lpNorm<Eigen::Infinity>();
        if (res < config.tol_curvature && survey.nondegenerate) {
            if (out.trace.samples.back().t != t) record(r, survey.tet_regions);
            finish(SolveStatus::converged, res, "");
            return out;
        }
        if (t >= config.t_max - 1e-12 * config.t_max) {
            if (out.trace.samples.back().t != t) record(r, survey.tet_regions);
            finish(SolveStatus::max_time, res, "");
            return out;
        }

        double h = std::min(config.method == FlowMethod::adaptive ? h_adaptive : config.step,
                            config.t_max - t);
        MetricVector l_next;
        switch (config.method) {
            case FlowMethod::euler:
                l_next = l + h * r;
                break;
            case FlowMethod::rk4:
                l_next = rk4_step(deriv, l, r, h);
                break;
            case FlowMethod::adaptive: {
                // step doubling: compare one full step with two half steps
                while (true) {
                    const MetricVector full = rk4_step(deriv, l, r, h);
                    const MetricVector half1 = rk4_step(deriv, l, r, 0.5 * h);
                    const MetricVector half2 =
                        rk4_step(deriv, half1, deriv(half1), 0.5 * h);
                    const double err =
                        (full - half2).lpNorm<Eigen::Infinity>() / 15.0;
                    if (err <= config.adaptive_tol || h <= 1e-8) {
                        l_next = half2;
                        if (err < config.adaptive_tol / 64.0)
                            h_adaptive = std::min(2.0 * h, config.step);
                        else
                            h_adaptive = h;
                        break;
                    }
                    h *= 0.5;
                }
                break;
            }
        }

        if (!l_next.allFinite()) {
            finish(SolveStatus::diverged_error, r.lpNorm<Eigen::Infinity>(),
                   "non-finite state at t = " + std::to_string(t + h) +
                       "; integrator failure (the flow field is uniformly bounded)");
            return out;
        }

        l = std::move(l_next);
        t += h;
        ++steps;
        r = deriv(l);
        survey = survey_regions(tri, l);
        tracker.update(t, l, survey.tet_regions, out.trace.events);

        if (steps % config.record_every == 0) {
            record(r, survey.tet_regions);
            if (monitor && monitor(out.trace.samples.back())) {
                out.handoff_requested = true;
                finish(SolveStatus::max_time, r.lpNorm<Eigen::Infinity>(), "handoff");
                return out;
            }
        }
    }
}

}  // namespace

std::pair<FlowTrace, SolveReport> flow(const Triangulation& tri, const MetricVector& l0,
                                       const CurvatureVector& target, const FlowConfig& config)
{
    FlowOutcome out = flow_impl(tri, l0, target, config, nullptr);
    if (out.report.status == SolveStatus::converged ||
        out.report.status == SolveStatus::newton_converged) {
        if (const auto rate = convergence_rate(out.trace)) out.report.rate = rate->lambda;
    }
    return {std::move(out.trace), std::move(out.report)};
}

SolveReport newton_solve(const Triangulation& tri, const MetricVector& l0,
                         const CurvatureVector& target, const FlowConfig& config)
{
    config.check();
    if (l0.size() != tri.num_edges())
        throw std::invalid_argument("newton_solve: initial metric has the wrong dimension");
    if (target.size() != tri.num_edges())
        throw std::invalid_argument("newton_solve: target curvature has the wrong dimension");
    if (!is_nondegenerate(tri, l0))
        throw std::domain_error("newton_solve: initial metric must be nondegenerate");
    const WallClock clock;

    SolveReport rep;
    MetricVector l = l0;
    CurvatureVector r = extended_curvature(tri, l) - target;
    const double tol = std::min(config.newton_tol, config.tol_curvature);

    auto fail = [&](const std::string& why) {
        rep.status = SolveStatus::max_time;
        rep.final_metric = l;
        rep.final_curvature_norm = r.lpNorm<Eigen::Infinity>();
        rep.message = "newton: " + why;
        rep.wall_time_sec = clock.seconds();
        return rep;
    };

    for (int it = 0; it <= config.max_newton_iterations; ++it) {
        const double res = r.lpNorm<Eigen::Infinity>();
        if (res < tol) {
            rep.status = SolveStatus::newton_converged;
            rep.final_metric = l;
            rep.final_curvature_norm = res;
            rep.newton_iterations = it;
            rep.wall_time_sec = clock.seconds();
            return rep;
        }

        Eigen::SparseMatrix<double> neg_jac;
        try {
            neg_jac = (-curvature_jacobian(tri, l)).eval();
        } catch (const std::domain_error& e) {
            return fail(std::string("jacobian unavailable: ") + e.what());
        }
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(neg_jac);
        if (ldlt.info() != Eigen::Success) return fail("factorization failed");
        const MetricVector direction = ldlt.solve(r);
        if (ldlt.info() != Eigen::Success || !direction.allFinite())
            return fail("linear solve failed");

        double alpha = 1.0;
        int rejected = 0;
        MetricVector cand;
        CurvatureVector r_cand;
        while (true) {
            cand = l + alpha * direction;
            r_cand = extended_curvature(tri, cand) - target;
            if (is_nondegenerate(tri, cand) && r_cand.lpNorm<Eigen::Infinity>() < res) break;
            alpha *= 0.5;
            if (++rejected >= 50) return fail("50 consecutive rejected steps");
        }
        l = std::move(cand);
        r = std::move(r_cand);
        rep.newton_iterations = it + 1;
    }
    return fail("iteration limit reached");
}

std::pair<FlowTrace, SolveReport> hybrid_solve(const Triangulation& tri, const MetricVector& l0,
                                               const CurvatureVector& target,
                                               const FlowConfig& config)
{
    check_flow_inputs(tri, l0, target, config);
    const WallClock clock;

    FlowTrace trace;
    MetricVector current = l0;
    double t_offset = 0.0;
    long total_steps = 0;
    int consecutive_nondeg = 0;
    int cooldown = 0;

    while (true) {
        auto monitor = [&](const FlowSample& s) {
            const bool nondeg =
                std::all_of(s.tet_regions.begin(), s.tet_regions.end(),
                            [](Region r) { return r == Region::NonDegenerate; }) &&
                (s.metric.array() > 0.0).all();
            consecutive_nondeg = nondeg ? consecutive_nondeg + 1 : 0;
            if (cooldown > 0) {
                --cooldown;
                return false;
            }
            return consecutive_nondeg >= config.handoff_samples &&
                   s.curvature_norm < config.handoff_residual;
        };

        FlowConfig leg = config;
        leg.t_max = config.t_max - t_offset;
        FlowOutcome out = flow_impl(tri, current, target, leg, monitor);

        // splice this leg into the accumulated trace
        for (FlowSample& s : out.trace.samples) {
            s.t += t_offset;
            if (!trace.samples.empty() && trace.samples.back().t == s.t) continue;
            trace.samples.push_back(std::move(s));
        }
        for (FlowEvent& e : out.trace.events) {
            e.t += t_offset;
            trace.events.push_back(std::move(e));
        }
        total_steps += out.report.steps;

        if (!out.handoff_requested) {
            out.report.steps = total_steps;
            out.report.wall_time_sec = clock.seconds();
            if (out.report.status == SolveStatus::converged) {
                if (const auto rate = convergence_rate(trace)) out.report.rate = rate->lambda;
            }
            return {std::move(trace), std::move(out.report)};
        }

        // Newton attempt from the suspended state
        current = out.report.final_metric;
        t_offset = trace.samples.back().t;
        SolveReport newton = newton_solve(tri, current, target, config);
        if (newton.status == SolveStatus::newton_converged) {
            newton.steps = total_steps;
            newton.newton_handoff_time = t_offset;
            newton.wall_time_sec = clock.seconds();
            if (const auto rate = convergence_rate(trace)) newton.rate = rate->lambda;
            return {std::move(trace), std::move(newton)};
        }
        // Newton failed: resume flowing, and wait a while before retrying
        cooldown = 50;
        consecutive_nondeg = 0;
        if (t_offset >= config.t_max - 1e-12 * config.t_max) {
            newton.status = SolveStatus::max_time;
            newton.steps = total_steps;
            newton.wall_time_sec = clock.seconds();
            newton.message = "time budget exhausted after failed newton attempt";
            return {std::move(trace), std::move(newton)};
        }
    }
}

double regular_curvature(int degree, double s)
{
    // cosh s / (2 cosh s - 1) written as 1 / (2 - sech s); sech underflows
    // gracefully for large s, giving the correct limit 1/2.
    const double phi = 1.0 / (2.0 - 1.0 / std::cosh(s));
    return 2.0 * std::numbers::pi - degree * std::acos(std::clamp(phi, -1.0, 1.0));
}

std::variant<RegularSolution, NoSolution> regular_solve(int degree, double tol)
{
    if (degree <= 0) throw std::invalid_argument("regular_solve: degree must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("regular_solve: tolerance must be positive");
    if (degree <= 6) return NoSolution{(6 - degree) * std::numbers::pi / 3.0};

    // K is strictly decreasing from 2 pi to (6 - N) pi / 3 < 0
    double lo = 1e-12, hi = 1.0;
    while (regular_curvature(degree, hi) > 0.0) hi *= 2.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (regular_curvature(degree, mid) > 0.0 ? lo : hi) = mid;
    }
    RegularSolution sol;
    sol.s_star = 0.5 * (lo + hi);
    sol.cosh_s_star = std::cosh(sol.s_star);
    sol.residual = regular_curvature(degree, sol.s_star);
    return sol;
}

std::optional<RateEstimate> convergence_rate(const FlowTrace& trace)
{
    std::vector<std::pair<double, double>> points;  // (t, log norm)
    for (const FlowSample& s : trace.samples)
        if (s.curvature_norm > 0.0 && s.curvature_norm < 1e-2)
            points.emplace_back(s.t, std::log(s.curvature_norm));
    if (points.size() < 10) return std::nullopt;

    const std::size_t tail = std::max<std::size_t>(points.size() / 4, 2);
    points.erase(points.begin(), points.end() - static_cast<std::ptrdiff_t>(tail));

    const double n = static_cast<double>(points.size());
    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    for (const auto& [t, y] : points) {
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        syy += y * y;
    }
    const double denom = n * stt - st * st;
    if (denom == 0.0) return std::nullopt;
    RateEstimate est;
    est.lambda = (n * sty - st * sy) / denom;
    const double ss_tot = syy - sy * sy / n;
    const double intercept = (sy - est.lambda * st) / n;
    double ss_res = 0.0;
    for (const auto& [t, y] : points) {
        const double d = y - (intercept + est.lambda * t);
        ss_res += d * d;
    }
    est.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    est.samples_used = static_cast<int>(points.size());
    return est;
}

}  // namespace hyperflow
