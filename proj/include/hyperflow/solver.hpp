#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hyperflow/curvature.hpp"
#include "hyperflow/triangulation.hpp"

// Integration of the extended combinatorial Ricci flow
//
//   dl_e/dt = K_e(l) - target_e,
//
// damped Newton acceleration on the nondegenerate locus, and the scalar
// solver for edge-regular triangulations. The flow's vector field is
// continuous and uniformly bounded, so trajectories exist for all time; the
// energy of curvature.hpp decreases along them and the flow converges to the
// metric realizing the target curvature whenever one exists.

namespace hyperflow {

enum class FlowMethod { euler, rk4, adaptive };
enum class NewtonMode { off, hybrid };
enum class SolveStatus { converged, max_time, newton_converged, diverged_error };

const char* to_string(FlowMethod m);
const char* to_string(SolveStatus s);

struct FlowConfig {
    FlowMethod method = FlowMethod::rk4;
    double step = 0.05;           // fixed step; initial and maximal step when adaptive
    double t_max = 50.0;
    double tol_curvature = 1e-10;  // stop when ||K - target||_inf drops below
    int record_every = 1;          // trace cadence in accepted steps
    NewtonMode newton = NewtonMode::off;
    std::uint64_t seed = 0;        // consumed by callers that randomize inputs
    double adaptive_tol = 1e-8;    // local error target for the adaptive stepper
    double newton_tol = 1e-12;     // Newton terminal residual
    double handoff_residual = 0.1; // hybrid: residual level required before Newton
    int handoff_samples = 10;      // hybrid: consecutive nondegenerate samples required
    double quad_tol = 1e-9;        // quadrature tolerance for recorded energies
    int max_newton_iterations = 100;

    void check() const;  // throws std::invalid_argument on bad values
};

struct FlowSample {
    double t = 0.0;
    MetricVector metric;
    double curvature_norm = 0.0;  // ||K - target||_inf
    double energy = 0.0;
    std::vector<Region> tet_regions;
};

struct FlowEvent {
    double t = 0.0;
    std::string kind;  // entered_Omega1.., left_Omega1.., clamped_coordinate
    int index = 0;     // tetrahedron for region events, edge class for clamping
};

struct FlowTrace {
    std::vector<FlowSample> samples;
    std::vector<FlowEvent> events;
};

struct SolveReport {
    SolveStatus status = SolveStatus::max_time;
    MetricVector final_metric;
    double final_curvature_norm = 0.0;
    std::optional<double> rate;       // exponential rate from the trace, when fittable
    long steps = 0;                   // accepted flow steps
    int newton_iterations = 0;
    double newton_handoff_time = -1.0;  // < 0 when Newton never engaged
    double wall_time_sec = 0.0;
    std::string message;
};

// Integrate the flow from l0 (any real vector of dimension |E|). Runs until
// t_max unless the curvature residual drops below tol_curvature at a
// nondegenerate state. A non-finite state aborts with diverged_error; the
// bounded vector field makes that an integrator failure, never dynamics.
std::pair<FlowTrace, SolveReport> flow(const Triangulation& tri, const MetricVector& l0,
                                       const CurvatureVector& target, const FlowConfig& config);

// Damped Newton iteration on K(l) = target from a nondegenerate start. Trial
// steps that leave the nondegenerate locus or increase the residual are
// halved; 50 consecutive rejections or a factorization failure end the
// attempt with a max_time report so callers can fall back to the flow.
SolveReport newton_solve(const Triangulation& tri, const MetricVector& l0,
                         const CurvatureVector& target, const FlowConfig& config);

// Flow first; once the state has stayed nondegenerate for handoff_samples
// recorded samples and the residual is below handoff_residual, finish with
// Newton. Falls back to flowing when a Newton attempt fails.
std::pair<FlowTrace, SolveReport> hybrid_solve(const Triangulation& tri, const MetricVector& l0,
                                               const CurvatureVector& target,
                                               const FlowConfig& config);

// Edge-regular triangulations, every degree equal to N: the zero-curvature
// equation reduces to one scalar equation
//
//   K(s) = 2 pi - N arccos(cosh s / (2 cosh s - 1)) = 0,
//
// strictly decreasing in s with limits 2 pi and (6 - N) pi / 3. A root
// exists iff N > 6 and is found by bisection.
struct RegularSolution {
    double s_star = 0.0;
    double cosh_s_star = 0.0;
    double residual = 0.0;
};
struct NoSolution {
    double limit_curvature = 0.0;  // (6 - N) pi / 3 >= 0
};
std::variant<RegularSolution, NoSolution> regular_solve(int degree, double tol = 1e-12);

// K(s) for the constant metric on an edge-regular triangulation of degree N.
double regular_curvature(int degree, double s);

struct RateEstimate {
    double lambda = 0.0;
    double r_squared = 0.0;
    int samples_used = 0;
};

// Least-squares slope of log ||K - target||_inf over the tail of the trace:
// the last quarter of the samples with residual below 1e-2. Requires at
// least 10 such samples.
std::optional<RateEstimate> convergence_rate(const FlowTrace& trace);

}  // namespace hyperflow
