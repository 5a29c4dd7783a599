#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hyperflow::quadrature {

// Thrown when the adaptive scheme cannot reach the requested absolute
// tolerance; carries the tolerance it did achieve.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(double requested, double achieved)
        : std::runtime_error("quadrature did not converge: requested " +
                             std::to_string(requested) + ", achieved " +
                             std::to_string(achieved)),
          requested_tol(requested),
          achieved_tol(achieved)
    {
    }
    double requested_tol;
    double achieved_tol;
};

// Gauss-Legendre rule on [-1, 1]. Nodes are roots of the Legendre polynomial
// P_n, found by Newton iteration from the Chebyshev initial guess; this
// reproduces tabulated rules to machine precision without a table.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussLegendreRule make_gauss_legendre(int n)
{
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // evaluate P_n(x) and P_n'(x) by the three-term recurrence
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

inline const GaussLegendreRule& gl10()
{
    static const GaussLegendreRule rule = make_gauss_legendre(10);
    return rule;
}

inline const GaussLegendreRule& gl21()
{
    static const GaussLegendreRule rule = make_gauss_legendre(21);
    return rule;
}

template <class F>
double apply_rule(const GaussLegendreRule& rule, F&& f, double a, double b)
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

struct Result {
    double value = 0.0;
    double error = 0.0;  // accumulated error estimate
    long evaluations = 0;
};

// Adaptive bisection with a GL10/GL21 error estimate. `abs_tol` is an
// absolute tolerance on the whole interval; panels get a share proportional
// to their length. Throws QuadratureError if the budget cannot be met.
template <class F>
Result adaptive(F&& f, double a, double b, double abs_tol, int max_depth = 48)
{
    Result total;
    if (a == b) return total;

    struct Panel {
        double a, b, tol;
        int depth;
    };
    std::vector<Panel> stack{{a, b, abs_tol, 0}};
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double coarse = apply_rule(gl10(), f, p.a, p.b);
        const double fine = apply_rule(gl21(), f, p.a, p.b);
        total.evaluations += 31;
        const double err = std::abs(fine - coarse);
        if (err <= p.tol || p.depth >= max_depth) {
            total.value += fine;
            total.error += err;
        } else {
            const double mid = 0.5 * (p.a + p.b);
            stack.push_back({p.a, mid, 0.5 * p.tol, p.depth + 1});
            stack.push_back({mid, p.b, 0.5 * p.tol, p.depth + 1});
        }
    }
    if (total.error > abs_tol) throw QuadratureError(abs_tol, total.error);
    return total;
}

}  // namespace hyperflow::quadrature
