#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace hyperflow {

namespace detail {

// zeta(2n) for n = 1..kZetaTerms, computed once. For n >= 2 the direct sum
// over k <= 1000 plus an Euler-Maclaurin tail is accurate to ~1e-19.
inline constexpr int kZetaTerms = 36;

inline const std::array<double, kZetaTerms + 1>& zeta_even_table()
{
    static const std::array<double, kZetaTerms + 1> table = [] {
        std::array<double, kZetaTerms + 1> z{};
        z[1] = std::numbers::pi * std::numbers::pi / 6.0;
        for (int n = 2; n <= kZetaTerms; ++n) {
            const double s = 2.0 * n;
            const int K = 1000;
            double sum = 0.0;
            for (int k = K; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
            const double Kp = K + 1.0;
            sum += std::pow(Kp, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(Kp, -s) +
                   s * std::pow(Kp, -s - 1.0) / 12.0;
            z[n] = sum;
        }
        return z;
    }();
    return table;
}

}  // namespace detail

// Clausen function Cl2(x) = -int_0^x log|2 sin(t/2)| dt, odd and 2pi-periodic.
// Evaluated by the series
//
//   Cl2(x) = x(1 - log|x|) + x * sum_{n>=1} zeta(2n)/(n(2n+1)) (x/2pi)^{2n}
//
// after reduction of x to (-pi, pi]. The summand ratio is bounded by
// (x/2pi)^2 <= 1/4, so the tail after term n is below
// zeta(2)/((n+1)(2n+3)) q^{2n+2} / (1 - q^2); iteration stops once that bound
// drops under 1e-16, well inside the advertised 1e-12 accuracy.
inline double clausen2(double x)
{
    constexpr double pi = std::numbers::pi;
    constexpr double two_pi = 2.0 * pi;

    // reduce to (-pi, pi]
    double r = std::remainder(x, two_pi);
    if (r == 0.0) return 0.0;
    const double sign = r < 0.0 ? -1.0 : 1.0;
    r = std::abs(r);  // r in (0, pi]

    const auto& zeta = detail::zeta_even_table();
    const double q2 = (r / two_pi) * (r / two_pi);  // <= 1/4, so 1/(1-q2) <= 4/3
    double power = q2;
    double sum = 0.0;
    for (int n = 1; n <= detail::kZetaTerms; ++n) {
        sum += zeta[static_cast<std::size_t>(n)] / (n * (2.0 * n + 1.0)) * power;
        const double tail_bound =
            zeta[1] / ((n + 1.0) * (2.0 * n + 3.0)) * power * q2 * (4.0 / 3.0);
        if (tail_bound < 1e-16) break;
        power *= q2;
    }
    return sign * (r * (1.0 - std::log(r)) + r * sum);
}

// Lobachevsky function Psi(theta) = -int_0^theta log|2 sin t| dt
//                                 = Cl2(2 theta) / 2.
// Odd and pi-periodic; absolute error below 1e-12.
inline double lobachevsky(double theta) { return 0.5 * clausen2(2.0 * theta); }

}  // namespace hyperflow
