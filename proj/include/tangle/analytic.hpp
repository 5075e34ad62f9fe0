#pragma once

// Reference distributions for the number of approvers of a transaction.
//
//   P_U(n)      = Pois(lambda_U, n - 1)                          uniform tip selection
//   P_URW(n)    = P_U(n) g(n - 1)                                unbiased walk, whole tangle
//   P*_URW(n)   = P_U(n) g(n) / sum_m P_U(m) g(m)                unbiased walk, along walk paths
//
// with the exit profile e(x) = 1 + a (x - 0.5) and
//
//   g(n) = (1/a) sum_{j=0..n} lambda_U^{-j-1} n!/(n-j)! [h_j(-a/2) - h_j(a/2)],
//   h_j(y) = exp(-y lambda_U) (1 + y)^{n-j},
//
// which is the closed form of  int_0^1 exp(-f(x) lambda_U) (1 + f(x))^n dx.

#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "probability_vector.hpp"
#include "types.hpp"

namespace tangle {

struct ModelParams {
    double lambda = 100.0;
    EdgePolicy policy = EdgePolicy::sem;
    double a = 1.3;
    std::size_t n_max = 40;
};

inline double poisson_pmf(double gamma, std::size_t n) {
    if (gamma < 0.0 || std::isnan(gamma)) throw Error("Poisson rate must be non-negative");
    if (gamma == 0.0) return n == 0 ? 1.0 : 0.0;
    if (n <= 20) {
        double term = std::exp(-gamma);
        for (std::size_t k = 1; k <= n; ++k) term *= gamma / static_cast<double>(k);
        return term;
    }
    const double nn = static_cast<double>(n);
    return std::exp(-gamma + nn * std::log(gamma) - std::lgamma(nn + 1.0));
}

/// Expected tip count L = 1 + 2 lambda under uniform tip selection.
inline double expected_tip_count(double lambda) { return 1.0 + 2.0 * lambda; }

/// Rate of additional approvals after the first one.
inline double lambda_u(double lambda, EdgePolicy policy) {
    if (!(lambda > 0.0)) throw Error("lambda must be positive");
    const double inv_l = 1.0 / expected_tip_count(lambda);
    const double mem = 2.0 * lambda * inv_l;
    return policy == EdgePolicy::mem ? mem : mem * (1.0 - 0.5 * inv_l);
}

/// Exit-profile correction factor g(n) of the linear exit model.
namespace detail {

/// Closed-form antiderivative sum for g(n). Exact in real arithmetic, but the
/// terms grow like n! / lu^(n+1) and cancel, so it is only usable for small n
/// and moderate a. Kept as a cross-check of the series.
inline double exit_gradient_factor_closed(std::size_t n, double a, double rate) {
    using real = long double;
    const real lu = rate;
    const real half = 0.5L * static_cast<real>(a);
    const real e_lo = std::exp(half * lu);   // exp(-y lu) at y = -a/2
    const real e_hi = std::exp(-half * lu);  // exp(-y lu) at y = +a/2
    real sum = 0.0L;
    real falling = 1.0L;  // n! / (n - j)!
    real lu_pow = 1.0L / lu;
    for (std::size_t j = 0; j <= n; ++j) {
        const int k = static_cast<int>(n - j);
        const real bracket = e_lo * std::pow(1.0L - half, k) - e_hi * std::pow(1.0L + half, k);
        sum += lu_pow * falling * bracket;
        falling *= static_cast<real>(n - j);
        lu_pow /= lu;
    }
    return static_cast<double>(sum / static_cast<real>(a));
}

} // namespace detail

/// g(n): mean of exp(-lu y) (1 + y)^n over y in [-a/2, a/2]. Evaluated from the
/// Taylor series of the integrand; only even powers survive the symmetric
/// average. All terms are bounded by exp(a (lu + n) / 2), which keeps the
/// relative error near long double epsilon for a <= 2 and n <= 40.
inline double exit_gradient_factor(std::size_t n, double a, double rate) {
    if (a < 0.0) throw Error("exit slope a must be non-negative");
    if (a == 0.0) return 1.0;
    using real = long double;
    const real lu = rate;
    const real half = 0.5L * static_cast<real>(a);
    std::vector<real> binom(n + 1, 1.0L);
    for (std::size_t i = 1; i <= n; ++i)
        binom[i] = binom[i - 1] * static_cast<real>(n - i + 1) / static_cast<real>(i);
    real sum = 1.0L;
    real half_pow = 1.0L;
    for (std::size_t m = 1; m < 400; ++m) {
        half_pow *= half;
        if (m % 2) continue;
        // Coefficient of y^m: sum_i C(n, i) (-lu)^(m-i) / (m-i)!.
        real coeff = 0.0L;
        real exp_term = 1.0L;
        for (std::size_t i = m + 1; i-- > 0;) {
            if (i <= n) coeff += exp_term * binom[i];
            exp_term *= -lu / static_cast<real>(m - i + 1);
        }
        const real term = coeff * half_pow / static_cast<real>(m + 1);
        sum += term;
        if (m > n && std::abs(term) < 1e-22L * std::abs(sum)) break;
    }
    return static_cast<double>(sum);
}

namespace detail {

inline void validate(const ModelParams& p) {
    if (!(p.lambda > 0.0)) throw Error("lambda must be positive");
    if (p.a < 0.0 || p.a > 2.0) throw Error("exit slope a must lie in [0, 2]");
    if (p.n_max < 2) throw Error("n_max must be at least 2");
    // Tail beyond n_max of the widest Poisson the model mixes over.
    const double widest = lambda_u(p.lambda, p.policy) * (1.0 + 0.5 * p.a);
    double head = 0.0;
    for (std::size_t k = 0; k + 1 < p.n_max; ++k) head += poisson_pmf(widest, k);
    if (1.0 - head > 1e-12) throw Error("n_max too small: truncated tail mass exceeds 1e-12");
}

} // namespace detail

inline ProbabilityVector p_u(const ModelParams& params) {
    detail::validate(params);
    const double lu = lambda_u(params.lambda, params.policy);
    std::vector<double> p(params.n_max + 1, 0.0);
    for (std::size_t n = 1; n <= params.n_max; ++n) p[n] = poisson_pmf(lu, n - 1);
    ProbabilityVector v(std::move(p));
    v.normalize();
    return v;
}

inline ProbabilityVector p_urw(const ModelParams& params) {
    detail::validate(params);
    const double lu = lambda_u(params.lambda, params.policy);
    std::vector<double> p(params.n_max + 1, 0.0);
    for (std::size_t n = 1; n <= params.n_max; ++n)
        p[n] = poisson_pmf(lu, n - 1) * exit_gradient_factor(n - 1, params.a, lu);
    ProbabilityVector v(std::move(p));
    v.normalize();
    return v;
}

inline ProbabilityVector p_urw_star(const ModelParams& params) {
    detail::validate(params);
    const double lu = lambda_u(params.lambda, params.policy);
    std::vector<double> p(params.n_max + 1, 0.0);
    for (std::size_t n = 1; n <= params.n_max; ++n)
        p[n] = poisson_pmf(lu, n - 1) * exit_gradient_factor(n, params.a, lu);
    ProbabilityVector v(std::move(p));
    v.normalize();
    return v;
}

/// Direct numerical integration of the integral forms
///   P_URW(n)  = int_0^1 Pois(e(x) lambda_U, n - 1) dx
///   P*_URW(n) = (1/b) int_0^1 Pois(e(x) lambda_U, n - 1) e(x) dx,  b = int_0^1 e(x) dx
/// with e(x) = 1 + a (x - 0.5).
inline double quadrature_reference(const ModelParams& params, std::size_t n, bool weighted) {
    detail::validate(params);
    if (n == 0) return 0.0;
    const double lu = lambda_u(params.lambda, params.policy);
    const double a = params.a;
    auto exit = [a](double x) { return 1.0 + a * (x - 0.5); };
    auto integrand = [&](double x) {
        const double e = exit(x);
        const double p = poisson_pmf(e * lu, n - 1);
        return weighted ? p * e : p;
    };
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double value = gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15, 1e-14, &err);
    if (err > 1e-10) throw Error("quadrature did not converge");
    if (!weighted) return value;
    const double b = gauss_kronrod<double, 61>::integrate(exit, 0.0, 1.0, 15, 1e-14, &err);
    return value / b;
}

} // namespace tangle
