#pragma once

// Brute-force references used only by the tests. Nothing here calls into the
// code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace wcdr::oracle {

/// Minimizes a scalar function over [center − radius, center + radius] on a
/// grid of the given spacing, then once more on a 1000× finer grid spanning
/// one coarse cell either side of the best point.
inline double grid_minimize(const std::function<double(double)>& obj, double center, double radius,
                            double spacing = 1e-4)
{
    const auto scan = [&](double lo, double hi, double h) {
        double best_z = lo;
        double best_v = std::numeric_limits<double>::infinity();
        const auto n = static_cast<long>(std::ceil((hi - lo) / h));
        for (long i = 0; i <= n; ++i) {
            const double z = lo + static_cast<double>(i) * h;
            const double v = obj(z);
            if (v < best_v) {
                best_v = v;
                best_z = z;
            }
        }
        return best_z;
    };
    const double coarse = scan(center - radius, center + radius, spacing);
    return scan(coarse - spacing, coarse + spacing, spacing * 1e-3);
}

/// Scalar firm penalty written out from its definition.
inline double firm_penalty(double t, double tau, double rho)
{
    const double a = std::abs(t);
    return a < tau / rho ? tau * a - 0.5 * rho * t * t : tau * tau / (2 * rho);
}

/// argmin_z (1/2α)(z − t)² + P(z) + (shift/2)z² by grid search with radius
/// max(2|t|, 2τ/ρ).
inline double firm_prox_grid(double t, double tau, double rho, double alpha, double shift = 0.0)
{
    const auto obj = [&](double z) {
        return (z - t) * (z - t) / (2 * alpha) + firm_penalty(z, tau, rho) + 0.5 * shift * z * z;
    };
    const double radius = std::max({2 * std::abs(t), 2 * tau / rho, 1e-3});
    return grid_minimize(obj, 0.0, radius);
}

/// Characteristic polynomial coefficients c_0..c_n of det(λI − A) (c_n = 1)
/// by the Faddeev-LeVerrier recursion.
inline std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& a)
{
    const auto n = a.rows();
    std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
    c[static_cast<std::size_t>(n)] = 1.0;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m + c[static_cast<std::size_t>(n - k + 1)] * Eigen::MatrixXd::Identity(n, n);
        c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
    }
    return c;
}

inline double horner(const std::vector<double>& c, double x)
{
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

/// All real roots of a polynomial in [lo, hi] via sign-change scan + bisection.
inline std::vector<double> real_roots(const std::vector<double>& c, double lo, double hi, int samples = 200000)
{
    std::vector<double> roots;
    const double h = (hi - lo) / samples;
    double x0 = lo;
    double p0 = horner(c, x0);
    for (int i = 1; i <= samples; ++i) {
        const double x1 = lo + i * h;
        const double p1 = horner(c, x1);
        if (p0 == 0.0) {
            roots.push_back(x0);
        } else if ((p0 < 0) != (p1 < 0)) {
            double a = x0, b = x1, pa = p0;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
                const double mid = 0.5 * (a + b);
                const double pm = horner(c, mid);
                if ((pm < 0) == (pa < 0)) {
                    a = mid;
                    pa = pm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x0 = x1;
        p0 = p1;
    }
    return roots;
}

/// Central finite-difference gradient.
inline Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                                  const Eigen::VectorXd& x, double h = 1e-5)
{
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2 * h);
    }
    return g;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0)
{
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::VectorXd v(n);
    for (auto& e : v) e = normal(rng);
    return v;
}

} // namespace wcdr::oracle
