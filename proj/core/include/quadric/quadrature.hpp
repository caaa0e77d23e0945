// quadrature.hpp — tanh-sinh (double exponential) quadrature with adaptive
// level refinement. Nodes never touch the endpoints; integrands receive the
// node together with its accurately computed distance to each endpoint, so
// endpoint-singular factors like (1-r)^{-1/2} or r^{a-1} lose no precision.

#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace quadric {

using cx = std::complex<double>;

struct QuadNode {
    double x;       // the abscissa in (a, b)
    double dist_a;  // x - a, accurate near a
    double dist_b;  // b - x, accurate near b
};

struct QuadResult {
    cx value{};
    double abs_error = 0.0;
    long evals = 0;
    bool converged = false;
};

struct VecQuadResult {
    std::vector<cx> values;
    double abs_error = 0.0;  // max-norm estimate over components
    long evals = 0;
    bool converged = false;
};

struct TanhSinhOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int max_level = 11;          // level k spaces nodes h = 2^{-k} in the u variable
    double u_max = 6.1;          // truncation of the double-exponential variable
    int monitor_components = -1; // convergence norm over the first k components (-1: all)
};

// Scalar integral of f over (a, b).
QuadResult tanh_sinh(const std::function<cx(const QuadNode&)>& f, double a, double b,
                     const TanhSinhOptions& opt = {});

// Simultaneous integration of an n_values-component integrand over (a, b);
// the integrand writes its components into `out`. Convergence is controlled
// in the max norm across components.
VecQuadResult tanh_sinh_vec(const std::function<void(const QuadNode&, std::span<cx>)>& f, int n_values,
                            double a, double b, const TanhSinhOptions& opt = {});

// Integral over (0, inf) via the substitution x = u/(1-u).
QuadResult tanh_sinh_semi_infinite(const std::function<cx(double)>& f, const TanhSinhOptions& opt = {});

}  // namespace quadric
