#include "quadric/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace quadric {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Tanh-sinh map on the unit interval at u >= 0:
// xi = (1 + tanh((pi/2) sinh u)) / 2, weight = d(xi)/du. dist_far = 1 - xi is
// the small quantity and is computed without cancellation; xi = 1 - dist_far.
struct MapPoint {
    double dist_far;
    double weight;
};

MapPoint ts_map(double u) {
    const double v = 0.5 * kPi * std::sinh(u);
    const double e = std::exp(-2.0 * v);  // in (0, 1] for u >= 0
    const double dist_far = e / (1.0 + e);
    const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
    const double weight = 0.25 * kPi * std::cosh(u) * sech2;
    return {dist_far, weight};
}

double max_norm(std::span<const cx> v) {
    double m = 0.0;
    for (const cx& c : v) m = std::max(m, std::abs(c));
    return m;
}

}  // namespace

VecQuadResult tanh_sinh_vec(const std::function<void(const QuadNode&, std::span<cx>)>& f, int n_values,
                            double a, double b, const TanhSinhOptions& opt) {
    const double width = b - a;
    VecQuadResult out;
    out.values.assign(n_values, cx{});
    if (width == 0.0) {
        out.converged = true;
        return out;
    }

    std::vector<cx> fx(n_values);
    std::vector<cx> sum(n_values);
    bool bad = false;
    long evals = 0;

    // Evaluates the node pair at +/-u (just the center for u = 0) into the
    // running raw sum; returns the larger contribution magnitude for the
    // tail cutoff test.
    auto eval_pair = [&](double u) -> double {
        const MapPoint mp = ts_map(u);
        if (!(mp.dist_far > 0.0) || !(mp.weight > 0.0)) return 0.0;
        const double near = 1.0 - mp.dist_far;
        const double w = width * mp.weight;
        double contrib = 0.0;
        {
            QuadNode nd{a + width * near, width * near, width * mp.dist_far};
            f(nd, fx);
            ++evals;
            double local = 0.0;
            for (int i = 0; i < n_values; ++i) {
                const cx t = w * fx[i];
                if (!std::isfinite(t.real()) || !std::isfinite(t.imag()))
                    bad = true;
                else {
                    sum[i] += t;
                    local = std::max(local, std::abs(t));
                }
            }
            contrib = local;
        }
        if (u > 0.0) {
            QuadNode nd{a + width * mp.dist_far, width * mp.dist_far, width * near};
            f(nd, fx);
            ++evals;
            double local = 0.0;
            for (int i = 0; i < n_values; ++i) {
                const cx t = w * fx[i];
                if (!std::isfinite(t.real()) || !std::isfinite(t.imag()))
                    bad = true;
                else {
                    sum[i] += t;
                    local = std::max(local, std::abs(t));
                }
            }
            contrib = std::max(contrib, local);
        }
        return contrib;
    };

    const double h0 = 0.5;
    const int n_monitor =
        (opt.monitor_components < 0 || opt.monitor_components > n_values) ? n_values
                                                                          : opt.monitor_components;
    std::vector<cx> prev(n_values), cur(n_values);
    double err = std::numeric_limits<double>::infinity();
    double value_scale = 0.0;  // magnitude of the last completed level
    bool have_prev = false;

    for (int level = 0; level <= opt.max_level; ++level) {
        const double h = h0 / static_cast<double>(1 << level);
        if (level == 0) {
            eval_pair(0.0);
            for (double u = h0; u <= opt.u_max; u += h0) eval_pair(u);
        } else {
            const double cutoff = 1e-4 * std::max(opt.abs_tol, opt.rel_tol * value_scale);
            int below = 0;
            for (double u = h; u <= opt.u_max; u += 2.0 * h) {
                const double c = eval_pair(u);
                if (u >= 3.0) {
                    if (c * h <= cutoff)
                        ++below;
                    else
                        below = 0;
                    if (below >= 6) break;
                }
            }
        }
        for (int i = 0; i < n_values; ++i) cur[i] = sum[i] * h;
        value_scale = max_norm(std::span<const cx>(cur).first(n_monitor));
        if (have_prev) {
            double d = 0.0;
            for (int i = 0; i < n_monitor; ++i) d = std::max(d, std::abs(cur[i] - prev[i]));
            err = d;
            const double tol = std::max(opt.abs_tol, opt.rel_tol * value_scale);
            if (err <= tol && level >= 2) {
                out.values = cur;
                out.abs_error = err;
                out.evals = evals;
                out.converged = !bad;
                return out;
            }
        }
        prev = cur;
        have_prev = true;
    }
    out.values = cur;
    out.abs_error = err;
    out.evals = evals;
    out.converged = false;
    return out;
}

QuadResult tanh_sinh(const std::function<cx(const QuadNode&)>& f, double a, double b,
                     const TanhSinhOptions& opt) {
    auto wrap = [&f](const QuadNode& nd, std::span<cx> out) { out[0] = f(nd); };
    VecQuadResult vr = tanh_sinh_vec(wrap, 1, a, b, opt);
    return {vr.values[0], vr.abs_error, vr.evals, vr.converged};
}

QuadResult tanh_sinh_semi_infinite(const std::function<cx(double)>& f, const TanhSinhOptions& opt) {
    auto g = [&f](const QuadNode& nd) -> cx {
        const double x = nd.dist_a / nd.dist_b;  // u/(1-u)
        const cx fx = f(x);
        if (fx == cx{}) return cx{};  // underflowed tail; avoid 0 * inf
        return fx / (nd.dist_b * nd.dist_b);
    };
    return tanh_sinh(g, 0.0, 1.0, opt);
}

}  // namespace quadric
