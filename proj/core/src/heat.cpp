#include "quadric/heat.hpp"

#include <cmath>
#include <stdexcept>

#include "quadric/quadrature.hpp"

namespace quadric {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// coth(x) for x > 0 without cancellation or overflow.
double coth_stable(double x) {
    if (x > 350.0) return 1.0;
    return 1.0 + 2.0 / std::expm1(2.0 * x);
}

// 1 - e^{-x} for x > 0.
double one_minus_exp_neg(double x) { return -std::expm1(-x); }

std::vector<double> abs_squares(std::span<const cx> z) {
    std::vector<double> a(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) a[j] = std::norm(z[j]);
    return a;
}

}  // namespace

HeatContext make_heat_context(const QuadricForm& Q, const MultiIndex& L, std::span<const double> lambda,
                              double zero_tol) {
    if (static_cast<int>(lambda.size()) != Q.m)
        throw std::invalid_argument("make_heat_context: lambda has wrong dimension");
    // Scaled norm: |lambda_j|^2 may underflow for legitimately tiny lambda.
    double amax = 0.0;
    for (double l : lambda) amax = std::max(amax, std::abs(l));
    if (amax == 0.0) throw std::invalid_argument("make_heat_context: lambda must be nonzero");
    double norm2 = 0.0;
    for (double l : lambda) norm2 += (l / amax) * (l / amax);
    const double norm = amax * std::sqrt(norm2);
    if (!L.entries.empty() && L.entries.back() > Q.n)
        throw std::invalid_argument("make_heat_context: L indexes past n");

    std::vector<double> alpha(lambda.begin(), lambda.end());
    for (double& a : alpha) a /= norm;
    const SpectralData S = spectral(Q, alpha, zero_tol);

    HeatContext ctx;
    ctx.n = Q.n;
    ctx.m = Q.m;
    ctx.nu = S.nu;
    ctx.lambda_norm = norm;
    ctx.mu_lambda.resize(Q.n);
    ctx.gamma_member = (S.nu == Q.n);
    for (int j = 0; j < Q.n; ++j) {
        ctx.mu_lambda[j] = S.is_zero(j) ? 0.0 : norm * S.mu[j];
        const int sg = S.sign_of(j);
        if (sg == 0) {
            ctx.zero_slots.push_back(j);
            continue;
        }
        ctx.nonzero_slots.push_back(j);
        ctx.mu_abs_nz.push_back(std::abs(ctx.mu_lambda[j]));
        const int eps = L.contains(j + 1) ? sg : -sg;
        ctx.eps_nz.push_back(eps);
        if (eps != 1) ctx.gamma_member = false;
    }
    return ctx;
}

double heat_value(const HeatContext& ctx, std::span<const double> abs_z2, double s) {
    if (!(s > 0.0)) throw std::domain_error("heat_value: requires s > 0 (s = 0 is the delta limit)");
    const int deg = ctx.n - ctx.nu;
    double value = std::pow(2.0, deg) / (std::pow(kTwoPi, 0.5 * ctx.m + ctx.n) * std::pow(s, deg));
    double zdd2 = 0.0;
    for (int slot : ctx.zero_slots) zdd2 += abs_z2[slot];
    value *= std::exp(-zdd2 / s);
    for (std::size_t k = 0; k < ctx.nonzero_slots.size(); ++k) {
        const double mu = ctx.mu_abs_nz[k];
        const double x = s * mu;
        const double twist = (ctx.eps_nz[k] == 1) ? 1.0 : std::exp(-2.0 * x);
        value *= 4.0 * twist * mu / one_minus_exp_neg(2.0 * x);
        value *= std::exp(-mu * coth_stable(x) * abs_z2[ctx.nonzero_slots[k]]);
    }
    return value;
}

double szego_value(const HeatContext& ctx, std::span<const double> abs_z2) {
    if (!ctx.gamma_member) return 0.0;
    double value = std::pow(4.0, ctx.n) / std::pow(kTwoPi, ctx.n + 0.5 * ctx.m);
    for (std::size_t k = 0; k < ctx.nonzero_slots.size(); ++k) {
        const double mu = ctx.mu_abs_nz[k];
        value *= mu * std::exp(-mu * abs_z2[ctx.nonzero_slots[k]]);
    }
    return value;
}

double heat_transform(const QuadricForm& Q, const TransformPoint& T) {
    if (static_cast<int>(T.z_alpha.size()) != Q.n)
        throw std::invalid_argument("heat_transform: z_alpha has wrong dimension");
    const HeatContext ctx = make_heat_context(Q, T.L, T.lambda);
    return heat_value(ctx, abs_squares(T.z_alpha), T.s);
}

double szego_transform(const QuadricForm& Q, const MultiIndex& L, std::span<const cx> z_alpha,
                       std::span<const double> lambda) {
    if (static_cast<int>(z_alpha.size()) != Q.n)
        throw std::invalid_argument("szego_transform: z_alpha has wrong dimension");
    const HeatContext ctx = make_heat_context(Q, L, lambda);
    return szego_value(ctx, abs_squares(z_alpha));
}

double box_transformed_residual(const QuadricForm& Q, const MultiIndex& L, std::span<const double> lambda,
                                const GridSpec& grid, std::span<const double> s_values) {
    if (grid.fd_step <= 0.0 || grid.points_per_axis < 1 || grid.extent <= 0.0)
        throw std::invalid_argument("box_transformed_residual: bad grid");
    if (grid.fd_step >= grid.extent)
        throw std::invalid_argument("box_transformed_residual: grid too small for the stencil");

    const HeatContext ctx = make_heat_context(Q, L, lambda);
    const int n = Q.n;
    const double h = grid.fd_step;
    // The kernel varies faster in s than in any single spatial coordinate; a
    // shorter s-step balances the two O(step^2) terms while keeping the whole
    // residual second order in h.
    const double hs = 0.25 * grid.fd_step;
    for (double s : s_values)
        if (s <= hs) throw std::invalid_argument("box_transformed_residual: need s > fd_step/4");

    // Constant term sum_{k in L} mu_k - sum_{k not in L} mu_k over all slots.
    double cterm = 0.0;
    for (int j = 0; j < n; ++j) cterm += (L.contains(j + 1) ? 1.0 : -1.0) * ctx.mu_lambda[j];

    auto value_at = [&](std::span<const double> xy, double s) {
        std::vector<double> a2(n);
        for (int j = 0; j < n; ++j) a2[j] = xy[2 * j] * xy[2 * j] + xy[2 * j + 1] * xy[2 * j + 1];
        return heat_value(ctx, a2, s);
    };

    // Lattice per real axis.
    std::vector<double> axis(grid.points_per_axis);
    for (int i = 0; i < grid.points_per_axis; ++i) {
        axis[i] = (grid.points_per_axis == 1)
                      ? 0.31  // off-center so first derivatives are exercised
                      : -grid.extent + 2.0 * grid.extent * i / (grid.points_per_axis - 1);
    }

    double max_resid = 0.0, max_val = 0.0;
    const int dims = 2 * n;
    std::vector<int> idx(dims, 0);
    std::vector<double> xy(dims);
    while (true) {
        for (int d = 0; d < dims; ++d) xy[d] = axis[idx[d]];
        for (double s : s_values) {
            const double f0 = value_at(xy, s);
            max_val = std::max(max_val, std::abs(f0));

            double lap = 0.0;
            std::vector<double> d1(dims);
            for (int d = 0; d < dims; ++d) {
                const double keep = xy[d];
                xy[d] = keep + h;
                const double fp = value_at(xy, s);
                xy[d] = keep - h;
                const double fm = value_at(xy, s);
                xy[d] = keep;
                lap += (fp - 2.0 * f0 + fm) / (h * h);
                d1[d] = (fp - fm) / (2.0 * h);
            }
            const double fsp = value_at(xy, s + hs);
            const double fsm = value_at(xy, s - hs);
            const double ds = (fsp - fsm) / (2.0 * hs);

            // 2i mu Im{z d_z} = i mu (y d_x - x d_y): purely imaginary on a
            // real-valued kernel.
            double rot = 0.0;
            double pot = 0.0;
            for (int j = 0; j < n; ++j) {
                const double mu = ctx.mu_lambda[j];
                rot += mu * (xy[2 * j + 1] * d1[2 * j] - xy[2 * j] * d1[2 * j + 1]);
                pot += mu * mu * (xy[2 * j] * xy[2 * j] + xy[2 * j + 1] * xy[2 * j + 1]);
            }
            const double re = ds - 0.25 * lap + (pot - cterm) * f0;
            const double im = rot;
            max_resid = std::max(max_resid, std::hypot(re, im));
        }
        int d = dims - 1;
        while (d >= 0 && ++idx[d] == grid.points_per_axis) idx[d--] = 0;
        if (d < 0) break;
    }
    if (max_val == 0.0) return 0.0;
    return max_resid / max_val;
}

TailIntegral n_transform_from_heat(const QuadricForm& Q, const MultiIndex& L, std::span<const cx> z_alpha,
                                   std::span<const double> lambda, double s_cut, double tail_tol) {
    if (static_cast<int>(z_alpha.size()) != Q.n)
        throw std::invalid_argument("n_transform_from_heat: z_alpha has wrong dimension");
    const HeatContext ctx = make_heat_context(Q, L, lambda);
    const std::vector<double> a2 = abs_squares(z_alpha);
    double z2 = 0.0;
    for (double v : a2) z2 += v;
    if (z2 == 0.0)
        throw std::domain_error("n_transform_from_heat: integral diverges at s -> 0 for z = 0");

    const double sz = szego_value(ctx, a2);
    TanhSinhOptions opt;
    opt.rel_tol = tail_tol;
    opt.abs_tol = 1e-2 * tail_tol;

    // Exponential rate of H~ - S~ at s -> inf; the tail substitution is
    // matched to it so slowly decaying tails (small |lambda| or small
    // eigenvalues) keep all their mass reachable.
    double rate = 0.0;
    if (ctx.gamma_member) {
        rate = std::numeric_limits<double>::infinity();
        for (double mu : ctx.mu_abs_nz) rate = std::min(rate, mu);
        rate *= 2.0;
    } else {
        for (std::size_t k = 0; k < ctx.mu_abs_nz.size(); ++k)
            if (ctx.eps_nz[k] != 1) rate += 2.0 * ctx.mu_abs_nz[k];
    }

    TailIntegral out;
    out.converged = true;
    auto add = [&out](const QuadResult& piece) {
        out.value += piece.value.real();
        out.abs_error += piece.abs_error;
        out.converged = out.converged && piece.converged;
    };

    add(tanh_sinh([&](const QuadNode& nd) -> cx { return heat_value(ctx, a2, nd.dist_a) - sz; }, 0.0,
                  s_cut, opt));

    if (rate >= 0.05) {
        const double c = std::min(rate, 1.0);
        add(tanh_sinh(
            [&](const QuadNode& nd) -> cx {
                const double logv = (nd.x < 0.5) ? std::log(nd.x) : std::log1p(-nd.dist_b);
                const double s = s_cut - logv / c;
                return (heat_value(ctx, a2, s) - sz) / (c * nd.x);
            },
            0.0, 1.0, opt));
        return out;
    }

    // Slow tail: a plateau out to the knee s ~ 1/rate in tau = log s, then
    // the rate-matched exponential piece. rate = 0 leaves the algebraic
    // s^{nu-n} decay alone, divergent when n - nu = 1.
    const double knee = (rate > 0.0) ? std::max(s_cut, 1.0 / rate) : 1e300;
    if (knee > s_cut) {
        add(tanh_sinh(
            [&](const QuadNode& nd) -> cx {
                const double s = std::exp(nd.x);
                return (heat_value(ctx, a2, s) - sz) * s;
            },
            std::log(s_cut), std::log(knee), opt));
    }
    if (rate > 0.0) {
        add(tanh_sinh(
            [&](const QuadNode& nd) -> cx {
                const double logv = (nd.x < 0.5) ? std::log(nd.x) : std::log1p(-nd.dist_b);
                const double s = knee - logv / rate;
                return (heat_value(ctx, a2, s) - sz) / (rate * nd.x);
            },
            0.0, 1.0, opt));
    } else if (ctx.n - ctx.nu == 1) {
        out.converged = false;  // int^inf ds / s
    }
    return out;
}

}  // namespace quadric
