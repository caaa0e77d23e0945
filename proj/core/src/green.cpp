#include "quadric/green.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

namespace quadric {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// b^{-p} for small positive integer p by repeated multiplication; no complex
// log, so no branch questions for the integer powers of the theorem.
cx inv_pow(cx b, int p) {
    const cx w = 1.0 / b;
    cx r = 1.0;
    for (int i = 0; i < p; ++i) r *= w;
    return r;
}

// log(1+w), accurate for small |w|.
cx clog1p(cx w) {
    if (std::abs(w) >= 0.25) return std::log(1.0 + w);
    cx term = w, sum = w;
    for (int k = 2; k < 48; ++k) {
        term *= -w;
        const cx add = term / static_cast<double>(k);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// exp(g)-1, accurate for small |g|.
cx cexpm1(cx g) {
    if (std::abs(g) >= 0.5) return std::exp(g) - 1.0;
    cx term = g, sum = g;
    for (int k = 2; k < 32; ++k) {
        term *= g / static_cast<double>(k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> abs_squares(std::span<const cx> z) {
    std::vector<double> a(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) a[j] = std::norm(z[j]);
    return a;
}

// ---------------------------------------------------------------------------
// Radial integral at a fixed direction
// ---------------------------------------------------------------------------

struct RadialCtx {
    int power = 1;                // n + m - 1
    std::vector<double> mu_nz;    // |mu_j^alpha| for nonzero slots
    std::vector<int> eps_nz;      // epsilon twist per nonzero slot
    std::vector<double> z2_nz;    // |z_j^alpha|^2 per nonzero slot
    double z2_zero = 0.0;         // sum over zero slots
    int n_zero = 0;
    double adt = 0.0;             // alpha . t
    bool gamma = false;           // alpha in Gamma_L: subtract the r -> 0 limit
    double decay = 0.0;           // exponential rate of the integrand at y -> inf
    // precomputed for the gamma branch
    double prod_mu = 1.0;
    cx b0{};
};

// The mathematical (open) Gamma_L condition on raw eigenvalue signs. The
// classification tolerance is the wrong test here: an eigenvalue just below
// it still selects between the subtracted bracket (whose slice grows like
// log(1/mu) toward the cone boundary, integrably in alpha) and the plain
// integral (which genuinely diverges once every twist is +1).
bool raw_gamma(const SpectralData& S, const MultiIndex& L) {
    for (int j = 0; j < S.n(); ++j) {
        if (S.mu[j] == 0.0) return false;
        if (L.contains(j + 1) != (S.mu[j] > 0.0)) return false;
    }
    return true;
}

RadialCtx make_radial_ctx(const SpectralData& S, const MultiIndex& L, std::span<const double> abs_z2,
                          double adt, int power, bool gamma) {
    RadialCtx c;
    c.power = power;
    c.adt = adt;
    c.gamma = gamma;
    // The integrand is continuous in mu down to 0, and tiny eigenvalues are
    // real information (the slice grows like log(1/mu) toward a degenerate
    // direction), so only exact zeros take the 1/|log r| limit.
    for (int j = 0; j < S.n(); ++j) {
        const double mu = S.mu[j];
        if (mu == 0.0) {
            c.z2_zero += abs_z2[j];
            ++c.n_zero;
            continue;
        }
        const int sg = mu > 0.0 ? 1 : -1;
        c.mu_nz.push_back(std::abs(mu));
        c.eps_nz.push_back(L.contains(j + 1) ? sg : -sg);
        c.z2_nz.push_back(abs_z2[j]);
    }
    if (gamma) {
        double a0 = 0.0;
        c.decay = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < c.mu_nz.size(); ++k) {
            c.prod_mu *= c.mu_nz[k];
            a0 += c.mu_nz[k] * c.z2_nz[k];
            c.decay = std::min(c.decay, c.mu_nz[k]);
        }
        c.b0 = cx(a0, -adt);
    } else {
        for (std::size_t k = 0; k < c.mu_nz.size(); ++k)
            if (c.eps_nz[k] != 1) c.decay += c.mu_nz[k];
    }
    return c;
}

// The r-integrals of Eqs. (2.2)/(2.4) in the variable y = |log r|:
// int_0^1 (...) dr/r = int_0^inf F(y) dy. Every factor is an exponential in
// y, so the r -> 0 tail (y -> inf) stays resolvable even when the smallest
// twist exponent |mu| is tiny near a degenerate direction; r-space nodes
// cannot reach that mass in double precision. Slots below the zero tolerance
// use the continuous mu -> 0 limit |mu|/(1-r^{|mu|}) -> 1/y, which is exactly
// the degenerate |log r|^{nu-n} variant of the no-Szegő formula.
cx radial_integrand_y(const RadialCtx& c, double y) {
    if (y < 1e-30) return cx{};  // integrand is O(y^{m-1}); the lost mass is ~1e-30
    if (!c.gamma) {
        double w = 1.0, a = 0.0;
        for (std::size_t k = 0; k < c.mu_nz.size(); ++k) {
            const double x = c.mu_nz[k];
            const double e = std::exp(-x * y);        // r^x
            const double den = -std::expm1(-x * y);   // 1 - r^x
            w *= (c.eps_nz[k] == 1 ? 1.0 : e) * x / den;
            a += x * (1.0 + e) / den * c.z2_nz[k];
        }
        if (c.n_zero > 0) {
            for (int i = 0; i < c.n_zero; ++i) w /= y;
            a += 2.0 * c.z2_zero / y;
        }
        return w * inv_pow(cx(a, -c.adt), c.power);
    }
    // Gamma_L branch: [prod |mu|/(1-r^{|mu|}) B(r)^{-p} - prod |mu| B(0)^{-p}],
    // evaluated as prod|mu| B0^{-p} (e^{g} - 1) so the y -> inf cancellation
    // is exact.
    double g_real = 0.0, da = 0.0;
    for (std::size_t k = 0; k < c.mu_nz.size(); ++k) {
        const double x = c.mu_nz[k];
        const double e = std::exp(-x * y);
        const double den = -std::expm1(-x * y);  // 1 - e, accurate for tiny x*y
        g_real -= std::log(den);
        da += x * (2.0 * e / den) * c.z2_nz[k];
    }
    const cx g = cx(g_real, 0.0) - static_cast<double>(c.power) * clog1p(da / c.b0);
    return c.prod_mu * inv_pow(c.b0, c.power) * cexpm1(g);
}

void quad_accumulate(QuadResult& total, const QuadResult& piece) {
    total.value += piece.value;
    total.abs_error += piece.abs_error;
    total.evals += piece.evals;
    total.converged = total.converged && piece.converged;
}

QuadResult radial_integral(const RadialCtx& c, const QuadratureSpec& spec) {
    TanhSinhOptions opt;
    opt.rel_tol = spec.rel_tol;
    opt.abs_tol = spec.abs_tol;
    opt.max_level = spec.max_level;

    QuadResult out;
    out.converged = true;

    // Head: y in (0, 1).
    quad_accumulate(out, tanh_sinh([&c](const QuadNode& nd) { return radial_integrand_y(c, nd.dist_a); },
                                   0.0, 1.0, opt));

    if (c.decay >= 0.05) {
        // Tail resolved by a single exponential substitution v = e^{-rate*y}.
        const double rate = std::min(c.decay, 1.0);
        quad_accumulate(out, tanh_sinh(
                                 [&c, rate](const QuadNode& nd) -> cx {
                                     const double v = nd.dist_a;
                                     const double y = -std::log(v) / rate;
                                     return radial_integrand_y(c, y) / (rate * v);
                                 },
                                 0.0, std::exp(-rate), opt));
        return out;
    }

    // Slow tail (near-degenerate direction): the integrand sits on a ~C/y
    // plateau out to the knee y ~ 1/decay before the exponential twist cuts
    // it off. Integrate the plateau in tau = log y, then the far tail with
    // the substitution matched to the true rate. For decay = 0 the plateau
    // runs to the double range; that integral is divergent when a single
    // 1/|log r| factor is present, which is reported via the flag.
    const double knee = (c.decay > 0.0) ? std::max(1.0, 1.0 / c.decay) : 1e300;
    const double tau_max = std::log(knee);
    if (tau_max > 0.0) {
        quad_accumulate(out, tanh_sinh(
                                 [&c](const QuadNode& nd) -> cx {
                                     const double y = std::exp(nd.x);
                                     return radial_integrand_y(c, y) * y;
                                 },
                                 0.0, tau_max, opt));
    }
    if (c.decay > 0.0) {
        quad_accumulate(out, tanh_sinh(
                                 [&c, knee](const QuadNode& nd) -> cx {
                                     // w = e^{-decay (y - knee)}; near w = 1 take
                                     // log(w) from the endpoint distance so y stays
                                     // accurate.
                                     const double logw =
                                         (nd.x < 0.5) ? std::log(nd.x) : std::log1p(-nd.dist_b);
                                     const double y = knee - logw / c.decay;
                                     return radial_integrand_y(c, y) / (c.decay * nd.x);
                                 },
                                 0.0, 1.0, opt));
    } else if (c.n_zero == 1) {
        out.converged = false;  // genuinely divergent r -> 0 tail
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sphere machinery
// ---------------------------------------------------------------------------

std::vector<double> eigenvalues_at(const QuadricForm& Q, double theta) {
    const double al[2] = {std::cos(theta), std::sin(theta)};
    const CMatrix a = assemble_directional(Q, al);
    return hermitian_eigen(a).values;
}

std::pair<int, int> signature_at(const QuadricForm& Q, std::span<const double> alpha, double zero_tol) {
    const SpectralData s = spectral(Q, alpha, zero_tol);
    return {s.n_plus, s.n_minus};
}

using VecFn = std::function<void(std::span<const double> alpha, std::span<cx> out)>;

double max_norm_vec(std::span<const cx> v) {
    double m = 0.0;
    for (const cx& c : v) m = std::max(m, std::abs(c));
    return m;
}

VecQuadResult integrate_panels_m2(const VecFn& g, int nvals, std::span<const double> breaks,
                                  const std::vector<bool>& active, const QuadratureSpec& spec,
                                  int monitor = -1) {
    TanhSinhOptions opt;
    opt.rel_tol = spec.rel_tol;
    opt.abs_tol = spec.abs_tol;
    opt.max_level = std::min(spec.max_level, 9);
    opt.monitor_components = monitor;

    VecQuadResult total;
    total.values.assign(nvals, cx{});
    total.converged = true;
    int budget = spec.max_panels;

    std::function<void(double, double, int)> run_panel = [&](double a, double b, int depth) {
        --budget;
        auto integrand = [&g](const QuadNode& nd, std::span<cx> out) {
            const double alpha[2] = {std::cos(nd.x), std::sin(nd.x)};
            g(alpha, out);
        };
        VecQuadResult r = tanh_sinh_vec(integrand, nvals, a, b, opt);
        // A non-converged panel whose residual is already below its share of
        // the target does not get split further.
        const double scale = max_norm_vec(total.values) + max_norm_vec(r.values);
        const double share = std::max(spec.abs_tol, spec.rel_tol * scale) * (b - a) / kTwoPi;
        if (!r.converged && r.abs_error > share && depth < 10 && budget > 0) {
            const double mid = 0.5 * (a + b);
            run_panel(a, mid, depth + 1);
            run_panel(mid, b, depth + 1);
            return;
        }
        for (int i = 0; i < nvals; ++i) total.values[i] += r.values[i];
        total.abs_error += r.abs_error;
        total.evals += r.evals;
        total.converged = total.converged && (r.converged || r.abs_error <= share);
    };

    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        if (!active[k]) continue;
        if (breaks[k + 1] - breaks[k] < 1e-13) continue;
        run_panel(breaks[k], breaks[k + 1], 0);
    }
    total.converged = total.converged && budget >= 0;
    return total;
}

// Product spherical coordinates for m >= 3: angles a_0..a_{m-2}, a_k in
// [0,pi] except the last in [0,2pi), measure prod_k sin^{m-2-k}(a_k). Every
// sweep is scanned with cheap spectral probes and cut where the eigenvalue
// sign structure changes (cone boundaries, epsilon switches, degeneracies):
// that is where the integrand jumps or kinks. active_pred, when given, marks
// directions where the integrand is identically zero so whole segments can
// be skipped; a global budget on innermost evaluations is the m >= 3 cost
// guard.
VecQuadResult integrate_product_sphere(const VecFn& g, int nvals, const QuadricForm& Q,
                                       const QuadratureSpec& spec, int monitor,
                                       const std::function<bool(const SpectralData&)>& active_pred) {
    const int m = Q.m;
    TanhSinhOptions opt;
    opt.rel_tol = spec.rel_tol;
    opt.abs_tol = spec.abs_tol;
    opt.max_level = std::min(spec.max_level, 8);
    opt.monitor_components = monitor;

    std::vector<double> angles(m - 1, 0.0);
    std::vector<double> alpha(m, 0.0);
    long budget = 500L * std::max(spec.max_panels, 1);
    bool budget_hit = false;

    auto direction = [&](double theta) {
        angles[m - 2] = theta;
        double s = 1.0;
        for (int i = 0; i < m - 1; ++i) {
            alpha[i] = s * std::cos(angles[i]);
            s *= std::sin(angles[i]);
        }
        alpha[m - 1] = s;
        double n2 = 0.0;
        for (double v : alpha) n2 += v * v;
        const double nn = std::sqrt(n2);
        for (double& v : alpha) v /= nn;
    };

    // Structural profile of the subtree below sweep k: concatenated
    // eigenvalue sign vectors over a fixed probe grid of the remaining
    // angles, plus activity flags. Changes along sweep k mark panel
    // boundaries.
    std::function<void(int, std::vector<int>&, bool&)> subtree_profile =
        [&](int k, std::vector<int>& sig, bool& any_active) {
            const double hi = (k == m - 2) ? kTwoPi : kPi;
            const int nprobe = (k == m - 2) ? 48 : 12;
            for (int i = 0; i < nprobe; ++i) {
                const double th = hi * (i + 0.37) / nprobe;  // off exact axes
                if (k == m - 2) {
                    direction(th);
                    const SpectralData S = spectral(Q, alpha, spec.zero_tol);
                    for (int j = 0; j < Q.n; ++j) sig.push_back(S.sign_of(j));
                    const bool act = !active_pred || active_pred(S);
                    sig.push_back(act ? 1 : 0);
                    any_active = any_active || act;
                } else {
                    angles[k] = th;
                    subtree_profile(k + 1, sig, any_active);
                }
            }
        };

    std::function<VecQuadResult(int)> level = [&](int k) -> VecQuadResult {
        const double hi = (k == m - 2) ? kTwoPi : kPi;
        const int sin_pow = m - 2 - k;
        auto integrand = [&, k, sin_pow](const QuadNode& nd, std::span<cx> out) {
            angles[k] = nd.x;
            double wt = 1.0;
            for (int i = 0; i < sin_pow; ++i) wt *= std::sin(nd.x);
            if (k == m - 2) {
                if (--budget < 0) {
                    budget_hit = true;
                    std::fill(out.begin(), out.end(), cx{});
                    return;
                }
                direction(nd.x);
                g(alpha, out);
            } else {
                const VecQuadResult inner = level(k + 1);
                std::copy(inner.values.begin(), inner.values.end(), out.begin());
            }
            for (auto& v : out) v *= wt;
        };

        auto profile_here = [&](double th, bool& act) {
            std::vector<int> sig;
            act = false;
            if (k == m - 2) {
                direction(th);
                const SpectralData S = spectral(Q, alpha, spec.zero_tol);
                for (int j = 0; j < Q.n; ++j) sig.push_back(S.sign_of(j));
                act = !active_pred || active_pred(S);
                sig.push_back(act ? 1 : 0);
            } else {
                angles[k] = th;
                subtree_profile(k + 1, sig, act);
            }
            return sig;
        };

        const int nscan = (k == m - 2) ? 96 : 32;
        std::vector<double> cuts{0.0};
        std::vector<bool> seg_active;
        bool act_prev = false;
        std::vector<int> prev = profile_here(0.0, act_prev);
        bool seg_has_activity = act_prev;
        for (int i = 1; i <= nscan; ++i) {
            const double th = hi * i / nscan;
            bool act_cur = false;
            const std::vector<int> cur = profile_here(th, act_cur);
            if (cur != prev) {
                double lo = hi * (i - 1) / nscan, up = th;
                std::vector<int> lo_sig = prev;
                for (int it = 0; it < 44; ++it) {
                    const double mid = 0.5 * (lo + up);
                    bool dummy = false;
                    if (profile_here(mid, dummy) == lo_sig)
                        lo = mid;
                    else
                        up = mid;
                }
                cuts.push_back(0.5 * (lo + up));
                seg_active.push_back(seg_has_activity);
                seg_has_activity = false;
                prev = cur;
            }
            seg_has_activity = seg_has_activity || act_cur;
        }
        seg_active.push_back(seg_has_activity);
        cuts.push_back(hi);  // cuts are discovered in ascending order

        VecQuadResult total;
        total.values.assign(nvals, cx{});
        total.converged = true;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            if (cuts[i + 1] - cuts[i] < 1e-13) continue;
            if (i < seg_active.size() && !seg_active[i]) continue;  // identically zero segment
            const VecQuadResult r = tanh_sinh_vec(integrand, nvals, cuts[i], cuts[i + 1], opt);
            for (int c = 0; c < nvals; ++c) total.values[c] += r.values[c];
            total.abs_error += r.abs_error;
            total.evals += r.evals;
            total.converged = total.converged && r.converged;
        }
        return total;
    };
    VecQuadResult out = level(0);
    out.converged = out.converged && !budget_hit;
    return out;
}

}  // namespace

const char* to_string(KernelFormula f) {
    switch (f) {
        case KernelFormula::N_NO_SZEGO: return "N_NO_SZEGO";
        case KernelFormula::N_WITH_SZEGO: return "N_WITH_SZEGO";
        case KernelFormula::SZEGO: return "SZEGO";
    }
    return "?";
}

cx FormCoefficients::coeff(const MultiIndex& k_prime) const {
    for (std::size_t i = 0; i < index_set.size(); ++i)
        if (index_set[i] == k_prime) return coeffs[i];
    throw std::invalid_argument("FormCoefficients: index not in I_q");
}

std::vector<double> sphere_breaks_m2(const QuadricForm& Q, const QuadratureSpec& spec) {
    if (Q.m != 2) throw std::invalid_argument("sphere_breaks_m2: requires m = 2");
    const int N = std::max(64, spec.scan_density);
    const int n = Q.n;

    std::vector<std::vector<double>> mu(N);
    std::vector<double> scale(N);
    for (int i = 0; i < N; ++i) {
        const double th = kTwoPi * i / N;
        const double al[2] = {std::cos(th), std::sin(th)};
        const CMatrix a = assemble_directional(Q, al);
        scale[i] = a.max_abs();
        mu[i] = hermitian_eigen(a).values;
    }
    const double gscale = *std::max_element(scale.begin(), scale.end());
    const double ztol = spec.zero_tol * std::max(gscale, 1e-300);
    const double cross = spec.crossing_split_tol * std::max(gscale, 1e-300);

    std::set<double> breaks{0.0, kTwoPi};
    auto theta_of = [N](int i) { return kTwoPi * i / N; };

    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < n; ++j)
            if (std::abs(mu[i][j]) <= ztol) breaks.insert(theta_of(i));
    }
    // Sign changes of each descending-sorted eigenvalue branch.
    for (int i = 0; i < N; ++i) {
        const int ip = (i + 1) % N;
        for (int j = 0; j < n; ++j) {
            const double a = mu[i][j], b = mu[ip][j];
            if ((a > 0.0) == (b > 0.0) || a == 0.0 || b == 0.0) continue;
            double lo = theta_of(i), hi = theta_of(i) + kTwoPi / N;
            double flo = a;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = eigenvalues_at(Q, mid)[j];
                if ((fm > 0.0) == (flo > 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            breaks.insert(std::fmod(0.5 * (lo + hi), kTwoPi));
        }
    }
    // Eigenvalue-crossing kinks: local minima of the adjacent-slot gap.
    if (n >= 2) {
        auto gap_at = [&](double th) {
            const auto v = eigenvalues_at(Q, th);
            double gmin = std::numeric_limits<double>::infinity();
            for (int j = 0; j + 1 < n; ++j) gmin = std::min(gmin, v[j] - v[j + 1]);
            return gmin;
        };
        std::vector<double> gap(N);
        for (int i = 0; i < N; ++i) {
            double gmin = std::numeric_limits<double>::infinity();
            for (int j = 0; j + 1 < n; ++j) gmin = std::min(gmin, mu[i][j] - mu[i][j + 1]);
            gap[i] = gmin;
        }
        for (int i = 0; i < N; ++i) {
            const int im = (i + N - 1) % N, ip = (i + 1) % N;
            if (!(gap[i] <= gap[im] && gap[i] <= gap[ip])) continue;
            if (gap[i] > 64.0 * cross) continue;
            double lo = theta_of(i) - kTwoPi / N, hi = theta_of(i) + kTwoPi / N;
            for (int it = 0; it < 80; ++it) {
                const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                if (gap_at(m1) < gap_at(m2))
                    hi = m2;
                else
                    lo = m1;
            }
            const double tmin = 0.5 * (lo + hi);
            if (gap_at(tmin) < cross) breaks.insert(std::fmod(tmin + kTwoPi, kTwoPi));
        }
    }
    // Merge near-duplicates.
    std::vector<double> out;
    for (double b : breaks) {
        if (!out.empty() && b - out.back() < 1e-12) continue;
        out.push_back(b);
    }
    if (std::abs(out.back() - kTwoPi) > 1e-12) out.push_back(kTwoPi);
    return out;
}

double a_alpha(const SpectralData& S, double r, std::span<const cx> z_alpha) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("a_alpha: requires 0 < r < 1");
    const double logr = std::log(r);
    double a = 0.0, z2_zero = 0.0;
    for (int j = 0; j < S.n(); ++j) {
        const double z2 = std::norm(z_alpha[j]);
        if (S.is_zero(j)) {
            z2_zero += z2;
            continue;
        }
        const double x = std::abs(S.mu[j]);
        const double p = std::exp(x * logr);
        a += x * (1.0 + p) / (-std::expm1(x * logr)) * z2;
    }
    if (z2_zero > 0.0) a += 2.0 * z2_zero / (-logr);
    return a;
}

namespace {

void validate_point(const QuadricForm& Q, const EvalPoint& P) {
    if (static_cast<int>(P.z.size()) != Q.n) throw std::invalid_argument("EvalPoint: z has wrong dimension");
    if (static_cast<int>(P.t.size()) != Q.m) throw std::invalid_argument("EvalPoint: t has wrong dimension");
    if (P.q < 0 || P.q > Q.n) throw std::invalid_argument("EvalPoint: need 0 <= q <= n");
    if (P.K.q() != P.q) throw std::invalid_argument("EvalPoint: |K| != q");
    if (!P.K.entries.empty() && P.K.entries.back() > Q.n)
        throw std::invalid_argument("EvalPoint: K indexes past n");
    double norm = 0.0;
    for (const cx& v : P.z) norm += std::norm(v);
    for (double v : P.t) norm += v * v;
    if (norm == 0.0) throw std::domain_error("EvalPoint: kernels are singular at the origin");
}

bool z_is_zero(const EvalPoint& P) {
    for (const cx& v : P.z)
        if (v != cx{}) return false;
    return true;
}

// Does any L in I_q have a nonempty Gamma_L, i.e. does the signature
// (q, n-q) occur? Decides which theorem branch labels the output.
bool detect_szego_case(const QuadricForm& Q, int q, const QuadratureSpec& spec,
                       const std::vector<double>* breaks_m2) {
    if (Q.m == 1) {
        for (double s : {1.0, -1.0}) {
            const double al[1] = {s};
            if (signature_at(Q, al, spec.zero_tol) == std::pair{q, Q.n - q}) return true;
        }
        return false;
    }
    if (Q.m == 2 && breaks_m2) {
        for (std::size_t k = 0; k + 1 < breaks_m2->size(); ++k) {
            const double mid = 0.5 * ((*breaks_m2)[k] + (*breaks_m2)[k + 1]);
            const double al[2] = {std::cos(mid), std::sin(mid)};
            if (signature_at(Q, al, spec.zero_tol) == std::pair{q, Q.n - q}) return true;
        }
        return false;
    }
    SphereSampler sampler;
    sampler.m = Q.m;
    sampler.density = spec.scan_density;
    sampler.zero_tol = spec.zero_tol;
    for (const auto& p : sampler.base_points())
        if (signature_at(Q, p, spec.zero_tol) == std::pair{q, Q.n - q}) return true;
    return false;
}

}  // namespace

FormCoefficients eval_green(const QuadricForm& Q, const EvalPoint& P, const QuadratureSpec& spec) {
    validate_point(Q, P);
    if (z_is_zero(P))
        throw std::domain_error(
            "eval_green: the pointwise (r, alpha) integral representation diverges on the z = 0 slice");

    const auto index_set = multi_indices(Q.n, P.q);
    const int nvals = static_cast<int>(index_set.size());
    const int power = Q.n + Q.m - 2 + 1;  // n+m-1

    std::vector<double> breaks;
    if (Q.m == 2) breaks = sphere_breaks_m2(Q, spec);
    const bool szego_case = detect_szego_case(Q, P.q, spec, Q.m == 2 ? &breaks : nullptr);

    QuadratureSpec inner = spec;
    inner.rel_tol = 0.02 * spec.rel_tol;
    // Radial slices span many decades across the sphere; they must converge
    // in relative terms or the absolute floor freezes the small ones early.
    inner.abs_tol = 1e-250;

    bool slices_ok = true;  // meaningful for the two-point sphere only

    // Component nvals carries the radial quadrature error along as an
    // integrand of its own, so it is weighted by the same sphere measure as
    // the values it belongs to.
    VecFn node_eval = [&](std::span<const double> alpha, std::span<cx> out) {
        const SpectralData S = spectral(Q, alpha, spec.zero_tol);
        std::fill(out.begin(), out.end(), cx{});
        if (Q.m >= 2) {
            // An exactly-zero eigenvalue marks a panel edge (a degenerate
            // slice of measure zero where the radial integral is the
            // divergent |log r| limit); the surrounding integrable log
            // singularity in alpha is resolved by the panel's open nodes.
            for (int j = 0; j < Q.n; ++j)
                if (S.mu[j] == 0.0) return;
        }
        const std::vector<cx> z_alpha = eigen_coordinates(S, P.z);
        const std::vector<double> a2 = abs_squares(z_alpha);
        const double adt = dot(alpha, P.t);
        for (const MultiIndex& L : index_set) {
            const bool gamma = raw_gamma(S, L);
            const RadialCtx ctx = make_radial_ctx(S, L, a2, adt, power, gamma);
            const QuadResult slice = radial_integral(ctx, inner);
            slices_ok = slices_ok && slice.converged;
            out[nvals] += slice.abs_error;  // |C M| <= 1
            const cx ckl = minor_coefficient(S, P.K, L);
            for (int i = 0; i < nvals; ++i) {
                const cx w = ckl * inverse_minor(S, L, index_set[i]);
                if (w != cx{}) out[i] += w * slice.value;
            }
        }
    };

    VecQuadResult sph;
    if (Q.m == 1) {
        sph.values.assign(nvals + 1, cx{});
        sph.converged = true;
        std::vector<cx> buf(nvals + 1);
        for (double s : {1.0, -1.0}) {
            const double al[1] = {s};
            node_eval(al, buf);
            for (int i = 0; i <= nvals; ++i) sph.values[i] += buf[i];
        }
        sph.converged = slices_ok;
    } else if (Q.m == 2 && spec.sphere_rule != SphereRule::PRODUCT_SPHERICAL) {
        std::vector<bool> active(breaks.size() - 1, true);
        sph = integrate_panels_m2(node_eval, nvals + 1, breaks, active, spec, nvals);
    } else {
        sph = integrate_product_sphere(node_eval, nvals + 1, Q, spec, nvals, nullptr);
    }

    const double c = std::pow(4.0, Q.n) * factorial(Q.n + Q.m - 2) / (2.0 * std::pow(kTwoPi, Q.n + Q.m));
    const double inner_err = std::abs(sph.values[nvals]);
    FormCoefficients out;
    out.index_set = index_set;
    out.coeffs.resize(nvals);
    out.abs_error.assign(nvals, 0.0);
    for (int i = 0; i < nvals; ++i) {
        out.coeffs[i] = c * sph.values[i];
        out.abs_error[i] = c * (sph.abs_error + inner_err);
    }
    out.formula_used = szego_case ? KernelFormula::N_WITH_SZEGO : KernelFormula::N_NO_SZEGO;
    out.converged = sph.converged;
    return out;
}

FormCoefficients eval_szego(const QuadricForm& Q, const EvalPoint& P, const QuadratureSpec& spec) {
    validate_point(Q, P);
    const auto index_set = multi_indices(Q.n, P.q);
    const int nvals = static_cast<int>(index_set.size());
    const int power = Q.n + Q.m;

    VecFn node_eval = [&](std::span<const double> alpha, std::span<cx> out) {
        std::fill(out.begin(), out.end(), cx{});
        const SpectralData S = spectral(Q, alpha, spec.zero_tol);
        if (S.n_plus != P.q || S.n_minus != Q.n - P.q) return;  // outside every Gamma_L
        const std::vector<cx> z_alpha = eigen_coordinates(S, P.z);
        const double adt = dot(alpha, P.t);
        for (const MultiIndex& L : index_set) {
            if (!in_gamma(S, L)) continue;
            double prod_mu = 1.0;
            double a0 = 0.0;
            for (int j = 0; j < Q.n; ++j) {
                prod_mu *= std::abs(S.mu[j]);
                a0 += std::abs(S.mu[j]) * std::norm(z_alpha[j]);
            }
            const cx scalar = prod_mu * inv_pow(cx(a0, -adt), power);
            const cx ckl = minor_coefficient(S, P.K, L);
            for (int i = 0; i < nvals; ++i) {
                const cx w = ckl * inverse_minor(S, L, index_set[i]);
                if (w != cx{}) out[i] += w * scalar;
            }
        }
    };

    VecQuadResult sph;
    if (Q.m == 1) {
        sph.values.assign(nvals, cx{});
        sph.converged = true;
        std::vector<cx> buf(nvals);
        for (double s : {1.0, -1.0}) {
            const double al[1] = {s};
            node_eval(al, buf);
            for (int i = 0; i < nvals; ++i) sph.values[i] += buf[i];
        }
    } else if (Q.m == 2 && spec.sphere_rule != SphereRule::PRODUCT_SPHERICAL) {
        const std::vector<double> breaks = sphere_breaks_m2(Q, spec);
        std::vector<bool> active(breaks.size() - 1, false);
        bool any = false;
        for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
            const double mid = 0.5 * (breaks[k] + breaks[k + 1]);
            const double al[2] = {std::cos(mid), std::sin(mid)};
            if (signature_at(Q, al, spec.zero_tol) == std::pair{P.q, Q.n - P.q}) {
                active[k] = true;
                any = true;
            }
        }
        if (any) {
            sph = integrate_panels_m2(node_eval, nvals, breaks, active, spec);
        } else {
            sph.values.assign(nvals, cx{});
            sph.converged = true;
        }
    } else {
        const int want_plus = P.q, want_minus = Q.n - P.q;
        auto gamma_dir = [want_plus, want_minus](const SpectralData& S) {
            return S.n_plus == want_plus && S.n_minus == want_minus;
        };
        sph = integrate_product_sphere(node_eval, nvals, Q, spec, -1, gamma_dir);
    }

    const double c = std::pow(4.0, Q.n) * factorial(Q.n + Q.m - 1) / std::pow(kTwoPi, Q.n + Q.m);
    FormCoefficients out;
    out.index_set = index_set;
    out.coeffs.resize(nvals);
    out.abs_error.assign(nvals, 0.0);
    for (int i = 0; i < nvals; ++i) {
        out.coeffs[i] = c * sph.values[i];
        out.abs_error[i] = c * sph.abs_error;
    }
    out.formula_used = KernelFormula::SZEGO;
    out.converged = sph.converged;
    return out;
}

namespace {

template <class F>
std::vector<FormCoefficients> run_batch(std::span<const EvalPoint> pts, int threads, F&& one) {
    std::vector<FormCoefficients> out(pts.size());
    if (threads <= 1 || pts.size() <= 1) {
        for (std::size_t i = 0; i < pts.size(); ++i) out[i] = one(pts[i]);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pts.size()) return;
            out[i] = one(pts[i]);
        }
    };
    std::vector<std::thread> pool;
    const int nt = std::min<int>(threads, static_cast<int>(pts.size()));
    pool.reserve(nt);
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace

std::vector<FormCoefficients> eval_green_batch(const QuadricForm& Q, std::span<const EvalPoint> pts,
                                               const QuadratureSpec& spec, int threads) {
    return run_batch(pts, threads, [&](const EvalPoint& p) { return eval_green(Q, p, spec); });
}

std::vector<FormCoefficients> eval_szego_batch(const QuadricForm& Q, std::span<const EvalPoint> pts,
                                               const QuadratureSpec& spec, int threads) {
    return run_batch(pts, threads, [&](const EvalPoint& p) { return eval_szego(Q, p, spec); });
}

QuadResult integrate_r(const std::function<cx(double, double)>& f, const QuadratureSpec& spec) {
    TanhSinhOptions opt;
    opt.rel_tol = spec.rel_tol;
    opt.abs_tol = spec.abs_tol;
    opt.max_level = spec.max_level;
    return tanh_sinh([&f](const QuadNode& nd) { return f(nd.x, nd.dist_b); }, 0.0, 1.0, opt);
}

QuadResult integrate_sphere(const std::function<cx(std::span<const double>)>& g, const QuadricForm& Q,
                            const QuadratureSpec& spec) {
    VecFn vg = [&g](std::span<const double> alpha, std::span<cx> out) { out[0] = g(alpha); };
    if (Q.m == 1) {
        QuadResult r;
        const double p[1] = {1.0}, n[1] = {-1.0};
        r.value = g(p) + g(n);
        r.converged = true;
        return r;
    }
    VecQuadResult vr;
    if (Q.m == 2 && spec.sphere_rule != SphereRule::PRODUCT_SPHERICAL) {
        const std::vector<double> breaks = sphere_breaks_m2(Q, spec);
        std::vector<bool> active(breaks.size() - 1, true);
        vr = integrate_panels_m2(vg, 1, breaks, active, spec);
    } else {
        vr = integrate_product_sphere(vg, 1, Q, spec, -1, nullptr);
    }
    return {vr.values[0], vr.abs_error, vr.evals, vr.converged};
}

RadialSlice green_radial_slice(const QuadricForm& Q, const MultiIndex& L, std::span<const cx> z,
                               std::span<const double> t, std::span<const double> alpha,
                               const QuadratureSpec& spec) {
    const SpectralData S = spectral(Q, alpha, spec.zero_tol);
    const std::vector<cx> z_alpha = eigen_coordinates(S, z);
    const std::vector<double> a2 = abs_squares(z_alpha);
    const double adt = dot(alpha, t);
    const bool gamma = raw_gamma(S, L);
    const RadialCtx ctx = make_radial_ctx(S, L, a2, adt, Q.n + Q.m - 1, gamma);
    const QuadResult r = radial_integral(ctx, spec);
    const double c = std::pow(4.0, Q.n) * factorial(Q.n + Q.m - 2) / (2.0 * std::pow(kTwoPi, Q.n + Q.m));
    return {c * r.value, c * r.abs_error, r.converged};
}

}  // namespace quadric
