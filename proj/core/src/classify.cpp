#include "quadric/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quadric {

namespace {

constexpr double kPi = 3.14159265358979323846;

double splitmix_u01(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

void push_unit(std::vector<std::vector<double>>& pts, std::vector<double> v) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    const double n = std::sqrt(n2);
    if (n == 0.0) return;
    for (double& x : v) x /= n;
    pts.push_back(std::move(v));
}

}  // namespace

std::vector<std::vector<double>> SphereSampler::base_points() const {
    std::vector<std::vector<double>> pts;
    std::uint64_t st = seed;
    const double jitter = (seed == 0) ? 0.0 : splitmix_u01(st);

    if (m == 1) {
        pts.push_back({1.0});
        pts.push_back({-1.0});
    } else if (m == 2) {
        pts.reserve(density + 4);
        for (int i = 0; i < density; ++i) {
            const double th = 2.0 * kPi * (i + jitter) / density;
            pts.push_back({std::cos(th), std::sin(th)});
        }
    } else if (m == 3) {
        // Fibonacci sphere.
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        pts.reserve(density + 6);
        for (int i = 0; i < density; ++i) {
            const double zc = 1.0 - 2.0 * (i + 0.5 + jitter) / density;
            const double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
            const double th = 2.0 * kPi * i / golden;
            pts.push_back({r * std::cos(th), r * std::sin(th), zc});
        }
    } else {
        // Product grid over spherical angles.
        const int per_axis = std::max(6, static_cast<int>(std::round(std::pow(double(density), 1.0 / (m - 1)))));
        std::vector<int> idx(m - 1, 0);
        while (true) {
            std::vector<double> ang(m - 1);
            for (int k = 0; k < m - 2; ++k) ang[k] = kPi * (idx[k] + 0.5 + jitter) / per_axis;
            ang[m - 2] = 2.0 * kPi * (idx[m - 2] + 0.5 + jitter) / per_axis;
            std::vector<double> v(m);
            double s = 1.0;
            for (int k = 0; k < m - 1; ++k) {
                v[k] = s * std::cos(ang[k]);
                s *= std::sin(ang[k]);
            }
            v[m - 1] = s;
            push_unit(pts, std::move(v));
            int k = m - 2;
            while (k >= 0 && ++idx[k] == per_axis) idx[k--] = 0;
            if (k < 0) break;
        }
    }
    // Coordinate directions carry the degenerate signatures; always include
    // them.
    for (int j = 0; j < m; ++j)
        for (double sg : {1.0, -1.0}) {
            std::vector<double> e(m, 0.0);
            e[j] = sg;
            pts.push_back(std::move(e));
        }
    return pts;
}

namespace {

struct Scan {
    std::vector<std::vector<double>> points;          // base + refined
    std::vector<std::pair<int, int>> sigs;            // (n+, n-) per point
    int base_count = 0;
};

std::pair<int, int> signature_at(const QuadricForm& Q, std::span<const double> alpha, double zero_tol) {
    const SpectralData s = spectral(Q, alpha, zero_tol);
    return {s.n_plus, s.n_minus};
}

std::vector<double> chord_midpoint(std::span<const double> a, std::span<const double> b) {
    std::vector<double> mid(a.size());
    double n2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mid[i] = 0.5 * (a[i] + b[i]);
        n2 += mid[i] * mid[i];
    }
    const double n = std::sqrt(n2);
    if (n < 1e-12) return {};  // antipodal pair, nothing between to refine
    for (double& x : mid) x /= n;
    return mid;
}

// Base scan plus bisection refinement between consecutive points whose
// signatures differ; refined points approach the boundary from both sides.
Scan scan_sphere(const QuadricForm& Q, const SphereSampler& sampler) {
    Scan scan;
    scan.points = sampler.base_points();
    scan.base_count = static_cast<int>(scan.points.size());
    scan.sigs.reserve(scan.points.size());
    for (const auto& p : scan.points) scan.sigs.push_back(signature_at(Q, p, sampler.zero_tol));

    const int nbase = scan.base_count;
    for (int i = 0; i + 1 < nbase; ++i) {
        if (scan.sigs[i] == scan.sigs[i + 1]) continue;
        std::vector<double> lo = scan.points[i], hi = scan.points[i + 1];
        auto sig_lo = scan.sigs[i];
        for (int step = 0; step < sampler.refine_steps; ++step) {
            std::vector<double> mid = chord_midpoint(lo, hi);
            if (mid.empty()) break;
            const auto sig_mid = signature_at(Q, mid, sampler.zero_tol);
            scan.points.push_back(mid);
            scan.sigs.push_back(sig_mid);
            if (sig_mid == sig_lo)
                lo = std::move(mid);
            else
                hi = std::move(mid);
        }
    }
    return scan;
}

}  // namespace

DegreeClassification classify_degree(const QuadricForm& Q, int q, const SphereSampler& sampler) {
    if (q < 0 || q > Q.n) throw std::invalid_argument("classify_degree: need 0 <= q <= n");
    const Scan scan = scan_sphere(Q, sampler);

    DegreeClassification dc;
    dc.q = q;
    dc.solvable = true;
    dc.hypoelliptic = true;
    dc.samples_used = static_cast<int>(scan.points.size());
    std::optional<std::vector<double>> hypo_witness;
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
        const auto [np, nm] = scan.sigs[i];
        if (np == q && nm == Q.n - q && dc.solvable) {
            dc.solvable = false;
            dc.witness = scan.points[i];
        }
        if (np <= q && nm <= Q.n - q && dc.hypoelliptic) {
            dc.hypoelliptic = false;
            if (!hypo_witness) hypo_witness = scan.points[i];
        }
    }
    if (dc.solvable && !dc.hypoelliptic) dc.witness = hypo_witness;
    return dc;
}

std::set<std::pair<int, int>> signature_set(const QuadricForm& Q, const SphereSampler& sampler) {
    const Scan scan = scan_sphere(Q, sampler);
    return {scan.sigs.begin(), scan.sigs.end()};
}

bool in_gamma(const SpectralData& S, const MultiIndex& L) {
    for (int j = 0; j < S.n(); ++j) {
        const int sg = S.sign_of(j);
        if (sg == 0) return false;
        const bool want_positive = L.contains(j + 1);
        if (want_positive != (sg > 0)) return false;
    }
    return true;
}

GammaReport gamma_report(const QuadricForm& Q, const MultiIndex& L, const SphereSampler& sampler) {
    GammaReport rep;
    rep.L = L;
    const auto base = sampler.base_points();
    int members = 0;
    for (const auto& p : base) {
        const SpectralData s = spectral(Q, p, sampler.zero_tol);
        if (in_gamma(s, L)) {
            ++members;
            if (rep.sample_points.size() < 32) rep.sample_points.push_back(p);
        }
    }
    rep.sphere_fraction_estimate = base.empty() ? 0.0 : static_cast<double>(members) / base.size();
    rep.nonempty_positive_measure = members > 0;
    rep.samples_used = static_cast<int>(base.size());

    if (!rep.nonempty_positive_measure) {
        // Signature changes can hide thin cones between base points.
        const Scan scan = scan_sphere(Q, sampler);
        for (int i = scan.base_count; i < static_cast<int>(scan.points.size()); ++i) {
            const SpectralData s = spectral(Q, scan.points[i], sampler.zero_tol);
            if (in_gamma(s, L)) {
                rep.nonempty_positive_measure = true;
                if (rep.sample_points.size() < 32) rep.sample_points.push_back(scan.points[i]);
            }
        }
        rep.samples_used = static_cast<int>(scan.points.size());
    }
    return rep;
}

std::vector<int> epsilon_signs(const SpectralData& S, const MultiIndex& L) {
    std::vector<int> eps;
    eps.reserve(S.nu);
    for (int j = 0; j < S.n(); ++j) {
        const int sg = S.sign_of(j);
        if (sg == 0) continue;
        eps.push_back(L.contains(j + 1) ? sg : -sg);
    }
    return eps;
}

}  // namespace quadric
