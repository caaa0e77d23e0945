// closed_forms.hpp — the preset quadric catalog and the independent
// closed-form kernels used to certify the generic evaluator: the Heisenberg
// log-formula kernels, the M3 double integral in (sigma, x), the M2 power
// law, and the product-Heisenberg Szegő kernel.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "quadric/levi.hpp"

namespace quadric {

struct Preset {
    std::string name;
    QuadricForm quadric;

    // "M1", "M2", "M3", "heisenberg:N", "product-heisenberg:N1,N2,..."
    static Preset by_name(const std::string& name);
    static Preset m1();
    static Preset m2();
    static Preset m3();
    static Preset heisenberg(int n);
    static Preset product_heisenberg(std::span<const int> blocks);
};

// Relative fundamental solution on the Heisenberg group H^n on functions
// (top = false) or (0,n)-forms (top = true); principal-branch logarithms
// taken as log(a) - log(b).
cx heisenberg_N(int n, bool top, std::span<const cx> z, double t);

// C * (|z|^4 + |t|^2)^{-3/2}.
double m2_power_law(std::span<const cx> z, std::span<const double> t, double C);

// The M3 kernel on functions as the two (sigma, x) double integrals, with
// sigma mapped to (0,1) by sigma = u/(1-u).
struct ClosedFormResult {
    cx value{};
    double abs_error = 0.0;
    bool converged = false;
};
ClosedFormResult m3_corollary(std::span<const cx> z, std::span<const double> t, double rel_tol = 1e-8);

// 1 / (pi^4 (|z1|^2 + i t1)^2 (|z2|^2 + i t2)^2).
cx product_heisenberg_szego(std::span<const cx> z, std::span<const double> t);

}  // namespace quadric
