#include "quadric/closed_forms.hpp"

#include <cmath>
#include <stdexcept>

#include "quadric/quadrature.hpp"

namespace quadric {

namespace {

constexpr double kPi = 3.14159265358979323846;

CMatrix mat2(cx a00, cx a01, cx a10, cx a11) {
    CMatrix m(2, 2);
    m(0, 0) = a00;
    m(0, 1) = a01;
    m(1, 0) = a10;
    m(1, 1) = a11;
    return m;
}

}  // namespace

Preset Preset::m1() {
    // phi(z,z) = (|z1|^2, |z2|^2)
    return {"M1", QuadricForm(2, 2, {mat2(1, 0, 0, 0), mat2(0, 0, 0, 1)})};
}

Preset Preset::m2() {
    // phi(z,z) = (2 Re(z1 conj(z2)), |z1|^2 - |z2|^2)
    return {"M2", QuadricForm(2, 2, {mat2(0, 1, 1, 0), mat2(1, 0, 0, -1)})};
}

Preset Preset::m3() {
    // phi(z,z) = (2|z1|^2, 2 Re(z1 conj(z2)))
    return {"M3", QuadricForm(2, 2, {mat2(2, 0, 0, 0), mat2(0, 1, 1, 0)})};
}

Preset Preset::heisenberg(int n) {
    if (n < 1) throw std::invalid_argument("heisenberg preset: need n >= 1");
    return {"heisenberg:" + std::to_string(n), QuadricForm(n, 1, {CMatrix::identity(n)})};
}

Preset Preset::product_heisenberg(std::span<const int> blocks) {
    if (blocks.empty()) throw std::invalid_argument("product-heisenberg preset: need at least one block");
    int n = 0;
    for (int b : blocks) {
        if (b < 1) throw std::invalid_argument("product-heisenberg preset: block sizes must be >= 1");
        n += b;
    }
    const int m = static_cast<int>(blocks.size());
    std::vector<CMatrix> mats;
    int off = 0;
    for (int b : blocks) {
        CMatrix a(n, n);
        for (int i = 0; i < b; ++i) a(off + i, off + i) = 1.0;
        mats.push_back(std::move(a));
        off += b;
    }
    std::string name = "product-heisenberg:";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i) name += ',';
        name += std::to_string(blocks[i]);
    }
    return {name, QuadricForm(n, m, std::move(mats))};
}

Preset Preset::by_name(const std::string& name) {
    if (name == "M1") return m1();
    if (name == "M2") return m2();
    if (name == "M3") return m3();
    const auto colon = name.find(':');
    const std::string head = name.substr(0, colon);
    if (head == "heisenberg") {
        if (colon == std::string::npos) throw std::invalid_argument("preset: expected heisenberg:N");
        return heisenberg(std::stoi(name.substr(colon + 1)));
    }
    if (head == "product-heisenberg") {
        if (colon == std::string::npos)
            throw std::invalid_argument("preset: expected product-heisenberg:N1,N2,...");
        std::vector<int> blocks;
        std::string rest = name.substr(colon + 1);
        std::size_t pos = 0;
        while (pos != std::string::npos && pos < rest.size()) {
            const auto comma = rest.find(',', pos);
            blocks.push_back(std::stoi(rest.substr(pos, comma - pos)));
            pos = (comma == std::string::npos) ? comma : comma + 1;
        }
        return product_heisenberg(blocks);
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

cx heisenberg_N(int n, bool top, std::span<const cx> z, double t) {
    if (n < 1) throw std::invalid_argument("heisenberg_N: need n >= 1");
    if (static_cast<int>(z.size()) != n) throw std::invalid_argument("heisenberg_N: z has wrong dimension");
    double z2 = 0.0;
    for (const cx& v : z) z2 += std::norm(v);
    if (z2 == 0.0 && t == 0.0) throw std::domain_error("heisenberg_N: singular at the origin");

    // top = false:  c_n (|z|^2+it)^{-n} [ log((|z|^2+it)/(|z|^2-it)) - H_{n-1} ]
    // top = true:   the t -> -t mirror.
    const double sign = top ? -1.0 : 1.0;
    const cx a(z2, sign * t);   // |z|^2 + it (or conjugate)
    const cx b(z2, -sign * t);
    const cx logratio = std::log(a) - std::log(b);  // principal branches
    double harmonic = 0.0;
    for (int j = 1; j <= n - 1; ++j) harmonic += 1.0 / j;
    double fact = 1.0;  // (n-1)!
    for (int j = 2; j <= n - 1; ++j) fact *= j;
    const double c = std::pow(2.0, n - 2) * fact / std::pow(kPi, n + 1);
    cx apow = 1.0;
    for (int i = 0; i < n; ++i) apow *= a;
    return c / apow * (logratio - harmonic);
}

double m2_power_law(std::span<const cx> z, std::span<const double> t, double C) {
    double z2 = 0.0, t2 = 0.0;
    for (const cx& v : z) z2 += std::norm(v);
    for (double v : t) t2 += v * v;
    if (z2 == 0.0 && t2 == 0.0) throw std::domain_error("m2_power_law: singular at the origin");
    return C * std::pow(z2 * z2 + t2, -1.5);
}

namespace {

struct TermResult {
    cx value{};
    double abs_error = 0.0;
    bool converged = true;
};

// One of the two corollary terms: the (x, sigma) integrand at fixed sigma,
// built from the displayed rotated coordinates. tilde flips the sign of the
// sin(theta) branch. The inner quadrature error rides along as a second
// integrand component, so endpoint nodes with huge values but negligible
// weight do not poison the estimate.
TermResult m3_term(std::span<const cx> z, std::span<const double> t, bool tilde, double rel_tol) {
    TanhSinhOptions outer_opt;
    outer_opt.rel_tol = rel_tol;
    outer_opt.abs_tol = 1e-4 * rel_tol;
    outer_opt.monitor_components = 1;  // the error channel rides along unmonitored
    TanhSinhOptions inner_opt = outer_opt;
    inner_opt.rel_tol = 0.02 * rel_tol;
    inner_opt.abs_tol = 1e-250;  // inner integrals converge in relative terms:
                                 // their magnitude spans hundreds of decades
                                 // across the sigma range
    inner_opt.monitor_components = -1;

    auto outer = tanh_sinh_vec(
        [&](const QuadNode& nu, std::span<cx> out) {
            const double u = nu.x;
            const double one_minus_u = nu.dist_b;
            const double sg = u / one_minus_u;  // sigma in (0, inf)
            const double rq = std::sqrt(sg);
            const double den = std::sqrt(1.0 + sg);
            cx w1, w2;
            double tpart;
            if (!tilde) {
                w1 = (z[0] + rq * z[1]) / den;
                w2 = -(rq * z[0] - z[1]) / den;
                tpart = t[0] * (1.0 - sg) / 2.0 + t[1] * rq;
            } else {
                w1 = (-z[0] + rq * z[1]) / den;
                w2 = -(rq * z[0] + z[1]) / den;
                tpart = t[0] * (1.0 - sg) / 2.0 - t[1] * rq;
            }
            const double w1s = std::norm(w1), w2s = std::norm(w2);

            auto inner = tanh_sinh(
                [&](const QuadNode& nx) -> cx {
                    const double x = nx.x;
                    const double xc = nx.dist_b;            // 1 - x
                    const double lx = std::log1p(-xc);      // log x
                    const double xs = std::exp(sg * lx);    // x^sigma
                    const double d1 = xc;                   // 1 - x
                    const double ds = -std::expm1(sg * lx); // 1 - x^sigma
                    const double e1 = (1.0 + x) / d1;
                    const double e2 = (1.0 + xs) / ds;
                    const cx D(e1 * w1s + sg * e2 * w2s, -tpart);
                    const cx invD = 1.0 / D;
                    const cx v = invD * invD * invD;
                    if (v == cx{}) return cx{};  // underflow; avoid 0/denormal noise
                    return v / (d1 * ds);
                },
                0.0, 1.0, inner_opt);
            // sqrt(sg)(sg+1)^3, applied smallest-first so intermediates stay
            // finite while the true node value does.
            cx v = inner.value * rq;
            cx e = cx(inner.abs_error, 0.0) * rq;
            for (int rep = 0; rep < 3; ++rep) {
                v *= (sg + 1.0);
                e *= (sg + 1.0);
            }
            out[0] = v;
            out[1] = e;
        },
        2, 0.0, 1.0, outer_opt);
    TermResult r;
    r.value = outer.values[0];
    r.abs_error = outer.abs_error + std::abs(outer.values[1]);
    r.converged = outer.converged;
    return r;
}

}  // namespace

ClosedFormResult m3_corollary(std::span<const cx> z, std::span<const double> t, double rel_tol) {
    if (z.size() != 2 || t.size() != 2) throw std::invalid_argument("m3_corollary: needs z in C^2, t in R^2");
    double norm = std::norm(z[0]) + std::norm(z[1]) + t[0] * t[0] + t[1] * t[1];
    if (norm == 0.0) throw std::domain_error("m3_corollary: singular at the origin");

    // The (theta, r) -> (sigma, x) change of variables carries the generic
    // formula's constant to 4 (2 pi)^{-4} per term (see the tests, which pin
    // agreement with the generic evaluator).
    const double c = 4.0 / std::pow(2.0 * kPi, 4);
    const TermResult plain = m3_term(z, t, false, rel_tol);
    const TermResult tilde = m3_term(z, t, true, rel_tol);
    ClosedFormResult out;
    out.value = c * (plain.value + tilde.value);
    out.abs_error = c * (plain.abs_error + tilde.abs_error);
    out.converged = plain.converged && tilde.converged;
    return out;
}

cx product_heisenberg_szego(std::span<const cx> z, std::span<const double> t) {
    if (z.size() != 2 || t.size() != 2)
        throw std::invalid_argument("product_heisenberg_szego: needs z in C^2, t in R^2");
    for (int j = 0; j < 2; ++j)
        if (std::norm(z[j]) == 0.0 && t[j] == 0.0)
            throw std::domain_error("product_heisenberg_szego: singular at a componentwise origin");
    const cx a(std::norm(z[0]), t[0]);
    const cx b(std::norm(z[1]), t[1]);
    return 1.0 / (std::pow(kPi, 4) * a * a * b * b);
}

}  // namespace quadric
