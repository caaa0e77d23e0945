#include "quadric/job.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "quadric/classify.hpp"
#include "quadric/closed_forms.hpp"
#include "quadric/heat.hpp"
#include "quadric/verify.hpp"

namespace quadric {

namespace {

using json = nlohmann::ordered_json;

const std::map<std::string, Command>& command_names() {
    static const std::map<std::string, Command> names = {
        {"spectrum", Command::SPECTRUM}, {"classify", Command::CLASSIFY}, {"gamma", Command::GAMMA},
        {"szego", Command::SZEGO},       {"green", Command::GREEN},       {"heat", Command::HEAT},
        {"verify", Command::VERIFY},
    };
    return names;
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

cx parse_complex(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(where + ": complex values are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> parse_real_vector(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where + ": expected an array of numbers");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) fail(where + ": expected an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

QuadricForm parse_matrices(const json& j) {
    if (!j.is_array() || j.empty()) fail("quadric.matrices: expected a nonempty list of matrices");
    const int m = static_cast<int>(j.size());
    int n = -1;
    std::vector<CMatrix> mats;
    for (int k = 0; k < m; ++k) {
        const json& mj = j[k];
        if (!mj.is_array() || mj.empty()) fail("quadric.matrices: matrix " + std::to_string(k + 1) + " malformed");
        if (n < 0) n = static_cast<int>(mj.size());
        if (static_cast<int>(mj.size()) != n)
            fail("quadric.matrices: matrix " + std::to_string(k + 1) + " has inconsistent size");
        CMatrix a(n, n);
        for (int i = 0; i < n; ++i) {
            if (!mj[i].is_array() || static_cast<int>(mj[i].size()) != n)
                fail("quadric.matrices: matrix " + std::to_string(k + 1) + " is not square");
            for (int c = 0; c < n; ++c) a(i, c) = parse_complex(mj[i][c], "quadric.matrices");
        }
        mats.push_back(std::move(a));
    }
    try {
        return QuadricForm(n, m, std::move(mats));
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
}

MultiIndex parse_multi_index(const json& j) {
    if (!j.is_array()) fail("K: expected an array of indices");
    std::vector<int> ent;
    for (const auto& e : j) {
        if (!e.is_number_integer()) fail("K: expected integer indices");
        ent.push_back(e.get<int>());
    }
    try {
        return MultiIndex(ent);
    } catch (const std::invalid_argument& e) {
        fail(std::string("K: ") + e.what());
    }
}

void expand_grid(const json& j, int n, int m, std::vector<PointSpec>& out) {
    const auto mins = parse_real_vector(j.at("min"), "grid.min");
    const auto maxs = parse_real_vector(j.at("max"), "grid.max");
    if (!j.contains("count")) fail("grid: missing count");
    const json& cj = j.at("count");
    std::vector<int> counts;
    for (const auto& e : cj) counts.push_back(e.get<int>());
    const std::size_t axes = static_cast<std::size_t>(2 * n + m);
    if (mins.size() != axes || maxs.size() != axes || counts.size() != axes)
        fail("grid: min/max/count must each have 2n+m = " + std::to_string(axes) + " entries");
    long total = 1;
    for (int c : counts) {
        if (c < 1) fail("grid: counts must be >= 1");
        total *= c;
        if (total > 1000000) fail("grid: more than 1e6 points");
    }
    std::vector<int> idx(axes, 0);
    while (true) {
        std::vector<double> coords(axes);
        for (std::size_t a = 0; a < axes; ++a)
            coords[a] = (counts[a] == 1) ? mins[a]
                                         : mins[a] + (maxs[a] - mins[a]) * idx[a] / (counts[a] - 1);
        PointSpec p;
        p.z.resize(n);
        for (int k = 0; k < n; ++k) p.z[k] = cx(coords[2 * k], coords[2 * k + 1]);
        p.t.assign(coords.begin() + 2 * n, coords.end());
        out.push_back(std::move(p));
        int a = static_cast<int>(axes) - 1;
        while (a >= 0 && ++idx[a] == counts[a]) idx[a--] = 0;
        if (a < 0) break;
    }
}

}  // namespace

const char* to_string(Command c) {
    for (const auto& [name, cmd] : command_names())
        if (cmd == c) return name.c_str();
    return "?";
}

QuadricForm JobConfig::quadric() const {
    if (preset) return Preset::by_name(*preset).quadric;
    if (inline_form) return *inline_form;
    throw ConfigError("config: no quadric given");
}

JobConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed document: ") + e.what());
    }
    if (!j.is_object()) fail("top level must be an object");

    static const std::set<std::string> known = {"quadric", "command", "q", "K", "points", "grid",
                                                "directions", "lambda", "s_values", "sampler",
                                                "threads", "quadrature", "output", "suite"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) fail("unknown key '" + key + "'");

    JobConfig cfg;

    if (!j.contains("quadric") || !j["quadric"].is_object()) fail("missing quadric object");
    const json& qj = j["quadric"];
    const bool has_preset = qj.contains("preset");
    const bool has_mats = qj.contains("matrices");
    if (has_preset == has_mats) fail("quadric: give exactly one of preset / matrices");
    if (has_preset) {
        cfg.preset = qj["preset"].get<std::string>();
        try {
            (void)Preset::by_name(*cfg.preset);
        } catch (const std::exception& e) {
            fail(e.what());
        }
    } else {
        cfg.inline_form = parse_matrices(qj["matrices"]);
    }
    const QuadricForm Q = cfg.quadric();

    if (!j.contains("command")) fail("missing command");
    const std::string cname = j["command"].get<std::string>();
    const auto it = command_names().find(cname);
    if (it == command_names().end()) fail("unknown command '" + cname + "'");
    cfg.command = it->second;

    if (j.contains("q")) {
        cfg.q = j["q"].get<int>();
        if (cfg.q < 0 || cfg.q > Q.n) fail("q out of range 0.." + std::to_string(Q.n));
    }
    if (j.contains("K")) {
        cfg.K = parse_multi_index(j["K"]);
        if (!cfg.K.entries.empty() && cfg.K.entries.back() > Q.n) fail("K indexes past n");
        if (!j.contains("q")) cfg.q = cfg.K.q();
        if (cfg.K.q() != cfg.q) fail("|K| != q");
    } else if (cfg.q > 0) {
        std::vector<int> ent(cfg.q);
        for (int i = 0; i < cfg.q; ++i) ent[i] = i + 1;
        cfg.K = MultiIndex(ent);
    }

    if (j.contains("points")) {
        for (const auto& pj : j["points"]) {
            PointSpec p;
            if (!pj.is_object() || !pj.contains("z") || !pj.contains("t")) fail("points: each needs z and t");
            for (const auto& zj : pj["z"]) p.z.push_back(parse_complex(zj, "points.z"));
            p.t = parse_real_vector(pj["t"], "points.t");
            if (static_cast<int>(p.z.size()) != Q.n) fail("points: z has wrong dimension");
            if (static_cast<int>(p.t.size()) != Q.m) fail("points: t has wrong dimension");
            cfg.points.push_back(std::move(p));
        }
    }
    if (j.contains("grid")) expand_grid(j["grid"], Q.n, Q.m, cfg.points);

    const bool kernel_command = cfg.command == Command::SZEGO || cfg.command == Command::GREEN ||
                                cfg.command == Command::HEAT;
    if (kernel_command && cfg.points.empty()) fail("points (or grid) required for kernel commands");

    if (j.contains("directions"))
        for (const auto& dj : j["directions"])
            cfg.directions.push_back(parse_real_vector(dj, "directions"));
    if (j.contains("lambda")) cfg.lambda = parse_real_vector(j["lambda"], "lambda");
    if (j.contains("s_values")) cfg.s_values = parse_real_vector(j["s_values"], "s_values");
    if (cfg.command == Command::HEAT) {
        if (static_cast<int>(cfg.lambda.size()) != Q.m) fail("heat: lambda must have m entries");
        if (cfg.s_values.empty()) fail("heat: s_values required");
    }

    if (j.contains("sampler")) {
        const json& sj = j["sampler"];
        if (sj.contains("density")) cfg.sampler_density = sj["density"].get<int>();
        if (sj.contains("seed")) cfg.seed = sj["seed"].get<std::uint64_t>();
        if (cfg.sampler_density < 8) fail("sampler.density must be >= 8");
    }
    if (j.contains("threads")) {
        cfg.threads = j["threads"].get<int>();
        if (cfg.threads < 1) fail("threads must be >= 1");
    }
    if (j.contains("quadrature")) {
        const json& sj = j["quadrature"];
        QuadratureSpec& s = cfg.quadrature;
        if (sj.contains("rel_tol")) s.rel_tol = sj["rel_tol"].get<double>();
        if (sj.contains("abs_tol")) s.abs_tol = sj["abs_tol"].get<double>();
        if (sj.contains("max_panels")) s.max_panels = sj["max_panels"].get<int>();
        if (sj.contains("crossing_split_tol")) s.crossing_split_tol = sj["crossing_split_tol"].get<double>();
        if (sj.contains("scan_density")) s.scan_density = sj["scan_density"].get<int>();
        if (sj.contains("zero_tol")) s.zero_tol = sj["zero_tol"].get<double>();
        if (sj.contains("max_level")) s.max_level = sj["max_level"].get<int>();
        if (sj.contains("sphere_rule")) {
            const std::string r = sj["sphere_rule"].get<std::string>();
            if (r == "auto")
                s.sphere_rule = SphereRule::AUTO;
            else if (r == "two-point")
                s.sphere_rule = SphereRule::TWO_POINT;
            else if (r == "adaptive-angles")
                s.sphere_rule = SphereRule::ADAPTIVE_ANGLES;
            else if (r == "product-spherical")
                s.sphere_rule = SphereRule::PRODUCT_SPHERICAL;
            else
                fail("unknown sphere_rule '" + r + "'");
        }
        if (s.rel_tol <= 0.0 || s.abs_tol <= 0.0) fail("quadrature tolerances must be > 0");
    }
    if (j.contains("output")) {
        const json& oj = j["output"];
        if (oj.contains("path")) cfg.output_path = oj["path"].get<std::string>();
        if (oj.contains("format") && oj["format"].get<std::string>() != "csv")
            fail("output.format: only csv is supported");
    }
    if (j.contains("suite")) cfg.suite = j["suite"].get<std::string>();
    return cfg;
}

namespace {

json complex_json(cx v) { return json::array({v.real(), v.imag()}); }

}  // namespace

std::string emit_config(const JobConfig& cfg) {
    json j;
    json qj;
    if (cfg.preset)
        qj["preset"] = *cfg.preset;
    else if (cfg.inline_form) {
        json mats = json::array();
        for (const CMatrix& a : cfg.inline_form->A) {
            json rows = json::array();
            for (int i = 0; i < a.rows(); ++i) {
                json row = json::array();
                for (int c = 0; c < a.cols(); ++c) row.push_back(complex_json(a(i, c)));
                rows.push_back(std::move(row));
            }
            mats.push_back(std::move(rows));
        }
        qj["matrices"] = std::move(mats);
    }
    j["quadric"] = std::move(qj);
    j["command"] = to_string(cfg.command);
    j["q"] = cfg.q;
    if (cfg.K.q() > 0) j["K"] = cfg.K.entries;
    if (!cfg.points.empty()) {
        json pts = json::array();
        for (const PointSpec& p : cfg.points) {
            json pj;
            json zj = json::array();
            for (const cx& v : p.z) zj.push_back(complex_json(v));
            pj["z"] = std::move(zj);
            pj["t"] = p.t;
            pts.push_back(std::move(pj));
        }
        j["points"] = std::move(pts);
    }
    if (!cfg.directions.empty()) j["directions"] = cfg.directions;
    if (!cfg.lambda.empty()) j["lambda"] = cfg.lambda;
    if (!cfg.s_values.empty()) j["s_values"] = cfg.s_values;
    j["sampler"] = {{"density", cfg.sampler_density}, {"seed", cfg.seed}};
    j["threads"] = cfg.threads;
    const QuadratureSpec def;
    const QuadratureSpec& s = cfg.quadrature;
    json sj;
    sj["rel_tol"] = s.rel_tol;
    sj["abs_tol"] = s.abs_tol;
    sj["max_panels"] = s.max_panels;
    sj["crossing_split_tol"] = s.crossing_split_tol;
    sj["scan_density"] = s.scan_density;
    sj["zero_tol"] = s.zero_tol;
    sj["max_level"] = s.max_level;
    switch (s.sphere_rule) {
        case SphereRule::AUTO: sj["sphere_rule"] = "auto"; break;
        case SphereRule::TWO_POINT: sj["sphere_rule"] = "two-point"; break;
        case SphereRule::ADAPTIVE_ANGLES: sj["sphere_rule"] = "adaptive-angles"; break;
        case SphereRule::PRODUCT_SPHERICAL: sj["sphere_rule"] = "product-spherical"; break;
    }
    j["quadrature"] = std::move(sj);
    if (!cfg.output_path.empty()) j["output"] = {{"path", cfg.output_path}};
    if (cfg.command == Command::VERIFY) j["suite"] = cfg.suite;
    return j.dump(2) + "\n";
}

namespace {

// 17 significant digits: lossless binary64 round trip.
std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

void write_kernel_csv(std::ostream& out, const QuadricForm& Q, std::span<const PointSpec> pts,
                      std::span<const FormCoefficients> results) {
    for (int k = 1; k <= Q.n; ++k) out << "z_" << k << "_re,z_" << k << "_im,";
    for (int k = 1; k <= Q.m; ++k) out << "t_" << k << ",";
    out << "Kprime,value_re,value_im,abs_err,formula_used\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const PointSpec& p = pts[i];
        const FormCoefficients& fc = results[i];
        for (std::size_t k = 0; k < fc.index_set.size(); ++k) {
            for (const cx& v : p.z) out << num(v.real()) << ',' << num(v.imag()) << ',';
            for (double v : p.t) out << num(v) << ',';
            out << fc.index_set[k].to_string() << ',' << num(fc.coeffs[k].real()) << ','
                << num(fc.coeffs[k].imag()) << ',' << num(fc.abs_error[k]) << ','
                << to_string(fc.formula_used) << '\n';
        }
    }
}

int run_dispatch(const JobConfig& cfg, std::ostream& out) {
    if (cfg.command == Command::VERIFY) {
        std::vector<CheckResult> results;
        if (cfg.suite == "all") {
            results = run_acceptance();
        } else {
            std::istringstream ss(cfg.suite);
            std::string name;
            while (std::getline(ss, name, ',')) results.push_back(run_acceptance_check(name));
        }
        out << "check,pass,seconds,detail\n";
        bool all = true;
        for (const CheckResult& r : results) {
            out << r.name << ',' << (r.pass ? 1 : 0) << ',' << num(r.seconds) << ','
                << csv_quote(r.detail) << '\n';
            std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.seconds << " s) "
                      << r.detail << '\n';
            all = all && r.pass;
        }
        return all ? 0 : 3;
    }

    const QuadricForm Q = cfg.quadric();
    switch (cfg.command) {
        case Command::SPECTRUM: {
            std::vector<std::vector<double>> dirs = cfg.directions;
            if (dirs.empty()) {
                SphereSampler sampler{Q.m, cfg.sampler_density, cfg.seed};
                dirs = sampler.base_points();
            }
            for (int k = 1; k <= Q.m; ++k) out << "alpha_" << k << ",";
            for (int k = 1; k <= Q.n; ++k) out << "mu_" << k << ",";
            out << "nu,n_plus,n_minus\n";
            for (const auto& d : dirs) {
                const SpectralData S = spectral(Q, d, cfg.quadrature.zero_tol);
                for (double v : d) out << num(v) << ',';
                for (double v : S.mu) out << num(v) << ',';
                out << S.nu << ',' << S.n_plus << ',' << S.n_minus << '\n';
            }
            return 0;
        }
        case Command::CLASSIFY: {
            SphereSampler sampler{Q.m, cfg.sampler_density, cfg.seed};
            out << "q,solvable,hypoelliptic,witness,samples\n";
            for (int q = 0; q <= Q.n; ++q) {
                const DegreeClassification dc = classify_degree(Q, q, sampler);
                out << q << ',' << (dc.solvable ? 1 : 0) << ',' << (dc.hypoelliptic ? 1 : 0) << ',';
                if (dc.witness) {
                    std::string w;
                    for (std::size_t k = 0; k < dc.witness->size(); ++k) {
                        if (k) w += '|';
                        w += num((*dc.witness)[k]);
                    }
                    out << csv_quote(w);
                }
                out << ',' << dc.samples_used << '\n';
            }
            return 0;
        }
        case Command::GAMMA: {
            SphereSampler sampler{Q.m, cfg.sampler_density, cfg.seed};
            out << "L,nonempty,fraction,samples\n";
            for (const MultiIndex& L : multi_indices(Q.n, cfg.q)) {
                const GammaReport rep = gamma_report(Q, L, sampler);
                out << rep.L.to_string() << ',' << (rep.nonempty_positive_measure ? 1 : 0) << ','
                    << num(rep.sphere_fraction_estimate) << ',' << rep.samples_used << '\n';
            }
            return 0;
        }
        case Command::SZEGO:
        case Command::GREEN: {
            std::vector<EvalPoint> pts;
            for (const PointSpec& p : cfg.points) pts.push_back({p.z, p.t, cfg.q, cfg.K});
            const auto results = (cfg.command == Command::GREEN)
                                     ? eval_green_batch(Q, pts, cfg.quadrature, cfg.threads)
                                     : eval_szego_batch(Q, pts, cfg.quadrature, cfg.threads);
            write_kernel_csv(out, Q, cfg.points, results);
            for (const auto& r : results)
                if (!r.converged) return 3;
            return 0;
        }
        case Command::HEAT: {
            for (int k = 1; k <= Q.n; ++k) out << "z_" << k << "_re,z_" << k << "_im,";
            for (int k = 1; k <= Q.m; ++k) out << "lambda_" << k << ",";
            out << "s,L,value\n";
            for (const PointSpec& p : cfg.points) {
                const std::vector<double> alpha = [&] {
                    double nn = 0.0;
                    for (double v : cfg.lambda) nn += v * v;
                    std::vector<double> a = cfg.lambda;
                    for (double& v : a) v /= std::sqrt(nn);
                    return a;
                }();
                const SpectralData S = spectral(Q, alpha, cfg.quadrature.zero_tol);
                const std::vector<cx> z_alpha = eigen_coordinates(S, p.z);
                for (double s : cfg.s_values) {
                    TransformPoint tp{z_alpha, cfg.lambda, s, cfg.K};
                    const double v = heat_transform(Q, tp);
                    for (const cx& zv : p.z) out << num(zv.real()) << ',' << num(zv.imag()) << ',';
                    for (double lv : cfg.lambda) out << num(lv) << ',';
                    out << num(s) << ',' << cfg.K.to_string() << ',' << num(v) << '\n';
                }
            }
            return 0;
        }
        case Command::VERIFY:
            break;  // handled above
    }
    return 0;
}

}  // namespace

int run_job(const JobConfig& cfg, std::ostream& out) { return run_dispatch(cfg, out); }

int run_job(const JobConfig& cfg) {
    if (cfg.output_path.empty()) return run_job(cfg, std::cout);
    std::ofstream f(cfg.output_path);
    if (!f) throw ConfigError("config: cannot open output path '" + cfg.output_path + "'");
    return run_job(cfg, f);
}

}  // namespace quadric
