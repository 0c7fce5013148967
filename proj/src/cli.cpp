#include "pkdv/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "pkdv/checks.hpp"
#include "pkdv/kdv.hpp"
#include "pkdv/pde_oracle.hpp"

namespace pkdv::cli {

using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON keeps 17 digits too; non-finite values become null.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Writes to --out when given, otherwise to the command's stdout.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw ConfigError("cannot open output file: " + path);
            os_ = &file_;
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

// Settings from a config file, skipping every key whose flag was given.
void apply_config_file(const std::string& path, RunConfig& c, const CLI::App& sub) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    auto given = [&](const std::string& flag) {
        for (const CLI::Option* o : sub.get_options())
            if (o->check_lname(flag)) return o->count() > 0;
        return false;
    };
    try {
        for (auto& [key, v] : j.items()) {
            std::string flag = key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            if (given(flag)) continue;
            if (key == "rho") c.rho = v.get<double>();
            else if (key == "eps") c.eps = v.get<double>();
            else if (key == "x_min") c.x_min = v.get<double>();
            else if (key == "x_max") c.x_max = v.get<double>();
            else if (key == "nx") c.nx = v.get<int>();
            else if (key == "t") c.t = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
            else if (key == "h") c.h = v.get<double>();
            else if (key == "nodes") c.nodes = v.get<int>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "format") c.format = v.get<std::string>();
            else if (key == "suite") c.suite = v.get<std::string>();
            else if (key == "kind") c.kind = v.get<std::string>();
            else if (key == "u0") c.u0 = v.get<std::string>();
            else if (key == "T") c.T = v.get<double>();
            else if (key == "L") c.L = v.get<double>();
            else if (key == "N") c.N = v.get<int>();
            else if (key == "dt") c.dt = v.get<double>();
            else if (key == "dealias") c.dealias = v.get<bool>();
            else if (key == "a") c.a = v.get<std::string>();
            else if (key == "b") c.b = v.get<std::string>();
            else if (key == "window_min") c.window_min = v.get<double>();
            else if (key == "window_max") c.window_max = v.get<double>();
            else if (key == "tol") c.tol = v.get<double>();
            else throw ConfigError("unknown config key: " + key);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value in config file: ") + e.what());
    }
}

std::vector<double> x_grid(const RunConfig& c) {
    if (c.nx < 2) throw ConfigError("nx must be at least 2");
    if (!(c.x_min < c.x_max)) throw ConfigError("x-min must be smaller than x-max");
    std::vector<double> xs(static_cast<size_t>(c.nx));
    for (int i = 0; i < c.nx; ++i) xs[static_cast<size_t>(i)] = c.x_min + (c.x_max - c.x_min) * i / (c.nx - 1);
    return xs;
}

void check_common(const RunConfig& c) {
    if (!(c.rho > 0.0) || !std::isfinite(c.rho)) throw ConfigError("rho must be positive");
    if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
    if (c.eps && !(*c.eps > 0.0 && *c.eps < c.rho)) throw ConfigError("eps must lie in (0, rho)");
    for (double t : c.t)
        if (!(t >= 0.0)) throw ConfigError("t values must be >= 0");
}

Options options_of(const RunConfig& c) {
    Options o;
    if (c.h < 0.0) throw ConfigError("h must be >= 0");
    if (c.nodes < 0) throw ConfigError("nodes must be >= 0");
    o.h = c.h;
    o.nodes = c.nodes;
    return o;
}

// ---- solve ----

int cmd_solve(const RunConfig& c, std::ostream& out) {
    check_common(c);
    if (c.t.empty()) throw ConfigError("at least one --t is required");
    const std::vector<double> xs = x_grid(c);
    const Params p{c.rho};
    std::vector<Sample> rows;
    if (c.eps) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (double t : c.t)
            for (double x : xs) rows.push_back({x, t, u_eps(p, *c.eps, x, t), nan, nan, nan, nan, nan, nan});
    } else {
        rows = evaluate_grid(p, xs, c.t, options_of(c));
    }
    Sink sink(c.out, out);
    if (c.format == "csv") {
        *sink << "x,t,u,u0,u1,tau,logdet,est_error\n";
        for (const Sample& s : rows)
            *sink << num(s.x) << ',' << num(s.t) << ',' << num(s.u) << ',' << num(s.u0) << ',' << num(s.u1) << ','
                  << num(s.tau) << ',' << num(s.logdet) << ',' << num(s.est_error) << '\n';
    } else {
        json arr = json::array();
        for (const Sample& s : rows)
            arr.push_back({{"x", jnum(s.x)}, {"t", jnum(s.t)}, {"u", jnum(s.u)}, {"u0", jnum(s.u0)}, {"u1", jnum(s.u1)},
                           {"tau", jnum(s.tau)}, {"logdet", jnum(s.logdet)}, {"est_error", jnum(s.est_error)}});
        *sink << arr.dump(1) << '\n';
    }
    return 0;
}

// ---- verify ----

struct Check {
    std::string name;
    double tolerance;
    std::function<double()> measure;
};

std::vector<Check> suite_checks(const std::string& suite, double perturb_c) {
    using namespace checks;
    std::vector<Check> v;
    auto want = [&](const char* s) { return suite == "all" || suite == s; };
    if (want("scattering")) {
        v.push_back({"spectral_constants", 1e-12, spectral_constants});
        v.push_back({"unitarity", 1e-12, unitarity});
        v.push_back({"residue_T", 1e-8, residue_T});
        v.push_back({"residue_plus_minus", 1e-10, residue_plus_minus});
        v.push_back({"m_function", 1e-12, m_function_defect});
        v.push_back({"jost_residual", 1e-6, jost_residual});
    }
    if (want("hardy")) {
        v.push_back({"biorthogonality", 1e-12, biorthogonality});
        v.push_back({"rank_one_identity", 1e-12, rank_one_identity});
    }
    if (want("hankel")) {
        for (double x : {0.25, 1.0, 5.0})
            v.push_back({"logdet_vanishing_x" + num(x), 1e-6, [x] { return logdet_vanishing(x); }});
        v.push_back({"rank_one_closed_form", 1e-9, rank_one_closed_form});
        v.push_back({"logdet_stability", 1e-7, logdet_stability});
        v.push_back({"eps_two_path", 1e-8, [] { return eps_family().two_path; }});
        v.push_back({"eps_block_determinant", 1e-6, [] { return eps_family().block; }});
    }
    if (want("reconstruction")) {
        Options o;
        o.c_shift = perturb_c;
        auto rec = std::make_shared<std::optional<ReconstructionReport>>();
        auto get = [rec, o] {
            if (!*rec) *rec = reconstruction(1.25, o);
            return **rec;
        };
        v.push_back({"initial_data_right", 1e-6, [get] { return get().right; }});
        v.push_back({"initial_data_left", 5e-4, [get] { return get().left; }});
        v.push_back({"evenness", 5e-4, [get] { return get().evenness; }});
        v.push_back({"soliton", 1e-8, soliton_error});
    }
    if (want("oracle")) {
        v.push_back({"oracle_soliton", 1e-6, oracle_soliton});
        v.push_back({"oracle_formula", 5e-3, [] { return oracle_formula(8.0, 1.0).max_err; }});
    }
    return v;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
    static const std::vector<std::string> suites{"scattering", "hardy", "hankel", "reconstruction", "oracle", "all"};
    if (std::find(suites.begin(), suites.end(), c.suite) == suites.end()) throw ConfigError("unknown suite: " + c.suite);
    json arr = json::array();
    bool ok = true;
    for (const Check& ch : suite_checks(c.suite, c.perturb_c)) {
        auto start = std::chrono::steady_clock::now();
        std::string status;
        double measured = std::numeric_limits<double>::quiet_NaN();
        try {
            measured = ch.measure();
            status = measured <= ch.tolerance ? "pass" : "fail";
        } catch (const std::exception&) {
            status = "error";
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        ok = ok && status == "pass";
        arr.push_back({{"test", ch.name}, {"status", status}, {"measured", jnum(measured)},
                       {"tolerance", ch.tolerance}, {"seconds", secs}});
    }
    Sink sink(c.out, out);
    *sink << arr.dump(1) << '\n';
    return ok ? 0 : 1;
}

// ---- potential ----

int cmd_potential(const RunConfig& c, std::ostream& out) {
    check_common(c);
    if (c.t.size() > 1) throw ConfigError("potential takes a single --t");
    const double t = c.t.empty() ? 0.0 : c.t.front();
    const std::vector<double> xs = x_grid(c);
    const Params p{c.rho};
    std::function<double(double)> f;
    double singular_x = std::numeric_limits<double>::quiet_NaN();
    if (c.kind == "Q") {
        if (t != 0.0) throw ConfigError("kind Q is the initial datum; use t = 0");
        f = [p](double x) { return Q_closed(x, p); };
    } else if (c.kind == "Q_eps") {
        if (!c.eps) throw ConfigError("kind Q_eps needs --eps");
        if (t != 0.0) throw ConfigError("kind Q_eps is an initial datum; use t = 0");
        f = [p, e = *c.eps](double x) { return Q_eps(p, e, x); };
    } else if (c.kind == "positon") {
        f = [t](double x) { return positon(x, t); };
        singular_x = positon_root(t);
    } else if (c.kind == "soliton") {
        f = [t](double x) { return soliton(x, t); };
    } else {
        throw ConfigError("unknown kind: " + c.kind);
    }
    // The sample closest to a tau root is flagged, as are samples where the
    // evaluation itself reports a singularity.
    long nearest = -1;
    if (std::isfinite(singular_x)) {
        const double dx = xs[1] - xs[0];
        if (singular_x >= xs.front() - dx && singular_x <= xs.back() + dx)
            nearest = std::lround(std::clamp((singular_x - xs.front()) / dx, 0.0, static_cast<double>(xs.size() - 1)));
    }
    Sink sink(c.out, out);
    json arr = json::array();
    if (c.format == "csv") *sink << "x,t,value,singular\n";
    for (size_t i = 0; i < xs.size(); ++i) {
        double v;
        bool singular = static_cast<long>(i) == nearest;
        try {
            v = f(xs[i]);
        } catch (const SingularityError&) {
            v = std::numeric_limits<double>::quiet_NaN();
            singular = true;
        }
        if (c.format == "csv")
            *sink << num(xs[i]) << ',' << num(t) << ',' << num(v) << ',' << (singular ? 1 : 0) << '\n';
        else
            arr.push_back({{"x", jnum(xs[i])}, {"t", t}, {"value", jnum(v)}, {"singular", singular}});
    }
    if (c.format == "json") *sink << arr.dump(1) << '\n';
    return 0;
}

// ---- oracle ----

int cmd_oracle(const RunConfig& c, std::ostream& out) {
    check_common(c);
    if (!(c.T >= 0.0)) throw ConfigError("T must be >= 0");
    const Params p{c.rho};
    double L = c.L, default_L;
    int N = c.N, default_N;
    std::function<double(double)> init;
    if (c.u0 == "soliton") {
        default_L = 30.0;
        default_N = 1 << 12;
        init = [](double x) { return soliton(x, 0.0); };
    } else if (c.u0 == "Q") {
        default_L = 400.0;
        default_N = 1 << 15;
        init = [p](double x) { return Q_closed(x, p); };
    } else {
        throw ConfigError("unknown --u0: " + c.u0 + " (soliton or Q)");
    }
    if (L <= 0.0) L = default_L;
    if (N <= 0) N = default_N;
    PeriodicGrid g;
    try {
        g = PeriodicGrid(L, N);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    // The soliton is already negligible at the box edge; Q needs the taper.
    std::vector<double> u0 = c.u0 == "Q" ? sample_tapered(init, g) : [&] {
        std::vector<double> v = g.xs();
        for (double& x : v) x = init(x);
        return v;
    }();
    auto start = std::chrono::steady_clock::now();
    std::vector<Snapshot> snaps;
    try {
        snaps = evolve(u0, g, {c.dt, c.dealias}, {0.0, c.T});
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Snapshot& end = snaps.back();
    json rep = {{"u0", c.u0},
                {"T", c.T},
                {"L", L},
                {"N", N},
                {"dt", c.dt},
                {"dealias", c.dealias},
                {"mass_drift", std::abs(end.mass - snaps.front().mass)},
                {"energy_drift", std::abs(end.energy - snaps.front().energy)},
                {"seconds", secs}};
    if (c.u0 == "soliton") {
        double err = 0.0;
        for (int j = 0; j < N; ++j)
            err = std::max(err, std::abs(end.u[static_cast<size_t>(j)] - soliton(g.x(j), c.T)));
        rep["propagation_error"] = err;
    }
    if (!c.out.empty()) {
        Sink sink(c.out, out);
        *sink << "x,t,u\n";
        for (int j = 0; j < N; ++j) *sink << num(g.x(j)) << ',' << num(c.T) << ',' << num(end.u[static_cast<size_t>(j)]) << '\n';
    }
    out << rep.dump() << '\n';
    return 0;
}

// ---- compare ----

struct Field {
    std::map<double, std::vector<std::pair<double, double>>> by_t;  // t -> (x, u), x ascending
};

Field read_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read field file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty field file: " + path);
    std::vector<std::string> head;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) head.push_back(col);
    }
    auto col = [&](const std::string& name) {
        auto it = std::find(head.begin(), head.end(), name);
        if (it == head.end()) throw ConfigError(path + ": missing column " + name);
        return static_cast<size_t>(it - head.begin());
    };
    const size_t cx = col("x"), ct = col("t"), cu = col("u");
    Field f;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
        if (v.size() < head.size()) throw ConfigError(path + ": short row");
        f.by_t[v[ct]].push_back({v[cx], v[cu]});
    }
    for (auto& [t, rows] : f.by_t) std::sort(rows.begin(), rows.end());
    return f;
}

// Oracle output is a full periodic grid: uniform, power-of-two length.
std::optional<PeriodicGrid> as_periodic(const std::vector<std::pair<double, double>>& rows) {
    const size_t n = rows.size();
    if (n < 4 || (n & (n - 1)) != 0) return std::nullopt;
    const double dx = rows[1].first - rows[0].first;
    for (size_t i = 1; i < n; ++i)
        if (std::abs(rows[i].first - rows[i - 1].first - dx) > 1e-9 * (1.0 + std::abs(rows[i].first))) return std::nullopt;
    const double L = -rows[0].first;
    if (std::abs(n * dx - 2.0 * L) > 1e-9 * L) return std::nullopt;
    return PeriodicGrid(L, static_cast<int>(n));
}

int cmd_compare(const RunConfig& c, std::ostream& out) {
    if (c.a.empty() || c.b.empty()) throw ConfigError("compare needs --a and --b");
    if (!(c.window_min < c.window_max)) throw ConfigError("window-min must be below window-max");
    Field fa = read_field(c.a), fb = read_field(c.b);
    double worst = 0.0, sq = 0.0;
    size_t count = 0;
    for (const auto& [t, rows] : fa.by_t) {
        auto it = fb.by_t.find(t);
        if (it == fb.by_t.end()) continue;
        const auto& other = it->second;
        std::map<double, double> exact(other.begin(), other.end());
        std::optional<PeriodicGrid> grid;
        std::vector<double> samples;
        for (const auto& [x, u] : rows) {
            if (x < c.window_min || x > c.window_max) continue;
            double v;
            if (auto e = exact.find(x); e != exact.end()) {
                v = e->second;
            } else {
                // Mismatched grids: band-limited resampling of the periodic side.
                if (!grid) {
                    grid = as_periodic(other);
                    if (!grid) throw ConfigError("grids differ and --b is not a periodic oracle grid");
                    for (const auto& r : other) samples.push_back(r.second);
                }
                v = interpolate(samples, *grid, x);
            }
            double e = std::abs(u - v);
            worst = std::max(worst, e);
            sq += e * e;
            ++count;
        }
    }
    if (count == 0) throw ConfigError("no common samples inside the window");
    json rep = {{"max_err", worst},
                {"rms_err", std::sqrt(sq / static_cast<double>(count))},
                {"window", {c.window_min, c.window_max}},
                {"count", count},
                {"pass", worst <= c.tol}};
    Sink sink(c.out, out);
    *sink << rep.dump() << '\n';
    return worst <= c.tol ? 0 : 1;
}

void err_line(std::ostream& err, json j) { err << j.dump() << '\n'; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    std::string config_path;
    CLI::App app{"Closed-form KdV evolution of a Wigner-von Neumann type potential"};
    app.name("positon-kdv");
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print this help message and exit");  // --h is the contour height

    auto common = [&](CLI::App* s) {
        s->add_option("--rho", c.rho, "Coupling rho > 0");
        s->add_option("--config", config_path, "JSON config file; flags win on conflict");
        s->add_option("--out", c.out, "Output file (default stdout)");
        s->add_option("--format", c.format, "csv or json");
    };
    auto field = [&](CLI::App* s) {
        s->add_option("--x-min", c.x_min);
        s->add_option("--x-max", c.x_max);
        s->add_option("--nx", c.nx);
        s->add_option("--t", c.t, "Time (repeatable)")->take_all();
        s->add_option("--eps", c.eps, "Epsilon-family parameter");
    };

    CLI::App* solve = app.add_subcommand("solve", "Evaluate u = u0 + u1 on an (x, t) grid");
    common(solve);
    field(solve);
    solve->add_option("--h", c.h, "Contour height (0 = automatic)");
    solve->add_option("--nodes", c.nodes, "Approximate contour node count (0 = automatic)");

    CLI::App* verify = app.add_subcommand("verify", "Run a verification suite");
    common(verify);
    verify->add_option("--suite", c.suite, "scattering, hardy, hankel, reconstruction, oracle or all");
    verify->add_option("--perturb-c", c.perturb_c)->group("");

    CLI::App* potential = app.add_subcommand("potential", "Sample Q, Q_eps, the positon or the soliton");
    common(potential);
    field(potential);
    potential->add_option("--kind", c.kind, "Q, Q_eps, positon or soliton");

    CLI::App* oracle = app.add_subcommand("oracle", "Integrate the PDE directly");
    common(oracle);
    oracle->add_option("--u0", c.u0, "soliton or Q");
    oracle->add_option("--T", c.T);
    oracle->add_option("--L", c.L, "Half box length (0 = default for u0)");
    oracle->add_option("--N", c.N, "Grid points, power of two (0 = default)");
    oracle->add_option("--dt", c.dt);
    oracle->add_flag("--dealias", c.dealias);

    CLI::App* compare = app.add_subcommand("compare", "Compare two field CSV files");
    common(compare);
    compare->add_option("--a", c.a);
    compare->add_option("--b", c.b);
    compare->add_option("--window-min", c.window_min);
    compare->add_option("--window-max", c.window_max);
    compare->add_option("--tol", c.tol);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err_line(err, {{"error", "config"}, {"message", e.what()}});
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    try {
        if (!config_path.empty()) apply_config_file(config_path, c, *sub);
        if (c.command == "solve") return cmd_solve(c, out);
        if (c.command == "verify") return cmd_verify(c, out);
        if (c.command == "potential") return cmd_potential(c, out);
        if (c.command == "oracle") return cmd_oracle(c, out);
        return cmd_compare(c, out);
    } catch (const ConfigError& e) {
        err_line(err, {{"error", "config"}, {"message", e.what()}});
        return 2;
    } catch (const SingularityError& e) {
        err_line(err, {{"error", "singularity"}, {"message", e.what()}, {"x", jnum(e.x)}, {"t", jnum(e.t)}});
        return 3;
    } catch (const DomainError& e) {
        err_line(err, {{"error", "domain"}, {"message", e.what()}});
        return 2;
    } catch (const BlowUpError& e) {
        err_line(err, {{"error", "blow_up"}, {"message", e.what()}, {"last_stable_t", e.last_stable_t}});
        return 3;
    } catch (const std::exception& e) {
        err_line(err, {{"error", "numerical"}, {"message", e.what()}});
        return 3;
    }
}

}  // namespace pkdv::cli
