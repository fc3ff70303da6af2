#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>

#include "driftev/asymptotics.hpp"
#include "driftev/bounds.hpp"
#include "driftev/cli.hpp"
#include "driftev/eigensolve1d.hpp"
#include "driftev/error.hpp"
#include "driftev/io.hpp"
#include "driftev/pde2d.hpp"
#include "driftev/sweep.hpp"
#include "driftev/wells.hpp"

namespace driftev {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct RunConfig {
    std::string command;
    std::string potential;
    double alpha = 2.0;
    double l = 1.0;
    double c = 1.0;
    double radius = 0.5;
    std::optional<double> p;
    std::vector<double> p_list;
    std::size_t n = 4001;
    std::size_t nx = 99, ny = 99;
    std::size_t m = 1;
    double tau = 5e-4;
    double t_end = 1.0;
    double rtol = 1e-10;
    std::optional<double> omega;
    bool richardson = false;
    std::string out = ".";
    std::uint64_t seed = 20240601;
    bool nx_given = false;
};

const std::set<std::string> kFieldIds = {"vortex", "twobump", "linear"};

json num_or_null(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

fs::path out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InvalidArgument("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw InvalidArgument("cannot open " + path.string() + " for writing");
    f << j.dump(2) << '\n';
}

std::string potential_1d_id(const RunConfig& cfg) { return cfg.potential.empty() ? "power" : cfg.potential; }
std::string field_id(const RunConfig& cfg) { return cfg.potential.empty() ? "vortex" : cfg.potential; }

PotentialSpec spec_1d(const RunConfig& cfg) {
    return PotentialSpec::from_id(potential_1d_id(cfg), cfg.alpha, cfg.c);
}

Potential1D potential_1d(const RunConfig& cfg) { return build_potential_1d(spec_1d(cfg), Grid1D(cfg.l, cfg.n)); }

FieldSpec field_spec(const RunConfig& cfg) { return FieldSpec::from_id(field_id(cfg), cfg.radius, cfg.c, 0.0); }

Grid2D grid_2d(const RunConfig& cfg) { return Grid2D(cfg.l, cfg.l, cfg.nx, cfg.ny); }

double single_p(const RunConfig& cfg, double fallback) {
    if (!cfg.p_list.empty()) throw InvalidArgument(cfg.command + " takes a single --p, not --p-list");
    return cfg.p.value_or(fallback);
}

std::vector<double> p_values(const RunConfig& cfg) {
    if (!cfg.p_list.empty()) {
        if (cfg.p) throw InvalidArgument("give either --p or --p-list, not both");
        return cfg.p_list;
    }
    if (!cfg.p) throw InvalidArgument(cfg.command + " needs --p or --p-list");
    return {*cfg.p};
}

json grid_json(const Grid1D& g) { return {{"l", g.l}, {"n", g.n}, {"h", g.h}}; }

json wells_json(const WellReport& r) {
    json arr = json::array();
    for (const Well& w : r.wells)
        arr.push_back({{"x", w.x},
                       {"y", w.y},
                       {"min_value", w.min_value},
                       {"barrier_value", w.barrier_value},
                       {"depth", w.depth},
                       {"basin_level", w.basin_level},
                       {"dies_into_boundary", w.dies_into_boundary}});
    json j = {{"wells", arr}, {"b0", r.b0}};
    j["deepest"] = r.deepest ? json(*r.deepest) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------

int cmd_eig1d(const RunConfig& cfg, std::ostream& out) {
    const double p = single_p(cfg, 0.0);
    if (cfg.m < 1) throw InvalidArgument("--m must be >= 1");
    const Potential1D pot = potential_1d(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const TridiagPencil pencil = assemble_pencil(pot, p);
    std::vector<EigenPair> pairs;
    if (cfg.m == 1)
        pairs.push_back(principal_eig(pencil, cfg.rtol));
    else
        pairs = eigs_bisection(pencil, cfg.m, cfg.rtol);
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = out_dir(cfg);
    std::vector<std::string> cols = {"x", "u1", "v1"};
    for (std::size_t k = 2; k <= pairs.size(); ++k) cols.push_back("u" + std::to_string(k));
    const std::vector<double> v1 = adjoint_eigenfunction(pairs[0], pot, p);
    CsvWriter csv(dir / "eigenfunction.csv", "eigenfunction", cols);
    for (std::size_t i = 0; i < pot.grid().n; ++i) {
        std::vector<double> row = {pot.grid().x(i), pairs[0].u[i], v1[i]};
        for (std::size_t k = 1; k < pairs.size(); ++k) row.push_back(pairs[k].u[i]);
        csv.row(row);
    }
    json eig = {{"p", p},
                {"lambda", pairs[0].lambda},
                {"residual", pairs[0].residual},
                {"n", pot.grid().n},
                {"rtol", cfg.rtol},
                {"potential", pot.name()},
                {"grid", grid_json(pot.grid())},
                {"iterations", pairs[0].iterations},
                {"scale_log", pencil.scale_log()},
                {"runtime_s", runtime}};
    if (pairs.size() > 1) {
        json arr = json::array();
        for (const EigenPair& e : pairs)
            arr.push_back({{"index", e.index}, {"lambda", e.lambda}, {"residual", e.residual}});
        eig["pairs"] = arr;
    }
    write_json(dir / "eigen.json", eig);
    out << json{{"command", "eig1d"}, {"p", p}, {"lambda", pairs[0].lambda}}.dump() << '\n';
    return kExitOk;
}

int cmd_asym(const RunConfig& cfg, std::ostream& out) {
    const std::vector<double> ps = p_values(cfg);
    const PotentialSpec spec = spec_1d(cfg);
    const Potential1D pot = potential_1d(cfg);
    const fs::path dir = out_dir(cfg);
    CsvWriter csv(dir / "asym.csv", "asymptotics", {"p", "log_lambda_product", "log_lambda_closed", "ratio"});
    json rows = json::array();
    bool unreliable = false;
    for (double p : ps) {
        const AsymptoticValue prod = product_formula(pot, p);
        unreliable = unreliable || prod.unreliable;
        std::optional<AsymptoticValue> closed;
        std::string closed_note;
        try {
            closed = closed_form(spec, cfg.l, p);
        } catch (const InvalidArgument& e) {
            closed_note = e.what();
        }
        const double lc = closed ? closed->log_lambda : std::numeric_limits<double>::quiet_NaN();
        const double ratio = closed ? std::exp(prod.log_lambda - lc) : std::numeric_limits<double>::quiet_NaN();
        csv.row({p, prod.log_lambda, lc, ratio});
        json r = {{"p", p}, {"log_lambda_product", prod.log_lambda}, {"log_lambda_closed", num_or_null(closed ? std::optional(lc) : std::nullopt)},
                  {"ratio", num_or_null(closed ? std::optional(ratio) : std::nullopt)}};
        if (closed) r["closed_form"] = closed->form;
        if (!closed_note.empty()) r["closed_form_note"] = closed_note;
        rows.push_back(r);
    }
    json j = {{"potential", pot.name()}, {"grid", grid_json(pot.grid())}, {"rows", rows},
              {"assumption_holds", !unreliable}};
    write_json(dir / "asym.json", j);
    out << json{{"command", "asym"}, {"rows", rows.size()}}.dump() << '\n';
    return kExitOk;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
    const std::vector<double> ps = p_values(cfg);
    const Potential1D pot = potential_1d(cfg);
    const WellReport wells = detect_wells(pot);
    const fs::path dir = out_dir(cfg);
    CsvWriter csv(dir / "bounds.csv", "bounds",
                  {"p", "log_upper_explicitC", "log_upper_quotient", "lower", "lambda_solver"});
    json rows = json::array();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double p : ps) {
        const BoundReport env = p2_envelope(pot, p);
        double lex = nan, lq = nan;
        json r = {{"p", p}, {"lower", env.lower}, {"envelope_upper", num_or_null(env.upper)}};
        if (wells.deepest) {
            try {
                WellBoundOptions wopt;
                wopt.omega = cfg.omega;
                const BoundReport wb = well_upper_bound(pot, wells.wells[*wells.deepest], p, wopt);
                lex = wb.well->log_upper_explicit;
                lq = wb.well->log_upper_quotient;
                r["omega"] = wb.well->omega;
                r["beta"] = wb.well->beta;
                r["epsilon"] = wb.well->epsilon;
                r["log_C"] = wb.well->log_C;
            } catch (const InvalidArgument& e) {
                r["well_bound_note"] = e.what();
            }
        }
        std::optional<double> lam;
        try {
            lam = principal_eig(assemble_pencil(pot, p), cfg.rtol).lambda;
        } catch (const OverflowGuard&) {
        }
        csv.row({p, lex, lq, env.lower, lam.value_or(nan)});
        r["log_upper_explicitC"] = num_or_null(lex);
        r["log_upper_quotient"] = num_or_null(lq);
        r["lambda_solver"] = num_or_null(lam);
        if (p > 0.0) {
            const NoDecayCertificate cert = no_decay_certificate(pot, p);
            r["no_decay_certified"] = cert.certified;
            r["no_decay_statement"] = cert.statement;
        }
        rows.push_back(r);
    }
    json j = {{"potential", pot.name()}, {"grid", grid_json(pot.grid())}, {"rows", rows},
              {"lambda_omega", lambda_omega(pot.grid())}, {"wells", wells_json(wells)}};
    write_json(dir / "bounds.json", j);
    out << json{{"command", "bounds"}, {"rows", rows.size()}}.dump() << '\n';
    return kExitOk;
}

int cmd_well(const RunConfig& cfg, std::ostream& out) {
    const bool two_d = kFieldIds.count(cfg.potential) > 0 || cfg.nx_given;
    WellReport rep;
    json meta;
    if (two_d) {
        const Field2D field = build_field_2d(field_spec(cfg), grid_2d(cfg));
        rep = detect_wells(field);
        meta = {{"field", field.name()}, {"nx", cfg.nx}, {"ny", cfg.ny}, {"l", cfg.l}};
    } else {
        const Potential1D pot = potential_1d(cfg);
        rep = detect_wells(pot);
        meta = {{"potential", pot.name()}, {"grid", grid_json(pot.grid())}};
    }
    const fs::path dir = out_dir(cfg);
    CsvWriter csv(dir / "wells.csv", "wells", {"index", "x", "y", "min_value", "barrier_value", "depth", "basin_level"});
    for (std::size_t i = 0; i < rep.wells.size(); ++i) {
        const Well& w = rep.wells[i];
        csv.row({static_cast<double>(i), w.x, w.y, w.min_value, w.barrier_value, w.depth, w.basin_level});
    }
    json j = wells_json(rep);
    j["input"] = meta;
    write_json(dir / "wells.json", j);
    out << json{{"command", "well"}, {"wells", rep.wells.size()}, {"b0", rep.b0}}.dump() << '\n';
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    if (cfg.p_list.size() < 3) throw InvalidArgument("sweep needs --p-list with at least 3 values");
    SweepOptions opt;
    opt.n = cfg.n;
    opt.rtol = cfg.rtol;
    opt.omega = cfg.omega;
    const SweepResult res = run_sweep(spec_1d(cfg), cfg.l, cfg.p_list, opt);
    const fs::path dir = out_dir(cfg);
    CsvWriter csv(dir / "sweep.csv", "sweep",
                  {"p", "lambda_solver", "log_lambda_asym", "log_upper", "lower", "rate_running"});
    for (const SweepRow& r : res.rows)
        csv.row({r.p, r.lambda_solver.value_or(std::numeric_limits<double>::quiet_NaN()), r.log_lambda_asym,
                 r.log_upper, r.lower, r.rate_running});
    json fit = {{"applicable", res.fit.applicable},
                {"rows_used", res.fit.rows_used},
                {"b0_detected", res.b0_detected}};
    if (res.fit.applicable) {
        fit["fitted_b0"] = res.fit.b0;
        fit["half_width"] = num_or_null(res.fit.half_width);
        fit["gamma"] = res.fit.gamma;
        fit["abs_diff"] = std::abs(res.fit.b0 - res.b0_detected);
        fit["rel_diff"] = res.b0_detected > 0.0 ? json(std::abs(res.fit.b0 - res.b0_detected) / res.b0_detected)
                                                : json(nullptr);
    } else {
        fit["fitted_b0"] = "not-applicable";
        fit["reason"] = res.fit.reason;
    }
    write_json(dir / "fit.json", fit);
    out << json{{"command", "sweep"}, {"fit", fit}}.dump() << '\n';
    return kExitOk;
}

void write_profile(const fs::path& path, const char* schema, const Profile& prof, const char* col) {
    const Grid2D& g = prof.grid;
    CsvWriter csv(path, schema, {"x1", "x2", col});
    for (std::size_t j = 0; j < g.full_y(); ++j)
        for (std::size_t i = 0; i < g.full_x(); ++i) csv.row({g.x(i), g.y(j), prof.values[g.at(i, j)]});
}

void write_section(const fs::path& path, const Section& s) {
    CsvWriter csv(path, "section", {"s", "x1", "x2", "u"});
    for (std::size_t k = 0; k < s.s.size(); ++k) csv.row({s.s[k], s.x[k], s.y[k], s.u[k]});
}

int cmd_evolve2d(const RunConfig& cfg, std::ostream& out) {
    const double p = single_p(cfg, 0.0);
    const FieldSpec spec = field_spec(cfg);
    const Grid2D grid = grid_2d(cfg);
    DecayOptions opt;
    opt.t_end = cfg.t_end;
    opt.tau = cfg.tau;
    const fs::path dir = out_dir(cfg);

    const Field2D field = build_field_2d(spec, grid);
    json fit;
    DecayRun run;
    if (cfg.richardson) {
        RichardsonDecay rd = decay_richardson(spec, grid, p, opt);
        fit["richardson"] = {{"coarse", rd.coarse}, {"fine", rd.fine}, {"extrapolated", rd.extrapolated},
                             {"error_estimate", rd.error_estimate}};
        run = std::move(rd.coarse_run);
    } else {
        run = estimate_decay(field, p, opt);
    }
    fit["p"] = p;
    fit["field"] = field.name();
    fit["nx"] = grid.nx;
    fit["ny"] = grid.ny;
    fit["h"] = grid.hx;
    fit["tau"] = cfg.tau;
    fit["t_end"] = cfg.t_end;
    fit["rate"] = run.fit.rate_l2;
    fit["rate_l2"] = run.fit.rate_l2;
    fit["rate_max"] = run.fit.rate_max;
    fit["lambda_est"] = cfg.richardson ? fit["richardson"]["extrapolated"] : json(run.fit.rate_l2);
    fit["window"] = {run.fit.window_start, run.fit.window_end};
    fit["plateau_flag"] = run.fit.plateau_flag;
    fit["plateau_drift"] = run.fit.plateau_drift;
    write_json(dir / "fit.json", fit);

    CsvWriter decay(dir / "decay.csv", "decay", {"t", "log_l2", "log_max"});
    for (const DecaySample& s : run.fit.samples) decay.row({s.t, s.log_l2, s.log_max});
    const Profile prof = extract_profile(run.state);
    write_profile(dir / "profile.csv", "profile", prof, "u");
    write_section(dir / "section_x2_0.csv", sample_segment(prof, -grid.lx, 0.0, grid.lx, 0.0));
    if (field_id(cfg) == "twobump") write_section(dir / "section_line.csv", sample_line(prof, 6.0, -10.0, 1.0));
    write_profile(dir / "adjoint_profile.csv", "adjoint-profile", adjoint_profile(run.state, field, p), "v");
    out << json{{"command", "evolve2d"}, {"p", p}, {"rate", run.fit.rate_l2}, {"lambda_est", fit["lambda_est"]}}.dump()
        << '\n';
    return kExitOk;
}

int cmd_lifespan(const RunConfig& cfg, std::ostream& out) {
    const double p = single_p(cfg, 0.0);
    const Potential1D pot = potential_1d(cfg);
    const fs::path dir = out_dir(cfg);
    double log_lambda;
    std::string source;
    try {
        const EigenPair pair = principal_eig(assemble_pencil(pot, p), cfg.rtol);
        log_lambda = std::log(pair.lambda);
        source = "solver";
        const std::vector<double> v1 = adjoint_eigenfunction(pair, pot, p);
        CsvWriter csv(dir / "v1.csv", "adjoint-eigenfunction", {"x", "v1"});
        for (std::size_t i = 0; i < v1.size(); ++i) csv.row({pot.grid().x(i), v1[i]});
    } catch (const OverflowGuard&) {
        log_lambda = product_formula(pot, p).log_lambda;
        source = "asymptotic";
    }
    auto safe_exp = [](double v) { return std::abs(v) < 700.0 ? json(std::exp(v)) : json(nullptr); };
    json j = {{"p", p},
              {"potential", pot.name()},
              {"source", source},
              {"log_lambda", log_lambda},
              {"lambda", safe_exp(log_lambda)},
              {"log_lifespan", -log_lambda},
              {"lifespan", safe_exp(-log_lambda)},
              {"log_half_life", std::log(std::numbers::ln2) - log_lambda},
              {"half_life", safe_exp(std::log(std::numbers::ln2) - log_lambda)}};
    write_json(dir / "lifespan.json", j);
    out << j.dump() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// selfcheck

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

int cmd_selfcheck(const RunConfig& cfg, std::ostream& out) {
    std::vector<Check> checks;
    auto add = [&](std::string name, bool pass, std::string detail) {
        checks.push_back({std::move(name), pass, std::move(detail)});
    };
    auto str = [](double v) { return format_double(v); };

    {
        const Potential1D pot = build_potential_1d(PotentialSpec::from_id("const", 2.0, 0.0), Grid1D(1.0, 4001));
        const double lam = principal_eig(assemble_pencil(pot, 0.0)).lambda;
        const double ref = std::numbers::pi * std::numbers::pi / 4.0;
        add("dirichlet-baseline", std::abs(lam / ref - 1.0) <= 1e-5, "lambda = " + str(lam));
    }
    {
        const Potential1D pot = build_potential_1d(PotentialSpec::from_id("power", 2.0), Grid1D(1.0, 801));
        const TridiagPencil P = assemble_pencil(pot, 20.0);
        const std::vector<EigenPair> e = eigs_bisection(P, 3);
        bool positive = std::all_of(e[0].u.begin(), e[0].u.end(), [](double v) { return v > 0.0; });
        std::size_t changes = 0;
        for (std::size_t i = 1; i < e[1].u.size(); ++i)
            if ((e[1].u[i] > 0) != (e[1].u[i - 1] > 0)) ++changes;
        add("principal-positivity", positive, "min u1 > 0");
        add("second-mode-sign-change", changes >= 1, std::to_string(changes) + " sign changes");
        const double q = rayleigh_quotient(P, e[0].u);
        add("eigs-ordered", e[0].lambda < e[1].lambda && e[1].lambda <= e[2].lambda,
            str(e[0].lambda) + " < " + str(e[1].lambda));
        add("rayleigh-consistency", std::abs(q / e[0].lambda - 1.0) < 1e-6, "quotient " + str(q));
    }
    {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> U(-50.0, 50.0);
        const std::size_t n = 200;
        const double h = 2.0 / static_cast<double>(n + 1);
        auto lam = [&](const std::vector<double>& q) {
            Eigen::VectorXd d(n), s(n - 1);
            for (std::size_t i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = 2.0 / (h * h) + q[i];
            s.setConstant(-1.0 / (h * h));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(d, s, Eigen::EigenvaluesOnly);
            return es.eigenvalues()[0];
        };
        bool ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> q1(n), q2(n);
            for (auto& v : q1) v = U(rng);
            for (auto& v : q2) v = U(rng);
            const Interval iv = comparison_bounds(q1, q2, lam(q2));
            ok = ok && iv.contains(lam(q1), 1e-9 * (1.0 + std::abs(iv.hi)));
        }
        add("comparison-theorem", ok, "20 random pairs, seed " + std::to_string(cfg.seed));
    }
    {
        bool finite = true;
        for (const char* id : {"power", "sine", "quartic"}) {
            const double l = std::string(id) == "quartic" ? 2.0 : 1.0;
            const Potential1D pot = build_potential_1d(PotentialSpec::from_id(id, 2.0), Grid1D(l, 1001));
            finite = finite && std::isfinite(product_formula(pot, 1e6).log_lambda);
        }
        add("log-domain-safety", finite, "product formula finite at p = 1e6");
    }
    {
        const Field2D field = build_field_2d(FieldSpec::vortex(0.5), Grid2D(1.0, 1.0, 21, 21));
        DecayOptions a, b;
        a.t_end = b.t_end = 0.05;
        a.window_fraction = b.window_fraction = 0.5;
        a.renorm_every = 1;
        b.renorm_every = 0;
        // without renormalization the solution must stay inside [0, max u0]
        bool bounded = true;
        b.observer = [&](const State2D& s) {
            for (double v : s.u) bounded = bounded && v >= -1e-12 && v <= 1.0 + 1e-12;
        };
        const DecayRun ra = estimate_decay(field, 10.0, a);
        const DecayRun rb = estimate_decay(field, 10.0, b);
        double diff = 0.0;
        for (std::size_t k = 0; k < ra.fit.samples.size(); ++k)
            diff = std::max(diff, std::abs(ra.fit.samples[k].log_l2 - rb.fit.samples[k].log_l2));
        add("renormalization-invariance", diff <= 1e-10, "max |delta log L2| = " + str(diff));
        add("maximum-principle", bounded, "0 <= u <= max u0 on every step");
    }
    {
        const Potential1D pot = build_potential_1d(PotentialSpec::from_id("const", 2.0, 1.0), Grid1D(1.0, 401));
        const NoDecayCertificate c = no_decay_certificate(pot, 5.0);
        const WellReport w = detect_wells(pot);
        add("no-decay-consistency", c.certified && w.wells.empty(), c.statement);
    }

    json arr = json::array();
    bool all = true;
    for (const Check& c : checks) {
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        all = all && c.pass;
        out << (c.pass ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  (" + c.detail + ")") << '\n';
    }
    const fs::path dir = out_dir(cfg);
    write_json(dir / "selfcheck.json", json{{"seed", cfg.seed}, {"checks", arr}, {"all_pass", all}});
    if (!all) throw NumericalError("selfcheck: at least one invariant failed");
    return kExitOk;
}

// ---------------------------------------------------------------------------

void report(std::ostream& err, int code, const std::string& type, const std::string& message) {
    json j = {{"error", {{"code", code},
                         {"kind", code == kExitConfig ? "config" : "numerical"},
                         {"type", type},
                         {"message", message}}}};
    err << j.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Principal eigenvalues of -Lap + p a.grad with gradient drift", "driftev"};
    app.set_config("--config", "", "flat key = value config file; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--potential", cfg.potential,
                   "1D: power|const|sine|quartic; 2D: vortex|twobump|const|linear");
    app.add_option("--alpha", cfg.alpha, "power-law exponent (>= 1)");
    app.add_option("--l", cfg.l, "half-length of the interval or square")->check(CLI::PositiveNumber);
    app.add_option("--c", cfg.c, "constant drift value");
    app.add_option("--radius", cfg.radius, "vortex radius")->check(CLI::PositiveNumber);
    app.add_option("--p", cfg.p, "penalty parameter");
    app.add_option("--p-list", cfg.p_list, "list of penalty parameters")->delimiter(',');
    app.add_option("--n", cfg.n, "interior nodes (1D)")->check(CLI::Range(3ul, 100000000ul));
    auto* nx = app.add_option("--nx", cfg.nx, "interior nodes along x1 (2D)")->check(CLI::Range(3ul, 100000ul));
    app.add_option("--ny", cfg.ny, "interior nodes along x2 (2D)")->check(CLI::Range(3ul, 100000ul));
    app.add_option("--m", cfg.m, "number of eigenpairs (eig1d)");
    app.add_option("--tau", cfg.tau, "time step")->check(CLI::PositiveNumber);
    app.add_option("--t-end", cfg.t_end, "final time")->check(CLI::PositiveNumber);
    app.add_option("--rtol", cfg.rtol, "relative eigenvalue tolerance")->check(CLI::PositiveNumber);
    app.add_option("--omega", cfg.omega, "exponent of the well bound");
    app.add_flag("--richardson", cfg.richardson, "also run at (h/2, tau/2) and extrapolate (evolve2d)");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--seed", cfg.seed, "seed for randomized checks");

    using Handler = int (*)(const RunConfig&, std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
        {"eig1d", "principal (or first m) eigenpairs of the 1D problem", cmd_eig1d},
        {"asym", "product-formula and closed-form asymptotics", cmd_asym},
        {"bounds", "envelope and potential-well bounds", cmd_bounds},
        {"well", "potential wells by sublevel persistence", cmd_well},
        {"sweep", "p sweep with decay-exponent fit", cmd_sweep},
        {"evolve2d", "2D parabolic decay and eigenfunction profiles", cmd_evolve2d},
        {"lifespan", "lifespan 1/lambda and half-life", cmd_lifespan},
        {"selfcheck", "run the invariant suite", cmd_selfcheck},
    };
    for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report(err, kExitConfig, e.get_name(), e.what());
        return kExitConfig;
    }
    cfg.nx_given = nx->count() > 0;
    for (const auto& [name, help, fn] : commands) {
        if (!app.got_subcommand(name)) continue;
        cfg.command = name;
        try {
            return fn(cfg, out);
        } catch (const InvalidArgument& e) {
            report(err, kExitConfig, "InvalidArgument", e.what());
            return kExitConfig;
        } catch (const OverflowGuard& e) {
            report(err, kExitNumerical, "OverflowGuard", e.what());
            return kExitNumerical;
        } catch (const ConvergenceError& e) {
            report(err, kExitNumerical, "ConvergenceError", e.what());
            return kExitNumerical;
        } catch (const std::exception& e) {
            report(err, kExitNumerical, "NumericalError", e.what());
            return kExitNumerical;
        }
    }
    report(err, kExitConfig, "MissingSubcommand", "no subcommand given");
    return kExitConfig;
}

}  // namespace driftev
