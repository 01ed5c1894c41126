#include "kfp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include "kfp/fourier.hpp"
#include "kfp/io.hpp"

namespace kfp {

void to_json(nlohmann::json& j, const ConstantsTable& t) {
    j = nlohmann::json{{"version", t.version},
                       {"c_hat", t.c_hat},
                       {"n_norm", t.n_norm},
                       {"u_l2", t.u_l2},
                       {"kappa_radius", t.kappa_radius},
                       {"mu_small", t.mu_small},
                       {"kappa_min", t.kappa_min},
                       {"growth_k0", t.growth_k0},
                       {"growth_k1", t.growth_k1},
                       {"growth_k2", t.growth_k2},
                       {"growth_value", t.growth_value},
                       {"samples", t.samples},
                       {"seed", t.seed},
                       {"note", t.note}};
}

void from_json(const nlohmann::json& j, ConstantsTable& t) {
    j.at("version").get_to(t.version);
    j.at("c_hat").get_to(t.c_hat);
    j.at("n_norm").get_to(t.n_norm);
    j.at("u_l2").get_to(t.u_l2);
    j.at("kappa_radius").get_to(t.kappa_radius);
    j.at("mu_small").get_to(t.mu_small);
    j.at("kappa_min").get_to(t.kappa_min);
    j.at("growth_k0").get_to(t.growth_k0);
    j.at("growth_k1").get_to(t.growth_k1);
    j.at("growth_k2").get_to(t.growth_k2);
    j.at("growth_value").get_to(t.growth_value);
    j.at("samples").get_to(t.samples);
    j.at("seed").get_to(t.seed);
    j.at("note").get_to(t.note);
}

} // namespace kfp

namespace kfp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

json default_config() {
    json c;
    c["domain"] = {{"d", 1}, {"Nx", 64}, {"Kv", 31}, {"L", std::numbers::pi}};
    c["time"] = {{"T", 1.0}, {"Nt", 600}}; // dt well under the transport stability threshold at Nx 64
    c["scheme"] = "imex-euler";
    c["potential"] = {{"kind", "wrapped-gaussian"}, {"param", 0.5}};
    c["alpha"] = {{"kind", "gaussian"}, {"sigma", 0.6}, {"amplitude", 0.5}, {"value", 0.0}};
    c["initial"] = {{"kind", "cos-density"},
                    {"amplitude", 0.1},
                    {"tag", 0},
                    {"zero_locked", false}};
    c["control"] = {{"kind", "zero"}, {"value", 0.0}, {"lo", -1.0}, {"hi", 1.0},
                    {"values", json::array()}};
    c["picard"] = {{"tol", 1e-9}, {"max_iter", 50}, {"constants_file", ""}};
    c["optimize"] = {{"beta", 1e-3},
                     {"max_iters", 200},
                     {"tol_factor", 1e-6},
                     {"constants_file", ""},
                     {"target_control",
                      {{"kind", "sin"}, {"value", 0.6}, {"lo", -1.0}, {"hi", 1.0},
                       {"values", json::array()}}}};
    c["particles"] = {{"m_values", json::array({1000, 10000, 100000})},
                      {"replicates", 8},
                      {"dt", 5e-3},
                      {"noise", true},
                      {"force", "spectral"}};
    c["verify"] = {{"identity_samples", 100},
                   {"inequality_samples", 200},
                   {"constants_samples", 128}};
    return c;
}

json load_config(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open config: " + p.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + p.string());
    if (!j.is_object()) throw ConfigError("config root must be an object: " + p.string());
    return j;
}

void apply_override(json& cfg, const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key.path=value: " + spec);
    std::string path = spec.substr(0, eq);
    std::string raw = spec.substr(eq + 1);

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw; // unquoted strings stay strings

    json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        auto dot = path.find('.', pos);
        std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (key.empty()) throw ConfigError("empty key in override: " + spec);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
        node = &(*node)[key];
        pos = dot + 1;
    }
}

namespace {

void merge_into(json& base, const json& user, const std::string& path) {
    for (const auto& [k, v] : user.items()) {
        if (!base.contains(k))
            throw ConfigError("unknown config key: " + path + k);
        if (base[k].is_object() && v.is_object()) {
            merge_into(base[k], v, path + k + ".");
        } else if (base[k].is_object() != v.is_object()) {
            throw ConfigError("wrong shape for config key: " + path + k);
        } else {
            base[k] = v;
        }
    }
}

} // namespace

json merge_config(const json& user) {
    json merged = default_config();
    merge_into(merged, user, "");
    return merged;
}

namespace {

ControlSignal control_from_json(const json& jc, const TimeGrid& grid) {
    std::string kind = jc.at("kind").get<std::string>();
    double lo = jc.at("lo").get<double>();
    double hi = jc.at("hi").get<double>();
    ControlSignal u = ControlSignal::zero(grid, lo, hi);
    if (kind == "zero") {
        // keep zeros
    } else if (kind == "constant") {
        double v = jc.at("value").get<double>();
        for (auto& e : u.u) e = v;
    } else if (kind == "sin") {
        double v = jc.at("value").get<double>();
        for (int n = 0; n < grid.Nt; ++n)
            u.u[static_cast<std::size_t>(n)] =
                v * std::sin(std::numbers::pi * (n + 0.5) / grid.Nt);
    } else if (kind == "values") {
        auto vals = jc.at("values").get<std::vector<double>>();
        if (vals.size() != static_cast<std::size_t>(grid.Nt))
            throw ConfigError("control.values must have time.Nt entries");
        u.u = vals;
    } else {
        throw ConfigError("unknown control kind: " + kind);
    }
    try {
        u.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("control: ") + e.what());
    }
    return u;
}

SpectralField cos_profile(const DomainSpec& dom, std::size_t kf, double amplitude) {
    SpectralField y(dom);
    std::size_t ns = dom.n_spatial();
    std::vector<std::complex<double>> buf(ns);
    for (std::size_t tf = 0; tf < ns; ++tf) {
        auto tp = dom.tpair(tf);
        buf[tf] = amplitude * std::cos(std::numbers::pi * dom.xnode(tp[0]) / dom.L);
    }
    spatial_to_coeff(dom, buf.data(), 1);
    for (std::size_t tf = 0; tf < ns; ++tf) y.at(kf, tf) = buf[tf];
    y.project_real();
    return y;
}

SpectralField initial_from_json(const json& ji, const DomainSpec& dom, std::uint64_t seed) {
    std::string kind = ji.at("kind").get<std::string>();
    if (kind == "zero") return SpectralField(dom);
    double amp = ji.at("amplitude").get<double>();
    if (kind == "cos-density") return cos_profile(dom, 0, amp);
    if (kind == "cos-momentum") return cos_profile(dom, dom.kflat(1, 0), amp);
    if (kind == "random") {
        auto tag = ji.at("tag").get<std::uint64_t>();
        bool locked = ji.at("zero_locked").get<bool>();
        SpectralField y = random_field(dom, seed, tag, locked);
        double n = y.norm_Y();
        if (n > 1e-300) y *= amp / n;
        return y;
    }
    throw ConfigError("unknown initial kind: " + kind);
}

ControlShape alpha_from_json(const json& ja, const DomainSpec& dom) {
    std::string kind = ja.at("kind").get<std::string>();
    if (kind == "gaussian")
        return make_alpha_gaussian(dom, ja.at("sigma").get<double>(),
                                   ja.at("amplitude").get<double>());
    if (kind == "constant") return make_alpha_constant(dom, ja.at("value").get<double>());
    if (kind == "zero") return make_alpha_constant(dom, 0.0);
    throw ConfigError("unknown alpha kind: " + kind);
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_manifest(const fs::path& out, const std::string& verb, const Instance& inst,
                    std::vector<std::string> files, const json& report) {
    std::sort(files.begin(), files.end());
    json outs = json::array();
    for (const auto& name : files) {
        fs::path p = out / name;
        json o;
        o["file"] = name;
        o["bytes"] = static_cast<std::uint64_t>(fs::file_size(p));
        o["fnv1a"] = hex64(io::fnv1a_file(p));
        outs.push_back(o);
    }
    json m;
    m["format"] = "kfp-manifest/1";
    m["verb"] = verb;
    m["seed"] = inst.seed;
    m["config"] = inst.cfg;
    m["outputs"] = outs;
    m["report"] = report;
    io::write_text(out / "manifest.json", m.dump(2) + "\n");
}

json smallness_json(const SmallnessCheck& s) {
    return json{{"evaluated", s.evaluated},
                {"c_hat", s.c_hat},
                {"n_norm", s.n_norm},
                {"u_l2", s.u_l2},
                {"kappa", s.kappa},
                {"data_size", s.data_size},
                {"data_limit", s.data_limit},
                {"contraction", s.contraction},
                {"data_ok", s.data_ok},
                {"contraction_ok", s.contraction_ok},
                {"certified", s.certified}};
}

ConstantsTable load_constants(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open constants file: " + p.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("constants file is not valid JSON: " + p.string());
    try {
        return j.get<ConstantsTable>();
    } catch (const json::exception& e) {
        throw ConfigError("bad constants file " + p.string() + ": " + e.what());
    }
}

} // namespace

Instance build_instance(const json& merged, std::uint64_t seed) {
    Instance inst;
    inst.cfg = merged;
    inst.seed = seed;
    try {
        const json& jd = merged.at("domain");
        inst.dom.d = jd.at("d").get<int>();
        inst.dom.Nx = jd.at("Nx").get<int>();
        inst.dom.Kv = jd.at("Kv").get<int>();
        inst.dom.L = jd.at("L").get<double>();
        inst.dom.validate();

        inst.grid.T = merged.at("time").at("T").get<double>();
        inst.grid.Nt = merged.at("time").at("Nt").get<int>();
        inst.grid.validate();

        std::string sch = merged.at("scheme").get<std::string>();
        if (sch == "imex-euler")
            inst.scheme = Scheme::imex_euler;
        else if (sch == "imex-trapezoid")
            inst.scheme = Scheme::imex_trapezoid;
        else
            throw ConfigError("unknown scheme: " + sch);

        inst.U = make_potential(inst.dom,
                                potential_kind_from_string(
                                    merged.at("potential").at("kind").get<std::string>()),
                                merged.at("potential").at("param").get<double>());
        inst.alpha = alpha_from_json(merged.at("alpha"), inst.dom);
        inst.y0 = initial_from_json(merged.at("initial"), inst.dom, seed);
        inst.u = control_from_json(merged.at("control"), inst.grid);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return inst;
}

int run_simulate(const Instance& inst, const fs::path& out) {
    StepOptions opts;
    opts.scheme = inst.scheme;
    opts.store_states = true;
    Trajectory tr = direct_march(inst.y0, inst.grid, inst.U, inst.alpha, inst.u, opts);

    io::write_text(out / "trajectory.csv", io::trajectory_csv(tr));
    io::write_text(out / "control.csv", io::control_csv(inst.u));
    io::write_field(out / "state_final.bin", tr.states.back());

    json rep;
    rep["blew_up"] = tr.blew_up;
    rep["blowup_step"] = tr.blowup_step;
    rep["cfl"] = cfl_number(inst.dom, inst.grid.dt());
    rep["cfl_warning"] = tr.cfl_warning;
    rep["norm"] = {{"triple", tr.triple_norm()},
                   {"linf_Y", tr.linf_Y()},
                   {"l2_Vv", tr.l2_Vv()}};
    rep["mass_re_final"] = tr.states.back().at(0, 0).real();
    write_manifest(out, "simulate", inst,
                   {"trajectory.csv", "control.csv", "state_final.bin"}, rep);
    return tr.blew_up ? kExitRuntime : kExitOk;
}

int run_picard(const Instance& inst, const fs::path& out) {
    const json& jp = inst.cfg.at("picard");
    double tol = jp.at("tol").get<double>();
    int max_iter = jp.at("max_iter").get<int>();
    std::string cfile = jp.at("constants_file").get<std::string>();
    ConstantsTable table;
    const ConstantsTable* ct = nullptr;
    if (!cfile.empty()) {
        table = load_constants(cfile);
        ct = &table;
    }

    StepOptions opts;
    opts.store_states = true;
    PicardReport rep = picard_solve(inst.y0, inst.grid, inst.U, inst.alpha, inst.u, opts,
                                    tol, max_iter, ct);

    io::write_text(out / "picard.csv", io::picard_csv(rep));
    io::write_text(out / "trajectory.csv", io::trajectory_csv(rep.trajectory));

    json jr;
    jr["converged"] = rep.converged;
    jr["iterations"] = rep.iterations;
    jr["residual_last"] = rep.residuals.empty() ? 0.0 : rep.residuals.back();
    jr["blew_up"] = rep.trajectory.blew_up;
    jr["smallness"] = smallness_json(rep.smallness);
    write_manifest(out, "picard", inst, {"picard.csv", "trajectory.csv"}, jr);
    return rep.converged ? kExitOk : kExitRuntime;
}

int run_optimize(const Instance& inst, const fs::path& out) {
    if (inst.scheme != Scheme::imex_euler)
        throw ConfigError("optimize requires scheme imex-euler (exact adjoint)");
    const json& jo = inst.cfg.at("optimize");

    TrackingProblem p;
    p.dom = inst.dom;
    p.grid = inst.grid;
    p.U = inst.U;
    p.alpha = inst.alpha;
    p.y0 = inst.y0;
    p.beta = jo.at("beta").get<double>();
    p.step.scheme = Scheme::imex_euler;
    p.step.store_states = true;

    ControlSignal ustar = control_from_json(jo.at("target_control"), inst.grid);
    Trajectory target = direct_march(inst.y0, inst.grid, inst.U, inst.alpha, ustar, p.step);
    if (target.blew_up)
        throw std::runtime_error("optimize: target trajectory blew up");
    p.y_d = target.states;

    OptimizeOptions oo;
    oo.max_iters = jo.at("max_iters").get<int>();
    oo.tol_factor = jo.at("tol_factor").get<double>();
    OptimizeResult res = projected_gradient(p, inst.u, oo);

    io::write_text(out / "optimizer.csv", io::optimizer_csv(res.log));
    io::write_text(out / "control.csv", io::control_csv(res.u));
    io::write_text(out / "target_control.csv", io::control_csv(ustar));
    io::write_text(out / "trajectory.csv", io::trajectory_csv(res.trajectory));

    json jr;
    jr["cost"] = {{"tracking", res.cost.tracking},
                  {"penalty", res.cost.penalty},
                  {"total", res.cost.total},
                  {"blown_up", res.cost.blown_up}};
    jr["converged"] = res.converged;
    jr["stalled"] = res.stalled;
    jr["iterations"] = res.iterations;
    jr["target_l2"] = ustar.l2();
    jr["result_l2"] = res.u.l2();
    std::string cfile = jo.at("constants_file").get<std::string>();
    if (!cfile.empty()) {
        ConstantsTable table = load_constants(cfile);
        UniquenessCertificate cert = uniqueness_certificate(p, res.u, table);
        jr["certificate"] = {{"y0_norm", cert.y0_norm},
                             {"mu_small", cert.mu_small},
                             {"u_inf", cert.u_inf},
                             {"yd_l2vv", cert.yd_l2vv},
                             {"kappa", cert.kappa},
                             {"growth_used", cert.growth_used},
                             {"growth_args_cover", cert.growth_args_cover},
                             {"cond3_lhs", cert.cond3_lhs},
                             {"cond4_lhs", cert.cond4_lhs},
                             {"c1", cert.c1},
                             {"c2", cert.c2},
                             {"c3", cert.c3},
                             {"c4", cert.c4},
                             {"certified", cert.certified}};
    }
    write_manifest(out, "optimize", inst,
                   {"optimizer.csv", "control.csv", "target_control.csv", "trajectory.csv"},
                   jr);
    return res.converged ? kExitOk : kExitStalled;
}

int run_particles(const Instance& inst, const fs::path& out) {
    const json& jp = inst.cfg.at("particles");
    MeanfieldConfig mc;
    mc.m_values = jp.at("m_values").get<std::vector<std::size_t>>();
    mc.replicates = jp.at("replicates").get<int>();
    mc.dt_particle = jp.at("dt").get<double>();
    mc.noise = jp.at("noise").get<bool>();
    std::string force = jp.at("force").get<std::string>();
    if (force == "spectral")
        mc.force = ForcePath::spectral;
    else if (force == "direct")
        mc.force = ForcePath::direct;
    else
        throw ConfigError("unknown particles.force: " + force);
    mc.pde_grid = inst.grid;
    mc.seed = inst.seed;

    MeanfieldReport rep = meanfield_compare(inst.y0, inst.U, inst.alpha, inst.u, mc);

    io::write_text(out / "meanfield.csv", io::meanfield_csv(rep));
    io::write_text(out / "cells.csv", io::cells_csv(rep));

    json jr;
    jr["time"] = rep.time;
    jr["control_active"] = rep.control_active;
    jr["note"] = rep.note;
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"m", r.m},
                        {"density_diff", r.density_diff},
                        {"density_se", r.density_se},
                        {"momentum_diff", r.momentum_diff},
                        {"momentum_se", r.momentum_se},
                        {"within_3se", r.density_within_3se}});
    jr["rows"] = rows;
    write_manifest(out, "particles", inst, {"meanfield.csv", "cells.csv"}, jr);
    return kExitOk;
}

int run_verify(const Instance& inst, const fs::path& out) {
    const json& jv = inst.cfg.at("verify");
    int ids = jv.at("identity_samples").get<int>();
    int ineqs = jv.at("inequality_samples").get<int>();
    int cons = jv.at("constants_samples").get<int>();

    auto id_rows = check_identity_suite(inst.dom, inst.U, inst.alpha, ids, inst.seed);
    auto iq_rows = check_inequality_suite(inst.dom, inst.U, inst.alpha, ineqs, inst.seed);
    ConstantsTable table = estimate_constants(inst.dom, inst.U, inst.alpha, cons, inst.seed);

    std::vector<std::pair<std::string, CheckResult>> rows;
    bool id_pass = true, iq_pass = true;
    for (const auto& r : id_rows) {
        id_pass = id_pass && r.pass;
        rows.emplace_back("identity", r);
    }
    for (const auto& r : iq_rows) {
        iq_pass = iq_pass && r.pass;
        rows.emplace_back("inequality", r);
    }

    io::write_text(out / "checks.csv", io::checks_csv(rows));
    io::write_text(out / "constants.json", json(table).dump(2) + "\n");

    json jr;
    jr["identity_pass"] = id_pass;
    jr["inequality_pass"] = iq_pass;
    jr["all_pass"] = id_pass && iq_pass;
    write_manifest(out, "verify", inst, {"checks.csv", "constants.json"}, jr);
    return (id_pass && iq_pass) ? kExitOk : kExitRuntime;
}

int run_verb(const std::string& verb, const fs::path& config,
             const std::vector<std::string>& overrides, std::uint64_t seed,
             const fs::path& out) {
    try {
        json user = config.empty() ? json::object() : load_config(config);
        for (const auto& s : overrides) apply_override(user, s);
        json merged = merge_config(user);
        Instance inst = build_instance(merged, seed);
        fs::create_directories(out);
        if (verb == "simulate") return run_simulate(inst, out);
        if (verb == "picard") return run_picard(inst, out);
        if (verb == "optimize") return run_optimize(inst, out);
        if (verb == "particles") return run_particles(inst, out);
        if (verb == "verify") return run_verify(inst, out);
        throw ConfigError("unknown verb: " + verb);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}

namespace {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    Csv c;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            auto comma = line.find(',', pos);
            cells.push_back(line.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (first) {
            c.header = std::move(cells);
            first = false;
        } else {
            c.rows.push_back(std::move(cells));
        }
    }
    return c;
}

bool parse_num(const std::string& s, double& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

struct ColumnDiff {
    std::string label, column;
    std::size_t rows = 0;
    double max_abs_diff = 0.0;
    bool numeric = true;
    bool pass = true;
};

// returns false on structural mismatch
bool compare_csv(const std::string& label, const Csv& a, const Csv& b,
                 const CompareOptions& opts, std::vector<ColumnDiff>& out,
                 std::string& why) {
    if (a.header != b.header) {
        why = label + ": headers differ";
        return false;
    }
    if (a.rows.size() != b.rows.size()) {
        why = label + ": row counts differ (" + std::to_string(a.rows.size()) + " vs " +
              std::to_string(b.rows.size()) + ")";
        return false;
    }
    for (std::size_t c = 0; c < a.header.size(); ++c) {
        ColumnDiff d;
        d.label = label;
        d.column = a.header[c];
        d.rows = a.rows.size();
        double scale = 0.0;
        for (std::size_t r = 0; r < a.rows.size(); ++r) {
            if (c >= a.rows[r].size() || c >= b.rows[r].size()) {
                why = label + ": ragged row " + std::to_string(r);
                return false;
            }
            double va = 0.0, vb = 0.0;
            bool na = parse_num(a.rows[r][c], va);
            bool nb = parse_num(b.rows[r][c], vb);
            if (na != nb) {
                why = label + ": column " + d.column + " mixes numbers and text";
                return false;
            }
            if (!na) {
                if (a.rows[r][c] != b.rows[r][c]) {
                    why = label + ": text cell differs in column " + d.column;
                    return false;
                }
                d.numeric = false;
                continue;
            }
            d.max_abs_diff = std::max(d.max_abs_diff, std::abs(va - vb));
            scale = std::max({scale, std::abs(va), std::abs(vb)});
        }
        if (opts.require_identical)
            d.pass = d.max_abs_diff == 0.0;
        else if (opts.atol > 0.0 || opts.rtol > 0.0)
            d.pass = d.max_abs_diff <= opts.atol + opts.rtol * scale;
        out.push_back(d);
    }
    return true;
}

} // namespace

int run_compare(const fs::path& a, const fs::path& b, const CompareOptions& opts,
                const fs::path& out) {
    std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> pairs;
    bool structural = false;
    std::vector<std::string> problems;

    if (fs::is_directory(a) && fs::is_directory(b)) {
        std::set<std::string> names;
        for (const auto& e : fs::directory_iterator(a))
            if (e.path().extension() == ".csv") names.insert(e.path().filename().string());
        for (const auto& e : fs::directory_iterator(b))
            if (e.path().extension() == ".csv") names.insert(e.path().filename().string());
        for (const auto& n : names) {
            if (!fs::exists(a / n) || !fs::exists(b / n)) {
                problems.push_back(n + ": present on one side only");
                structural = true;
                continue;
            }
            pairs.emplace_back(n, std::make_pair(a / n, b / n));
        }
    } else if (fs::is_regular_file(a) && fs::is_regular_file(b)) {
        pairs.emplace_back(a.filename().string(), std::make_pair(a, b));
    } else {
        std::fprintf(stderr, "compare: need two CSV files or two directories\n");
        return kExitConfig;
    }

    std::vector<ColumnDiff> diffs;
    for (const auto& [label, pr] : pairs) {
        Csv ca, cb;
        try {
            ca = parse_csv(pr.first);
            cb = parse_csv(pr.second);
        } catch (const std::exception& e) {
            problems.push_back(e.what());
            structural = true;
            continue;
        }
        std::string why;
        if (!compare_csv(label, ca, cb, opts, diffs, why)) {
            problems.push_back(why);
            structural = true;
        }
    }

    std::string report = "file,column,rows,max_abs_diff,pass\n";
    bool all_pass = true;
    for (const auto& d : diffs) {
        if (!d.numeric) continue;
        report += d.label + "," + d.column + "," + std::to_string(d.rows) + "," +
                  io::fmt(d.max_abs_diff) + "," + (d.pass ? "1" : "0") + "\n";
        all_pass = all_pass && d.pass;
    }
    std::fputs(report.c_str(), stdout);
    for (const auto& p : problems) std::fprintf(stderr, "compare: %s\n", p.c_str());

    if (!out.empty()) {
        fs::create_directories(out);
        io::write_text(out / "compare.csv", report);
    }
    if (structural) return kExitRuntime;
    return all_pass ? kExitOk : kExitRuntime;
}

} // namespace kfp::cli
