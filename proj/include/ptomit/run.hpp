#ifndef PTOMIT_RUN_HPP
#define PTOMIT_RUN_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "ptomit/config.hpp"
#include "ptomit/sweep.hpp"
#include "ptomit/tdsim.hpp"

namespace ptomit {

inline constexpr const char* tool_version = "1.0.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verify_failed = 1;
inline constexpr int usage = 2;
inline constexpr int all_failed = 3;
} // namespace exit_code

struct RunContext {
    ConfigInputs inputs;
    std::filesystem::path out_dir = ".";
    unsigned jobs = 1;
    bool verify = false;
};

struct RunResult {
    int exit_code = exit_code::ok;
    json manifest;
    std::filesystem::path manifest_path;
    std::vector<std::string> warnings;
    std::size_t points = 0;
    std::size_t failed = 0;
    std::size_t verify_mismatches = 0;
};

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorKind::usage, "cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw Error(ErrorKind::usage, "failed writing '" + path.string() + "'");
}

// Short numeric tag for filenames: 0.5 -> "0.5", -1 -> "-1".
inline std::string tag(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline std::string series_name(double kappa_over_gamma, double P_uW)
{
    return "kappa" + tag(kappa_over_gamma) + "_P" + tag(P_uW) + "uW";
}

// Accumulates emitted files before the manifest is written.
struct Bundle {
    std::string name;
    json hash_input = json::object();
    std::vector<std::pair<std::string, std::string>> files; // relative path, body
    json summary = json::object();
    std::vector<std::string> warnings;
    std::size_t points = 0;
    std::size_t failed = 0;
    std::size_t verify_mismatches = 0;
};

inline RunResult finish(const RunContext& ctx, Bundle& b, const std::string& manifest_rel)
{
    const ResolvedConfig base = resolve(ctx.inputs);
    b.hash_input["config"] = base.canonical;
    b.hash_input["tool_version"] = tool_version;

    RunResult r;
    json outputs = json::array();
    for (const auto& [rel, body] : b.files) {
        write_text(ctx.out_dir / rel, body);
        outputs.push_back(rel);
    }
    r.manifest = {{"config_hash", content_hash(b.hash_input.dump())},
                  {"tool_version", tool_version},
                  {"timestamp", utc_timestamp()},
                  {"command", b.name},
                  {"config", base.canonical},
                  {"outputs", outputs},
                  {"summary", b.summary},
                  {"warnings", b.warnings}};
    if (ctx.verify)
        r.manifest["verify"] = {{"checked", true}, {"mismatches", b.verify_mismatches}};
    r.manifest_path = ctx.out_dir / manifest_rel;
    write_text(r.manifest_path, r.manifest.dump(2) + "\n");

    r.warnings = b.warnings;
    r.points = b.points;
    r.failed = b.failed;
    r.verify_mismatches = b.verify_mismatches;
    if (b.points > 0 && b.failed == b.points)
        r.exit_code = exit_code::all_failed;
    else if (b.verify_mismatches > 0)
        r.exit_code = exit_code::verify_failed;
    return r;
}

namespace detail {

inline bool close_rel(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

inline double wrap_pi(double d)
{
    return std::remainder(d, 2.0 * std::numbers::pi);
}

// Recomputes every successful row from scratch through probe_response.
inline std::size_t verify_spectrum(const ResolvedConfig& rc, const std::vector<SpectrumRow>& rows)
{
    std::size_t bad = 0;
    const SteadyState ss = solve_steady_state(rc.sys, rc.drive);
    for (const auto& row : rows) {
        if (!row.error.empty())
            continue;
        const auto r = probe_response(rc.sys, with_probe_detuning(rc.drive, rc.sys, row.delta_p_over_omega_m * rc.sys.omega_m), ss);
        const double dphi = std::abs(wrap_pi(row.phase - r.phase));
        if (!close_rel(row.eta, r.eta, 1e-12) || dphi > 1e-12 * std::max(1.0, std::abs(r.phase)))
            ++bad;
    }
    return bad;
}

inline void note_pt(Bundle& b, const ResolvedConfig& rc, const std::string& series)
{
    const auto pt = classify(rc.sys, rc.drive.Delta_L);
    if (pt.unstable)
        b.warnings.push_back(series + ": optical supermodes are unstable (" + std::string(to_string(pt.phase_label)) +
                             " phase); linear response is formal only");
}

inline json spectrum_summary(const std::vector<SpectrumRow>& rows, const ResolvedConfig& rc)
{
    const std::size_t anchor = anchor_index([&] {
        std::vector<double> g;
        for (const auto& r : rows)
            g.push_back(r.delta_p_over_omega_m);
        return g;
    }());
    std::size_t failed = 0;
    double eta_max = -1.0;
    for (const auto& r : rows) {
        if (!r.error.empty())
            ++failed;
        else
            eta_max = std::max(eta_max, r.eta);
    }
    const auto pt = classify(rc.sys, rc.drive.Delta_L);
    json s = {{"kappa_over_gamma", rc.sys.kappa / rc.sys.gamma},
              {"J_over_gamma", rc.sys.J_coupling / rc.sys.gamma},
              {"P_L_uW", rc.drive.P_L * 1e6},
              {"pt_label", to_string(pt.phase_label)},
              {"unstable", pt.unstable},
              {"points", rows.size()},
              {"failed", failed},
              {"eta_max", eta_max}};
    if (rows[anchor].error.empty())
        s["eta_at_anchor"] = rows[anchor].eta;
    return s;
}

} // namespace detail

struct SpectrumJob {
    std::string series; // relative file path without extension
    std::optional<double> kappa_over_gamma;
    std::optional<double> P_uW;
    std::vector<double> grid; // Delta_p / omega_m
};

inline void add_spectrum(const RunContext& ctx, Bundle& b, const SpectrumJob& job)
{
    const ResolvedConfig rc = with_point(ctx.inputs, job.kappa_over_gamma, job.P_uW);
    const auto rows = spectrum_rows(rc.sys, rc.drive, job.grid, ctx.jobs);
    const std::string rel = job.series + ".csv";
    b.files.emplace_back(rel, spectrum_csv(rows));
    json summary = detail::spectrum_summary(rows, rc);
    b.points += rows.size();
    b.failed += summary["failed"].get<std::size_t>();
    detail::note_pt(b, rc, job.series);
    if (ctx.verify)
        b.verify_mismatches += detail::verify_spectrum(rc, rows);
    b.summary["series"][job.series] = summary;
    b.hash_input["series"][job.series] = {{"kappa_over_gamma", job.kappa_over_gamma ? json(*job.kappa_over_gamma) : json()},
                                          {"P_uW", job.P_uW ? json(*job.P_uW) : json()},
                                          {"grid", job.grid}};
}

inline void add_delay(const RunContext& ctx, Bundle& b, const std::string& series, const std::vector<double>& kappas,
                      const std::vector<double>& powers_uW)
{
    const auto rows = delay_rows(ctx.inputs, kappas, powers_uW, ctx.jobs);
    b.files.emplace_back(series + ".csv", delay_csv(rows));
    json crossings = json::array();
    for (const auto& z : zero_crossings(rows))
        crossings.push_back({{"kappa_over_gamma", z.kappa_over_gamma},
                             {"P_L_uW_before", z.P_L_uW_before},
                             {"P_L_uW_after", z.P_L_uW_after},
                             {"direction", z.direction}});
    std::size_t failed = 0;
    for (const auto& r : rows)
        failed += r.error.empty() ? 0 : 1;
    b.points += rows.size();
    b.failed += failed;
    if (ctx.verify) {
        for (const auto& r : rows) {
            if (!r.error.empty())
                continue;
            try {
                ResolvedConfig rc = with_point(ctx.inputs, r.kappa_over_gamma, r.P_L_uW);
                rc.drive = with_probe_detuning(rc.drive, rc.sys, 0.0);
                if (!detail::close_rel(group_delay(rc.sys, rc.drive), r.tau_g_s, 1e-12))
                    ++b.verify_mismatches;
            } catch (const Error&) {
                ++b.verify_mismatches;
            }
        }
    }
    b.summary["series"][series] = {{"points", rows.size()}, {"failed", failed}, {"zero_crossings", crossings}};
    b.hash_input["series"][series] = {{"kappas", kappas}, {"powers_uW", powers_uW}};
}

// ---- subcommands ----

inline std::vector<double> or_config_kappa(const RunContext& ctx, const std::vector<double>& kappas)
{
    if (!kappas.empty())
        return kappas;
    return {ctx.inputs.values.at("kappa") / ctx.inputs.values.at("gamma")};
}

inline std::vector<double> or_config_power(const RunContext& ctx, const std::vector<double>& powers_uW)
{
    if (!powers_uW.empty())
        return powers_uW;
    return {ctx.inputs.values.at("P_L") * 1e6};
}

inline RunResult run_spectrum(const RunContext& ctx, const SweepSpec& sweep, const std::vector<double>& kappas,
                              const std::vector<double>& powers_uW)
{
    if (sweep.axis != SweepAxis::detuning)
        throw Error(ErrorKind::usage, "spectrum sweeps run over detuning");
    validate(sweep);
    Bundle b;
    b.name = "spectrum";
    b.hash_input["sweep"] = to_json(sweep);
    const bool explicit_power = !powers_uW.empty();
    for (double k : or_config_kappa(ctx, kappas))
        for (double p : or_config_power(ctx, powers_uW))
            add_spectrum(ctx, b, {"spectrum_" + series_name(k, p), k, explicit_power ? std::optional(p) : std::nullopt,
                                  sweep.values});
    return finish(ctx, b, "manifest_spectrum.json");
}

inline RunResult run_delay_sweep(const RunContext& ctx, const SweepSpec& sweep, const std::vector<double>& kappas)
{
    if (sweep.axis != SweepAxis::pump_power)
        throw Error(ErrorKind::usage, "delay sweeps run over pump_power");
    validate(sweep);
    for (double p : sweep.values)
        if (p <= 0.0)
            throw Error(ErrorKind::usage, "pump powers must be positive");
    Bundle b;
    b.name = "delay-sweep";
    b.hash_input["sweep"] = to_json(sweep);
    add_delay(ctx, b, "delay", or_config_kappa(ctx, kappas), sweep.values);
    return finish(ctx, b, "manifest_delay.json");
}

inline RunResult run_gain_sweep(const RunContext& ctx, const SweepSpec& sweep)
{
    if (sweep.axis != SweepAxis::gain_ratio)
        throw Error(ErrorKind::usage, "gain sweeps run over gain_ratio");
    validate(sweep);
    Bundle b;
    b.name = "gain-sweep";
    b.hash_input["sweep"] = to_json(sweep);
    const auto rows = gain_rows(ctx.inputs, sweep.values, ctx.jobs);
    b.files.emplace_back("gain.csv", gain_csv(rows));
    json labels = json::array();
    for (const auto& r : rows) {
        b.points += 1;
        b.failed += r.error.empty() ? 0 : 1;
        labels.push_back({{"kappa_over_gamma", r.kappa_over_gamma}, {"pt_label", r.pt_label}, {"unstable", r.unstable}});
        if (r.unstable)
            b.warnings.push_back("kappa/gamma = " + tag(r.kappa_over_gamma) + ": optical supermodes are unstable");
    }
    if (ctx.verify)
        for (const auto& r : rows) {
            if (!r.error.empty())
                continue;
            const ResolvedConfig rc = with_point(ctx.inputs, r.kappa_over_gamma, std::nullopt);
            const auto d = with_probe_detuning(rc.drive, rc.sys, 0.0);
            if (!detail::close_rel(probe_response(rc.sys, d, solve_steady_state(rc.sys, d)).eta, r.eta_at_resonance, 1e-12))
                ++b.verify_mismatches;
        }
    b.summary["labels"] = labels;
    return finish(ctx, b, "manifest_gain.json");
}

// ---- figure bundles ----

inline const std::vector<std::string>& figure_ids()
{
    static const std::vector<std::string> ids{"fig2a", "fig2b", "fig3", "fig4a", "fig4b", "fig5a", "fig5b", "fig6"};
    return ids;
}

inline RunResult reproduce(const RunContext& ctx_in, const std::string& figure_id)
{
    const auto& ids = figure_ids();
    if (std::find(ids.begin(), ids.end(), figure_id) == ids.end()) {
        std::string list;
        for (const auto& id : ids)
            list += (list.empty() ? "" : ", ") + id;
        throw Error(ErrorKind::usage, "unknown figure id '" + figure_id + "' (valid: " + list + ")");
    }
    // figures always use the published parameter set with J/gamma = 1
    RunContext ctx = ctx_in;
    set_value(ctx.inputs, "J_coupling", ctx.inputs.values.at("gamma"));
    set_value(ctx.inputs, "Delta_L", ctx.inputs.values.at("omega_m"));
    set_value(ctx.inputs, "Delta_p", 0.0);

    Bundle b;
    b.name = "reproduce " + figure_id;
    b.hash_input["figure"] = figure_id;
    const std::string dir = figure_id + "/";
    const auto full = grids::detuning();
    const auto zoom = grids::detuning_zoom();
    auto spectra = [&](const std::vector<double>& kappas, const std::vector<double>& powers, const std::vector<double>& grid,
                       const std::string& prefix) {
        for (double k : kappas)
            for (double p : powers)
                add_spectrum(ctx, b, {dir + prefix + series_name(k, p), k, p, grid});
    };

    if (figure_id == "fig2a")
        spectra({-1.0, -0.5, 0.0, 0.5}, {10.0}, full, "");
    else if (figure_id == "fig2b")
        spectra({0.5, 1.0, 1.5}, {10.0}, full, "");
    else if (figure_id == "fig3")
        spectra({0.01, 0.05, 0.2, 0.5, 1.0, 1.5}, {10.0}, full, "");
    else if (figure_id == "fig4a")
        spectra({-1.0}, {10.0, 20.0}, full, "");
    else if (figure_id == "fig4b")
        spectra({1.5}, {10.0, 20.0}, full, "");
    else if (figure_id == "fig5a" || figure_id == "fig5b") {
        const std::vector<double> kappas =
            figure_id == "fig5a" ? std::vector<double>{0.5, 0.7, 0.9} : std::vector<double>{1.0, 1.5, 2.0};
        for (double k : kappas)
            add_delay(ctx, b, dir + "kappa" + tag(k), {k}, grids::pump_uW());
    } else { // fig6
        spectra({0.5}, {2.0, 10.0, 20.0}, zoom, "a_");
        spectra({1.5}, {2.0, 10.0, 20.0}, zoom, "b_");
        spectra({0.5, 1.0, 1.5}, {10.0}, zoom, "c_");
        spectra({-1.0}, {2.0, 10.0, 20.0}, zoom, "d_");
    }
    return finish(ctx, b, dir + "manifest.json");
}

// ---- single-point reports ----

inline json pt_modes_report(const ResolvedConfig& rc)
{
    const auto pt = classify(rc.sys, rc.drive.Delta_L);
    const auto boundary = phase_boundary(rc.sys.gamma, rc.sys.J_coupling);
    auto c = [](cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; };
    return {{"lambda_plus", c(pt.lambda_plus)},
            {"lambda_minus", c(pt.lambda_minus)},
            {"discriminant", pt.discriminant},
            {"discriminant_over_gamma2", pt.discriminant / (rc.sys.gamma * rc.sys.gamma)},
            {"phase_label", to_string(pt.phase_label)},
            {"unstable", pt.unstable},
            {"kappa_over_gamma", rc.sys.kappa / rc.sys.gamma},
            {"J_over_gamma", rc.sys.J_coupling / rc.sys.gamma},
            {"kappa_boundary", boundary ? json(*boundary) : json()}};
}

inline json steady_state_report(const ResolvedConfig& rc)
{
    const SteadyState ss = solve_steady_state(rc.sys, rc.drive);
    auto c = [](cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; };
    return {{"x_s", ss.x_s},
            {"a1_s", c(ss.a1_s)},
            {"a2_s", c(ss.a2_s)},
            {"n1", ss.n1},
            {"n2", ss.n2},
            {"residual", ss.residual},
            {"all_roots", steady_state_roots(rc.sys, rc.drive)},
            {"g_om", rc.sys.g_om},
            {"x_zpf", rc.sys.x_zpf}};
}

struct OracleCheck {
    json report;
    bool pass = false;
    std::size_t failed = 0;
};

inline OracleCheck oracle_check(const ConfigInputs& inputs, const std::vector<double>& kappas,
                                const std::vector<double>& detunings_over_omega_m, unsigned jobs,
                                double threshold = 1e-3)
{
    struct Point {
        double k, d;
        json out;
        bool ok = false;
    };
    std::vector<Point> pts;
    for (double k : kappas)
        for (double d : detunings_over_omega_m)
            pts.push_back({k, d, json(), false});
    parallel_for(pts.size(), jobs, [&](std::size_t i) {
        Point& p = pts[i];
        p.out = {{"kappa_over_gamma", p.k}, {"delta_p_over_omega_m", p.d}};
        try {
            const ResolvedConfig rc = with_point(inputs, p.k, std::nullopt);
            const auto d = with_probe_detuning(rc.drive, rc.sys, p.d * rc.sys.omega_m);
            const OracleReport r = oracle_point(rc.sys, d);
            p.out["Delta_p"] = r.Delta_p;
            p.out["eta_freq"] = r.eta_freq;
            p.out["eta_td"] = r.eta_td;
            p.out["rel_err"] = r.rel_err;
            p.ok = r.rel_err <= threshold;
        } catch (const Error& e) {
            p.out["error"] = e.what();
        }
        p.out["pass"] = p.ok;
    });
    OracleCheck oc;
    json points = json::array();
    for (const auto& p : pts) {
        points.push_back(p.out);
        oc.failed += p.ok ? 0 : 1;
    }
    oc.pass = oc.failed == 0;
    oc.report = {{"threshold", threshold}, {"points", points}, {"pass", oc.pass}};
    return oc;
}

} // namespace ptomit

#endif // PTOMIT_RUN_HPP
