// ptomit: transmission spectra, group delays and PT labels for a
// gain/loss coupled optomechanical resonator pair.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ptomit/ptomit.hpp"

namespace {

using namespace ptomit;

std::vector<double> parse_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos)
            continue;
        std::istringstream is(item);
        double v = 0.0;
        if (!(is >> v) || !(is >> std::ws).eof())
            throw Error(ErrorKind::usage, what + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    return out;
}

struct Globals {
    std::string config_path;
    std::string preset = "paper";
    bool preset_given = false;
    std::string out = ".";
    unsigned jobs = default_jobs();
    bool verify = false;
    std::vector<std::string> sets;
};

RunContext make_context(const Globals& g)
{
    RunContext ctx;
    const std::optional<std::string> preset = g.preset_given ? std::optional(g.preset) : std::nullopt;
    ctx.inputs = g.config_path.empty() ? preset_inputs(g.preset) : load_config_file(g.config_path, preset);
    for (const auto& s : g.sets)
        apply_override(ctx.inputs, s);
    resolve(ctx.inputs); // validate early
    ctx.out_dir = g.out;
    ctx.jobs = std::max(1u, g.jobs);
    ctx.verify = g.verify;
    return ctx;
}

int report(const RunResult& r)
{
    for (const auto& w : r.warnings)
        std::cerr << "warning: " << w << "\n";
    std::cout << r.manifest.dump(2) << "\n";
    std::cerr << r.points << " points, " << r.failed << " failed";
    if (r.manifest.contains("verify"))
        std::cerr << ", " << r.verify_mismatches << " verify mismatches";
    std::cerr << "; manifest " << r.manifest_path.string() << "\n";
    return r.exit_code;
}

void write_json(const RunContext& ctx, const std::string& name, const json& j)
{
    write_text(ctx.out_dir / name, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Probe transmission, group delay and PT-phase tool for gain/loss compound optomechanics"};
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config_path, "JSON parameter file (SI units, params field names)");
    auto* preset_opt = app.add_option("--preset", g.preset, "base parameter set")->check(CLI::IsMember({"paper"}));
    app.add_option("--out", g.out, "output directory");
    app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--verify", g.verify, "recompute every emitted row through a direct evaluation");
    app.add_option("--set", g.sets, "parameter override key=value (repeatable)");

    std::string kappa_text, power_text, detuning_text;
    double dmin = -2.0, dmax = 2.0;
    std::size_t dn = 2001;

    auto* spectrum = app.add_subcommand("spectrum", "probe transmission versus Delta_p");
    spectrum->add_option("--kappa", kappa_text, "comma-separated kappa/gamma values");
    spectrum->add_option("--power-uw", power_text, "comma-separated pump powers in uW");
    auto* detuning_opt =
        spectrum->add_option("--detuning", detuning_text, "comma-separated Delta_p/omega_m values (overrides range)");
    spectrum->add_option("--min", dmin, "lower Delta_p/omega_m");
    spectrum->add_option("--max", dmax, "upper Delta_p/omega_m");
    spectrum->add_option("--points", dn, "grid points")->check(CLI::PositiveNumber);

    auto* delay = app.add_subcommand("delay-sweep", "group delay at Delta_p = 0 versus pump power");
    delay->add_option("--kappa", kappa_text, "comma-separated kappa/gamma values");
    auto* delay_power = delay->add_option("--power-uw", power_text, "comma-separated pump powers in uW");

    auto* gain = app.add_subcommand("gain-sweep", "resonance transmission, delay and PT label versus kappa/gamma");
    auto* gain_kappa = gain->add_option("--kappa", kappa_text, "comma-separated kappa/gamma values");

    auto* pt = app.add_subcommand("pt-modes", "optical supermodes and PT phase label");

    auto* oracle = app.add_subcommand("oracle-check", "time-domain cross-check of the probe transmission");
    auto* oracle_kappa = oracle->add_option("--kappa", kappa_text, "comma-separated kappa/gamma values");
    auto* oracle_det = oracle->add_option("--detuning", detuning_text, "comma-separated Delta_p/omega_m values");
    double threshold = 1e-3;
    oracle->add_option("--threshold", threshold, "relative tolerance");

    std::string figure_id;
    auto* repro = app.add_subcommand("reproduce", "emit the dataset bundle for one figure");
    repro->add_option("figure_id", figure_id, "fig2a, fig2b, fig3, fig4a, fig4b, fig5a, fig5b or fig6")->required();

    auto* steady = app.add_subcommand("steady-state", "pump-only operating point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }
    g.preset_given = preset_opt->count() > 0;

    try {
        RunContext ctx = make_context(g);

        if (spectrum->parsed()) {
            SweepSpec s{SweepAxis::detuning, {}, {"eta", "phase"}};
            s.values = detuning_opt->count() ? parse_list(detuning_text, "--detuning") : linspace(dmin, dmax, dn);
            return report(run_spectrum(ctx, s, parse_list(kappa_text, "--kappa"), parse_list(power_text, "--power-uw")));
        }
        if (delay->parsed()) {
            SweepSpec s{SweepAxis::pump_power, {}, {"tau_g", "pt_label"}};
            s.values = delay_power->count() ? parse_list(power_text, "--power-uw") : grids::pump_uW();
            return report(run_delay_sweep(ctx, s, parse_list(kappa_text, "--kappa")));
        }
        if (gain->parsed()) {
            SweepSpec s{SweepAxis::gain_ratio, {}, {"eta", "tau_g", "pt_label"}};
            s.values = gain_kappa->count() ? parse_list(kappa_text, "--kappa") : grids::gain_ratio();
            return report(run_gain_sweep(ctx, s));
        }
        if (pt->parsed()) {
            const json j = pt_modes_report(resolve(ctx.inputs));
            if (j["unstable"].get<bool>())
                std::cerr << "warning: optical supermodes are unstable\n";
            write_json(ctx, "pt_modes.json", j);
            return exit_code::ok;
        }
        if (oracle->parsed()) {
            const auto kappas = oracle_kappa->count() ? parse_list(kappa_text, "--kappa") : std::vector<double>{-1.0, 0.2, 0.5};
            const auto dets = oracle_det->count() ? parse_list(detuning_text, "--detuning")
                                                  : std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0};
            if (kappas.empty() || dets.empty())
                throw Error(ErrorKind::usage, "oracle-check needs at least one kappa and one detuning");
            const OracleCheck oc = oracle_check(ctx.inputs, kappas, dets, ctx.jobs, threshold);
            write_json(ctx, "oracle_check.json", oc.report);
            return oc.failed == kappas.size() * dets.size() ? exit_code::all_failed
                                                             : (oc.pass ? exit_code::ok : exit_code::verify_failed);
        }
        if (repro->parsed())
            return report(reproduce(ctx, figure_id));
        if (steady->parsed()) {
            write_json(ctx, "steady_state.json", steady_state_report(resolve(ctx.inputs)));
            return exit_code::ok;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::usage || e.kind() == ErrorKind::invalid_parameter ? exit_code::usage
                                                                                          : exit_code::all_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::all_failed;
    }
    return exit_code::usage;
}
