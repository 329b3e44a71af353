#ifndef PTOMIT_SWEEP_HPP
#define PTOMIT_SWEEP_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "ptomit/config.hpp"
#include "ptomit/error.hpp"
#include "ptomit/parallel.hpp"
#include "ptomit/pt_phase.hpp"
#include "ptomit/response.hpp"
#include "ptomit/steady_state.hpp"

namespace ptomit {

enum class SweepAxis { detuning, pump_power, gain_ratio };

inline const char* to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::detuning: return "detuning";
    case SweepAxis::pump_power: return "pump_power";
    case SweepAxis::gain_ratio: return "gain_ratio";
    }
    return "unknown";
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::detuning;
    std::vector<double> values;
    std::vector<std::string> outputs;
};

inline void validate(const SweepSpec& spec)
{
    if (spec.values.empty())
        throw Error(ErrorKind::usage, std::string(to_string(spec.axis)) + " sweep has no values");
    for (double v : spec.values)
        if (!std::isfinite(v))
            throw Error(ErrorKind::usage, "sweep values must be finite");
    if (spec.values.size() > 1) {
        const bool up = spec.values[1] > spec.values[0];
        for (std::size_t i = 1; i < spec.values.size(); ++i) {
            const bool ok = up ? spec.values[i] > spec.values[i - 1] : spec.values[i] < spec.values[i - 1];
            if (!ok)
                throw Error(ErrorKind::usage, "sweep values must be strictly monotone");
        }
    }
    static const std::set<std::string> known{"eta", "phase", "tau_g", "steady_state", "pt_label"};
    for (const auto& o : spec.outputs)
        if (!known.count(o))
            throw Error(ErrorKind::usage, "unknown sweep output '" + o + "'");
}

inline json to_json(const SweepSpec& spec)
{
    return json{{"axis", to_string(spec.axis)}, {"values", spec.values}, {"outputs", spec.outputs}};
}

inline std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

inline std::vector<double> logspace(double a, double b, std::size_t n)
{
    std::vector<double> v = linspace(std::log(a), std::log(b), n);
    for (double& x : v)
        x = std::exp(x);
    if (n > 1) {
        v.front() = a;
        v.back() = b;
    }
    return v;
}

namespace grids {

// Delta_p / omega_m for the transmission figures.
inline std::vector<double> detuning() { return linspace(-2.0, 2.0, 2001); }

// Narrow window around the OMIT feature, for phase slopes.
inline std::vector<double> detuning_zoom() { return linspace(-0.01, 0.01, 2001); }

// P_L in microwatts for delay sweeps.
inline std::vector<double> pump_uW() { return logspace(0.5, 20.0, 200); }

// kappa/gamma: caption values plus a fine grid across the balance point.
inline std::vector<double> gain_ratio()
{
    std::set<double> v{-1.0, 0.0, 0.01, 0.05, 0.2, 0.5, 1.0, 1.5};
    for (int i = 0; i <= 20; ++i)
        v.insert(std::round((0.9 + 0.01 * i) * 1e6) / 1e6);
    return {v.begin(), v.end()};
}

} // namespace grids

inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_field(std::string s)
{
    std::replace(s.begin(), s.end(), '\n', ' ');
    if (s.find_first_of(",\"") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

// Applies kappa/gamma and (optionally) a pump power in microwatts on top of
// resolved inputs.
inline ResolvedConfig with_point(const ConfigInputs& inputs, std::optional<double> kappa_over_gamma,
                                 std::optional<double> power_uW)
{
    ConfigInputs c = inputs;
    if (kappa_over_gamma)
        set_value(c, "kappa", *kappa_over_gamma * c.values.at("gamma"));
    if (power_uW)
        set_value(c, "P_L", *power_uW * 1e-6); // P_in follows unless given explicitly
    return resolve(c);
}

// ---- transmission spectra ----

struct SpectrumRow {
    double delta_p_over_omega_m = 0.0;
    double eta = std::numeric_limits<double>::quiet_NaN();
    double phase = std::numeric_limits<double>::quiet_NaN();
    double t_re = std::numeric_limits<double>::quiet_NaN();
    double t_im = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

// Like spectrum(), but a failing point becomes a row carrying the error
// instead of aborting the sweep.
inline std::vector<SpectrumRow> spectrum_rows(const SystemParams& sys, const DriveParams& drive,
                                              const std::vector<double>& grid_over_omega_m, unsigned jobs)
{
    std::vector<SpectrumRow> rows(grid_over_omega_m.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i].delta_p_over_omega_m = grid_over_omega_m[i];

    SteadyState ss;
    try {
        ss = solve_steady_state(sys, drive);
    } catch (const Error& e) {
        for (auto& r : rows)
            r.error = e.what();
        return rows;
    }

    parallel_for(rows.size(), jobs, [&](std::size_t i) {
        SpectrumRow& row = rows[i];
        try {
            const double dp = row.delta_p_over_omega_m * sys.omega_m;
            const ProbeResponse r = probe_response(sys, with_probe_detuning(drive, sys, dp), ss);
            row.eta = r.eta;
            row.phase = r.phase;
            row.t_re = r.t_amp.real();
            row.t_im = r.t_amp.imag();
        } catch (const Error& e) {
            row.error = e.what();
        }
    });

    // cumulative unwrap outward from the point nearest resonance, skipping failures
    const std::size_t anchor = detail::anchor_index(grid_over_omega_m);
    double ref = rows[anchor].phase;
    for (std::size_t i = anchor + 1; i < rows.size(); ++i)
        if (rows[i].error.empty()) {
            if (!std::isnan(ref))
                rows[i].phase = detail::unwrap_near(rows[i].phase, ref);
            ref = rows[i].phase;
        }
    ref = rows[anchor].phase;
    for (std::size_t i = anchor; i-- > 0;)
        if (rows[i].error.empty()) {
            if (!std::isnan(ref))
                rows[i].phase = detail::unwrap_near(rows[i].phase, ref);
            ref = rows[i].phase;
        }
    return rows;
}

inline std::string spectrum_csv(const std::vector<SpectrumRow>& rows)
{
    const bool any_error = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); });
    std::string out = "delta_p_over_omega_m,eta,phase_rad,t_re,t_im";
    out += any_error ? ",error\n" : "\n";
    for (const auto& r : rows) {
        out += format_number(r.delta_p_over_omega_m) + ',' + format_number(r.eta) + ',' + format_number(r.phase) +
               ',' + format_number(r.t_re) + ',' + format_number(r.t_im);
        if (any_error)
            out += ',' + csv_field(r.error);
        out += '\n';
    }
    return out;
}

// ---- group-delay sweeps ----

struct DelayRow {
    double P_L_uW = 0.0;
    double kappa_over_gamma = 0.0;
    double tau_g_s = std::numeric_limits<double>::quiet_NaN();
    std::string pt_label;
    std::string error;
};

// tau_g at Delta_p = 0 for every (kappa/gamma, P_L) pair; rows ordered by
// kappa first, then power.
inline std::vector<DelayRow> delay_rows(const ConfigInputs& inputs, const std::vector<double>& kappa_over_gamma,
                                        const std::vector<double>& powers_uW, unsigned jobs)
{
    std::vector<DelayRow> rows;
    for (double k : kappa_over_gamma)
        for (double p : powers_uW)
            rows.push_back({p, k, std::numeric_limits<double>::quiet_NaN(), "", ""});

    parallel_for(rows.size(), jobs, [&](std::size_t i) {
        DelayRow& row = rows[i];
        try {
            ResolvedConfig rc = with_point(inputs, row.kappa_over_gamma, row.P_L_uW);
            rc.drive = with_probe_detuning(rc.drive, rc.sys, 0.0);
            row.pt_label = std::string(to_string(classify(rc.sys, rc.drive.Delta_L).phase_label));
            row.tau_g_s = group_delay(rc.sys, rc.drive);
        } catch (const Error& e) {
            row.error = e.what();
        }
    });
    return rows;
}

inline std::string delay_csv(const std::vector<DelayRow>& rows)
{
    const bool any_error = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); });
    std::string out = "P_L_uW,kappa_over_gamma,tau_g_s,pt_label";
    out += any_error ? ",error\n" : "\n";
    for (const auto& r : rows) {
        out += format_number(r.P_L_uW) + ',' + format_number(r.kappa_over_gamma) + ',' + format_number(r.tau_g_s) +
               ',' + r.pt_label;
        if (any_error)
            out += ',' + csv_field(r.error);
        out += '\n';
    }
    return out;
}

struct ZeroCrossing {
    double kappa_over_gamma = 0.0;
    double P_L_uW_before = 0.0;
    double P_L_uW_after = 0.0;
    std::string direction; // "slow->fast" or "fast->slow"
};

// Sign changes of tau_g along the power axis, per kappa/gamma. Failed rows
// are skipped.
inline std::vector<ZeroCrossing> zero_crossings(const std::vector<DelayRow>& rows)
{
    std::vector<ZeroCrossing> out;
    const DelayRow* prev = nullptr;
    for (const auto& r : rows) {
        if (!r.error.empty() || std::isnan(r.tau_g_s) || r.tau_g_s == 0.0)
            continue;
        if (prev && prev->kappa_over_gamma == r.kappa_over_gamma && (prev->tau_g_s > 0.0) != (r.tau_g_s > 0.0))
            out.push_back({r.kappa_over_gamma, prev->P_L_uW, r.P_L_uW, prev->tau_g_s > 0.0 ? "slow->fast" : "fast->slow"});
        prev = &r;
    }
    return out;
}

// ---- gain sweeps ----

struct GainRow {
    double kappa_over_gamma = 0.0;
    double eta_at_resonance = std::numeric_limits<double>::quiet_NaN();
    double tau_g_s = std::numeric_limits<double>::quiet_NaN();
    double discriminant_over_gamma2 = 0.0;
    std::string pt_label;
    bool unstable = false;
    std::string error;
};

inline std::vector<GainRow> gain_rows(const ConfigInputs& inputs, const std::vector<double>& kappa_over_gamma,
                                      unsigned jobs)
{
    std::vector<GainRow> rows(kappa_over_gamma.size());
    parallel_for(rows.size(), jobs, [&](std::size_t i) {
        GainRow& row = rows[i];
        row.kappa_over_gamma = kappa_over_gamma[i];
        try {
            ResolvedConfig rc = with_point(inputs, row.kappa_over_gamma, std::nullopt);
            rc.drive = with_probe_detuning(rc.drive, rc.sys, 0.0);
            const PtClassification pt = classify(rc.sys, rc.drive.Delta_L);
            row.pt_label = std::string(to_string(pt.phase_label));
            row.unstable = pt.unstable;
            row.discriminant_over_gamma2 = pt.discriminant / (rc.sys.gamma * rc.sys.gamma);
            const SteadyState ss = solve_steady_state(rc.sys, rc.drive);
            row.eta_at_resonance = probe_response(rc.sys, rc.drive, ss).eta;
            row.tau_g_s = group_delay_at(rc.sys, rc.drive, ss, 0.0);
        } catch (const Error& e) {
            row.error = e.what();
        }
    });
    return rows;
}

inline std::string gain_csv(const std::vector<GainRow>& rows)
{
    const bool any_error = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.error.empty(); });
    std::string out = "kappa_over_gamma,eta_at_resonance,tau_g_s,discriminant_over_gamma2,pt_label,unstable";
    out += any_error ? ",error\n" : "\n";
    for (const auto& r : rows) {
        out += format_number(r.kappa_over_gamma) + ',' + format_number(r.eta_at_resonance) + ',' +
               format_number(r.tau_g_s) + ',' + format_number(r.discriminant_over_gamma2) + ',' + r.pt_label + ',' +
               (r.unstable ? "1" : "0");
        if (any_error)
            out += ',' + csv_field(r.error);
        out += '\n';
    }
    return out;
}

} // namespace ptomit

#endif // PTOMIT_SWEEP_HPP
