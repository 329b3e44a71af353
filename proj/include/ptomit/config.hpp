#ifndef PTOMIT_CONFIG_HPP
#define PTOMIT_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ptomit/error.hpp"
#include "ptomit/params.hpp"

namespace ptomit {

using json = nlohmann::json;

// Raw (non-derived) inputs, keyed exactly like the SystemParams and
// DriveParams fields. Resolution order: preset, then config file, then
// command-line overrides.
struct ConfigInputs {
    std::map<std::string, double> values;
};

inline const std::set<std::string>& system_keys()
{
    static const std::set<std::string> keys{"omega_c", "R",       "omega_m",    "m_eff", "gamma", "kappa",
                                            "Gamma_m", "J_coupling", "g_om", "Q_c",   "Q_m",   "hbar"};
    return keys;
}

inline const std::set<std::string>& drive_keys()
{
    static const std::set<std::string> keys{"P_L", "P_in", "Delta_L", "Delta_p", "omega_L", "omega_p"};
    return keys;
}

inline bool is_config_key(const std::string& k)
{
    return system_keys().count(k) || drive_keys().count(k);
}

inline ConfigInputs preset_inputs(const std::string& name)
{
    if (name != "paper")
        throw Error(ErrorKind::usage, "unknown preset '" + name + "' (available: paper)");
    const SystemParams s = preset::paper_system();
    ConfigInputs c;
    c.values = {{"omega_c", s.omega_c},
                {"R", *s.R},
                {"omega_m", s.omega_m},
                {"m_eff", s.m_eff},
                {"gamma", s.gamma},
                {"kappa", s.kappa},
                {"Gamma_m", s.Gamma_m},
                {"J_coupling", s.J_coupling},
                {"Q_c", *s.Q_c},
                {"Q_m", *s.Q_m},
                {"P_L", preset::paper_pump_power},
                {"Delta_L", s.omega_m},
                {"Delta_p", 0.0}};
    return c;
}

inline void set_value(ConfigInputs& c, const std::string& key, double value)
{
    if (!is_config_key(key))
        throw Error(ErrorKind::usage, "unknown parameter '" + key + "'");
    if (!std::isfinite(value))
        throw Error(ErrorKind::usage, "parameter '" + key + "' must be finite");
    // an explicit coupling replaces the radius-derived one and vice versa
    if (key == "g_om")
        c.values.erase("R");
    if (key == "R")
        c.values.erase("g_om");
    if (key == "omega_L")
        c.values.erase("Delta_L");
    if (key == "omega_p")
        c.values.erase("Delta_p");
    if (key == "Delta_L")
        c.values.erase("omega_L");
    if (key == "Delta_p")
        c.values.erase("omega_p");
    c.values[key] = value;
}

// Parses a JSON object of parameter values; "preset" names the base set.
inline ConfigInputs parse_config(const json& doc, const std::optional<std::string>& preset_override)
{
    if (!doc.is_object())
        throw Error(ErrorKind::usage, "config must be a JSON object");
    std::string preset_name = "paper";
    if (doc.contains("preset")) {
        if (!doc["preset"].is_string())
            throw Error(ErrorKind::usage, "config key 'preset' must be a string");
        preset_name = doc["preset"].get<std::string>();
    }
    if (preset_override)
        preset_name = *preset_override;

    ConfigInputs c = preset_inputs(preset_name);
    for (const auto& [key, value] : doc.items()) {
        if (key == "preset")
            continue;
        if (!value.is_number())
            throw Error(ErrorKind::usage, "config key '" + key + "' must be a number");
        set_value(c, key, value.get<double>());
    }
    return c;
}

inline ConfigInputs load_config_file(const std::string& path, const std::optional<std::string>& preset_override)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::usage, "cannot read config file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::usage, "config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc, preset_override);
}

// "key=value" overrides from the command line.
inline void apply_override(ConfigInputs& c, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw Error(ErrorKind::usage, "override '" + assignment + "' is not of the form key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    double value = 0.0;
    std::istringstream is(text);
    if (!(is >> value) || !is.eof())
        throw Error(ErrorKind::usage, "override '" + assignment + "' has a non-numeric value");
    set_value(c, key, value);
}

struct ResolvedConfig {
    SystemParams sys;
    DriveParams drive;
    json canonical; // resolved raw inputs, for hashing and manifests
};

inline ResolvedConfig resolve(const ConfigInputs& c)
{
    auto get = [&](const char* key) -> std::optional<double> {
        auto it = c.values.find(key);
        if (it == c.values.end())
            return std::nullopt;
        return it->second;
    };
    auto need = [&](const char* key) {
        auto v = get(key);
        if (!v)
            throw Error(ErrorKind::usage, std::string("missing parameter '") + key + "'");
        return *v;
    };

    SystemParams raw;
    raw.omega_c = need("omega_c");
    raw.R = get("R");
    raw.omega_m = need("omega_m");
    raw.m_eff = need("m_eff");
    raw.gamma = need("gamma");
    raw.kappa = need("kappa");
    raw.Gamma_m = need("Gamma_m");
    raw.J_coupling = need("J_coupling");
    raw.Q_c = get("Q_c");
    raw.Q_m = get("Q_m");
    if (!raw.R)
        raw.g_om = need("g_om");
    PhysicalConstants constants;
    if (auto h = get("hbar"))
        constants.hbar = *h;

    ResolvedConfig r;
    r.sys = derive_params(raw, constants);

    const double P_L = need("P_L");
    const double P_in = get("P_in").value_or(P_L * default_probe_fraction);
    const double Delta_L = get("Delta_L") ? *get("Delta_L") : r.sys.omega_c - need("omega_L");
    const double Delta_p = get("Delta_p") ? *get("Delta_p") : need("omega_p") - r.sys.omega_c;
    r.drive = make_drive(r.sys, P_L, Delta_L, Delta_p, P_in);

    r.canonical = json::object();
    for (const auto& [k, v] : c.values)
        r.canonical[k] = v;
    r.canonical["P_in"] = P_in;
    return r;
}

// FNV-1a over the canonical text; stable across platforms and runs.
inline std::string content_hash(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

} // namespace ptomit

#endif // PTOMIT_CONFIG_HPP
