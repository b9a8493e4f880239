#pragma once

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dwell/dynamics.hpp"
#include "dwell/entanglement.hpp"
#include "dwell/errors.hpp"
#include "dwell/operators.hpp"

namespace dwell {

enum class Experiment { Thermal, BecScaling, Quench, Dephasing, Loss, Eof, Selfcheck };

inline constexpr std::array<std::pair<Experiment, std::string_view>, 7> kExperimentNames{{
    {Experiment::Thermal, "thermal"},
    {Experiment::BecScaling, "bec-scaling"},
    {Experiment::Quench, "quench"},
    {Experiment::Dephasing, "dephasing"},
    {Experiment::Loss, "loss"},
    {Experiment::Eof, "eof"},
    {Experiment::Selfcheck, "selfcheck"},
}};

inline std::string_view to_string(Experiment e)
{
    for (const auto& [k, name] : kExperimentNames)
        if (k == e) return name;
    return "?";
}

inline std::optional<Experiment> parse_experiment(std::string_view name)
{
    for (const auto& [k, n] : kExperimentNames)
        if (n == name) return k;
    return std::nullopt;
}

enum class OutputFormat { Csv, Json };

/// Quench: ground state of H(initial) evolved under H(evolution) plus the dissipator.
/// GroundState: ground state of H(hamiltonian) left to decay under the same H.
enum class RunMode { Quench, GroundState };

/// Fully resolved experiment description. Start from default_config() and
/// overlay a JSON document and/or CLI overrides; validate() before running.
/// J/U grids are realized with U = 1.
struct ExperimentConfig {
    Experiment experiment = Experiment::Thermal;
    std::vector<int> n;
    std::vector<double> j_over_u;
    std::vector<double> beta;
    std::vector<double> gamma;
    /// Fixed horizon. Dissipative runs without it use t_max_gamma_units / gamma.
    std::optional<double> t_max;
    double t_max_gamma_units = 20.0;
    std::size_t samples = 1001;
    ModelParams initial{0.1, 1.0};
    ModelParams evolution{1.0, 1.0};
    /// Ground-state-decay Hamiltonian, used when mode is GroundState.
    ModelParams hamiltonian{1.0, 1.0};
    RunMode mode = RunMode::Quench;
    Integrator integrator = Integrator::Rk4;
    BoundReading s_reading = BoundReading::ParticleNumber;
    bool allow_degenerate = false;
    int fit_min_n = 1;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::string out = "dwell-out";
    OutputFormat format = OutputFormat::Csv;

    /// Horizon of one run at the given rate.
    [[nodiscard]] double horizon(double rate) const { return t_max ? *t_max : t_max_gamma_units / rate; }
};

namespace detail {

inline std::vector<int> int_range(int lo, int hi)
{
    std::vector<int> v;
    for (int i = lo; i <= hi; ++i) v.push_back(i);
    return v;
}

/// start, start + step, ... up to stop inclusive; k * step avoids accumulated drift.
inline std::vector<double> real_range(double start, double stop, double step)
{
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> v(count);
    for (std::size_t k = 0; k < count; ++k) v[k] = start + static_cast<double>(k) * step;
    return v;
}

[[noreturn]] inline void config_fail(const std::string& where, const std::string& what)
{
    throw ConfigError(where + ": " + what);
}

/// Keys each experiment reads, besides experiment/out/format.
inline const std::set<std::string_view>& keys_for(Experiment e)
{
    static const std::set<std::string_view> thermal{"n", "j_over_u", "beta"};
    static const std::set<std::string_view> bec{"n", "fit_min_n"};
    static const std::set<std::string_view> quench{"n", "t_max", "samples", "initial", "evolution", "allow_degenerate"};
    static const std::set<std::string_view> open{"n",       "gamma",     "t_max", "t_max_gamma_units", "samples",
                                                 "initial", "evolution", "hamiltonian", "mode", "integrator", "allow_degenerate"};
    static const std::set<std::string_view> eof{"n", "j_over_u", "s_reading"};
    static const std::set<std::string_view> selfcheck{"n", "trials", "seed"};
    switch (e) {
    case Experiment::Thermal: return thermal;
    case Experiment::BecScaling: return bec;
    case Experiment::Quench: return quench;
    case Experiment::Dephasing:
    case Experiment::Loss: return open;
    case Experiment::Eof: return eof;
    case Experiment::Selfcheck: return selfcheck;
    }
    return thermal;
}

inline double json_real(const nlohmann::json& v, const std::string& path)
{
    if (!v.is_number()) config_fail(path, "expected a number, got " + std::string(v.type_name()));
    const double x = v.get<double>();
    if (!std::isfinite(x)) config_fail(path, "must be finite");
    return x;
}

inline long long json_int(const nlohmann::json& v, const std::string& path)
{
    if (!v.is_number_integer()) config_fail(path, "expected an integer, got " + std::string(v.type_name()));
    return v.get<long long>();
}

inline std::string json_string(const nlohmann::json& v, const std::string& path)
{
    if (!v.is_string()) config_fail(path, "expected a string, got " + std::string(v.type_name()));
    return v.get<std::string>();
}

inline void only_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> keys, const std::string& path)
{
    for (const auto& [k, _] : obj.items())
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) config_fail(path + "/" + k, "unknown key");
}

/// A number, an array of numbers, or {"start", "stop", "step"}.
inline std::vector<double> json_real_grid(const nlohmann::json& v, const std::string& path)
{
    if (v.is_number()) return {json_real(v, path)};
    if (v.is_array()) {
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(json_real(v[i], path + "/" + std::to_string(i)));
        return out;
    }
    if (v.is_object()) {
        only_keys(v, {"start", "stop", "step"}, path);
        for (const char* k : {"start", "stop", "step"})
            if (!v.contains(k)) config_fail(path + "/" + k, "missing");
        const double start = json_real(v["start"], path + "/start");
        const double stop = json_real(v["stop"], path + "/stop");
        const double step = json_real(v["step"], path + "/step");
        if (!(step > 0.0)) config_fail(path + "/step", "must be > 0");
        if (stop < start) config_fail(path + "/stop", "must be >= start");
        if ((stop - start) / step > 1e6) config_fail(path, "range has more than 10^6 points");
        return real_range(start, stop, step);
    }
    config_fail(path, "expected a number, an array or {start, stop, step}");
}

/// An integer, an array of integers, or {"start", "stop"[, "step"]}.
inline std::vector<int> json_int_grid(const nlohmann::json& v, const std::string& path)
{
    const auto narrow = [](long long x, const std::string& where) {
        if (x < -1000000 || x > 1000000) config_fail(where, "out of range");
        return static_cast<int>(x);
    };
    if (v.is_number()) return {narrow(json_int(v, path), path)};
    if (v.is_array()) {
        std::vector<int> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto where = path + "/" + std::to_string(i);
            out.push_back(narrow(json_int(v[i], where), where));
        }
        return out;
    }
    if (v.is_object()) {
        only_keys(v, {"start", "stop", "step"}, path);
        for (const char* k : {"start", "stop"})
            if (!v.contains(k)) config_fail(path + "/" + k, "missing");
        const int start = narrow(json_int(v["start"], path + "/start"), path + "/start");
        const int stop = narrow(json_int(v["stop"], path + "/stop"), path + "/stop");
        const int step = v.contains("step") ? narrow(json_int(v["step"], path + "/step"), path + "/step") : 1;
        if (step <= 0) config_fail(path + "/step", "must be > 0");
        if (stop < start) config_fail(path + "/stop", "must be >= start");
        std::vector<int> out;
        for (int i = start; i <= stop; i += step) out.push_back(i);
        return out;
    }
    config_fail(path, "expected an integer, an array or {start, stop[, step]}");
}

inline ModelParams json_params(const nlohmann::json& v, const std::string& path)
{
    if (!v.is_object()) config_fail(path, "expected an object {\"j\": ..., \"u\": ...}");
    only_keys(v, {"j", "u"}, path);
    for (const char* k : {"j", "u"})
        if (!v.contains(k)) config_fail(path + "/" + k, "missing");
    return {json_real(v["j"], path + "/j"), json_real(v["u"], path + "/u")};
}

template <class Enum, std::size_t K>
Enum json_enum(const nlohmann::json& v, const std::string& path, const std::array<std::pair<Enum, std::string_view>, K>& names)
{
    const auto s = json_string(v, path);
    std::string options;
    for (const auto& [e, name] : names) {
        if (name == s) return e;
        options += (options.empty() ? "" : ", ") + std::string(name);
    }
    config_fail(path, "'" + s + "' is not one of " + options);
}

inline constexpr std::array<std::pair<RunMode, std::string_view>, 2> kModeNames{
    {{RunMode::Quench, "quench"}, {RunMode::GroundState, "ground-state"}}};
inline constexpr std::array<std::pair<Integrator, std::string_view>, 2> kIntegratorNames{
    {{Integrator::Rk4, "rk4"}, {Integrator::Exact, "exact"}}};
inline constexpr std::array<std::pair<BoundReading, std::string_view>, 2> kReadingNames{
    {{BoundReading::ParticleNumber, "particle-number"}, {BoundReading::Dimension, "dimension"}}};
inline constexpr std::array<std::pair<OutputFormat, std::string_view>, 2> kFormatNames{
    {{OutputFormat::Csv, "csv"}, {OutputFormat::Json, "json"}}};

template <class Enum, std::size_t K>
std::string_view enum_name(Enum e, const std::array<std::pair<Enum, std::string_view>, K>& names)
{
    for (const auto& [k, name] : names)
        if (k == e) return name;
    return "?";
}

template <class T>
void require_distinct(const std::vector<T>& v, const std::string& path)
{
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (v[i] == v[j]) config_fail(path + "/" + std::to_string(i), "duplicate of entry " + std::to_string(j));
}

}  // namespace detail

inline ExperimentConfig default_config(Experiment e)
{
    ExperimentConfig c;
    c.experiment = e;
    switch (e) {
    case Experiment::Thermal:
        c.n = detail::int_range(1, 5);
        c.beta = {0.0, 0.1, 1.0, 5.0, 10.0};
        c.j_over_u = detail::real_range(0.0, 20.0, 0.25);
        break;
    case Experiment::BecScaling: c.n = detail::int_range(1, 100); break;
    case Experiment::Quench: c.n = detail::int_range(1, 5); c.t_max = 50.0; break;
    case Experiment::Dephasing:
        c.n = detail::int_range(1, 5);
        c.gamma = {0.1, 1.0, 10.0};
        c.initial = {0.1, 1.0};
        c.evolution = {1.0, 1.0};
        break;
    case Experiment::Loss:
        c.n = detail::int_range(1, 5);
        c.gamma = {0.1, 1.0, 10.0};
        c.initial = {1.0, 1.0};
        c.evolution = {0.1, 1.0};
        break;
    case Experiment::Eof:
        c.n = {1, 5, 20, 100};
        c.j_over_u = detail::real_range(0.0, 10.0, 0.1);
        break;
    case Experiment::Selfcheck: c.n = detail::int_range(1, 6); break;
    }
    return c;
}

/// Range and consistency checks; errors name the offending JSON pointer.
inline void validate(const ExperimentConfig& c)
{
    using detail::config_fail;
    const auto& keys = detail::keys_for(c.experiment);

    if (c.n.empty()) config_fail("/n", "must not be empty");
    for (std::size_t i = 0; i < c.n.size(); ++i)
        if (c.n[i] < 1) config_fail("/n/" + std::to_string(i), "particle number must be >= 1");
    detail::require_distinct(c.n, "/n");

    const auto check_grid = [&](const std::vector<double>& g, const char* name, bool positive) {
        const std::string path = std::string("/") + name;
        if (g.empty()) config_fail(path, "must not be empty");
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!std::isfinite(g[i])) config_fail(path + "/" + std::to_string(i), "must be finite");
            if (positive ? !(g[i] > 0.0) : g[i] < 0.0)
                config_fail(path + "/" + std::to_string(i), positive ? "must be > 0" : "must be >= 0");
        }
        detail::require_distinct(g, path);
    };
    if (keys.contains("j_over_u")) check_grid(c.j_over_u, "j_over_u", false);
    if (keys.contains("beta")) check_grid(c.beta, "beta", false);
    if (keys.contains("gamma")) check_grid(c.gamma, "gamma", !c.t_max.has_value());

    if (keys.contains("t_max")) {
        if (c.experiment == Experiment::Quench && !c.t_max) config_fail("/t_max", "missing");
        if (c.t_max && (!std::isfinite(*c.t_max) || !(*c.t_max > 0.0))) config_fail("/t_max", "must be finite and > 0");
    }
    if (keys.contains("t_max_gamma_units") && (!std::isfinite(c.t_max_gamma_units) || !(c.t_max_gamma_units > 0.0)))
        config_fail("/t_max_gamma_units", "must be finite and > 0");
    if (keys.contains("samples") && (c.samples < 2 || c.samples > 10000000))
        config_fail("/samples", "must be between 2 and 10^7");

    if (keys.contains("initial")) {
        for (const auto& [p, name] : {std::pair{c.initial, "/initial"}, std::pair{c.evolution, "/evolution"},
                                      std::pair{c.hamiltonian, "/hamiltonian"}}) {
            if (!std::isfinite(p.hopping)) config_fail(std::string(name) + "/j", "must be finite");
            if (!std::isfinite(p.interaction)) config_fail(std::string(name) + "/u", "must be finite");
        }
    }

    if (keys.contains("integrator") && c.integrator == Integrator::Exact) {
        for (std::size_t i = 0; i < c.n.size(); ++i) {
            const long long n = c.n[i];
            const long long d = c.experiment == Experiment::Loss ? (n + 1) * (n + 2) / 2 : n + 1;
            if (d * d > 2500)
                config_fail("/n/" + std::to_string(i), "N=" + std::to_string(n)
                                                           + " exceeds the exact integrator's 2500 superoperator limit");
        }
    }

    if (c.experiment == Experiment::BecScaling) {
        if (c.fit_min_n < 1) config_fail("/fit_min_n", "must be >= 1");
        const auto used = std::count_if(c.n.begin(), c.n.end(), [&](int n) { return n >= c.fit_min_n; });
        if (used < 5) config_fail("/n", "the power-law fit needs at least 5 values with N >= fit_min_n");
    }
    if (c.experiment == Experiment::Selfcheck && c.trials < 1) config_fail("/trials", "must be >= 1");
    if (c.out.empty()) config_fail("/out", "must not be empty");
}

/// Overlay a parsed JSON document on the defaults for its experiment. The
/// experiment comes from `hint` (the CLI positional) and/or the document's
/// "experiment" key; they must agree when both are present.
inline ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<Experiment> hint = std::nullopt)
{
    using detail::config_fail;
    if (!doc.is_object()) config_fail("(root)", "expected a JSON object");

    std::optional<Experiment> exp = hint;
    if (doc.contains("experiment")) {
        const auto name = detail::json_string(doc["experiment"], "/experiment");
        const auto parsed = parse_experiment(name);
        if (!parsed) config_fail("/experiment", "unknown experiment '" + name + "'");
        if (hint && *hint != *parsed)
            config_fail("/experiment", "'" + name + "' conflicts with the requested experiment '"
                                           + std::string(to_string(*hint)) + "'");
        exp = parsed;
    }
    if (!exp) config_fail("/experiment", "missing");

    ExperimentConfig c = default_config(*exp);
    const auto& keys = detail::keys_for(*exp);
    bool explicit_t_max = false;
    bool explicit_units = false;

    for (const auto& [key, v] : doc.items()) {
        const std::string path = "/" + key;
        if (key == "experiment") continue;
        if (key == "out") {
            c.out = detail::json_string(v, path);
            continue;
        }
        if (key == "format") {
            c.format = detail::json_enum(v, path, detail::kFormatNames);
            continue;
        }
        static const std::set<std::string_view> known{
            "n",     "j_over_u",   "beta",      "gamma",           "t_max",     "t_max_gamma_units", "samples", "initial",
            "evolution", "hamiltonian", "mode", "integrator", "s_reading", "allow_degenerate", "fit_min_n", "trials", "seed"};
        if (!known.contains(key)) config_fail(path, "unknown key");
        if (!keys.contains(key)) config_fail(path, "not used by experiment '" + std::string(to_string(*exp)) + "'");

        if (key == "n") c.n = detail::json_int_grid(v, path);
        else if (key == "j_over_u") c.j_over_u = detail::json_real_grid(v, path);
        else if (key == "beta") c.beta = detail::json_real_grid(v, path);
        else if (key == "gamma") c.gamma = detail::json_real_grid(v, path);
        else if (key == "t_max") {
            c.t_max = detail::json_real(v, path);
            explicit_t_max = true;
        } else if (key == "t_max_gamma_units") {
            c.t_max_gamma_units = detail::json_real(v, path);
            explicit_units = true;
        } else if (key == "samples") {
            const auto s = detail::json_int(v, path);
            if (s < 2) config_fail(path, "must be >= 2");
            c.samples = static_cast<std::size_t>(s);
        } else if (key == "initial") c.initial = detail::json_params(v, path);
        else if (key == "evolution") c.evolution = detail::json_params(v, path);
        else if (key == "hamiltonian") c.hamiltonian = detail::json_params(v, path);
        else if (key == "mode") c.mode = detail::json_enum(v, path, detail::kModeNames);
        else if (key == "integrator") c.integrator = detail::json_enum(v, path, detail::kIntegratorNames);
        else if (key == "s_reading") c.s_reading = detail::json_enum(v, path, detail::kReadingNames);
        else if (key == "allow_degenerate") {
            if (!v.is_boolean()) config_fail(path, "expected a boolean");
            c.allow_degenerate = v.get<bool>();
        } else if (key == "fit_min_n") {
            const auto m = detail::json_int(v, path);
            if (m < 1 || m > 1000000) config_fail(path, "must be >= 1");
            c.fit_min_n = static_cast<int>(m);
        } else if (key == "trials") {
            const auto t = detail::json_int(v, path);
            if (t < 1 || t > 100000000) config_fail(path, "must be between 1 and 10^8");
            c.trials = static_cast<std::size_t>(t);
        } else if (key == "seed") {
            if (!v.is_number_unsigned()) config_fail(path, "expected a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        }
    }
    if (explicit_t_max && explicit_units) config_fail("/t_max", "give either t_max or t_max_gamma_units, not both");
    validate(c);
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Experiment> hint = std::nullopt)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return parse_config(doc, hint);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

/// Echo of every setting the experiment reads, in a fixed key order.
inline nlohmann::ordered_json config_to_json(const ExperimentConfig& c)
{
    const auto& keys = detail::keys_for(c.experiment);
    nlohmann::ordered_json j;
    j["experiment"] = to_string(c.experiment);
    if (keys.contains("n")) j["n"] = c.n;
    if (keys.contains("j_over_u")) j["j_over_u"] = c.j_over_u;
    if (keys.contains("beta")) j["beta"] = c.beta;
    if (keys.contains("gamma")) j["gamma"] = c.gamma;
    if (keys.contains("t_max")) j["t_max"] = c.t_max ? nlohmann::ordered_json(*c.t_max) : nlohmann::ordered_json(nullptr);
    if (keys.contains("t_max_gamma_units")) j["t_max_gamma_units"] = c.t_max_gamma_units;
    if (keys.contains("samples")) j["samples"] = c.samples;
    if (keys.contains("initial")) {
        j["initial"] = {{"j", c.initial.hopping}, {"u", c.initial.interaction}};
        j["evolution"] = {{"j", c.evolution.hopping}, {"u", c.evolution.interaction}};
    }
    if (keys.contains("hamiltonian")) j["hamiltonian"] = {{"j", c.hamiltonian.hopping}, {"u", c.hamiltonian.interaction}};
    if (keys.contains("mode")) j["mode"] = detail::enum_name(c.mode, detail::kModeNames);
    if (keys.contains("integrator")) j["integrator"] = detail::enum_name(c.integrator, detail::kIntegratorNames);
    if (keys.contains("s_reading")) j["s_reading"] = detail::enum_name(c.s_reading, detail::kReadingNames);
    if (keys.contains("allow_degenerate")) j["allow_degenerate"] = c.allow_degenerate;
    if (keys.contains("fit_min_n")) j["fit_min_n"] = c.fit_min_n;
    if (keys.contains("trials")) j["trials"] = c.trials;
    if (keys.contains("seed")) j["seed"] = c.seed;
    j["out"] = c.out;
    j["format"] = detail::enum_name(c.format, detail::kFormatNames);
    return j;
}

// ---- command-line overrides -------------------------------------------------

namespace detail {

inline double parse_real_token(std::string_view tok, const std::string& flag)
{
    const std::string s(tok);
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(x))
        config_fail(flag, "'" + s + "' is not a finite number");
    return x;
}

inline long long parse_int_token(std::string_view tok, const std::string& flag)
{
    const std::string s(tok);
    char* end = nullptr;
    errno = 0;
    const long long x = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) config_fail(flag, "'" + s + "' is not an integer");
    return x;
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        parts.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return parts;
}

}  // namespace detail

/// "a,b,c" or "start:stop:step" (stop inclusive).
inline std::vector<double> parse_real_grid(std::string_view text, const std::string& flag)
{
    if (text.find(':') != std::string_view::npos) {
        const auto p = detail::split(text, ':');
        if (p.size() != 3) detail::config_fail(flag, "range form is start:stop:step");
        const double start = detail::parse_real_token(p[0], flag);
        const double stop = detail::parse_real_token(p[1], flag);
        const double step = detail::parse_real_token(p[2], flag);
        if (!(step > 0.0)) detail::config_fail(flag, "step must be > 0");
        if (stop < start) detail::config_fail(flag, "stop must be >= start");
        if ((stop - start) / step > 1e6) detail::config_fail(flag, "range has more than 10^6 points");
        return detail::real_range(start, stop, step);
    }
    std::vector<double> v;
    for (auto tok : detail::split(text, ',')) v.push_back(detail::parse_real_token(tok, flag));
    return v;
}

/// "a,b,c" or "start:stop[:step]" (stop inclusive).
inline std::vector<int> parse_int_grid(std::string_view text, const std::string& flag)
{
    const auto narrow = [&](long long x) {
        if (x < -1000000 || x > 1000000) detail::config_fail(flag, "value out of range");
        return static_cast<int>(x);
    };
    if (text.find(':') != std::string_view::npos) {
        const auto p = detail::split(text, ':');
        if (p.size() != 2 && p.size() != 3) detail::config_fail(flag, "range form is start:stop[:step]");
        const int start = narrow(detail::parse_int_token(p[0], flag));
        const int stop = narrow(detail::parse_int_token(p[1], flag));
        const int step = p.size() == 3 ? narrow(detail::parse_int_token(p[2], flag)) : 1;
        if (step <= 0) detail::config_fail(flag, "step must be > 0");
        if (stop < start) detail::config_fail(flag, "stop must be >= start");
        std::vector<int> v;
        for (int i = start; i <= stop; i += step) v.push_back(i);
        return v;
    }
    std::vector<int> v;
    for (auto tok : detail::split(text, ',')) v.push_back(narrow(detail::parse_int_token(tok, flag)));
    return v;
}

/// Command-line overrides, applied on top of the file/default config.
struct ConfigOverrides {
    std::optional<std::string> n, beta, j_over_u, gamma, t_max, samples, out, format;
};

inline void apply_overrides(ExperimentConfig& c, const ConfigOverrides& o)
{
    const auto& keys = detail::keys_for(c.experiment);
    const auto usable = [&](const char* flag, std::string_view key) {
        if (!keys.contains(key))
            detail::config_fail(flag, "not used by experiment '" + std::string(to_string(c.experiment)) + "'");
    };
    if (o.n) {
        usable("--n", "n");
        c.n = parse_int_grid(*o.n, "--n");
    }
    if (o.beta) {
        usable("--beta", "beta");
        c.beta = parse_real_grid(*o.beta, "--beta");
    }
    if (o.j_over_u) {
        usable("--j-over-u", "j_over_u");
        c.j_over_u = parse_real_grid(*o.j_over_u, "--j-over-u");
    }
    if (o.gamma) {
        usable("--gamma", "gamma");
        c.gamma = parse_real_grid(*o.gamma, "--gamma");
    }
    if (o.t_max) {
        usable("--t-max", "t_max");
        c.t_max = detail::parse_real_token(*o.t_max, "--t-max");
    }
    if (o.samples) {
        usable("--samples", "samples");
        const auto s = detail::parse_int_token(*o.samples, "--samples");
        if (s < 2) detail::config_fail("--samples", "must be >= 2");
        c.samples = static_cast<std::size_t>(s);
    }
    if (o.out) c.out = *o.out;
    if (o.format) {
        bool matched = false;
        for (const auto& [f, name] : detail::kFormatNames)
            if (name == *o.format) {
                c.format = f;
                matched = true;
            }
        if (!matched) detail::config_fail("--format", "'" + *o.format + "' is not one of csv, json");
    }
    validate(c);
}

}  // namespace dwell
