// io.hpp - run configuration (JSON, schema-checked), report serialization,
// CSV output and run manifests

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "qchill/core.hpp"
#include "qchill/mcwf.hpp"
#include "qchill/models.hpp"
#include "qchill/stages.hpp"
#include "qchill/sweep.hpp"
#include "qchill/thermo.hpp"

namespace qchill {

using json = nlohmann::json;

inline constexpr std::string_view kToolVersion = "1.0.0";

// Configuration problems; `pointer` is the JSON pointer of the offending value.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string pointer, const std::string& message)
        : std::invalid_argument((pointer.empty() ? std::string("/") : pointer) + ": " + message),
          pointer_(std::move(pointer))
    {
    }

    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

inline const json& config_schema()
{
    static const json schema = json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "qchill run configuration",
  "type": "object",
  "additionalProperties": false,
  "required": ["kind", "omega_c", "omega_h", "baths"],
  "properties": {
    "kind": {"type": "string", "enum": ["three_level", "three_level_shorted", "four_level",
             "four_level_prime", "four_level_double_prime", "three_qubit"]},
    "omega_c": {"type": "number", "exclusiveMinimum": 0},
    "omega_h": {"type": "number", "exclusiveMinimum": 0},
    "g": {"type": "number", "minimum": 0},
    "kappa": {"type": "number", "minimum": 0, "maximum": 1},
    "seed": {"type": "integer", "minimum": 0},
    "baths": {
      "type": "array", "minItems": 3, "maxItems": 3,
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["label", "T"],
        "properties": {
          "label": {"type": "string", "enum": ["w", "h", "c"]},
          "T": {"type": "number", "exclusiveMinimum": 0},
          "gamma": {"type": "number", "exclusiveMinimum": 0},
          "filter": {
            "type": "object",
            "additionalProperties": false,
            "required": ["type"],
            "properties": {
              "type": {"type": "string", "enum": ["flat", "high_cutoff", "lorentzian", "tracking_cutoff"]},
              "omega_max": {"type": "number", "exclusiveMinimum": 0},
              "center": {"type": "number", "exclusiveMinimum": 0},
              "width": {"type": "number", "exclusiveMinimum": 0},
              "offset": {"type": "number"}
            }
          }
        }
      }
    },
    "sweep": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "omega_c_min": {"type": "number", "exclusiveMinimum": 0},
        "omega_c_max": {"type": "number", "exclusiveMinimum": 0},
        "n_points": {"type": "integer", "minimum": 2},
        "edge_points": {"type": "integer", "minimum": 0}
      }
    },
    "breakdown": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "omega_c_min": {"type": "number", "exclusiveMinimum": 0},
        "omega_c_max": {"type": "number", "exclusiveMinimum": 0},
        "n_points": {"type": "integer", "minimum": 2}
      }
    },
    "entropy_scan": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "omega_c_min": {"type": "number", "exclusiveMinimum": 0},
        "omega_c_max": {"type": "number", "exclusiveMinimum": 0},
        "n_points": {"type": "integer", "minimum": 2}
      }
    },
    "mcwf": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "n_trajectories": {"type": "integer", "minimum": 2},
        "duration": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "optimize": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "omega_c_min": {"type": "number", "exclusiveMinimum": 0},
        "omega_c_max": {"type": "number", "exclusiveMinimum": 0},
        "n_coarse": {"type": "integer", "minimum": 3}
      }
    },
    "reproduction": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "g_values": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
        "open_g": {"type": "number", "exclusiveMinimum": 0},
        "n_points": {"type": "integer", "minimum": 2}
      }
    },
    "output": {
      "type": "object", "additionalProperties": false,
      "properties": {"dir": {"type": "string"}}
    }
  }
})");
    return schema;
}

namespace detail {

inline std::string escape_pointer_token(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

inline std::string type_name(const json& v)
{
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    if (v.is_number_float()) return "number";
    return v.type_name();
}

inline bool has_type(const json& v, const std::string& t)
{
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "number") return v.is_number();
    if (t == "integer") {
        if (v.is_number_integer() || v.is_number_unsigned()) return true;
        if (v.is_number_float()) {
            const double d = v.get<double>();
            return std::isfinite(d) && d == std::floor(d);
        }
        return false;
    }
    if (t == "null") return v.is_null();
    return false;
}

// Validator for the subset of JSON Schema used by config_schema().
inline void validate_against(const json& v, const json& s, const std::string& ptr)
{
    if (auto t = s.find("type"); t != s.end() && !has_type(v, t->get<std::string>())) {
        throw ConfigError(ptr, "expected " + t->get<std::string>() + ", got " + type_name(v));
    }
    if (auto e = s.find("enum"); e != s.end()) {
        if (std::find(e->begin(), e->end(), v) == e->end()) {
            throw ConfigError(ptr, "value " + v.dump() + " is not one of " + e->dump());
        }
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(ptr, "number must be finite");
        if (auto m = s.find("minimum"); m != s.end() && x < m->get<double>()) {
            throw ConfigError(ptr, "must be >= " + m->dump());
        }
        if (auto m = s.find("exclusiveMinimum"); m != s.end() && !(x > m->get<double>())) {
            throw ConfigError(ptr, "must be > " + m->dump());
        }
        if (auto m = s.find("maximum"); m != s.end() && x > m->get<double>()) {
            throw ConfigError(ptr, "must be <= " + m->dump());
        }
    }
    if (v.is_object()) {
        if (auto req = s.find("required"); req != s.end()) {
            for (const auto& k : *req) {
                if (!v.contains(k.get<std::string>())) {
                    throw ConfigError(ptr + "/" + escape_pointer_token(k.get<std::string>()), "required key missing");
                }
            }
        }
        const auto props = s.find("properties");
        for (auto it = v.begin(); it != v.end(); ++it) {
            const std::string child = ptr + "/" + escape_pointer_token(it.key());
            if (props != s.end() && props->contains(it.key())) {
                validate_against(it.value(), (*props)[it.key()], child);
            } else if (auto ap = s.find("additionalProperties"); ap != s.end() && ap->is_boolean() && !ap->get<bool>()) {
                throw ConfigError(child, "unknown key");
            }
        }
    }
    if (v.is_array()) {
        if (auto m = s.find("minItems"); m != s.end() && v.size() < m->get<std::size_t>()) {
            throw ConfigError(ptr, "needs at least " + m->dump() + " items");
        }
        if (auto m = s.find("maxItems"); m != s.end() && v.size() > m->get<std::size_t>()) {
            throw ConfigError(ptr, "allows at most " + m->dump() + " items");
        }
        if (auto items = s.find("items"); items != s.end()) {
            for (std::size_t k = 0; k < v.size(); ++k) validate_against(v[k], *items, ptr + "/" + std::to_string(k));
        }
    }
}

} // namespace detail

inline void validate_config(const json& config) { detail::validate_against(config, config_schema(), ""); }

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct Range {
    double lo{0.0};
    double hi{0.0};
    std::size_t n{0};
};

struct RunConfig {
    ModelKind kind{ModelKind::FourLevel};
    ModelParams params{2.0, 6.0, 0.1, 0.0};
    BathSet baths = make_baths(9.0, 8.0, 7.0);
    std::uint64_t seed{0};
    Range sweep{};
    std::size_t sweep_edge_points{12};
    Range breakdown{};
    Range entropy_scan{};
    std::uint64_t mcwf_trajectories{1000};
    std::optional<double> mcwf_duration;  // default 1e5 / (gamma_h omega_h^3)
    Range optimize{};
    std::vector<double> repro_g{0.1, 0.3, 0.5};
    double repro_open_g{0.1};
    std::size_t repro_points{200};
    std::string output_dir{"."};
    json source;  // validated input document
};

inline json default_config_json()
{
    return json::parse(R"({
  "kind": "four_level",
  "omega_c": 2.0,
  "omega_h": 6.0,
  "g": 0.1,
  "baths": [
    {"label": "w", "T": 9.0, "gamma": 0.001, "filter": {"type": "flat"}},
    {"label": "h", "T": 8.0, "gamma": 0.001, "filter": {"type": "flat"}},
    {"label": "c", "T": 7.0, "gamma": 0.001, "filter": {"type": "flat"}}
  ]
})");
}

namespace detail {

inline SpectralFilter parse_filter(const json& f, const std::string& ptr)
{
    const std::string type = f.at("type").get<std::string>();
    auto need = [&](const char* key) {
        if (!f.contains(key)) throw ConfigError(ptr + "/" + key, "required for filter type " + type);
        return f.at(key).get<double>();
    };
    auto allow_only = [&](std::initializer_list<const char*> keys) {
        for (auto it = f.begin(); it != f.end(); ++it) {
            if (it.key() == "type") continue;
            bool ok = false;
            for (const char* k : keys) ok = ok || it.key() == k;
            if (!ok) throw ConfigError(ptr + "/" + escape_pointer_token(it.key()), "not used by filter type " + type);
        }
    };
    if (type == "flat") {
        allow_only({});
        return FlatFilter{};
    }
    if (type == "high_cutoff") {
        allow_only({"omega_max"});
        return HighCutoff{need("omega_max")};
    }
    if (type == "lorentzian") {
        allow_only({"center", "width"});
        return Lorentzian{need("center"), need("width")};
    }
    allow_only({"offset"});
    return TrackingCutoff{f.value("offset", 0.0)};
}

inline Range parse_range(const json& doc, const char* section, Range fallback, const char* count_key = "n_points")
{
    Range r = fallback;
    if (!doc.contains(section)) return r;
    const json& s = doc.at(section);
    r.lo = s.value("omega_c_min", r.lo);
    r.hi = s.value("omega_c_max", r.hi);
    r.n = s.value(count_key, r.n);
    if (!(r.lo < r.hi)) {
        throw ConfigError(std::string("/") + section + "/omega_c_max", "must exceed omega_c_min");
    }
    return r;
}

} // namespace detail

// Validates the document against the schema, then applies the semantic
// checks the schema cannot express (bath labels, frequency ordering).
inline RunConfig parse_config(const json& doc)
{
    validate_config(doc);
    RunConfig c;
    c.source = doc;
    c.kind = model_kind_from_string(doc.at("kind").get<std::string>());
    c.params.omega_c = doc.at("omega_c").get<double>();
    c.params.omega_h = doc.at("omega_h").get<double>();
    c.params.g = doc.value("g", 0.0);
    c.params.kappa = doc.value("kappa", 0.0);
    if (!(c.params.omega_c < c.params.omega_h)) throw ConfigError("/omega_c", "must be smaller than omega_h");
    if (c.kind == ModelKind::ThreeQubit && !(c.params.g > 0.0)) {
        throw ConfigError("/g", "three_qubit needs g > 0");
    }
    if (c.kind != ModelKind::ThreeLevelShorted && doc.contains("kappa") && c.params.kappa != 0.0) {
        throw ConfigError("/kappa", "only used by three_level_shorted");
    }

    std::array<bool, 3> seen{};
    const json& baths = doc.at("baths");
    for (std::size_t k = 0; k < baths.size(); ++k) {
        const std::string ptr = "/baths/" + std::to_string(k);
        const json& b = baths[k];
        const Bath label = bath_from_string(b.at("label").get<std::string>());
        if (seen[index(label)]) throw ConfigError(ptr + "/label", "duplicate bath label");
        seen[index(label)] = true;
        BathSpec spec{label, b.at("T").get<double>(), b.value("gamma", kDefaultGamma), FlatFilter{}};
        if (b.contains("filter")) spec.filter = detail::parse_filter(b.at("filter"), ptr + "/filter");
        c.baths[label] = spec;
    }

    const double wh = c.params.omega_h;
    c.seed = doc.value("seed", std::uint64_t{0});
    c.sweep = detail::parse_range(doc, "sweep", Range{1e-4 * wh, 0.6 * wh, 120});
    if (doc.contains("sweep")) c.sweep_edge_points = doc.at("sweep").value("edge_points", c.sweep_edge_points);
    c.breakdown = detail::parse_range(doc, "breakdown", Range{1e-3 * wh, 0.5 * wh, 50});
    c.entropy_scan = detail::parse_range(doc, "entropy_scan", Range{0.4 * wh, 0.475 * wh, 101});
    c.optimize = detail::parse_range(doc, "optimize", Range{1e-4 * wh, 0.6 * wh, kDefaultCoarsePoints}, "n_coarse");
    for (const Range* r : {&c.sweep, &c.breakdown, &c.entropy_scan, &c.optimize}) {
        if (!(r->hi < wh)) throw ConfigError("/omega_h", "omega_c ranges must stay below omega_h");
    }
    if (doc.contains("mcwf")) {
        const json& m = doc.at("mcwf");
        c.mcwf_trajectories = m.value("n_trajectories", c.mcwf_trajectories);
        if (m.contains("duration")) c.mcwf_duration = m.at("duration").get<double>();
    }
    if (doc.contains("reproduction")) {
        const json& f = doc.at("reproduction");
        if (f.contains("g_values")) c.repro_g = f.at("g_values").get<std::vector<double>>();
        c.repro_open_g = f.value("open_g", c.repro_open_g);
        c.repro_points = f.value("n_points", c.repro_points);
    }
    if (doc.contains("output")) c.output_dir = doc.at("output").value("dir", c.output_dir);
    try {
        validate(c.baths);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("/baths", e.what());
    }
    return c;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

// 64-bit FNV-1a over the canonical (sorted-key, compact) serialization.
inline std::string config_digest(const json& doc)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : doc.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// ---------------------------------------------------------------------------
// Number formatting and CSV
// ---------------------------------------------------------------------------

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path)
    {
        if (!out_) throw std::runtime_error("cannot write '" + path + "'");
        write_fields(header);
    }

    void row(const std::vector<std::optional<double>>& values)
    {
        std::vector<std::string> f;
        f.reserve(values.size());
        for (const auto& v : values) f.push_back(v ? format_double(*v) : std::string());
        write_fields(f);
    }

private:
    void write_fields(const std::vector<std::string>& fields)
    {
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (k) out_ << ',';
            out_ << fields[k];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

// ---------------------------------------------------------------------------
// JSON reports
// ---------------------------------------------------------------------------

inline json to_json(const Currents& q)
{
    return json{{"Q_w", q[Bath::w]}, {"Q_h", q[Bath::h]}, {"Q_c", q[Bath::c]}};
}

inline json to_json(const RealVector& v)
{
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
    return a;
}

// Row-major list of [re, im] pairs.
inline json state_to_json(const Matrix& rho)
{
    json entries = json::array();
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.cols(); ++j) entries.push_back({rho(i, j).real(), rho(i, j).imag()});
    }
    return json{{"dimension", rho.rows()}, {"entries", entries}};
}

inline json to_json(const std::vector<InvariantCheck>& checks)
{
    json a = json::array();
    for (const auto& c : checks) a.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"bound", c.bound}});
    return a;
}

inline json to_json(const SteadyReport& r, const BathSet& baths)
{
    json j;
    j["kind"] = to_string(r.kind);
    j["params"] = {{"omega_c", r.params.omega_c}, {"omega_h", r.params.omega_h}, {"g", r.params.g},
                   {"kappa", r.params.kappa}};
    j["temperatures"] = {{"T_w", baths[Bath::w].temperature}, {"T_h", baths[Bath::h].temperature},
                         {"T_c", baths[Bath::c].temperature}};
    j["energies"] = to_json(r.energies);
    j["populations"] = to_json(r.populations);
    j["labeled_populations"] = to_json(r.labeled_populations);
    j["currents"] = to_json(r.currents);
    j["entropy_rate"] = r.entropy_rate;
    j["cop"] = r.cop ? json(*r.cop) : json(nullptr);
    j["cooling"] = r.cooling;
    j["internal_temperatures"] = r.internal_temps;
    j["residual"] = r.residual;
    j["null_space_dimension"] = r.null_dimension;
    j["state"] = state_to_json(r.state);
    return j;
}

inline json to_json(const StageBreakdown& s)
{
    json j;
    j["omega_c"] = s.params.omega_c;
    j["I_plus"] = s.i_plus;
    j["I_minus"] = s.i_minus;
    j["I_leak"] = s.i_leak;
    j["D"] = s.d_norm;
    j["D_spanning_tree"] = s.d_tree;
    j["bracket_pairing"] = to_string(s.pairing);
    for (Stage st : kAllStages) {
        j["currents"][std::string(to_string(st))] = to_json(s.currents(st));
        j["entropy"][std::string(to_string(st))] = s.entropy(st);
    }
    if (s.windows) {
        j["windows"] = {{"plus", {s.windows->plus.lo, s.windows->plus.hi}},
                        {"minus", {s.windows->minus.lo, s.windows->minus.hi}},
                        {"plus_empty", s.windows->plus_empty}};
    }
    return j;
}

inline json to_json(const DiagnosisReport& d)
{
    auto state_name = [&](Eigen::Index k) {
        return json{{"index", k + 1}, {"energy", d.energies(k)}};
    };
    auto edge_json = [&](const GraphEdge& e) {
        return json{{"bath", to_string(e.bath)}, {"omega", e.omega}, {"lower", e.lower + 1}, {"upper", e.upper + 1}};
    };
    json j;
    j["kind"] = to_string(d.kind);
    j["energies"] = to_json(d.energies);
    j["state_indexing"] = "1-based, ascending energy";
    j["transition_count"] = d.transitions.size();
    j["channel_count"] = std::count_if(d.channels.begin(), d.channels.end(),
                                       [](const ChannelSummary& c) { return c.rate_down > 0.0 || c.rate_up > 0.0; });
    j["transitions"] = json::array();
    for (const auto& e : d.transitions) j["transitions"].push_back(edge_json(e));
    j["suppressed_transitions"] = json::array();
    for (const auto& e : d.suppressed) j["suppressed_transitions"].push_back(edge_json(e));
    for (Bath b : kAllBaths) j["per_bath_frequencies"][std::string(to_string(b))] = d.per_bath_frequencies[b];
    j["stages"] = json::array();
    for (const auto& s : d.stages) {
        json sj;
        sj["quanta"] = {{"w", s.quanta[Bath::w]}, {"h", s.quanta[Bath::h]}, {"c", s.quanta[Bath::c]}};
        sj["realizations"] = json::array();
        for (const auto& r : s.realizations) {
            json states = json::array();
            for (auto k : r.states) states.push_back(state_name(k));
            sj["realizations"].push_back(states);
        }
        j["stages"].push_back(sj);
    }
    j["stage_count"] = d.stages.size();
    j["stage_realization_count"] = d.realization_count();
    j["stage_pairs"] = json::array();
    for (const auto& p : d.stage_pairs) {
        json pj{{"stages", {p.first, p.second}},
                {"shared_bath", to_string(p.shared)},
                {"configuration", to_string(p.configuration)}};
        if (p.leak) pj["leak"] = {{"from", to_string(p.leak->from)}, {"to", to_string(p.leak->to)}};
        j["stage_pairs"].push_back(pj);
    }
    j["leak_directions"] = json::array();
    for (const auto& l : d.leak_directions) {
        j["leak_directions"].push_back({{"from", long_name(l.from)}, {"to", long_name(l.to)}});
    }
    j["leak_loops"] = json::array();
    for (const auto& l : d.leak_loops) {
        json states = json::array();
        for (auto k : l.states) states.push_back(k + 1);
        j["leak_loops"].push_back(
            {{"states", states}, {"source", to_string(l.source)}, {"sink", to_string(l.sink)}, {"quantum", l.quantum}});
    }
    j["dangling"] = json::array();
    for (auto k : d.dangling) j["dangling"].push_back(edge_json(d.transitions[k]));
    j["cycles_enumerated"] = d.cycles_enumerated;
    j["endoreversible"] = d.endoreversible;
    return j;
}

inline json to_json(const MeanError& m) { return json{{"mean", m.mean}, {"stderr", m.error}}; }

inline json to_json(const CurrentEstimate& e)
{
    json j;
    for (Bath b : kAllBaths) j["currents"]["Q_" + std::string(to_string(b))] = to_json(e.currents[b]);
    j["occupation"] = json::array();
    for (const auto& o : e.occupation) j["occupation"].push_back(to_json(o));
    j["cycle_flux"] = {{"I_plus", to_json(e.i_plus)}, {"I_minus", to_json(e.i_minus)}, {"I_leak", to_json(e.i_leak)}};
    for (std::size_t k = 0; k < kCycleTagCount; ++k) {
        j["cycle_counts"][std::string(to_string(static_cast<CycleTag>(k)))] = e.tally.counts[k];
    }
    j["cycle_convention"] = "loop-erasure; back-and-forth jumps and unmatched loops counted as other";
    j["n_trajectories"] = e.n_trajectories;
    j["seed"] = e.seed;
    j["duration"] = e.duration;
    j["jumps"] = e.jumps;
    return j;
}

inline json to_json(const OptimumReport& o)
{
    json j;
    j["kind"] = to_string(o.kind);
    j["omega_c_star"] = o.omega_c_star;
    j["Qc_max"] = o.qc_max;
    j["epsilon_star"] = o.epsilon_star;
    j["carnot_cop"] = o.carnot;
    j["bound"] = o.bound;
    j["bound_satisfied"] = o.bound_satisfied;
    j["margin"] = bound_check(o).margin;
    j["coarse_grid_max"] = o.coarse_max;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    j["omega_c_star_plus"] = opt(o.omega_c_star_plus);
    j["omega_c_star_minus"] = opt(o.omega_c_star_minus);
    j["epsilon_plus_at_star"] = opt(o.epsilon_plus_at_star);
    j["epsilon_minus_at_star"] = opt(o.epsilon_minus_at_star);
    j["epsilon_mixture"] = opt(o.epsilon_mixture);
    return j;
}

inline void write_json(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

} // namespace qchill
