#include "slice/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "slice/error.hpp"

namespace slice {

using nlohmann::ordered_json;

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json to_json(const ExperimentConfig& c) {
    ordered_json j;
    j["kind"] = std::string(to_string(c.kind));
    j["grid"] = {{"nx", c.grid.nx}, {"nz", c.grid.nz}, {"L", c.grid.L}, {"H", c.grid.H}};
    const ModelParams& p = c.params;
    j["params"] = {{"f", p.f},   {"g", p.g},         {"theta0", p.theta0},   {"s", p.s},
                   {"cp", p.cp}, {"cv", p.cv},       {"p0", p.p0},           {"alpha", p.alpha},
                   {"frame_u", p.frame_u}, {"Pi0_lapse", opt(p.Pi0_lapse)}};
    j["N2"] = c.N2;
    j["Pi_surface"] = c.Pi_surface;
    j["perturbation"] = {{"amplitude", c.perturbation.amplitude}, {"mode", c.perturbation.mode}};
    const IntegratorConfig& ic = c.integrator;
    j["integrator"] = {{"scheme", std::string(to_string(ic.scheme))},
                       {"dt", opt(ic.dt)},
                       {"courant", ic.courant},
                       {"t_end", ic.t_end},
                       {"diag_interval", ic.diag_interval},
                       {"dt_max", ic.dt_max},
                       {"solver", {{"tol", ic.solver.tol}, {"max_iter", ic.solver.max_iter}}}};
    ordered_json loops = ordered_json::array();
    for (const LoopSpec& l : c.loops) loops.push_back({{"x1", l.x1}, {"x2", l.x2}, {"z1", l.z1}, {"z2", l.z2}, {"n", l.n}});
    j["loops"] = loops;
    j["tracers"] = {{"nx", c.tracers.nx}, {"nz", c.tracers.nz}, {"margin", c.tracers.margin}};
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    j["write_snapshots"] = c.write_snapshots;
    return j;
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

// Keys whose default is null but which accept a number.
bool nullable_number(const std::string& path) { return path == "params.Pi0_lapse" || path == "integrator.dt"; }

const ordered_json& loop_template() {
    static const ordered_json t = to_json(ExperimentConfig{})["loops"][0];
    return t;
}

void check_type(const ordered_json& def, const ordered_json& v, const std::string& path) {
    auto mismatch = [&](const char* want) { config_error("type mismatch at '" + path + "': expected " + want); };
    if (nullable_number(path)) {
        if (!v.is_null() && !v.is_number()) mismatch("number or null");
    } else if (def.is_number_integer() || def.is_number_unsigned()) {
        if (!v.is_number_integer() && !v.is_number_unsigned()) mismatch("integer");
    } else if (def.is_number()) {
        if (!v.is_number()) mismatch("number");
    } else if (def.is_string()) {
        if (!v.is_string()) mismatch("string");
    } else if (def.is_boolean()) {
        if (!v.is_boolean()) mismatch("boolean");
    } else if (def.is_object()) {
        if (!v.is_object()) mismatch("object");
    } else if (def.is_array()) {
        if (!v.is_array()) mismatch("array");
    }
}

void merge(ordered_json& dst, const ordered_json& src, const std::string& prefix);

void assign(ordered_json& dst, const ordered_json& v, const std::string& path) {
    check_type(dst, v, path);
    if (dst.is_object()) {
        merge(dst, v, path + ".");
    } else if (dst.is_array()) {
        ordered_json out = ordered_json::array();
        for (std::size_t i = 0; i < v.size(); ++i) {
            ordered_json item = loop_template();
            assign(item, v[i], path + "." + std::to_string(i));
            out.push_back(item);
        }
        dst = out;
    } else {
        dst = v;
    }
}

void merge(ordered_json& dst, const ordered_json& src, const std::string& prefix) {
    for (auto it = src.begin(); it != src.end(); ++it) {
        if (!dst.contains(it.key())) config_error("unknown key '" + prefix + it.key() + "'");
        assign(dst[it.key()], it.value(), prefix + it.key());
    }
}

void apply_override(ordered_json& j, const std::string& ov) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) config_error("override '" + ov + "' is not of the form key=value");
    const std::string key = ov.substr(0, eq), text = ov.substr(eq + 1);
    ordered_json* node = &j;
    std::string path;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) {
        path += (path.empty() ? "" : ".") + part;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(part);
            } catch (...) {
                config_error("override key '" + path + "' needs an array index");
            }
            if (idx >= node->size()) config_error("override index out of range at '" + path + "'");
            node = &(*node)[idx];
        } else if (node->is_object() && node->contains(part)) {
            node = &(*node)[part];
        } else {
            config_error("unknown key '" + path + "'");
        }
    }
    ordered_json v = ordered_json::parse(text, nullptr, false);
    if (v.is_discarded()) v = text;
    assign(*node, v, key);
}

ExperimentConfig from_json(const ordered_json& j) {
    ExperimentConfig c;
    try {
        c.kind = model_kind_from_string(j["kind"].get<std::string>());
        c.integrator.scheme = scheme_from_string(j["integrator"]["scheme"].get<std::string>());
    } catch (const Error& e) {
        config_error(e.what());
    }
    const auto& g = j["grid"];
    c.grid = {g["nx"].get<int>(), g["nz"].get<int>(), g["L"].get<double>(), g["H"].get<double>()};
    const auto& p = j["params"];
    c.params.f = p["f"];
    c.params.g = p["g"];
    c.params.theta0 = p["theta0"];
    c.params.s = p["s"];
    c.params.cp = p["cp"];
    c.params.cv = p["cv"];
    c.params.p0 = p["p0"];
    c.params.alpha = p["alpha"];
    c.params.frame_u = p["frame_u"];
    if (!p["Pi0_lapse"].is_null()) c.params.Pi0_lapse = p["Pi0_lapse"].get<double>();
    c.N2 = j["N2"];
    c.Pi_surface = j["Pi_surface"];
    c.perturbation = {j["perturbation"]["amplitude"].get<double>(), j["perturbation"]["mode"].get<int>()};
    const auto& ic = j["integrator"];
    if (!ic["dt"].is_null()) c.integrator.dt = ic["dt"].get<double>();
    c.integrator.courant = ic["courant"];
    c.integrator.t_end = ic["t_end"];
    c.integrator.diag_interval = ic["diag_interval"];
    c.integrator.dt_max = ic["dt_max"];
    c.integrator.solver.tol = ic["solver"]["tol"];
    c.integrator.solver.max_iter = ic["solver"]["max_iter"];
    c.loops.clear();
    for (const auto& l : j["loops"])
        c.loops.push_back({l["x1"].get<double>(), l["x2"].get<double>(), l["z1"].get<double>(), l["z2"].get<double>(),
                           l["n"].get<int>()});
    c.tracers = {j["tracers"]["nx"].get<int>(), j["tracers"]["nz"].get<int>(), j["tracers"]["margin"].get<double>()};
    c.output_dir = j["output_dir"];
    c.seed = j["seed"];
    c.write_snapshots = j["write_snapshots"];
    return c;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }

ExperimentConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
    ordered_json user;
    try {
        user = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        config_error(std::string("parse error: ") + e.what());
    }
    if (!user.is_object()) config_error("config must be a JSON object");
    ordered_json j = to_json(ExperimentConfig{});
    merge(j, user, "");
    for (const std::string& ov : overrides) apply_override(j, ov);
    ExperimentConfig c = from_json(j);
    try {
        c.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    return c;
}

ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) config_error("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

void write_provenance(const std::string& dir, const ExperimentConfig& cfg, const std::string& command) {
    std::filesystem::create_directories(dir);
    ordered_json j;
    j["version"] = kVersion;
    j["command"] = command;
    j["seed"] = cfg.seed;
    j["config"] = to_json(cfg);
    std::ofstream os(std::filesystem::path(dir) / "provenance.json");
    if (!os) throw Error(ErrorKind::Io, "cannot write provenance.json into " + dir);
    os << j.dump(2) << '\n';
}

}  // namespace slice
