// SPDX-License-Identifier: Apache-2.0
#include "porohom/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace porohom {

namespace {

using nlohmann::json;

void flatten(const json& node, const std::string& prefix, std::map<std::string, json>& out) {
    if (node.is_object()) {
        for (const auto& [key, value] : node.items())
            flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    } else {
        out[prefix] = node;
    }
}

std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::map<std::string, json> parse_keyvalue(const std::string& text,
                                           std::vector<std::string>& violations) {
    std::map<std::string, json> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trimmed(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            violations.push_back("line " + std::to_string(lineno) + ": expected `key = value`");
            continue;
        }
        const std::string key = trimmed(line.substr(0, eq));
        const std::string value = trimmed(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            violations.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        json v = json::parse(value, nullptr, false);
        if (v.is_discarded()) v = value; // bare words are strings
        out[key] = v;
    }
    return out;
}

struct Reader {
    std::map<std::string, json> kv;
    std::vector<std::string>& violations;
    std::set<std::string> consumed;

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    template <typename T>
    T get(const std::string& key, T fallback, const char* type_name) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        consumed.insert(key);
        if (it->second.is_string() && !std::is_same_v<T, std::string>) {
            violations.push_back(key + ": expected " + type_name);
            return fallback;
        }
        try {
            return it->second.get<T>();
        } catch (...) {
            violations.push_back(key + ": expected " + type_name);
            return fallback;
        }
    }

    std::vector<double> get_list(const std::string& key, std::vector<double> fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        consumed.insert(key);
        try {
            return it->second.get<std::vector<double>>();
        } catch (...) {
            violations.push_back(key + ": expected a list of numbers");
            return fallback;
        }
    }

    void report_unknown() {
        for (const auto& [key, value] : kv)
            if (!consumed.count(key)) violations.push_back("unknown key: " + key);
    }
};

} // namespace

CellGeometry ExperimentConfig::make_cell() const {
    CellGeometry cell;
    cell.clearance = clearance;
    if (obstacle == "square")
        cell.obstacle = make_square_obstacle(square_side);
    else if (obstacle == "ngon")
        cell.obstacle = make_ngon_obstacle(ngon_n, ngon_r);
    return cell;
}

std::string ExperimentConfig::obstacle_id() const {
    char buf[96];
    if (obstacle == "square") {
        std::snprintf(buf, sizeof buf, "square(side=%g)", square_side);
        return buf;
    }
    if (obstacle == "ngon") {
        std::snprintf(buf, sizeof buf, "ngon(n=%d,r=%g)", ngon_n, ngon_r);
        return buf;
    }
    return "none";
}

int ExperimentConfig::nsteps_for(double eps) const {
    if (time_rule == "explicit") return nsteps;
    const double dt = time_rule == "eps_quadratic" ? dt_ref * eps * eps : dt_ref * eps;
    return std::max(1, static_cast<int>(std::lround(T / dt)));
}

std::vector<std::string> known_data_presets() { return {"zero", "source", "sinpi", "decay"}; }

ProblemData ExperimentConfig::make_data() const {
    ProblemData d;
    d.kappa = kappa;
    d.T = T;
    const double l = L;
    auto zero3 = [](double, double, double) { return 0.0; };
    auto zero2 = [](double, double) { return 0.0; };
    if (preset == "zero") {
        d.f = zero3;
        d.g = zero3;
        d.u0 = zero2;
    } else if (preset == "source") {
        d.f = [](double, double, double) { return 1.0; };
        d.g = zero3;
        d.u0 = zero2;
    } else if (preset == "sinpi") {
        d.f = [l](double x, double y, double) { return std::sin(M_PI * x / l) * std::sin(M_PI * y / l); };
        d.g = [](double, double, double) { return 1.0; };
        d.u0 = zero2;
    } else if (preset == "decay") {
        d.f = zero3;
        d.g = zero3;
        d.u0 = [l](double x, double y) { return std::sin(M_PI * x / l) * std::sin(M_PI * y / l); };
    } else {
        throw config_error({"unknown data preset: " + preset});
    }
    return d;
}

ExperimentConfig parse_config(const std::string& text) {
    std::vector<std::string> violations;

    std::map<std::string, json> kv;
    const std::string body = trimmed(text);
    if (!body.empty() && body.front() == '{') {
        json doc = json::parse(body, nullptr, false);
        if (doc.is_discarded()) {
            throw config_error({"malformed JSON document"});
        }
        flatten(doc, "", kv);
    } else {
        kv = parse_keyvalue(text, violations);
    }

    Reader r{std::move(kv), violations, {}};
    ExperimentConfig c;
    c.obstacle = r.get<std::string>("cell.obstacle", c.obstacle, "string");
    c.square_side = r.get<double>("cell.side", c.square_side, "number");
    c.ngon_n = r.get<int>("cell.n", c.ngon_n, "integer");
    c.ngon_r = r.get<double>("cell.r", c.ngon_r, "number");
    c.clearance = r.get<double>("cell.clearance", c.clearance, "number");
    c.cell_m = r.get<int>("cell.m", c.cell_m, "integer");
    c.L = r.get<double>("domain.L", c.L, "number");
    c.eps_list = r.get_list("sweep.eps", c.eps_list);
    c.dns_m = r.get<int>("dns.m", c.dns_m, "integer");
    c.preset = r.get<std::string>("data.preset", c.preset, "string");
    c.kappa = r.get<double>("data.kappa", c.kappa, "number");
    c.T = r.get<double>("data.T", c.T, "number");
    c.time_rule = r.get<std::string>("time.rule", c.time_rule, "string");
    c.dt_ref = r.get<double>("time.dt_ref", c.dt_ref, "number");
    c.nsteps = r.get<int>("time.nsteps", c.nsteps, "integer");
    c.cg_tol = r.get<double>("solver.cg_tol", c.cg_tol, "number");
    c.output_dir = r.get<std::string>("output.dir", c.output_dir, "string");
    r.report_unknown();

    if (c.obstacle != "none" && c.obstacle != "square" && c.obstacle != "ngon")
        violations.push_back("cell.obstacle: must be none, square or ngon");
    if (c.obstacle == "square" && !(c.square_side > 0.0))
        violations.push_back("cell.side: must be positive");
    if (c.obstacle == "ngon" && c.ngon_n < 3) violations.push_back("cell.n: must be at least 3");
    if (c.obstacle == "ngon" && !(c.ngon_r > 0.0)) violations.push_back("cell.r: must be positive");
    if (!(c.clearance > 0.0) || c.clearance >= 0.5)
        violations.push_back("cell.clearance: must lie in (0, 1/2)");
    if (c.cell_m < 2) violations.push_back("cell.m: must be at least 2");
    if (!(c.L > 0.0)) violations.push_back("domain.L: must be positive");
    if (c.dns_m < 2) violations.push_back("dns.m: must be at least 2");
    if (c.eps_list.empty()) violations.push_back("sweep.eps: must not be empty");
    for (std::size_t i = 0; i + 1 < c.eps_list.size(); ++i)
        if (!(c.eps_list[i] > c.eps_list[i + 1])) {
            violations.push_back("sweep.eps: must be strictly decreasing");
            break;
        }
    for (double eps : c.eps_list) {
        if (!(eps > 0.0)) {
            violations.push_back("sweep.eps: entries must be positive");
            continue;
        }
        const double ratio = c.L / eps;
        const long k = std::lround(ratio);
        if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * std::max(1.0, ratio))
            violations.push_back("sweep.eps: L/eps not integer for eps=" + std::to_string(eps));
    }
    bool preset_known = false;
    for (const std::string& p : known_data_presets()) preset_known |= (p == c.preset);
    if (!preset_known) violations.push_back("data.preset: unknown preset `" + c.preset + "`");
    if (!(c.kappa > 0.0)) violations.push_back("data.kappa: must be positive");
    if (!(c.T > 0.0)) violations.push_back("data.T: must be positive");
    if (c.time_rule != "eps_linear" && c.time_rule != "eps_quadratic" && c.time_rule != "explicit")
        violations.push_back("time.rule: must be eps_linear, eps_quadratic or explicit");
    if (c.time_rule != "explicit" && !(c.dt_ref > 0.0))
        violations.push_back("time.dt_ref: must be positive");
    if (c.time_rule == "explicit" && c.nsteps < 1)
        violations.push_back("time.nsteps: must be at least 1 for the explicit rule");
    if (!(c.cg_tol > 0.0) || c.cg_tol > 1e-2)
        violations.push_back("solver.cg_tol: must lie in (0, 1e-2]");
    if (c.output_dir.empty()) violations.push_back("output.dir: must not be empty");

    if (violations.empty()) {
        try {
            c.make_cell().validate();
        } catch (const geometry_error& e) {
            violations.push_back(std::string("cell geometry: ") + e.what());
        }
    }
    if (!violations.empty()) throw config_error(std::move(violations));
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error({"cannot open config file: " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace porohom
