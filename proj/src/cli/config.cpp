#include <cmath>
#include <fstream>
#include <sstream>

#include "ernst/cli.hpp"
#include "json.hpp"

namespace ernst::cli {

namespace {

using nlohmann::json;

double number(const json& j, const char* what)
{
    if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
    return v;
}

cplx complex_entry(const json& j, const char* what)
{
    if (j.is_number()) return number(j, what);
    if (!j.is_array() || j.size() != 2) throw ConfigError(std::string(what) + " must be [re, im]");
    return {number(j[0], what), number(j[1], what)};
}

RVector real_list(const json& j, const char* what)
{
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
    RVector out;
    for (const auto& v : j) out.push_back(number(v, what));
    return out;
}

std::vector<WorldPoint> point_list(const json& j, const char* what)
{
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of [rho, zeta]");
    std::vector<WorldPoint> out;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2) throw ConfigError(std::string(what) + " entries must be [rho, zeta]");
        out.push_back({number(p[0], what), number(p[1], what)});
    }
    return out;
}

bool flag(const json& obj, const char* key, bool dflt)
{
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_boolean()) throw ConfigError(std::string(key) + " must be a boolean");
    return obj[key].get<bool>();
}

SolutionSpec parse_solution(const json& s)
{
    if (!s.is_object()) throw ConfigError("solution must be an object");
    SolutionSpec spec;
    if (!s.contains("pairs") || !s["pairs"].is_array() || s["pairs"].empty())
        throw ConfigError("solution.pairs must be a non-empty array");
    for (const auto& p : s["pairs"]) {
        if (!p.is_object() || !p.contains("kind") || !p.contains("e") || !p.contains("f"))
            throw ConfigError("each pair needs kind, e and f");
        const std::string kind = p["kind"].is_string() ? p["kind"].get<std::string>() : "";
        BranchPair bp{complex_entry(p["e"], "pair.e"), complex_entry(p["f"], "pair.f"), PairKind::conjugate};
        if (kind == "conjugate")
            bp.kind = PairKind::conjugate;
        else if (kind == "real")
            bp.kind = PairKind::real_pair;
        else
            throw ConfigError("pair kind must be \"conjugate\" or \"real\"");
        spec.pairs.push_back(bp);
    }
    const std::size_t g = spec.pairs.size();
    spec.p = s.contains("p") ? real_list(s["p"], "solution.p") : RVector(g, 0.0);
    spec.q_im = s.contains("q_im") ? real_list(s["q_im"], "solution.q_im") : RVector(g, 0.0);
    if (s.contains("q_re")) spec.q_re = real_list(s["q_re"], "solution.q_re");
    spec.enforce_reality = flag(s, "enforce_reality", true);
    spec.include_phase = flag(s, "include_phase", true);
    if (s.contains("variant")) {
        const std::string v = s["variant"].is_string() ? s["variant"].get<std::string>() : "";
        if (v == "standard")
            spec.variant = Variant::standard;
        else if (v == "shifted")
            spec.variant = Variant::shifted;
        else
            throw ConfigError("variant must be \"standard\" or \"shifted\"");
    }
    if (spec.p.size() != g || spec.q_im.size() != g) throw ConfigError("p and q_im need one entry per pair");
    if (!spec.enforce_reality && spec.q_re.size() != g)
        throw ConfigError("q_re needs one entry per pair when enforce_reality is false");
    try {
        spec.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

GridSpec parse_grid(const json& j)
{
    if (!j.is_object()) throw ConfigError("grid must be an object");
    GridSpec g;
    for (const char* key : {"rho_min", "rho_max", "zeta_min", "zeta_max", "rho_count", "zeta_count"})
        if (!j.contains(key)) throw ConfigError(std::string("grid.") + key + " is required");
    g.rho_min = number(j["rho_min"], "grid.rho_min");
    g.rho_max = number(j["rho_max"], "grid.rho_max");
    g.zeta_min = number(j["zeta_min"], "grid.zeta_min");
    g.zeta_max = number(j["zeta_max"], "grid.zeta_max");
    if (!j["rho_count"].is_number_integer() || !j["zeta_count"].is_number_integer())
        throw ConfigError("grid counts must be integers");
    g.rho_count = j["rho_count"].get<int>();
    g.zeta_count = j["zeta_count"].get<int>();
    if (g.rho_count < 1 || g.zeta_count < 1) throw ConfigError("grid counts must be >= 1");
    if (g.rho_max < g.rho_min || g.zeta_max < g.zeta_min) throw ConfigError("grid bounds are reversed");
    return g;
}

}  // namespace

std::vector<WorldPoint> GridSpec::points() const
{
    std::vector<WorldPoint> pts;
    auto at = [](double lo, double hi, int n, int i) {
        return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    };
    for (int i = 0; i < rho_count; ++i)
        for (int k = 0; k < zeta_count; ++k)
            pts.push_back({at(rho_min, rho_max, rho_count, i), at(zeta_min, zeta_max, zeta_count, k)});
    return pts;
}

EvalOptions RunConfig::eval_options() const
{
    EvalOptions o;
    o.quad_order = quad_order;
    o.theta_eps = tol.series_eps;
    o.curve.rho_min = tol.rho_min;
    o.curve.sep_min = tol.sep_min;
    return o;
}

double RunConfig::fd_step(const WorldPoint& pt) const { return tol.fd_step ? *tol.fd_step : default_fd_step(pt); }

RunConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("solution")) throw ConfigError("config needs a solution block");

    RunConfig cfg;
    cfg.spec = parse_solution(j["solution"]);
    if (j.contains("grid")) cfg.grid = parse_grid(j["grid"]);
    if (j.contains("samples")) cfg.samples = point_list(j["samples"], "samples");
    if (j.contains("path")) cfg.path = point_list(j["path"], "path");
    if (j.contains("path_step")) {
        cfg.path_step = number(j["path_step"], "path_step");
        if (!(*cfg.path_step > 0.0)) throw ConfigError("path_step must be positive");
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) throw ConfigError("tolerances must be an object");
        auto get = [&](const char* key, double& dst) {
            if (t.contains(key)) dst = number(t[key], key);
        };
        get("series_eps", cfg.tol.series_eps);
        get("identity_tol", cfg.tol.identity_tol);
        get("pde_tol", cfg.tol.pde_tol);
        get("rho_min", cfg.tol.rho_min);
        get("sep_min", cfg.tol.sep_min);
        if (t.contains("fd_step") && !t["fd_step"].is_null()) cfg.tol.fd_step = number(t["fd_step"], "fd_step");
    }
    if (j.contains("quad_order")) {
        if (!j["quad_order"].is_number_integer()) throw ConfigError("quad_order must be an integer");
        cfg.quad_order = j["quad_order"].get<int>();
    }
    if (j.contains("format")) {
        const std::string f = j["format"].is_string() ? j["format"].get<std::string>() : "";
        if (f == "csv")
            cfg.format = OutputFormat::csv;
        else if (f == "json")
            cfg.format = OutputFormat::json;
        else
            throw ConfigError("format must be csv or json");
    }
    cfg.with_residuals = flag(j, "with_residuals", false);
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace ernst::cli
