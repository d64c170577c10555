#include "bouss/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bouss {

namespace {

using nlohmann::json;

struct TomlParser {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    explicit TomlParser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("TOML parse error at line " + std::to_string(line) + ": " + msg);
    }

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char get() {
        const char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }

    void skip_ws(bool newlines) {
        while (!eof()) {
            const char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
                get();
            } else {
                break;
            }
        }
    }

    std::string parse_key() {
        skip_ws(false);
        std::string k;
        if (!eof() && peek() == '"') return parse_string();
        while (!eof()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
                k.push_back(get());
            } else {
                break;
            }
        }
        if (k.empty()) fail("expected a key");
        return k;
    }

    std::string parse_string() {
        if (get() != '"') fail("expected '\"'");
        std::string s;
        while (!eof()) {
            char c = get();
            if (c == '"') return s;
            if (c == '\\') {
                if (eof()) break;
                const char e = get();
                switch (e) {
                    case 'n': s.push_back('\n'); break;
                    case 't': s.push_back('\t'); break;
                    case '"': s.push_back('"'); break;
                    case '\\': s.push_back('\\'); break;
                    default: fail("unsupported escape sequence");
                }
            } else if (c == '\n') {
                fail("unterminated string");
            } else {
                s.push_back(c);
            }
        }
        fail("unterminated string");
    }

    json parse_value() {
        skip_ws(false);
        if (eof()) fail("expected a value");
        const char c = peek();
        if (c == '"') return json(parse_string());
        if (c == '[') {
            get();
            json arr = json::array();
            skip_ws(true);
            if (!eof() && peek() == ']') {
                get();
                return arr;
            }
            while (true) {
                arr.push_back(parse_value());
                skip_ws(true);
                if (eof()) fail("unterminated array");
                const char d = get();
                if (d == ']') break;
                if (d != ',') fail("expected ',' or ']' in array");
                skip_ws(true);
                if (!eof() && peek() == ']') {  // trailing comma
                    get();
                    break;
                }
            }
            return arr;
        }
        if (c == '{') {
            get();
            json obj = json::object();
            skip_ws(false);
            if (!eof() && peek() == '}') {
                get();
                return obj;
            }
            while (true) {
                const std::string k = parse_key();
                skip_ws(false);
                if (eof() || get() != '=') fail("expected '=' in inline table");
                obj[k] = parse_value();
                skip_ws(false);
                if (eof()) fail("unterminated inline table");
                const char d = get();
                if (d == '}') break;
                if (d != ',') fail("expected ',' or '}' in inline table");
            }
            return obj;
        }
        // bare scalar: bool or number
        std::string tok;
        while (!eof()) {
            const char d = peek();
            if (d == '\n' || d == ',' || d == ']' || d == '}' || d == '#' || d == ' ' || d == '\t' ||
                d == '\r')
                break;
            tok.push_back(get());
        }
        if (tok == "true") return json(true);
        if (tok == "false") return json(false);
        if (tok.empty()) fail("expected a value");
        try {
            std::size_t used = 0;
            if (tok.find_first_of(".eE") == std::string::npos && tok.find("inf") == std::string::npos &&
                tok.find("nan") == std::string::npos) {
                const long long v = std::stoll(tok, &used);
                if (used == tok.size()) return json(v);
            }
            const double v = std::stod(tok, &used);
            if (used != tok.size()) fail("malformed number '" + tok + "'");
            return json(v);
        } catch (const std::exception&) {
            fail("malformed value '" + tok + "'");
        }
    }

    json parse_document() {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_ws(true);
            if (eof()) break;
            if (peek() == '[') {
                get();
                json* t = &root;
                while (true) {
                    const std::string part = parse_key();
                    t = &(*t)[part];
                    if (!t->is_object() && !t->is_null()) fail("table redefines a value");
                    if (t->is_null()) *t = json::object();
                    skip_ws(false);
                    if (eof()) fail("unterminated table header");
                    const char d = get();
                    if (d == ']') break;
                    if (d != '.') fail("expected '.' or ']' in table header");
                }
                table = t;
                skip_ws(false);
                if (!eof() && peek() != '\n' && peek() != '#') fail("junk after table header");
                continue;
            }
            const std::string key = parse_key();
            skip_ws(false);
            if (eof() || get() != '=') fail("expected '=' after key '" + key + "'");
            (*table)[key] = parse_value();
            skip_ws(false);
            if (!eof() && peek() != '\n' && peek() != '#') fail("junk after value for key '" + key + "'");
        }
        return root;
    }
};

[[noreturn]] void reject(const std::string& path, const std::string& why) {
    throw std::invalid_argument("config: " + path + ": " + why);
}

double want_number(const json& j, const std::string& path) {
    if (!j.is_number()) reject(path, "expected a number");
    return j.get<double>();
}

int want_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) reject(path, "expected an integer");
    return j.get<int>();
}

std::string want_string(const json& j, const std::string& path) {
    if (!j.is_string()) reject(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> want_array(const json& j, const std::string& path) {
    if (!j.is_array()) reject(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) reject(path, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

nlohmann::json parse_toml(const std::string& text) {
    TomlParser p(text);
    return p.parse_document();
}

nlohmann::json load_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str());
}

Sector RunConfig::sector_kind() const {
    if (sector == "full") return Sector::Full;
    if (sector == "odd") return Sector::Odd;
    if (sector == "even") return Sector::Even;
    throw std::invalid_argument("config: simulation.sector: must be full, odd or even");
}

int RunConfig::resolved_mx() const {
    if (mx > 0) return mx;
    const int cap = (sector_kind() == Sector::Full) ? 44 : 32;
    const int bound = (sector_kind() == Sector::Full) ? (2 * nx - 3) / 3 - 5 : ((2 * nx - 3) / 3 - 4) / 2;
    return std::max(8, std::min({nx / 2 - 5, cap, bound}));
}

int RunConfig::resolved_my() const {
    if (my > 0) return my;
    return std::max(8, std::min({ny / 2 - 3, 20, (2 * ny - 3) / 3 - 2}));
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    for (auto& [section, body] : j.items()) {
        if (section == "params") {
            double mu = 1.0, g = 1.0, k0 = 0.0, k1 = 0.0;
            for (auto& [k, v] : body.items()) {
                const std::string path = "params." + k;
                if (k == "mu") mu = want_number(v, path);
                else if (k == "g") g = want_number(v, path);
                else if (k == "k0") k0 = want_number(v, path);
                else if (k == "k1") k1 = want_number(v, path);
                else reject(path, "unknown key");
            }
            if (!(mu > 0.0)) reject("params.mu", "viscosity must be positive");
            if (!(g > 0.0)) reject("params.g", "gravity must be positive");
            if (k0 > 0.0 || k1 > 0.0)
                reject(k0 > 0.0 ? "params.k0" : "params.k1", "slip coefficients must be non-positive");
            c.params = PhysicalParams(mu, g, k0, k1);
        } else if (section == "profile") {
            if (!body.is_object()) reject("profile", "expected a table");
            const std::string kind = want_string(body.value("kind", json("linear")), "profile.kind");
            if (kind == "linear") {
                LinearProfile p;
                if (body.contains("beta")) p.beta = want_number(body["beta"], "profile.beta");
                c.profile = p;
            } else if (kind == "tanh") {
                TanhLayerProfile p;
                if (body.contains("center")) p.center = want_number(body["center"], "profile.center");
                if (body.contains("width")) p.width = want_number(body["width"], "profile.width");
                if (body.contains("jump")) p.jump = want_number(body["jump"], "profile.jump");
                if (!(p.width > 0.0)) reject("profile.width", "layer width must be positive");
                c.profile = p;
            } else if (kind == "table") {
                TableProfile p;
                p.x = want_array(body.value("x", json::array()), "profile.x");
                p.value = want_array(body.value("value", json::array()), "profile.value");
                c.profile = p;
            } else {
                reject("profile.kind", "must be linear, tanh or table");
            }
        } else if (section == "resolution") {
            for (auto& [k, v] : body.items()) {
                const std::string path = "resolution." + k;
                if (k == "n_nodes") c.n_nodes = want_int(v, path);
                else if (k == "n_basis") c.n_basis = want_int(v, path);
                else if (k == "nx") c.nx = want_int(v, path);
                else if (k == "ny") c.ny = want_int(v, path);
                else if (k == "mx") c.mx = want_int(v, path);
                else if (k == "my") c.my = want_int(v, path);
                else if (k == "m_modes") c.m_modes = want_int(v, path);
                else reject(path, "unknown key");
            }
            if (c.n_nodes < 8) reject("resolution.n_nodes", "need at least 8 nodes");
            if (c.n_basis < 4 || c.n_basis > c.n_nodes - 4)
                reject("resolution.n_basis", "need 4 <= n_basis <= n_nodes - 4");
            if (c.nx < 16 || c.ny < 16) reject("resolution.nx/ny", "need nx, ny >= 16");
            if (c.m_modes < 1) reject("resolution.m_modes", "need at least one mode");
        } else if (section == "xi") {
            for (auto& [k, v] : body.items()) {
                const std::string path = "xi." + k;
                if (k == "min") c.xi_min = want_number(v, path);
                else if (k == "max") c.xi_max = want_number(v, path);
                else if (k == "count") c.xi_count = want_int(v, path);
                else if (k == "spacing") c.xi_spacing = want_string(v, path);
                else reject(path, "unknown key");
            }
            if (!(c.xi_min > 0.0)) reject("xi.min", "must be positive");
            if (!(c.xi_max > c.xi_min)) reject("xi.max", "must exceed xi.min");
            if (c.xi_count < 3) reject("xi.count", "need at least 3 points");
            if (c.xi_spacing != "log" && c.xi_spacing != "linear")
                reject("xi.spacing", "must be log or linear");
        } else if (section == "tolerances") {
            for (auto& [k, v] : body.items()) {
                const std::string path = "tolerances." + k;
                if (k == "root") c.root_tol = want_number(v, path);
                else reject(path, "unknown key");
            }
            if (!(c.root_tol > 0.0)) reject("tolerances.root", "must be positive");
        } else if (section == "synthesis") {
            for (auto& [k, v] : body.items()) {
                const std::string path = "synthesis." + k;
                if (k == "f_center") c.f_center = want_number(v, path);
                else if (k == "f_width") c.f_width = want_number(v, path);
                else if (k == "n_quad") c.n_quad = want_int(v, path);
                else if (k == "x1_width_mult") c.x1_width_mult = want_number(v, path);
                else if (k == "times") c.times = want_array(v, path);
                else reject(path, "unknown key");
            }
            if (c.n_quad < 3) reject("synthesis.n_quad", "need at least 3 quadrature nodes");
            if (c.f_width < 0.0) reject("synthesis.f_width", "must be non-negative");
        } else if (section == "simulation") {
            for (auto& [k, v] : body.items()) {
                const std::string path = "simulation." + k;
                if (k == "R") c.R = want_number(v, path);
                else if (k == "dt") c.dt = want_number(v, path);
                else if (k == "T") c.T = want_number(v, path);
                else if (k == "cfl") c.cfl = want_number(v, path);
                else if (k == "system") c.system = want_string(v, path);
                else if (k == "mode") c.mode = want_string(v, path);
                else if (k == "sector") c.sector = want_string(v, path);
                else if (k == "theta_interp") c.theta_interp = want_int(v, path);
                else if (k == "init") c.init = want_string(v, path);
                else if (k == "init_index") c.init_index = want_int(v, path);
                else if (k == "init_xi") c.init_xi = want_number(v, path);
                else if (k == "init_amplitude") c.init_amplitude = want_number(v, path);
                else if (k == "snapshot_times") c.snapshot_times = want_array(v, path);
                else reject(path, "unknown key");
            }
            if (!(c.R > 0.0)) reject("simulation.R", "must be positive");
            if (!(c.dt > 0.0)) reject("simulation.dt", "must be positive");
            if (!(c.T >= 0.0)) reject("simulation.T", "must be non-negative");
            if (!(c.cfl > 0.0)) reject("simulation.cfl", "must be positive");
            if (c.system != "full" && c.system != "perturbed")
                reject("simulation.system", "must be full or perturbed");
            if (c.mode != "linearized" && c.mode != "nonlinear")
                reject("simulation.mode", "must be linearized or nonlinear");
            if (c.theta_interp != 4 && c.theta_interp != 6)
                reject("simulation.theta_interp", "must be 4 or 6");
            if (c.init != "zero" && c.init != "stokes-mode" && c.init != "growing-mode" &&
                c.init != "synthesis" && c.init != "bump")
                reject("simulation.init", "unknown initial data kind");
            c.sector_kind();  // validates
        } else if (section == "experiment") {
            for (auto& [k, v] : body.items()) {
                const std::string path = "experiment." + k;
                if (k == "epsilons") c.epsilons = want_array(v, path);
                else if (k == "K") c.K = want_number(v, path);
                else reject(path, "unknown key");
            }
            for (double e : c.epsilons)
                if (!(e > 0.0 && e < 1.0)) reject("experiment.epsilons", "must lie in (0,1)");
            if (!(c.K > 0.0)) reject("experiment.K", "must be positive");
        } else if (section == "rsweep") {
            for (auto& [k, v] : body.items()) {
                const std::string path = "rsweep." + k;
                if (k == "r_list") c.r_list = want_array(v, path);
                else reject(path, "unknown key");
            }
            for (double r : c.r_list)
                if (!(r > 0.0)) reject("rsweep.r_list", "box half-widths must be positive");
        } else if (section == "output") {
            for (auto& [k, v] : body.items()) {
                const std::string path = "output." + k;
                if (k == "dir") c.out_dir = want_string(v, path);
                else reject(path, "unknown key");
            }
        } else {
            reject(section, "unknown section");
        }
    }
    // cross validation
    make_profile(c.profile);  // throws on malformed profiles
    return c;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["params"] = {{"mu", params.mu}, {"g", params.g}, {"k0", params.k0}, {"k1", params.k1}};
    if (std::holds_alternative<LinearProfile>(profile)) {
        j["profile"] = {{"kind", "linear"}, {"beta", std::get<LinearProfile>(profile).beta}};
    } else if (std::holds_alternative<TanhLayerProfile>(profile)) {
        const auto& p = std::get<TanhLayerProfile>(profile);
        j["profile"] = {{"kind", "tanh"}, {"center", p.center}, {"width", p.width}, {"jump", p.jump}};
    } else {
        const auto& p = std::get<TableProfile>(profile);
        j["profile"] = {{"kind", "table"}, {"x", p.x}, {"value", p.value}};
    }
    j["resolution"] = {{"n_nodes", n_nodes}, {"n_basis", n_basis}, {"nx", nx},
                       {"ny", ny},           {"mx", mx},           {"my", my},
                       {"m_modes", m_modes}};
    j["xi"] = {{"min", xi_min}, {"max", xi_max}, {"count", xi_count}, {"spacing", xi_spacing}};
    j["tolerances"] = {{"root", root_tol}};
    j["synthesis"] = {{"f_center", f_center},
                      {"f_width", f_width},
                      {"n_quad", n_quad},
                      {"x1_width_mult", x1_width_mult},
                      {"times", times}};
    j["simulation"] = {{"R", R},         {"dt", dt},
                       {"T", T},         {"cfl", cfl},
                       {"system", system}, {"mode", mode},
                       {"sector", sector}, {"theta_interp", theta_interp},
                       {"init", init},   {"init_index", init_index},
                       {"init_xi", init_xi}, {"init_amplitude", init_amplitude},
                       {"snapshot_times", snapshot_times}};
    j["experiment"] = {{"epsilons", epsilons}, {"K", K}};
    j["rsweep"] = {{"r_list", r_list}};
    j["output"] = {{"dir", out_dir}};
    return j;
}

RunConfig load_config(const std::string& path) { return RunConfig::from_json(load_toml_file(path)); }

}  // namespace bouss
