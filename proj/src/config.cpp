#include "dxasp/config.hpp"

#include <fstream>
#include <sstream>

#include "dxasp/errors.hpp"

namespace dxasp {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::size_t to_count(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const long long n = std::stoll(v, &used);
        if (used != v.size() || n < 0) throw std::invalid_argument(v);
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw Error(where + ": expected a non-negative integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(where + ": expected true or false, got '" + v + "'");
}

}  // namespace

void apply_config_text(Config& c, std::string_view text, const std::string& source) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const std::string where = source + ":" + std::to_string(n);
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty() || t.front() == '[') continue;  // blank or section header
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw Error(where + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
            value = value.substr(1, value.size() - 2);

        if (key == "grounding_cap") c.grounding_cap = to_count(value, where);
        else if (key == "max_models") c.max_models = to_count(value, where);
        else if (key == "max_repair_attempts") c.max_repair_attempts = to_count(value, where);
        else if (key == "max_in_flight") c.max_in_flight = to_count(value, where);
        else if (key == "bridge") c.bridge = to_bool(value, where);
        else if (key == "llm_url") c.endpoint.url = value;
        else if (key == "llm_model") c.endpoint.model = value;
        else if (key == "llm_key") c.endpoint.api_key = value;
        else if (key == "llm_response_pointer") c.endpoint.response_pointer = value;
        else if (key == "llm_timeout") c.endpoint.timeout_seconds = static_cast<int>(to_count(value, where));
        else throw Error(where + ": unknown key '" + key + "'");
    }
}

void apply_config_file(Config& c, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_text(c, ss.str(), path);
}

void apply_env(Config& c, const EnvLookup& env) {
    if (const char* v = env("DXASP_LLM_URL"); v && *v) c.endpoint.url = v;
    if (const char* v = env("DXASP_LLM_MODEL"); v && *v) c.endpoint.model = v;
    if (const char* v = env("DXASP_LLM_KEY"); v && *v) c.endpoint.api_key = v;
}

void validate_config(const Config& c) {
    if (c.grounding_cap < 1) throw Error("grounding_cap must be at least 1");
    if (c.max_models < 1) throw Error("max_models must be at least 1");
    if (c.max_repair_attempts < 1) throw Error("max_repair_attempts must be at least 1");
    if (c.max_in_flight < 1) throw Error("max_in_flight must be at least 1");
}

}  // namespace dxasp
