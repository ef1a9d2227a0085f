#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "dxasp/ingestion.hpp"

namespace dxasp {

struct Config {
    std::size_t grounding_cap = 1'000'000;
    std::size_t max_models = 64;
    std::size_t max_repair_attempts = 3;
    std::size_t max_in_flight = 4;
    bool bridge = true;
    EndpointConfig endpoint;
};

using EnvLookup = std::function<const char*(const char*)>;

/// Flat `key = value` lines; `#` starts a comment; values may be quoted.
void apply_config_text(Config& c, std::string_view text, const std::string& source = "<config>");
void apply_config_file(Config& c, const std::string& path);

/// DXASP_LLM_URL, DXASP_LLM_MODEL, DXASP_LLM_KEY.
void apply_env(Config& c, const EnvLookup& env);

/// Throws Error unless every cap is at least 1.
void validate_config(const Config& c);

}  // namespace dxasp
