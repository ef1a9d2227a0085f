#include "dxasp/ingestion.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dxasp/errors.hpp"
#include "dxasp/parser.hpp"

namespace dxasp {

namespace {

constexpr std::string_view kNaiveBody =
    "{medical_text}\n"
    "\n"
    "The paragraph above lists common symptoms of {disease_name}.\n"
    "Write a clingo script that diagnoses {disease_name} based on these symptoms.\n";

constexpr std::string_view kStructuredTail =
    "In the diagnosis rule, use a structure like:\n"
    "\n"
    "diagnosis({disease_name}) :- has(symptom(x)), has(symptom(y)) ...\n"
    "\n"
    "Include alternative diagnoses that share overlapping symptoms with {disease_name}.\n"
    "Add rules that link one symptom to another (e.g., symptom propagation or dependency).\n";

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string line_of(std::string_view text, std::size_t line) {
    std::size_t current = 1, start = 0;
    while (current < line) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) return {};
        start = nl + 1;
        ++current;
    }
    auto end = text.find('\n', start);
    return std::string(text.substr(start, end == std::string_view::npos ? text.size() - start : end - start));
}

}  // namespace

PromptTemplate PromptTemplate::naive() { return {"naive", std::string(kNaiveBody), PromptStyle::Naive}; }

PromptTemplate PromptTemplate::structured() {
    return {"structured", std::string(kNaiveBody) + std::string(kStructuredTail), PromptStyle::Structured};
}

PromptTemplate PromptTemplate::by_name(const std::string& name) {
    if (name == "naive") return naive();
    if (name == "structured") return structured();
    throw Error("unknown prompt template '" + name + "'");
}

std::string build_prompt(const PromptTemplate& tmpl, std::string_view disease_name, std::string_view medical_text) {
    std::string out;
    const std::string& body = tmpl.body;
    for (std::size_t i = 0; i < body.size();) {
        if (body[i] == '{') {
            std::size_t j = i + 1;
            while (j < body.size() && ((body[j] >= 'a' && body[j] <= 'z') || body[j] == '_')) ++j;
            if (j > i + 1 && j < body.size() && body[j] == '}') {
                const std::string name = body.substr(i + 1, j - i - 1);
                if (name == "medical_text")
                    out += medical_text;
                else if (name == "disease_name")
                    out += disease_name;
                else
                    throw MissingPlaceholder(name);
                i = j + 1;
                continue;
            }
        }
        out += body[i++];
    }
    return out;
}

std::vector<std::string> extract_code_blocks(std::string_view response) {
    std::vector<std::string> blocks;
    std::optional<std::string> current;
    std::size_t start = 0;
    while (start <= response.size()) {
        auto nl = response.find('\n', start);
        std::string_view line = response.substr(start, nl == std::string_view::npos ? response.size() - start : nl - start);
        std::string_view trimmed = line;
        while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t')) trimmed.remove_prefix(1);
        if (trimmed.substr(0, 3) == "```") {
            if (current) {
                blocks.push_back(std::move(*current));
                current.reset();
            } else {
                current.emplace();
            }
        } else if (current) {
            *current += line;
            *current += '\n';
        }
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    if (current) blocks.push_back(std::move(*current));
    if (blocks.empty()) blocks.emplace_back(response);
    return blocks;
}

FixtureClient::FixtureClient(std::vector<Entry> entries) {
    for (auto& e : entries) {
        if (!sequences_.count(e.match)) keys_.push_back(e.match);
        sequences_[e.match].push_back(std::move(e.response));
    }
}

FixtureClient::FixtureClient(std::vector<std::string> responses) {
    keys_.push_back("");
    sequences_[""] = std::move(responses);
}

std::unique_ptr<FixtureClient> FixtureClient::from_file(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    if (path.extension() != ".jsonl") return std::make_unique<FixtureClient>(std::vector<std::string>{text});
    std::vector<Entry> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
        if (j.is_string())
            entries.push_back({"", j.get<std::string>()});
        else if (j.is_object() && j.contains("response"))
            entries.push_back({j.value("match", ""), j.at("response").get<std::string>()});
        else
            throw Error(path.string() + ":" + std::to_string(n) + ": expected a string or {\"response\": ...}");
    }
    return std::make_unique<FixtureClient>(std::move(entries));
}

std::string FixtureClient::complete(const std::string& prompt) {
    std::lock_guard lock(mu_);
    ++calls_;
    // Most specific (longest) matching key wins; "" matches everything.
    const std::string* best = nullptr;
    for (const auto& k : keys_)
        if (prompt.find(k) != std::string::npos && (!best || k.size() > best->size())) best = &k;
    if (!best) throw TransportError("fixture client has no response for this prompt");
    const auto& seq = sequences_.at(*best);
    if (seq.empty()) throw TransportError("fixture client has no responses");
    std::size_t& cursor = cursors_[*best];
    const std::string& out = seq[std::min(cursor, seq.size() - 1)];
    ++cursor;
    return out;
}

std::size_t FixtureClient::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

HttpClient::HttpClient(EndpointConfig config) : config_(std::move(config)) {
    if (config_.url.empty()) throw Error("no LLM endpoint configured (set DXASP_LLM_URL or llm_url)");
    if (config_.model.empty()) throw Error("no LLM model configured (set DXASP_LLM_MODEL or llm_model)");
}

std::string HttpClient::request_body(const std::string& prompt) const {
    nlohmann::ordered_json j;
    j["model"] = config_.model;
    j["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt}}});
    return j.dump();
}

std::string HttpClient::reply_text(const std::string& body) const {
    try {
        const auto j = nlohmann::json::parse(body);
        const auto& v = j.at(nlohmann::json::json_pointer(config_.response_pointer));
        if (!v.is_string()) throw TransportError("reply field " + config_.response_pointer + " is not a string");
        return v.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed reply: ") + e.what());
    }
}

std::string HttpClient::complete(const std::string& prompt) {
    const auto scheme_end = config_.url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("endpoint URL lacks a scheme: " + config_.url);
    const auto path_start = config_.url.find('/', scheme_end + 3);
    const std::string origin = config_.url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : config_.url.substr(path_start);

    httplib::Client cli(origin);
    cli.set_connection_timeout(config_.timeout_seconds);
    cli.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto res = cli.Post(path, headers, request_body(prompt), "application/json");
    if (!res) throw TransportError("request to " + config_.url + " failed: " + httplib::to_string(res.error()));
    if (res->status / 100 != 2)
        throw TransportError("endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    return reply_text(res->body);
}

void validate_translation(const Program& p, std::string_view disease_name) {
    validate_fragment(p);
    const std::string wanted = disease_key(normalize_symbol(disease_name));
    const bool found = std::any_of(p.rules.begin(), p.rules.end(), [&](const Rule& r) {
        if (!r.is<NormalRule>()) return false;
        const Atom& h = r.as<NormalRule>().head;
        return h.predicate == "diagnosis" && h.args.size() == 1 && h.args[0].kind == Term::Kind::Constant &&
               disease_key(h.args[0].name) == wanted;
    });
    if (!found)
        throw Error("no rule with head diagnosis(" + normalize_symbol(disease_name) +
                    "); write one rule per symptom combination using has(symptom(...)) body atoms");
}

std::string repair_prompt(const std::string& original_prompt, const std::string& diagnostic,
                          const std::string& offending_line) {
    std::string out = original_prompt;
    out += "\nYour previous answer could not be used:\n" + diagnostic + "\n";
    if (!offending_line.empty()) out += "Offending line:\n" + offending_line + "\n";
    out += "\nReply with the corrected clingo program in a single code block.\n";
    return out;
}

std::optional<Program> translate(TranslationJob& job, TranslatorClient& client, const TranslateOptions& options) {
    job.attempts.clear();
    job.final.reset();
    const std::string first_prompt = build_prompt(job.tmpl, job.disease_name, job.medical_text);
    const std::size_t max_attempts = std::max<std::size_t>(options.max_repair_attempts, 1);

    std::string prompt = first_prompt;
    for (std::size_t n = 0; n < max_attempts; ++n) {
        Attempt attempt{prompt, client.complete(prompt), false, {}};
        std::string code;
        for (const auto& block : extract_code_blocks(attempt.response)) {
            code += block;
            if (!code.empty() && code.back() != '\n') code += '\n';
        }
        std::string offending;
        try {
            Program p = parse_program(code, job.disease_name + ".lp");
            validate_translation(p, job.disease_name);
            attempt.ok = true;
            job.attempts.push_back(std::move(attempt));
            job.final = std::move(p);
            return job.final;
        } catch (const LexError& e) {
            attempt.diagnostic = e.what();
            offending = line_of(code, e.position.line);
        } catch (const ParseError& e) {
            attempt.diagnostic = e.what();
            offending = line_of(code, e.line);
        } catch (const SafetyError& e) {
            attempt.diagnostic = e.what();
            offending = line_of(code, e.line);
        } catch (const Error& e) {
            attempt.diagnostic = e.what();
        }
        prompt = repair_prompt(first_prompt, attempt.diagnostic, offending);
        job.attempts.push_back(std::move(attempt));
    }
    return std::nullopt;
}

void translate_all(std::vector<TranslationJob>& jobs, TranslatorClient& client, const TranslateOptions& options,
                   std::size_t max_in_flight) {
    const std::size_t workers = std::min(std::max<std::size_t>(max_in_flight, 1), jobs.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
                try {
                    translate(jobs[i], client, options);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

MergeResult merge(const Program& kb, const Program& fragment, std::string_view prefix) {
    MergeResult out{kb, {}};
    std::string pre(prefix);
    if (pre.empty()) {
        pre = "fragment";
        for (const auto& r : fragment.rules) {
            if (r.is<NormalRule>() && r.as<NormalRule>().head.predicate == "diagnosis" &&
                r.as<NormalRule>().head.args.size() == 1) {
                pre = render(r.as<NormalRule>().head.args[0]);
                break;
            }
        }
    }
    auto has_shape = [&](auto pred) { return std::any_of(out.program.rules.begin(), out.program.rules.end(), pred); };

    for (std::size_t i = 0; i < fragment.rules.size(); ++i) {
        Rule r = fragment.rules[i];
        if (has_shape([&](const Rule& e) { return e.shape == r.shape; })) continue;
        if (r.is<ChoiceRule>() && has_shape([](const Rule& e) { return e.is<ChoiceRule>(); })) {
            out.warnings.push_back("dropped additional choice rule: " + render(r));
            continue;
        }
        if (r.is<Minimize>() && has_shape([](const Rule& e) { return e.is<Minimize>(); })) {
            out.warnings.push_back("dropped additional minimize statement: " + render(r));
            continue;
        }
        if (r.label && out.program.has_label(*r.label)) {
            std::string renamed = pre + "_" + *r.label;
            for (int k = 2; out.program.has_label(renamed); ++k) renamed = pre + "_" + *r.label + std::to_string(k);
            out.warnings.push_back("renamed label @" + *r.label + " to @" + renamed);
            r.label = renamed;
        }
        SourceLocation loc = i < fragment.source_map.size() ? fragment.source_map[i] : SourceLocation{};
        out.program.add(std::move(r), std::move(loc));
    }
    return out;
}

std::filesystem::path persist(const TranslationJob& job, const std::filesystem::path& dir,
                              std::vector<std::string>* warnings) {
    std::filesystem::create_directories(dir);
    const std::string name = normalize_symbol(job.disease_name);

    {
        std::ofstream log(dir / (name + ".responses.jsonl"), std::ios::app | std::ios::binary);
        for (std::size_t i = 0; i < job.attempts.size(); ++i) {
            const auto& a = job.attempts[i];
            nlohmann::ordered_json j;
            j["disease"] = name;
            j["attempt"] = i + 1;
            j["prompt"] = a.prompt;
            j["response"] = a.response;
            j["ok"] = a.ok;
            j["diagnostic"] = a.diagnostic;
            log << j.dump() << '\n';
        }
    }
    if (!job.final) return {};

    const auto kb_path = dir / (name + ".lp");
    Program existing;
    if (std::filesystem::exists(kb_path)) existing = load_program(kb_path.string());
    auto merged = merge(existing, *job.final, name);
    if (warnings) warnings->insert(warnings->end(), merged.warnings.begin(), merged.warnings.end());
    std::ofstream out(kb_path, std::ios::binary | std::ios::trunc);
    out << render_program(merged.program);
    return kb_path;
}

}  // namespace dxasp
