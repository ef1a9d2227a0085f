#pragma once

// Medical text -> validated KB fragment through a text-completion model,
// with a parser-driven repair loop and structural merging into a KB.

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dxasp/language.hpp"

namespace dxasp {

enum class PromptStyle { Naive, Structured };

struct PromptTemplate {
    std::string name;
    std::string body;  // placeholders: {medical_text}, {disease_name}
    PromptStyle style = PromptStyle::Structured;

    /// Plain request that tends to produce one monolithic rule.
    static PromptTemplate naive();
    /// Request with the rule-shape, alternative-diagnoses and symptom-link instructions.
    static PromptTemplate structured();
    static PromptTemplate by_name(const std::string& name);
};

std::string build_prompt(const PromptTemplate& tmpl, std::string_view disease_name, std::string_view medical_text);

/// Contents of the fenced code blocks in order, or the whole response when it has none.
std::vector<std::string> extract_code_blocks(std::string_view response);

class TranslatorClient {
public:
    virtual ~TranslatorClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

/// Replays stored responses. Entries with a non-empty `match` only answer
/// prompts containing that text; each key keeps its own replay cursor and the
/// last response repeats once a sequence is exhausted.
class FixtureClient : public TranslatorClient {
public:
    struct Entry {
        std::string match;
        std::string response;
    };

    explicit FixtureClient(std::vector<Entry> entries);
    explicit FixtureClient(std::vector<std::string> responses);

    /// `.jsonl`: one JSON string or `{"match": ..., "response": ...}` per line.
    /// Any other file is a single response.
    static std::unique_ptr<FixtureClient> from_file(const std::filesystem::path& path);

    std::string complete(const std::string& prompt) override;
    std::size_t calls() const;

private:
    std::vector<std::string> keys_;
    std::map<std::string, std::vector<std::string>> sequences_;
    std::map<std::string, std::size_t> cursors_;
    std::size_t calls_ = 0;
    mutable std::mutex mu_;
};

struct EndpointConfig {
    std::string url;    // e.g. https://api.example.com/v1/chat/completions
    std::string model;
    std::string api_key;
    std::string response_pointer = "/choices/0/message/content";  // JSON pointer into the reply
    int timeout_seconds = 120;
};

/// POSTs `{model, messages:[{role:"user", content}]}` and reads the reply text.
class HttpClient : public TranslatorClient {
public:
    explicit HttpClient(EndpointConfig config);
    std::string complete(const std::string& prompt) override;

    /// Request body for `prompt`, exposed for tests.
    std::string request_body(const std::string& prompt) const;
    /// Extracts the reply text from a response body; throws TransportError.
    std::string reply_text(const std::string& body) const;

private:
    EndpointConfig config_;
};

struct Attempt {
    std::string prompt;
    std::string response;
    bool ok = false;
    std::string diagnostic;  // parser or validation message when !ok
};

struct TranslationJob {
    std::string disease_name;
    std::string medical_text;
    PromptTemplate tmpl = PromptTemplate::structured();
    std::vector<Attempt> attempts;
    std::optional<Program> final;  // set iff the last attempt validated
};

struct TranslateOptions {
    std::size_t max_repair_attempts = 3;
};

/// Prompt, validate, and re-prompt with the parser diagnostic until the reply
/// validates or attempts run out. Returns job.final. TransportError propagates.
std::optional<Program> translate(TranslationJob& job, TranslatorClient& client, const TranslateOptions& options = {});

/// Runs jobs concurrently with at most `max_in_flight` outstanding requests.
void translate_all(std::vector<TranslationJob>& jobs, TranslatorClient& client, const TranslateOptions& options,
                   std::size_t max_in_flight);

/// Fragment-level checks on a parsed reply: fragment shape plus at least one
/// `diagnosis(<disease>)` rule. Throws Error describing the problem.
void validate_translation(const Program& p, std::string_view disease_name);

std::string repair_prompt(const std::string& original_prompt, const std::string& diagnostic,
                          const std::string& offending_line);

struct MergeResult {
    Program program;
    std::vector<std::string> warnings;
};

/// Concatenation with structural deduplication. Only the first choice rule
/// and minimize statement survive; label collisions get `<prefix>_` prepended.
MergeResult merge(const Program& kb, const Program& fragment, std::string_view prefix = "");

/// Writes `<dir>/<disease>.lp` (merged with any existing KB) and appends the
/// attempts to `<dir>/<disease>.responses.jsonl`. Returns the KB path.
std::filesystem::path persist(const TranslationJob& job, const std::filesystem::path& dir,
                              std::vector<std::string>* warnings = nullptr);

}  // namespace dxasp
