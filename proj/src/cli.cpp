#include "dxasp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <set>
#include <sstream>

#include "dxasp/errors.hpp"
#include "dxasp/evaluation.hpp"
#include "dxasp/explanation.hpp"
#include "dxasp/ingestion.hpp"
#include "dxasp/parser.hpp"
#include "dxasp/solving.hpp"

namespace dxasp {

namespace fs = std::filesystem;

namespace {

/// Thrown for bad arguments discovered after CLI11 parsing.
struct UsageError : Error {
    using Error::Error;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// KB followed by patient facts; labels must stay unique.
Program concatenate(const Program& kb, const Program& patient) {
    Program out = kb;
    for (std::size_t i = 0; i < patient.rules.size(); ++i) {
        const auto& r = patient.rules[i];
        if (r.label && out.has_label(*r.label))
            throw ParseError(i < patient.source_map.size() ? patient.source_map[i].line : 0, "unique rule label",
                             "duplicate '@" + *r.label + "'");
        out.add(r, i < patient.source_map.size() ? patient.source_map[i] : SourceLocation{});
    }
    return out;
}

SolveConfig solve_config(const Config& c) {
    SolveConfig s;
    s.max_models = c.max_models;
    s.bridge = c.bridge;
    s.grounding.max_ground_rules = c.grounding_cap;
    return s;
}

struct Options {
    std::string config_path;
    // solve / explain
    std::string kb_file, patient_file, goal, format = "tree", mode = "brave", emit_ground;
    std::size_t max_models = 0;
    bool no_bridge = false, json = false, table = false, both = false, exact = false;
    // check
    std::vector<std::string> check_files;
    // translate
    std::string disease, text_file, kb_dir = "kb", fixture, tmpl = "structured";
    std::size_t max_attempts = 0;
    // eval
    std::vector<std::string> diseases;
    std::string data_file;
    int threads = 0;
};

Config load_config(const Options& o, const EnvLookup& env) {
    Config c;
    try {
        if (!o.config_path.empty())
            apply_config_file(c, o.config_path);
        else if (fs::exists("dxasp.toml"))
            apply_config_file(c, "dxasp.toml");
        apply_env(c, env);
        if (o.max_models) c.max_models = o.max_models;
        if (o.max_attempts) c.max_repair_attempts = o.max_attempts;
        if (o.no_bridge) c.bridge = false;
        validate_config(c);
    } catch (const UsageError&) {
        throw;
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return c;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
    int status = kExitOk;
    for (const auto& f : o.check_files) {
        try {
            Program p = load_program(f);
            validate_fragment(p);
            out << f << ": ok (" << p.rules.size() << " rules, " << count_terms(p) << " terms)\n";
        } catch (const Error& e) {
            err << f << ": error: " << e.what() << "\n";
            status = kExitFailure;
        }
    }
    return status;
}

Solved solve_files(const Options& o, const Config& c) {
    Program combined = load_program(o.kb_file);
    if (!o.patient_file.empty()) combined = concatenate(combined, load_program(o.patient_file));
    return solve_program(std::move(combined), solve_config(c));
}

int cmd_solve(const Options& o, const Config& c, std::ostream& out, std::ostream& err) {
    const Solved solved = solve_files(o, c);
    if (!o.emit_ground.empty()) {
        std::ofstream dump(o.emit_ground, std::ios::binary | std::ios::trunc);
        if (!dump) throw UsageError("cannot write " + o.emit_ground);
        dump << render_ground(solved.ground);
    }
    const auto& r = solved.result;
    const Mode mode = parse_mode(o.mode);

    if (o.json) {
        nlohmann::ordered_json j;
        j["cost"] = r.optimal_cost ? nlohmann::ordered_json(*r.optimal_cost) : nlohmann::ordered_json(nullptr);
        j["models"] = nlohmann::ordered_json::array();
        for (const auto& m : r.models) j["models"].push_back(render_atoms(m.atoms));
        j["diagnoses"] = r.unsatisfiable() ? std::vector<std::string>{} : render_atoms(consequences(r, mode));
        j["mode"] = mode_name(mode);
        j["unsatisfiable"] = r.unsatisfiable();
        out << j.dump(2) << "\n";
    } else if (r.unsatisfiable()) {
        out << "UNSATISFIABLE\n";
    } else {
        for (std::size_t i = 0; i < r.models.size(); ++i) {
            out << "Answer: " << i + 1 << "\n";
            const auto atoms = render_atoms(r.models[i].atoms);
            for (std::size_t k = 0; k < atoms.size(); ++k) out << (k ? " " : "") << atoms[k];
            out << "\n";
        }
        out << "Optimization: " << *r.optimal_cost << "\n";
        out << "Diagnoses (" << mode_name(mode) << "):";
        for (const auto& d : render_atoms(consequences(r, mode))) out << " " << d;
        out << "\n";
    }
    if (r.stats.truncated)
        err << "note: more than " << c.max_models << " optimal models exist; output truncated\n";
    if (r.unsatisfiable()) {
        err << unsat_hint(r, solved.program) << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_explain(const Options& o, const Config& c, std::ostream& out, std::ostream& err) {
    const Atom goal = parse_atom(o.goal);
    if (!goal.is_ground()) throw UsageError("--goal must be a ground atom");
    const Solved solved = solve_files(o, c);
    if (solved.result.unsatisfiable()) {
        err << unsat_hint(solved.result, solved.program) << "\n";
        return kExitFailure;
    }
    const AnswerSet* model = nullptr;
    for (const auto& m : solved.result.models)
        if (m.atoms.count(goal)) {
            model = &m;
            break;
        }
    if (!model) throw UnknownAtom(render(goal) + " does not hold in any optimal answer set");

    const Provenance prov = model_provenance(solved.ground, model->atoms);
    if (o.format == "dot") {
        out << render_dot(causal_graph(solved.program, solved.ground, prov));
    } else {
        const ExplanationTree tree = explanation_tree(prov, goal);
        out << (o.format == "json" ? tree_to_json(tree) + "\n" : render_tree(tree));
    }
    return kExitOk;
}

int cmd_translate(const Options& o, const Config& c, std::ostream& out, std::ostream& err) {
    TranslationJob job;
    job.disease_name = normalize_symbol(o.disease);
    job.medical_text = read_text(o.text_file);
    job.tmpl = PromptTemplate::by_name(o.tmpl);

    std::unique_ptr<TranslatorClient> client;
    if (!o.fixture.empty()) {
        client = FixtureClient::from_file(o.fixture);
    } else {
        if (c.endpoint.url.empty() || c.endpoint.model.empty())
            throw UsageError("translate needs an endpoint: set DXASP_LLM_URL and DXASP_LLM_MODEL, or pass --fixture");
        client = std::make_unique<HttpClient>(c.endpoint);
    }

    translate(job, *client, TranslateOptions{c.max_repair_attempts});
    std::vector<std::string> warnings;
    const fs::path kb = persist(job, o.kb_dir, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    for (std::size_t i = 0; i < job.attempts.size(); ++i)
        if (!job.attempts[i].ok) err << "attempt " << i + 1 << ": " << job.attempts[i].diagnostic << "\n";
    if (!job.final) {
        err << "translation failed after " << job.attempts.size() << " attempt(s)\n";
        return kExitFailure;
    }
    out << kb.string() << "\n";
    return kExitOk;
}

std::optional<fs::path> find_kb(const fs::path& dir, const std::string& disease) {
    fs::path direct = dir / (disease + ".lp");
    if (fs::exists(direct)) return direct;
    const std::string key = disease_key(disease);
    std::vector<fs::path> candidates;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".lp" && disease_key(entry.path().stem().string()) == key)
            candidates.push_back(entry.path());
    if (candidates.empty()) return std::nullopt;
    return *std::min_element(candidates.begin(), candidates.end());
}

fs::path kb_file_for(const fs::path& dir, const std::string& disease) {
    if (auto p = find_kb(dir, disease)) return *p;
    throw UsageError("no knowledge base for '" + disease + "' in " + dir.string());
}

int cmd_eval(const Options& o, const Config& c, std::ostream& out, std::ostream& err) {
    if (!fs::is_directory(o.kb_dir)) throw UsageError(o.kb_dir + " is not a directory");
    const auto records = load_dataset(o.data_file);
    std::vector<std::string> diseases;
    for (const auto& d : o.diseases) diseases.push_back(normalize_symbol(d));
    if (diseases.empty()) {
        // One row per dataset label that has a knowledge base in the directory.
        std::set<std::string> seen;
        for (const auto& r : records) {
            if (!seen.insert(disease_key(r.label)).second) continue;
            if (auto kb = find_kb(o.kb_dir, r.label))
                diseases.push_back(kb->stem().string());
            else
                err << "warning: no knowledge base for label '" << r.label << "', skipped\n";
        }
        if (diseases.empty()) throw UsageError("no knowledge base in " + o.kb_dir + " matches a dataset label");
    }

    std::vector<Mode> modes;
    if (o.both)
        modes = {Mode::Brave, Mode::Cautious};
    else
        modes = {parse_mode(o.mode)};

    std::vector<EvalReport> reports;
    for (Mode m : modes) {
        EvalOptions opts;
        opts.mode = m;
        opts.exact = o.exact;
        opts.solve = solve_config(c);
        opts.threads = o.threads;
        std::vector<EvalReport> parts;
        for (const auto& d : diseases) {
            const Program kb = load_program(kb_file_for(o.kb_dir, d).string());
            parts.push_back(evaluate(d, kb, records_for(records, d), opts));
        }
        reports.push_back(combine(parts));
    }
    std::set<std::string> shown;
    for (const auto& r : reports)
        for (const auto& w : r.warnings)
            if (shown.insert(w).second) err << "warning: " << w << "\n";

    if (o.json && !o.table) {
        out << report_json(reports);
    } else {
        for (std::size_t i = 0; i < reports.size(); ++i) {
            if (reports.size() > 1) out << (i ? "\n" : "") << "mode: " << mode_name(reports[i].mode) << "\n";
            out << report_table(reports[i]);
        }
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    Options o;
    CLI::App app{"Explainable diagnosis with answer set programming", "dx-asp"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.footer(
        "Configuration precedence: flags > environment (DXASP_LLM_URL, DXASP_LLM_MODEL, DXASP_LLM_KEY)\n"
        "> config file (--config, default ./dxasp.toml) > built-in defaults.\n"
        "Exit codes: 0 ok, 1 domain failure (UNSAT, failed translation, invalid program), 2 usage, 3 transport.");
    app.add_option("--config", o.config_path, "Flat key = value configuration file")->check(CLI::ExistingFile);

    auto* check = app.add_subcommand("check", "Parse and fragment-validate .lp files");
    check->add_option("files", o.check_files, "Program files")->required()->check(CLI::ExistingFile);

    auto* solve = app.add_subcommand("solve", "Compute cost-optimal answer sets of a KB plus patient facts");
    auto* explain = app.add_subcommand("explain", "Justification tree or causal graph for a derived atom");
    for (auto* sub : {solve, explain}) {
        sub->add_option("kb", o.kb_file, "Knowledge base")->required()->check(CLI::ExistingFile);
        sub->add_option("patient", o.patient_file, "Patient facts (optional)")->check(CLI::ExistingFile);
        sub->add_option("--max-models", o.max_models, "Cap on optimal models reported")->check(CLI::PositiveNumber);
        sub->add_flag("--no-bridge", o.no_bridge, "Do not add has(symptom(S)) :- add(symptom(S)).");
    }
    solve->add_option("--mode", o.mode, "Aggregation of diagnoses")->check(CLI::IsMember({"brave", "cautious"}));
    solve->add_flag("--json", o.json, "Machine-readable output");
    solve->add_option("--emit-ground", o.emit_ground, "Write the ground program to this file");
    explain->add_option("--goal", o.goal, "Ground atom to explain")->required();
    explain->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"tree", "dot", "json"}));

    auto* translate_cmd = app.add_subcommand("translate", "Translate medical text into a KB fragment");
    translate_cmd->add_option("--disease", o.disease, "Disease name")->required();
    translate_cmd->add_option("--text", o.text_file, "Medical text file")->required()->check(CLI::ExistingFile);
    translate_cmd->add_option("--kb", o.kb_dir, "Knowledge base directory")->capture_default_str();
    translate_cmd->add_option("--fixture", o.fixture, "Replay stored responses instead of calling an endpoint")
        ->check(CLI::ExistingFile);
    translate_cmd->add_option("--template", o.tmpl, "Prompt template")
        ->check(CLI::IsMember({"structured", "naive"}));
    translate_cmd->add_option("--max-attempts", o.max_attempts, "Repair attempts")->check(CLI::PositiveNumber);

    auto* eval = app.add_subcommand("eval", "Accuracy of disease KBs against a symptom dataset");
    eval->add_option("--kb", o.kb_dir, "Directory of <disease>.lp files")->required();
    eval->add_option("--data", o.data_file, "Dataset CSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--disease", o.diseases, "Diseases to evaluate (default: every KB in --kb)");
    auto* mode_opt =
        eval->add_option("--mode", o.mode, "Aggregation of diagnoses")->check(CLI::IsMember({"brave", "cautious"}));
    eval->add_flag("--both", o.both, "Report brave and cautious modes")->excludes(mode_opt);
    eval->add_flag("--exact", o.exact, "Count only singleton predictions as correct");
    auto* json_flag = eval->add_flag("--json", o.json, "JSON report");
    eval->add_flag("--table", o.table, "Table report (default)")->excludes(json_flag);
    eval->add_option("--threads", o.threads, "Worker threads (default: OpenMP setting)");
    eval->add_flag("--no-bridge", o.no_bridge, "Do not add has(symptom(S)) :- add(symptom(S)).");

    std::vector<std::string> argv_store{"dx-asp"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const Config config = load_config(o, env);
        if (check->parsed()) return cmd_check(o, out, err);
        if (solve->parsed()) return cmd_solve(o, config, out, err);
        if (explain->parsed()) return cmd_explain(o, config, out, err);
        if (translate_cmd->parsed()) return cmd_translate(o, config, out, err);
        if (eval->parsed()) return cmd_eval(o, config, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const TransportError& e) {
        err << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace dxasp
