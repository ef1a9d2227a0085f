#include "dxasp/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <omp.h>

#include "dxasp/errors.hpp"
#include "dxasp/parser.hpp"

namespace dxasp {

namespace {

/// Splits one CSV line; supports double-quoted cells with "" escapes.
std::vector<std::string> split_csv(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cells.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cells.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back();
        } else if (c != '\r') {
            cells.back() += c;
        }
    }
    if (quoted) throw CsvError(line_no, "unterminated quoted cell");
    return cells;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

}  // namespace

std::vector<PatientRecord> parse_dataset(std::istream& in) {
    std::vector<PatientRecord> out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line) || line == "\r") continue;
        auto cells = split_csv(line, line_no);
        if (columns == 0) {
            columns = cells.size();
            if (columns < 2) throw CsvError(line_no, "header needs a label column and at least one symptom column");
            continue;
        }
        if (cells.size() > columns)
            throw CsvError(line_no, "row has " + std::to_string(cells.size()) + " cells, header has " +
                                        std::to_string(columns));
        if (blank(cells[0])) throw CsvError(line_no, "missing disease label");
        PatientRecord r;
        r.line = line_no;
        try {
            r.label = normalize_symbol(cells[0]);
            for (std::size_t c = 1; c < cells.size(); ++c)
                if (!blank(cells[c])) r.symptoms.insert(normalize_symbol(cells[c]));
        } catch (const NormalizeError& e) {
            throw NormalizeError(e.raw, line_no);
        }
        if (r.symptoms.empty()) throw CsvError(line_no, "record has no symptoms");
        out.push_back(std::move(r));
    }
    if (columns == 0) throw CsvError(line_no, "missing header row");
    return out;
}

std::vector<PatientRecord> load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return parse_dataset(in);
}

Program patient_facts(const PatientRecord& r) {
    Program p;
    for (const auto& s : r.symptoms)
        p.add(Rule{std::nullopt, Fact{Atom{"has", {Term::compound("symptom", {Term::constant(s)})}}}},
              {"<patient>", r.line});
    return p;
}

std::size_t count_terms(const Program& p) {
    std::size_t n = 0;
    for (const auto& r : p.rules) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Fact>)
                    n += 1;
                else if constexpr (std::is_same_v<T, NormalRule>)
                    n += 1 + s.body.size();
                else if constexpr (std::is_same_v<T, ChoiceRule>)
                    n += 2;
                else if constexpr (std::is_same_v<T, Constraint>)
                    n += s.body.size();
                else
                    n += 1;
            },
            r.shape);
    }
    return n;
}

std::vector<std::string> ensure_machinery(Program& kb) {
    std::vector<std::string> warnings;
    auto any = [&](auto pred) { return std::any_of(kb.rules.begin(), kb.rules.end(), pred); };
    const Term s = Term::variable("S");
    const Atom add{"add", {Term::compound("symptom", {s})}};

    if (!any([](const Rule& r) { return r.is<ChoiceRule>(); })) {
        Rule r{std::nullopt, ChoiceRule{add, Atom{"symptom", {s}}}};
        warnings.push_back("injected missing choice rule: " + render(r));
        kb.add(std::move(r), {"<machinery>", 0});
    }
    if (!any([](const Rule& r) {
            if (!r.is<Constraint>()) return false;
            const auto& body = r.as<Constraint>().body;
            return std::any_of(body.begin(), body.end(),
                               [](const Literal& l) { return l.negated && l.atom.predicate == "diagnosis"; });
        })) {
        Rule r{std::nullopt, Constraint{{Literal{Atom{"diagnosis", {Term::variable("_")}}, true}}}};
        warnings.push_back("injected missing constraint: " + render(r));
        kb.add(std::move(r), {"<machinery>", 0});
    }
    if (!any([](const Rule& r) { return r.is<Minimize>(); })) {
        Rule r{std::nullopt, Minimize{1, {s}, add}};
        warnings.push_back("injected missing minimize statement: " + render(r));
        kb.add(std::move(r), {"<machinery>", 0});
    }
    return warnings;
}

std::vector<PatientRecord> records_for(const std::vector<PatientRecord>& all, const std::string& disease) {
    std::vector<PatientRecord> out;
    const std::string key = disease_key(disease);
    for (const auto& r : all)
        if (disease_key(r.label) == key) out.push_back(r);
    return out;
}

RecordVerdict diagnose_record(const Program& kb, const PatientRecord& record, const EvalOptions& options) {
    RecordVerdict v;
    v.label = record.label;
    try {
        Program p = kb;
        for (auto& r : patient_facts(record).rules) p.add(std::move(r), {"<patient>", record.line});
        const Solved solved = solve_program(std::move(p), options.solve);
        if (solved.result.unsatisfiable()) return v;
        v.cost = solved.result.optimal_cost;
        for (const auto& a : consequences(solved.result, options.mode)) v.predicted.push_back(render(a.args[0]));
        const std::string key = disease_key(record.label);
        const auto hits = std::count_if(v.predicted.begin(), v.predicted.end(),
                                        [&](const std::string& d) { return disease_key(d) == key; });
        v.correct = options.exact ? (v.predicted.size() == 1 && hits == 1) : hits > 0;
    } catch (const std::exception& e) {
        v.error = e.what();
    }
    return v;
}

namespace {

EvalReport assemble(const std::string& disease, const Program& kb, std::vector<RecordVerdict> verdicts,
                    std::vector<std::string> warnings, const EvalOptions& options) {
    EvalReport report;
    report.mode = options.mode;
    report.exact = options.exact;
    report.warnings = std::move(warnings);
    DiseaseRow row{disease, count_terms(kb), verdicts.size(), 0, 0.0};
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        verdicts[i].index = i;
        if (verdicts[i].correct) ++row.n_correct;
    }
    row.accuracy = row.n_records ? static_cast<double>(row.n_correct) / static_cast<double>(row.n_records) : 0.0;
    report.rows.push_back(row);
    report.records = std::move(verdicts);
    return report;
}

}  // namespace

EvalReport evaluate(const std::string& disease, const Program& kb, const std::vector<PatientRecord>& records,
                    const EvalOptions& options) {
    Program prepared = kb;
    auto warnings = ensure_machinery(prepared);
    std::vector<RecordVerdict> verdicts(records.size());
    const long n = static_cast<long>(records.size());
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

    // diagnose_record never throws, so nothing escapes the parallel region.
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long i = 0; i < n; ++i) verdicts[static_cast<std::size_t>(i)] = diagnose_record(prepared, records[i], options);

    return assemble(disease, kb, std::move(verdicts), std::move(warnings), options);
}

EvalReport evaluate_serial(const std::string& disease, const Program& kb, const std::vector<PatientRecord>& records,
                           const EvalOptions& options) {
    Program prepared = kb;
    auto warnings = ensure_machinery(prepared);
    std::vector<RecordVerdict> verdicts;
    verdicts.reserve(records.size());
    for (const auto& r : records) verdicts.push_back(diagnose_record(prepared, r, options));
    return assemble(disease, kb, std::move(verdicts), std::move(warnings), options);
}

EvalReport combine(const std::vector<EvalReport>& parts) {
    EvalReport out;
    if (!parts.empty()) {
        out.mode = parts.front().mode;
        out.exact = parts.front().exact;
    }
    for (const auto& p : parts) {
        out.rows.insert(out.rows.end(), p.rows.begin(), p.rows.end());
        out.records.insert(out.records.end(), p.records.begin(), p.records.end());
        out.warnings.insert(out.warnings.end(), p.warnings.begin(), p.warnings.end());
    }
    return out;
}

namespace {
std::string percent(double accuracy) {
    char buf[32];
    const double pct = accuracy * 100.0;
    if (pct == static_cast<double>(static_cast<long>(pct)))
        std::snprintf(buf, sizeof buf, "%ld%%", static_cast<long>(pct));
    else
        std::snprintf(buf, sizeof buf, "%.1f%%", pct);
    return buf;
}
}  // namespace

std::string report_table(const EvalReport& r) {
    std::size_t width = 7;
    for (const auto& row : r.rows) width = std::max(width, row.disease.size());
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %5s  %8s  %s\n", static_cast<int>(width), "Disease", "Size", "Accuracy",
                  "Correct");
    out += buf;
    for (const auto& row : r.rows) {
        const std::string frac = std::to_string(row.n_correct) + "/" + std::to_string(row.n_records);
        std::snprintf(buf, sizeof buf, "%-*s  %5zu  %8s  %s\n", static_cast<int>(width), row.disease.c_str(),
                      row.kb_size, percent(row.accuracy).c_str(), frac.c_str());
        out += buf;
    }
    return out;
}

std::string report_json(const std::vector<EvalReport>& reports) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json jr;
        jr["mode"] = mode_name(r.mode);
        jr["exact"] = r.exact;
        jr["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : r.rows)
            jr["rows"].push_back({{"disease", row.disease},
                                  {"size", row.kb_size},
                                  {"records", row.n_records},
                                  {"correct", row.n_correct},
                                  {"accuracy", row.accuracy}});
        jr["records"] = nlohmann::ordered_json::array();
        for (const auto& v : r.records) {
            nlohmann::ordered_json jv{{"index", v.index}, {"label", v.label}, {"predicted", v.predicted}};
            jv["cost"] = v.cost ? nlohmann::ordered_json(*v.cost) : nlohmann::ordered_json(nullptr);
            jv["unsat"] = !v.cost && v.error.empty();
            jv["correct"] = v.correct;
            if (!v.error.empty()) jv["error"] = v.error;
            jr["records"].push_back(std::move(jv));
        }
        jr["warnings"] = r.warnings;
        j.push_back(std::move(jr));
    }
    return j.dump(2) + "\n";
}

}  // namespace dxasp
