#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dxasp/language.hpp"
#include "dxasp/solving.hpp"

namespace dxasp {

struct PatientRecord {
    std::string label;                // normalized disease constant
    std::set<std::string> symptoms;   // normalized symptom constants, nonempty
    std::size_t line = 0;             // 1-based line in the CSV
};

/// Wide CSV: header, then `label, symptom_1, ..., symptom_k` rows; blank cells ignored.
std::vector<PatientRecord> parse_dataset(std::istream& in);
std::vector<PatientRecord> load_dataset(const std::string& path);

/// One `has(symptom(s)).` fact per symptom, sorted.
Program patient_facts(const PatientRecord& r);

/// Atom occurrences: facts 1, normal rules 1 + body, choices 2, constraints
/// body length, minimize 1.
std::size_t count_terms(const Program& p);

/// Adds whichever of the choice / at-least-one-diagnosis / minimize rules are
/// missing. Returns a warning per added rule.
std::vector<std::string> ensure_machinery(Program& kb);

struct RecordVerdict {
    std::size_t index = 0;  // position in the input record list
    std::string label;
    std::vector<std::string> predicted;  // diagnosis constants
    std::optional<long> cost;            // empty when UNSAT
    bool correct = false;
    std::string error;  // set when the record could not be solved for another reason

    friend bool operator==(const RecordVerdict&, const RecordVerdict&) = default;
};

struct DiseaseRow {
    std::string disease;
    std::size_t kb_size = 0;
    std::size_t n_records = 0;
    std::size_t n_correct = 0;
    double accuracy = 0.0;

    friend bool operator==(const DiseaseRow&, const DiseaseRow&) = default;
};

struct EvalOptions {
    Mode mode = Mode::Brave;
    bool exact = false;  // count only singleton predictions
    SolveConfig solve;
    int threads = 0;     // 0: OpenMP default
};

struct EvalReport {
    Mode mode = Mode::Brave;
    bool exact = false;
    std::vector<DiseaseRow> rows;
    std::vector<RecordVerdict> records;
    std::vector<std::string> warnings;
};

/// Records whose label names `disease` (underscore-insensitive).
std::vector<PatientRecord> records_for(const std::vector<PatientRecord>& all, const std::string& disease);

/// Diagnoses one record against `kb` (machinery already present).
RecordVerdict diagnose_record(const Program& kb, const PatientRecord& record, const EvalOptions& options);

/// Solves every record in parallel (OpenMP) and assembles one row for `disease`.
EvalReport evaluate(const std::string& disease, const Program& kb, const std::vector<PatientRecord>& records,
                    const EvalOptions& options = {});

/// Single-threaded reference with identical output.
EvalReport evaluate_serial(const std::string& disease, const Program& kb, const std::vector<PatientRecord>& records,
                           const EvalOptions& options = {});

/// Concatenates rows, records and warnings of per-disease reports.
EvalReport combine(const std::vector<EvalReport>& parts);

std::string report_table(const EvalReport& r);
std::string report_json(const std::vector<EvalReport>& reports);

}  // namespace dxasp
