#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dxasp/grounding.hpp"
#include "dxasp/language.hpp"

namespace dxasp {

struct AnswerSet {
    std::set<Atom> atoms;
    long cost = 0;

    friend bool operator==(const AnswerSet&, const AnswerSet&) = default;
};

struct SolveStats {
    std::size_t choice_points = 0;
    std::size_t models_enumerated = 0;
    std::size_t passes = 0;
    double elapsed_ms = 0.0;
    bool truncated = false;  // more optima existed than max_models
};

struct SolveResult {
    std::optional<long> optimal_cost;  // empty when unsatisfiable
    std::vector<AnswerSet> models;     // canonical order, all at optimal_cost
    SolveStats stats;
    std::vector<std::size_t> conflicting_constraints;  // rule origins, set when unsatisfiable

    bool unsatisfiable() const { return !optimal_cost.has_value(); }
};

enum class Mode { Brave, Cautious };

struct SolveConfig {
    std::size_t max_models = 64;
    bool bridge = true;
    GroundingOptions grounding;
};

/// Least fixpoint of forward chaining over definite rules.
std::set<Atom> least_model(const std::vector<GroundRule>& rules, const std::set<Atom>& base_facts);

/// Cost-optimal answer sets by iterative-deepening branch and bound over the
/// choice atoms. Minimize elements count once per distinct (weight, tuple).
SolveResult solve(const GroundProgram& g, const SolveConfig& config = {});

/// Union (brave) or intersection (cautious) of the `diagnosis/1` atoms of the
/// optimal models. Throws EmptyResult when there is no model.
std::set<Atom> consequences(const SolveResult& r, Mode mode);

/// Sum of minimize weights whose condition holds in `atoms`.
long model_cost(const GroundProgram& g, const std::set<Atom>& atoms);

/// Appends `has(symptom(S)) :- add(symptom(S)).` when a choice over
/// `add(symptom(_))` is present and the rule is missing. Returns whether it did.
bool inject_bridge(Program& p);

/// Bridge (if enabled), ground and solve.
struct Solved {
    Program program;  // the program actually grounded
    GroundProgram ground;
    SolveResult result;
};
Solved solve_program(Program p, const SolveConfig& config = {});

/// Human-readable reason for an unsatisfiable result.
std::string unsat_hint(const SolveResult& r, const Program& p);

/// Rendered atoms in canonical (lexicographic) order.
std::vector<std::string> render_atoms(const std::set<Atom>& atoms);

Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

}  // namespace dxasp
