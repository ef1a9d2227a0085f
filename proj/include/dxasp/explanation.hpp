#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dxasp/grounding.hpp"
#include "dxasp/language.hpp"

namespace dxasp {

enum class Support { Fact, Choice, Rule };

struct DerivationRecord {
    Atom atom;
    Support support = Support::Fact;
    std::size_t rule_origin = 0;  // meaningful for Support::Rule only
    std::vector<Atom> body;       // empty for facts and choices
};

struct Provenance {
    std::set<Atom> atoms;
    std::map<Atom, DerivationRecord> records;
    std::vector<Atom> order;  // derivation order, facts first
};

/// Least model plus one record per atom: the first rule to fire for it.
/// Rules fire in rounds; within a round the lowest rule index wins.
Provenance derive_with_provenance(const std::vector<GroundRule>& rules, const std::set<Atom>& base_facts,
                                  const std::set<Atom>& chosen = {});

/// Provenance of one answer set: ground facts as FACT, its choice atoms as CHOICE.
Provenance model_provenance(const GroundProgram& g, const std::set<Atom>& model);

struct ExplanationTree {
    Atom root;
    Support support = Support::Fact;
    std::vector<ExplanationTree> children;

    std::size_t depth() const;
};

/// Expands every body atom through its own record; shared sub-proofs are
/// expanded again wherever they occur.
ExplanationTree explanation_tree(const Provenance& provenance, const Atom& goal);

/// `*` line followed by `|__ atom` lines, four spaces of indent per level.
std::string render_tree(const ExplanationTree& t);

std::string tree_to_json(const ExplanationTree& t, int indent = 2);

struct CausalEdge {
    Atom from;
    Atom to;
    std::string label;

    friend bool operator==(const CausalEdge&, const CausalEdge&) = default;
    friend auto operator<=>(const CausalEdge&, const CausalEdge&) = default;
};

struct CausalGraph {
    std::vector<Atom> nodes;
    std::vector<CausalEdge> edges;
};

/// Label of a source rule: its `@label`, or `r<index>` when unlabeled.
std::string rule_label(const Program& p, std::size_t index);

/// One edge body atom -> head per rule instance that fires in the model.
CausalGraph causal_graph(const Program& p, const GroundProgram& g, const Provenance& provenance);

std::string render_dot(const CausalGraph& graph);

}  // namespace dxasp
