#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dxasp/language.hpp"

namespace dxasp {

struct GroundRule {
    Atom head;
    std::vector<Atom> body;
    std::size_t origin = 0;  // index into Program::rules

    friend bool operator==(const GroundRule&, const GroundRule&) = default;
    friend auto operator<=>(const GroundRule&, const GroundRule&) = default;
};

/// A ground choice atom. The guard is kept only when it is not a fact.
struct GroundChoice {
    Atom atom;
    std::optional<Atom> guard;
    std::size_t origin = 0;

    friend bool operator==(const GroundChoice&, const GroundChoice&) = default;
    friend auto operator<=>(const GroundChoice&, const GroundChoice&) = default;
};

struct GroundConstraint {
    std::vector<Literal> body;  // ground literals; empty body is always violated
    std::size_t origin = 0;

    friend bool operator==(const GroundConstraint&, const GroundConstraint&) = default;
    friend auto operator<=>(const GroundConstraint&, const GroundConstraint&) = default;
};

struct MinimizeElement {
    long weight = 1;
    std::vector<Term> tuple;
    Atom condition;

    friend bool operator==(const MinimizeElement&, const MinimizeElement&) = default;
    friend auto operator<=>(const MinimizeElement&, const MinimizeElement&) = default;
};

struct GroundProgram {
    std::set<Atom> facts;
    std::vector<GroundRule> definite_rules;
    std::vector<GroundChoice> choices;
    std::vector<GroundConstraint> constraints;
    std::vector<MinimizeElement> minimize;

    std::set<Atom> choice_atoms() const;
    std::size_t size() const {
        return facts.size() + definite_rules.size() + choices.size() + constraints.size() + minimize.size();
    }
};

struct GroundingOptions {
    std::size_t max_ground_rules = 1'000'000;
};

/// Semi-naive bottom-up instantiation. Throws FragmentError for programs
/// outside the fragment and GroundingExplosion past the configured cap.
GroundProgram ground(const Program& p, const GroundingOptions& options = {});

/// All ground instances of `rule` whose positive body matches `candidates`.
/// Anonymous variables in negated literals expand to every matching candidate.
std::vector<Rule> instantiate_rule(const Rule& rule, const std::set<Atom>& candidates);

using Substitution = std::map<std::string, Term>;

/// Extends `subst` so that `pattern` equals `ground`; `_` matches anything.
bool match(const Term& pattern, const Term& ground, Substitution& subst);
bool match(const Atom& pattern, const Atom& ground, Substitution& subst);

Term apply(const Term& t, const Substitution& subst);
Atom apply(const Atom& a, const Substitution& subst);

/// `.lp` debug dump of a ground program (choice atoms as `{a}.`).
std::string render_ground(const GroundProgram& g);

}  // namespace dxasp
