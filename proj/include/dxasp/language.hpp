#pragma once

// AST of the diagnosis logic fragment: constants, variables, compound terms,
// atoms, literals and the five rule shapes (fact, normal rule, choice,
// integrity constraint, minimize statement).

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dxasp {

struct Term {
    enum class Kind { Constant, Variable, Compound };

    Kind kind = Kind::Constant;
    std::string name;  // constant, variable or functor name
    std::vector<Term> args;

    static Term constant(std::string name) { return {Kind::Constant, std::move(name), {}}; }
    static Term variable(std::string name) { return {Kind::Variable, std::move(name), {}}; }
    static Term compound(std::string functor, std::vector<Term> args) {
        return {Kind::Compound, std::move(functor), std::move(args)};
    }

    bool is_variable() const { return kind == Kind::Variable; }
    bool is_anonymous() const { return kind == Kind::Variable && name == "_"; }
    bool is_ground() const;

    friend bool operator==(const Term&, const Term&) = default;
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);
};

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    bool is_ground() const;
    std::size_t arity() const { return args.size(); }

    friend bool operator==(const Atom&, const Atom&) = default;
    friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

struct Literal {
    Atom atom;
    bool negated = false;

    friend bool operator==(const Literal&, const Literal&) = default;
    friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct Fact {
    Atom head;
    friend bool operator==(const Fact&, const Fact&) = default;
};

struct NormalRule {
    Atom head;
    std::vector<Literal> body;
    friend bool operator==(const NormalRule&, const NormalRule&) = default;
};

/// `{ element : guard }.`; the guard is absent in ground dumps (`{a}.`).
struct ChoiceRule {
    Atom element;
    std::optional<Atom> guard;
    friend bool operator==(const ChoiceRule&, const ChoiceRule&) = default;
};

struct Constraint {
    std::vector<Literal> body;
    friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// `#minimize { weight, terms... : condition }.`
struct Minimize {
    long weight = 1;
    std::vector<Term> terms;
    Atom condition;
    friend bool operator==(const Minimize&, const Minimize&) = default;
};

using RuleShape = std::variant<Fact, NormalRule, ChoiceRule, Constraint, Minimize>;

struct Rule {
    std::optional<std::string> label;
    RuleShape shape;

    template <class T>
    bool is() const { return std::holds_alternative<T>(shape); }
    template <class T>
    const T& as() const { return std::get<T>(shape); }

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct SourceLocation {
    std::string file;
    std::size_t line = 0;
};

struct Program {
    std::vector<Rule> rules;
    std::vector<SourceLocation> source_map;  // parallel to rules, may be shorter

    void add(Rule r, SourceLocation loc = {});
    bool has_label(std::string_view label) const;

    /// Structural equality ignores the source map.
    friend bool operator==(const Program& a, const Program& b) { return a.rules == b.rules; }
};

/// Variables occurring in a term/atom, in first-occurrence order (anonymous included).
void collect_variables(const Term& t, std::vector<std::string>& out);
void collect_variables(const Atom& a, std::vector<std::string>& out);

// Lexical rules shared by parser, printer and normalization.
bool is_constant_name(std::string_view s);
bool is_variable_name(std::string_view s);

/// Disease names compare equal when they differ only in underscores
/// (`chicken_pox` vs `chickenpox`).
std::string disease_key(std::string_view name);

/// Rejects negation outside constraint bodies and negative minimize weights.
void validate_fragment(const Program& p);

}  // namespace dxasp
