#include "dxasp/language.hpp"

#include <algorithm>

#include "dxasp/errors.hpp"

namespace dxasp {

bool Term::is_ground() const {
    if (kind == Kind::Variable) return false;
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.kind != b.kind) return a.kind <=> b.kind;
    if (auto c = a.name <=> b.name; c != 0) return c;
    return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

bool Atom::is_ground() const {
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
    if (auto c = a.predicate <=> b.predicate; c != 0) return c;
    return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

void Program::add(Rule r, SourceLocation loc) {
    rules.push_back(std::move(r));
    source_map.resize(rules.size() - 1);
    source_map.push_back(std::move(loc));
}

bool Program::has_label(std::string_view label) const {
    return std::any_of(rules.begin(), rules.end(), [&](const Rule& r) { return r.label && *r.label == label; });
}

void collect_variables(const Term& t, std::vector<std::string>& out) {
    if (t.kind == Term::Kind::Variable) {
        out.push_back(t.name);
        return;
    }
    for (const auto& a : t.args) collect_variables(a, out);
}

void collect_variables(const Atom& a, std::vector<std::string>& out) {
    for (const auto& t : a.args) collect_variables(t, out);
}

namespace {
bool ident_tail(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}
}  // namespace

bool is_constant_name(std::string_view s) {
    return !s.empty() && s[0] >= 'a' && s[0] <= 'z' && ident_tail(s.substr(1)) && s != "not";
}

bool is_variable_name(std::string_view s) {
    return !s.empty() && ((s[0] >= 'A' && s[0] <= 'Z') || s[0] == '_') && ident_tail(s.substr(1));
}

std::string disease_key(std::string_view name) {
    std::string out;
    for (char c : name)
        if (c != '_') out += c;
    return out;
}

void validate_fragment(const Program& p) {
    for (std::size_t i = 0; i < p.rules.size(); ++i) {
        const auto& rule = p.rules[i];
        const std::string where = "rule " + std::to_string(i) +
                                  (i < p.source_map.size() && p.source_map[i].line
                                       ? " (line " + std::to_string(p.source_map[i].line) + ")"
                                       : std::string{});
        if (rule.is<NormalRule>()) {
            for (const auto& lit : rule.as<NormalRule>().body)
                if (lit.negated)
                    throw FragmentError(where + ": default negation is only supported in integrity constraints");
        } else if (rule.is<Minimize>()) {
            if (rule.as<Minimize>().weight < 0)
                throw FragmentError(where + ": minimize weights must be non-negative");
        }
    }
}

}  // namespace dxasp
