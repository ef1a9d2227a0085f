#include "dxasp/grounding.hpp"

#include <algorithm>
#include <functional>
#include <utility>

#include "dxasp/errors.hpp"
#include "dxasp/parser.hpp"

namespace dxasp {

std::set<Atom> GroundProgram::choice_atoms() const {
    std::set<Atom> out;
    for (const auto& c : choices) out.insert(c.atom);
    return out;
}

bool match(const Term& pattern, const Term& ground, Substitution& subst) {
    switch (pattern.kind) {
        case Term::Kind::Variable: {
            if (pattern.is_anonymous()) return true;
            auto [it, inserted] = subst.try_emplace(pattern.name, ground);
            return inserted || it->second == ground;
        }
        case Term::Kind::Constant:
            return ground.kind == Term::Kind::Constant && ground.name == pattern.name;
        case Term::Kind::Compound:
            if (ground.kind != Term::Kind::Compound || ground.name != pattern.name ||
                ground.args.size() != pattern.args.size())
                return false;
            for (std::size_t i = 0; i < pattern.args.size(); ++i)
                if (!match(pattern.args[i], ground.args[i], subst)) return false;
            return true;
    }
    return false;
}

bool match(const Atom& pattern, const Atom& ground, Substitution& subst) {
    if (pattern.predicate != ground.predicate || pattern.args.size() != ground.args.size()) return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!match(pattern.args[i], ground.args[i], subst)) return false;
    return true;
}

Term apply(const Term& t, const Substitution& subst) {
    if (t.kind == Term::Kind::Variable) {
        auto it = subst.find(t.name);
        return it == subst.end() ? t : it->second;
    }
    Term out{t.kind, t.name, {}};
    out.args.reserve(t.args.size());
    for (const auto& a : t.args) out.args.push_back(apply(a, subst));
    return out;
}

Atom apply(const Atom& a, const Substitution& subst) {
    Atom out{a.predicate, {}};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(apply(t, subst));
    return out;
}

namespace {

using Key = std::pair<std::string, std::size_t>;

Key key_of(const Atom& a) { return {a.predicate, a.args.size()}; }

/// Atoms grouped by predicate/arity, in insertion order.
class AtomIndex {
public:
    bool insert(const Atom& a) {
        if (!members_.insert(a).second) return false;
        by_key_[key_of(a)].push_back(a);
        return true;
    }
    bool contains(const Atom& a) const { return members_.count(a) > 0; }
    const std::vector<Atom>& lookup(const Atom& pattern) const {
        static const std::vector<Atom> empty;
        auto it = by_key_.find(key_of(pattern));
        return it == by_key_.end() ? empty : it->second;
    }
    const std::set<Atom>& members() const { return members_; }
    bool empty() const { return members_.empty(); }

private:
    std::set<Atom> members_;
    std::map<Key, std::vector<Atom>> by_key_;
};

using Emit = std::function<void(const Substitution&)>;

void join(const std::vector<const Atom*>& lits, const std::vector<const AtomIndex*>& sources, std::size_t k,
          const Substitution& subst, const Emit& emit) {
    if (k == lits.size()) {
        emit(subst);
        return;
    }
    for (const auto& candidate : sources[k]->lookup(*lits[k])) {
        Substitution next = subst;
        if (match(*lits[k], candidate, next)) join(lits, sources, k + 1, next, emit);
    }
}

std::vector<const Atom*> positive_atoms(const std::vector<Literal>& body) {
    std::vector<const Atom*> out;
    for (const auto& l : body)
        if (!l.negated) out.push_back(&l.atom);
    return out;
}

/// Instantiates the body of a constraint under `subst`; anonymous variables in
/// negated literals expand to a conjunction over all matching atoms of `domain`.
std::vector<Literal> ground_constraint_body(const std::vector<Literal>& body, const Substitution& subst,
                                            const std::set<Atom>& domain) {
    std::vector<Literal> out;
    for (const auto& l : body) {
        Atom a = apply(l.atom, subst);
        if (a.is_ground()) {
            out.push_back({std::move(a), l.negated});
            continue;
        }
        for (const auto& candidate : domain) {
            Substitution local;
            if (match(a, candidate, local)) out.push_back({candidate, l.negated});
        }
    }
    return out;
}

// Duplicates are detected on content only; the first origin wins.
std::pair<Atom, std::vector<Atom>> content(const GroundRule& r) { return {r.head, r.body}; }
std::pair<Atom, std::optional<Atom>> content(const GroundChoice& c) { return {c.atom, c.guard}; }
std::vector<Literal> content(const GroundConstraint& c) { return c.body; }
const MinimizeElement& content(const MinimizeElement& m) { return m; }

template <class T, class K>
void push_unique(std::vector<T>& out, std::set<K>& seen, T value) {
    if (seen.insert(content(value)).second) out.push_back(std::move(value));
}

}  // namespace

std::vector<Rule> instantiate_rule(const Rule& rule, const std::set<Atom>& candidates) {
    AtomIndex index;
    for (const auto& a : candidates) index.insert(a);

    std::vector<Rule> out;
    auto add = [&](RuleShape shape) {
        Rule r{rule.label, std::move(shape)};
        if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(std::move(r));
    };
    auto run = [&](const std::vector<const Atom*>& lits, const Emit& emit) {
        std::vector<const AtomIndex*> sources(lits.size(), &index);
        join(lits, sources, 0, {}, emit);
    };

    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Fact>) {
                add(s);
            } else if constexpr (std::is_same_v<T, NormalRule>) {
                run(positive_atoms(s.body), [&](const Substitution& sub) {
                    NormalRule g{apply(s.head, sub), {}};
                    for (const auto& l : s.body) g.body.push_back({apply(l.atom, sub), l.negated});
                    add(std::move(g));
                });
            } else if constexpr (std::is_same_v<T, Constraint>) {
                run(positive_atoms(s.body), [&](const Substitution& sub) {
                    add(Constraint{ground_constraint_body(s.body, sub, candidates)});
                });
            } else if constexpr (std::is_same_v<T, ChoiceRule>) {
                if (!s.guard) {
                    add(s);
                    return;
                }
                run({&*s.guard}, [&](const Substitution& sub) {
                    add(ChoiceRule{apply(s.element, sub), apply(*s.guard, sub)});
                });
            } else {
                run({&s.condition}, [&](const Substitution& sub) {
                    Minimize m{s.weight, {}, apply(s.condition, sub)};
                    for (const auto& t : s.terms) m.terms.push_back(apply(t, sub));
                    add(std::move(m));
                });
            }
        },
        rule.shape);
    return out;
}

GroundProgram ground(const Program& p, const GroundingOptions& options) {
    validate_fragment(p);

    GroundProgram g;
    std::set<std::pair<Atom, std::vector<Atom>>> seen_rules;
    std::set<std::pair<Atom, std::optional<Atom>>> seen_choices;
    std::set<std::vector<Literal>> seen_constraints;
    std::set<MinimizeElement> seen_minimize;

    auto check_cap = [&] {
        if (g.size() > options.max_ground_rules) throw GroundingExplosion(options.max_ground_rules);
    };

    AtomIndex old_atoms, delta, all;
    for (const auto& r : p.rules) {
        if (r.is<Fact>()) {
            g.facts.insert(r.as<Fact>().head);
            delta.insert(r.as<Fact>().head);
            all.insert(r.as<Fact>().head);
        }
    }
    check_cap();

    auto add_choice = [&](Atom element, std::optional<Atom> guard, std::size_t origin, AtomIndex& next) {
        if (guard && g.facts.count(*guard)) guard.reset();
        if (!all.contains(element)) next.insert(element);
        push_unique(g.choices, seen_choices, GroundChoice{std::move(element), std::move(guard), origin});
        check_cap();
    };

    {
        AtomIndex initial;
        for (std::size_t i = 0; i < p.rules.size(); ++i) {
            const auto& r = p.rules[i];
            if (r.is<ChoiceRule>() && !r.as<ChoiceRule>().guard) add_choice(r.as<ChoiceRule>().element, {}, i, initial);
        }
        for (const auto& a : initial.members()) {
            delta.insert(a);
            all.insert(a);
        }
    }

    // Semi-naive rounds: at least one positive body atom must come from the
    // previous round's delta; literals before the pivot read the old atoms only.
    while (!delta.empty()) {
        AtomIndex next;
        for (std::size_t i = 0; i < p.rules.size(); ++i) {
            const auto& r = p.rules[i];
            std::vector<const Atom*> lits;
            if (r.is<NormalRule>())
                lits = positive_atoms(r.as<NormalRule>().body);
            else if (r.is<ChoiceRule>() && r.as<ChoiceRule>().guard)
                lits = {&*r.as<ChoiceRule>().guard};
            else
                continue;

            for (std::size_t pivot = 0; pivot < lits.size(); ++pivot) {
                std::vector<const AtomIndex*> sources(lits.size());
                for (std::size_t j = 0; j < lits.size(); ++j)
                    sources[j] = j < pivot ? &old_atoms : (j == pivot ? &delta : &all);
                join(lits, sources, 0, {}, [&](const Substitution& sub) {
                    if (r.is<NormalRule>()) {
                        const auto& nr = r.as<NormalRule>();
                        GroundRule gr{apply(nr.head, sub), {}, i};
                        for (const auto& l : nr.body) gr.body.push_back(apply(l.atom, sub));
                        if (!all.contains(gr.head)) next.insert(gr.head);
                        push_unique(g.definite_rules, seen_rules, std::move(gr));
                        check_cap();
                    } else {
                        const auto& cr = r.as<ChoiceRule>();
                        add_choice(apply(cr.element, sub), apply(*cr.guard, sub), i, next);
                    }
                });
            }
        }
        for (const auto& a : delta.members()) old_atoms.insert(a);
        delta = AtomIndex{};
        for (const auto& a : next.members()) {
            if (all.insert(a)) delta.insert(a);
        }
    }

    const std::set<Atom>& domain = all.members();
    for (std::size_t i = 0; i < p.rules.size(); ++i) {
        const auto& r = p.rules[i];
        if (r.is<Constraint>()) {
            const auto& body = r.as<Constraint>().body;
            std::vector<const AtomIndex*> sources;
            const auto lits = positive_atoms(body);
            sources.assign(lits.size(), &all);
            join(lits, sources, 0, {}, [&](const Substitution& sub) {
                push_unique(g.constraints, seen_constraints,
                            GroundConstraint{ground_constraint_body(body, sub, domain), i});
                check_cap();
            });
        } else if (r.is<Minimize>()) {
            const auto& m = r.as<Minimize>();
            join({&m.condition}, {&all}, 0, {}, [&](const Substitution& sub) {
                MinimizeElement e{m.weight, {}, apply(m.condition, sub)};
                for (const auto& t : m.terms) e.tuple.push_back(apply(t, sub));
                push_unique(g.minimize, seen_minimize, std::move(e));
                check_cap();
            });
        }
    }
    return g;
}

std::string render_ground(const GroundProgram& g) {
    std::string out;
    for (const auto& f : g.facts) out += render(f) + ".\n";
    for (const auto& c : g.choices) {
        out += "{" + render(c.atom);
        if (c.guard) out += " : " + render(*c.guard);
        out += "}.\n";
    }
    for (const auto& r : g.definite_rules) {
        out += render(r.head) + " :- ";
        for (std::size_t i = 0; i < r.body.size(); ++i) out += (i ? ", " : "") + render(r.body[i]);
        out += ".\n";
    }
    for (const auto& c : g.constraints) {
        if (c.body.empty()) {
            out += "% constraint from rule " + std::to_string(c.origin) + " has an empty ground body (always violated)\n";
            continue;
        }
        out += ":- ";
        for (std::size_t i = 0; i < c.body.size(); ++i) out += (i ? ", " : "") + render(c.body[i]);
        out += ".\n";
    }
    if (!g.minimize.empty()) {
        out += "#minimize { ";
        for (std::size_t i = 0; i < g.minimize.size(); ++i) {
            const auto& m = g.minimize[i];
            out += (i ? "; " : "") + std::to_string(m.weight);
            for (const auto& t : m.tuple) out += ", " + render(t);
            out += " : " + render(m.condition);
        }
        out += " }.\n";
    }
    return out;
}

}  // namespace dxasp
