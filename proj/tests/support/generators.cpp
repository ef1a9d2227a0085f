#include "generators.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

namespace dxasp::testing {

namespace {

std::size_t pick(std::mt19937& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

Atom has_symptom(const std::string& s) {
    return {"has", {Term::compound("symptom", {Term::constant(s)})}};
}

Atom symptom_of(const Term& t) { return {"symptom", {t}}; }

Literal pos(Atom a) { return {std::move(a), false}; }
Literal neg(Atom a) { return {std::move(a), true}; }

std::string sym(std::size_t i) { return "s" + std::to_string(i); }

}  // namespace

Program random_fragment_program(std::mt19937& rng, const FragmentShape& shape) {
    Program p;
    const std::size_t n_sym = pick(rng, 1, shape.max_symptoms);
    const std::size_t n_tests = pick(rng, 0, shape.max_tests);
    const std::size_t n_diseases = pick(rng, 1, 3);

    for (std::size_t i = 0; i < n_sym; ++i) {
        if (coin(rng, 0.85)) p.add({std::nullopt, Fact{symptom_of(Term::constant(sym(i)))}});
    }
    for (std::size_t i = 0; i < n_sym; ++i) {
        if (coin(rng, 0.3)) p.add({std::nullopt, Fact{has_symptom(sym(i))}});
    }

    std::size_t budget = pick(rng, 1, shape.max_rules);
    if (n_sym > 1 && coin(rng, 0.6) && budget > 1) {
        const std::size_t n_links = pick(rng, 1, 3);
        for (std::size_t k = 0; k < n_links; ++k) {
            const auto a = pick(rng, 0, n_sym - 1), b = pick(rng, 0, n_sym - 1);
            if (a != b)
                p.add({std::nullopt,
                       Fact{{"linked_symptom", {Term::constant(sym(a)), Term::constant(sym(b))}}}});
        }
        p.add({std::nullopt,
               NormalRule{{"has", {Term::compound("symptom", {Term::variable("S2")})}},
                          {pos({"has", {Term::compound("symptom", {Term::variable("S1")})}}),
                           pos({"linked_symptom", {Term::variable("S1"), Term::variable("S2")}})}}});
        --budget;
    }

    for (std::size_t t = 0; t < n_tests; ++t)
        p.add({std::nullopt, ChoiceRule{{"test", {Term::constant("t" + std::to_string(t))}}, std::nullopt}});

    while (budget > 0) {
        --budget;
        const auto kind = pick(rng, 0, 9);
        if (kind <= 6) {
            NormalRule r{{"diagnosis", {Term::constant("d" + std::to_string(pick(rng, 1, n_diseases)))}}, {}};
            std::set<std::size_t> used;
            const std::size_t len = pick(rng, 1, std::min<std::size_t>(3, n_sym));
            while (used.size() < len) used.insert(pick(rng, 0, n_sym - 1));
            for (auto s : used) r.body.push_back(pos(has_symptom(sym(s))));
            if (n_tests > 0 && coin(rng, 0.2))
                r.body.push_back(pos({"test", {Term::constant("t" + std::to_string(pick(rng, 0, n_tests - 1)))}}));
            p.add({std::nullopt, std::move(r)});
        } else if (kind == 7) {
            p.add({std::nullopt, Constraint{{pos({"diagnosis", {Term::constant("d" + std::to_string(pick(rng, 1, n_diseases)))}}),
                                             neg(has_symptom(sym(pick(rng, 0, n_sym - 1))))}}});
        } else if (kind == 8 && n_sym > 1) {
            const auto a = pick(rng, 0, n_sym - 1), b = pick(rng, 0, n_sym - 1);
            p.add({std::nullopt, Constraint{{pos(has_symptom(sym(a))), pos(has_symptom(sym(b)))}}});
        } else {
            p.add({std::nullopt,
                   Constraint{{pos({"add", {Term::compound("symptom", {Term::variable("S")})}}),
                               neg({"diagnosis", {Term::variable("_")}})}}});
        }
    }

    p.add({std::nullopt, ChoiceRule{{"add", {Term::compound("symptom", {Term::variable("S")})}},
                                    symptom_of(Term::variable("S"))}});
    if (shape.require_diagnosis) p.add({std::nullopt, Constraint{{neg({"diagnosis", {Term::variable("_")}})}}});

    const auto m = pick(rng, 0, 9);
    if (m < 7) {
        p.add({std::nullopt, Minimize{1, {Term::variable("S")}, {"add", {Term::compound("symptom", {Term::variable("S")})}}}});
    } else if (m == 7) {
        p.add({std::nullopt, Minimize{static_cast<long>(pick(rng, 0, 3)), {Term::variable("S")},
                                      {"add", {Term::compound("symptom", {Term::variable("S")})}}}});
    } else if (m == 8) {
        p.add({std::nullopt, Minimize{1, {}, {"add", {Term::compound("symptom", {Term::variable("S")})}}}});
    }
    return p;
}

Program random_datalog_program(std::mt19937& rng, std::size_t max_constants) {
    struct Pred {
        std::string name;
        std::size_t arity;
    };
    std::vector<Pred> preds;
    const std::size_t n_preds = pick(rng, 2, 5);
    for (std::size_t i = 0; i < n_preds; ++i) preds.push_back({"p" + std::to_string(i), pick(rng, 0, 2)});
    // Choice elements go to their own predicate family so guards stay meaningful.
    const Pred chosen{"q", pick(rng, 1, 2)};

    const std::size_t n_const = pick(rng, 1, max_constants);
    auto constant = [&] { return Term::constant("c" + std::to_string(pick(rng, 0, n_const - 1))); };
    const std::vector<std::string> var_names{"X", "Y", "Z"};

    auto random_atom = [&](const Pred& pr, const std::vector<std::string>& vars, double p_var) {
        Atom a{pr.name, {}};
        for (std::size_t k = 0; k < pr.arity; ++k) {
            if (!vars.empty() && coin(rng, p_var))
                a.args.push_back(Term::variable(vars[pick(rng, 0, vars.size() - 1)]));
            else
                a.args.push_back(constant());
        }
        return a;
    };
    auto vars_of = [](const std::vector<Literal>& body) {
        std::vector<std::string> vs;
        for (const auto& l : body)
            if (!l.negated) collect_variables(l.atom, vs);
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        return vs;
    };
    auto body_preds = [&] {
        std::vector<Pred> all = preds;
        all.push_back(chosen);
        return all;
    };

    Program p;
    const std::size_t n_facts = pick(rng, 3, 40);
    for (std::size_t i = 0; i < n_facts; ++i)
        p.add({std::nullopt, Fact{random_atom(preds[pick(rng, 0, n_preds - 1)], {}, 0.0)}});

    const std::vector<std::string> two_vars{"X", "Y"};
    auto random_body = [&](std::size_t len) {
        const auto bp = body_preds();
        std::vector<Literal> body;
        for (std::size_t k = 0; k < len; ++k) body.push_back(pos(random_atom(bp[pick(rng, 0, bp.size() - 1)], two_vars, 0.7)));
        return body;
    };

    const std::size_t n_rules = pick(rng, 2, 10);
    for (std::size_t i = 0; i < n_rules; ++i) {
        auto body = random_body(pick(rng, 1, 3));
        const auto vs = vars_of(body);
        p.add({std::nullopt, NormalRule{random_atom(preds[pick(rng, 0, n_preds - 1)], vs, 0.8), std::move(body)}});
    }

    const std::size_t n_choices = pick(rng, 0, 2);
    for (std::size_t i = 0; i < n_choices; ++i) {
        if (coin(rng, 0.2)) {
            p.add({std::nullopt, ChoiceRule{random_atom(chosen, {}, 0.0), std::nullopt}});
            continue;
        }
        Atom guard = random_atom(preds[pick(rng, 0, n_preds - 1)], two_vars, 0.8);
        std::vector<std::string> gv;
        collect_variables(guard, gv);
        p.add({std::nullopt, ChoiceRule{random_atom(chosen, gv, 0.9), std::move(guard)}});
    }

    const std::size_t n_constraints = pick(rng, 0, 2);
    for (std::size_t i = 0; i < n_constraints; ++i) {
        auto body = random_body(pick(rng, 1, 2));
        const auto vs = vars_of(body);
        const auto bp = body_preds();
        const Pred& np = bp[pick(rng, 0, bp.size() - 1)];
        Atom n{np.name, {}};
        for (std::size_t k = 0; k < np.arity; ++k) {
            const auto c = pick(rng, 0, 2);
            if (c == 0 && !vs.empty()) n.args.push_back(Term::variable(vs[pick(rng, 0, vs.size() - 1)]));
            else if (c == 1) n.args.push_back(Term::variable("_"));
            else n.args.push_back(constant());
        }
        if (coin(rng, 0.7)) body.push_back(neg(std::move(n)));
        p.add({std::nullopt, Constraint{std::move(body)}});
    }

    if (coin(rng, 0.6)) {
        const auto bp = body_preds();
        Atom cond = random_atom(bp[pick(rng, 0, bp.size() - 1)], two_vars, 0.8);
        std::vector<std::string> cv;
        collect_variables(cond, cv);
        std::vector<Term> tuple;
        for (const auto& v : cv)
            if (coin(rng, 0.7)) tuple.push_back(Term::variable(v));
        p.add({std::nullopt, Minimize{static_cast<long>(pick(rng, 0, 3)), std::move(tuple), std::move(cond)}});
    }
    return p;
}

Program random_syntax_program(std::mt19937& rng) {
    const std::vector<std::string> names{"a", "b", "symptom", "has", "diagnosis", "linked_symptom", "x1", "f_g", "notx"};
    const std::vector<std::string> vars{"X", "Y", "S1", "Long_Var", "V2"};

    std::function<Term(std::size_t, const std::vector<std::string>&)> term =
        [&](std::size_t depth, const std::vector<std::string>& allowed) -> Term {
        const auto k = pick(rng, 0, 9);
        if (k < 3 && !allowed.empty()) return Term::variable(allowed[pick(rng, 0, allowed.size() - 1)]);
        if (k < 5 && depth < 2) {
            std::vector<Term> args;
            const auto n = pick(rng, 1, 3);
            for (std::size_t i = 0; i < n; ++i) args.push_back(term(depth + 1, allowed));
            return Term::compound(names[pick(rng, 0, names.size() - 1)], std::move(args));
        }
        return Term::constant(names[pick(rng, 0, names.size() - 1)]);
    };
    auto atom = [&](const std::vector<std::string>& allowed) {
        Atom a{names[pick(rng, 0, names.size() - 1)], {}};
        const auto n = pick(rng, 0, 3);
        for (std::size_t i = 0; i < n; ++i) a.args.push_back(term(0, allowed));
        return a;
    };
    auto bound_by = [](const std::vector<Literal>& body) {
        std::vector<std::string> vs;
        for (const auto& l : body)
            if (!l.negated) collect_variables(l.atom, vs);
        return vs;
    };

    Program p;
    std::set<std::string> labels;
    bool has_minimize = false;
    const std::size_t n = pick(rng, 0, 12);
    for (std::size_t i = 0; i < n; ++i) {
        std::optional<std::string> label;
        if (coin(rng, 0.3)) {
            std::string l = names[pick(rng, 0, names.size() - 1)] + std::to_string(i);
            if (labels.insert(l).second) label = l;
        }
        const auto kind = pick(rng, 0, 4);
        if (kind == 0) {
            p.add({label, Fact{atom({})}});
        } else if (kind == 1) {
            std::vector<Literal> body;
            const auto len = pick(rng, 1, 3);
            for (std::size_t k = 0; k < len; ++k) body.push_back(pos(atom(vars)));
            const auto bv = bound_by(body);
            if (coin(rng, 0.3)) body.push_back(neg(atom(bv)));
            p.add({label, NormalRule{atom(bv), std::move(body)}});
        } else if (kind == 2) {
            std::vector<Literal> body;
            const auto len = pick(rng, 0, 2);
            for (std::size_t k = 0; k < len; ++k) body.push_back(pos(atom(vars)));
            auto bv = bound_by(body);
            if (body.empty() || coin(rng, 0.5)) {
                auto nv = bv;
                nv.push_back("_");
                body.push_back(neg(atom(nv)));
            }
            p.add({label, Constraint{std::move(body)}});
        } else if (kind == 3) {
            if (coin(rng, 0.3)) {
                p.add({label, ChoiceRule{atom({}), std::nullopt}});
            } else {
                Atom guard = atom(vars);
                std::vector<std::string> gv;
                collect_variables(guard, gv);
                p.add({label, ChoiceRule{atom(gv), std::move(guard)}});
            }
        } else if (!has_minimize) {
            has_minimize = true;
            Atom cond = atom(vars);
            std::vector<std::string> cv;
            collect_variables(cond, cv);
            std::vector<Term> tuple;
            const auto tn = pick(rng, 0, 2);
            for (std::size_t k = 0; k < tn; ++k) tuple.push_back(term(0, cv));
            p.add({label, Minimize{static_cast<long>(pick(rng, 0, 20)), std::move(tuple), std::move(cond)}});
        }
    }
    return p;
}

}  // namespace dxasp::testing
