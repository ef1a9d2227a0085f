#include "dxasp/solving.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <map>

#include "dxasp/errors.hpp"
#include "dxasp/parser.hpp"

namespace dxasp {

namespace {

using AtomId = int;
using Bits = std::vector<char>;

/// GroundProgram compiled to integer ids for repeated least-model runs.
class Engine {
public:
    explicit Engine(const GroundProgram& g) {
        for (const auto& f : g.facts) base_.push_back(id(f));

        for (const auto& r : g.definite_rules) add_rule(id(r.head), r.body, -1);

        std::set<Atom> distinct = g.choice_atoms();
        choice_atoms_.assign(distinct.begin(), distinct.end());
        std::map<Atom, int> choice_index;
        for (std::size_t i = 0; i < choice_atoms_.size(); ++i) {
            choice_index[choice_atoms_[i]] = static_cast<int>(i);
            choice_ids_.push_back(id(choice_atoms_[i]));
        }
        for (const auto& c : g.choices) {
            std::vector<Atom> body;
            if (c.guard) body.push_back(*c.guard);
            add_rule(id(c.atom), body, choice_index.at(c.atom));
        }

        for (const auto& c : g.constraints) {
            Compiled cc{{}, {}, c.origin};
            for (const auto& l : c.body) (l.negated ? cc.neg : cc.pos).push_back(id(l.atom));
            constraints_.push_back(std::move(cc));
        }

        std::map<std::pair<long, std::vector<Term>>, std::size_t> groups;
        for (const auto& m : g.minimize) {
            auto [it, inserted] = groups.try_emplace({m.weight, m.tuple}, cost_groups_.size());
            if (inserted) cost_groups_.push_back({m.weight, {}});
            cost_groups_[it->second].conditions.push_back(id(m.condition));
        }
    }

    std::size_t choice_count() const { return choice_atoms_.size(); }

    /// Least model with the choice rules of `enabled` switched on.
    Bits least_model(const Bits& enabled) const {
        Bits in(atoms_.size(), 0);
        std::vector<int> remaining(rules_.size());
        std::deque<AtomId> queue;
        auto derive = [&](AtomId a) {
            if (!in[a]) {
                in[a] = 1;
                queue.push_back(a);
            }
        };
        for (std::size_t r = 0; r < rules_.size(); ++r) {
            const auto& rule = rules_[r];
            if (rule.choice >= 0 && !enabled[rule.choice]) {
                remaining[r] = -1;
                continue;
            }
            remaining[r] = static_cast<int>(rule.body.size());
            if (remaining[r] == 0) derive(rule.head);
        }
        for (AtomId a : base_) derive(a);
        while (!queue.empty()) {
            AtomId a = queue.front();
            queue.pop_front();
            for (std::size_t r : watches_[a]) {
                if (remaining[r] > 0 && --remaining[r] == 0) derive(rules_[r].head);
            }
        }
        return in;
    }

    long cost(const Bits& model) const {
        long total = 0;
        for (const auto& g : cost_groups_)
            if (std::any_of(g.conditions.begin(), g.conditions.end(), [&](AtomId a) { return model[a]; }))
                total += g.weight;
        return total;
    }

    /// True when every model between `lower` and `upper` violates some constraint.
    bool doomed(const Bits& lower, const Bits& upper) const {
        for (const auto& c : constraints_) {
            bool pos = std::all_of(c.pos.begin(), c.pos.end(), [&](AtomId a) { return lower[a]; });
            bool neg = std::none_of(c.neg.begin(), c.neg.end(), [&](AtomId a) { return upper[a]; });
            if (pos && neg) return true;
        }
        return false;
    }

    std::vector<std::size_t> violated(const Bits& model) const {
        std::vector<std::size_t> out;
        for (const auto& c : constraints_) {
            bool pos = std::all_of(c.pos.begin(), c.pos.end(), [&](AtomId a) { return model[a]; });
            bool neg = std::none_of(c.neg.begin(), c.neg.end(), [&](AtomId a) { return model[a]; });
            if (pos && neg && std::find(out.begin(), out.end(), c.origin) == out.end()) out.push_back(c.origin);
        }
        return out;
    }

    bool choice_holds(std::size_t i, const Bits& model) const { return model[choice_ids_[i]]; }

    std::set<Atom> to_atoms(const Bits& model) const {
        std::set<Atom> out;
        for (std::size_t a = 0; a < atoms_.size(); ++a)
            if (model[a]) out.insert(atoms_[a]);
        return out;
    }

private:
    struct CompiledRule {
        AtomId head;
        std::vector<AtomId> body;  // distinct atoms
        int choice;                // -1 for definite rules
    };
    struct Compiled {
        std::vector<AtomId> pos, neg;
        std::size_t origin;
    };
    struct CostGroup {
        long weight;
        std::vector<AtomId> conditions;
    };

    AtomId id(const Atom& a) {
        auto [it, inserted] = ids_.try_emplace(a, static_cast<AtomId>(atoms_.size()));
        if (inserted) {
            atoms_.push_back(a);
            watches_.emplace_back();
        }
        return it->second;
    }

    void add_rule(AtomId head, const std::vector<Atom>& body, int choice) {
        CompiledRule r{head, {}, choice};
        for (const auto& b : body) {
            AtomId bid = id(b);
            if (std::find(r.body.begin(), r.body.end(), bid) == r.body.end()) r.body.push_back(bid);
        }
        for (AtomId b : r.body) watches_[b].push_back(rules_.size());
        rules_.push_back(std::move(r));
    }

    std::map<Atom, AtomId> ids_;
    std::vector<Atom> atoms_;
    std::vector<std::vector<std::size_t>> watches_;
    std::vector<AtomId> base_;
    std::vector<CompiledRule> rules_;
    std::vector<Atom> choice_atoms_;
    std::vector<AtomId> choice_ids_;
    std::vector<Compiled> constraints_;
    std::vector<CostGroup> cost_groups_;
};

constexpr long kNoBound = std::numeric_limits<long>::max();

/// One depth-first pass with a fixed cost bound. Choices are decided in
/// canonical order, exclusion first.
class Search {
public:
    Search(const Engine& e, long bound, std::size_t max_models, SolveStats& stats)
        : engine_(e), bound_(bound), max_models_(max_models), stats_(stats) {}

    void run() {
        Bits included(engine_.choice_count(), 0);
        visit(0, included);
    }

    long next_bound() const { return next_bound_; }
    const std::set<Bits>& models() const { return models_; }
    bool truncated() const { return truncated_; }

private:
    void visit(std::size_t depth, Bits& included) {
        if (models_.size() >= max_models_ && !models_.empty()) {
            truncated_ = true;
            return;
        }
        const Bits lower = engine_.least_model(included);
        const long lb = engine_.cost(lower);
        if (lb > bound_) {
            next_bound_ = std::min(next_bound_, lb);
            return;
        }
        Bits allowed = included;
        std::fill(allowed.begin() + static_cast<long>(depth), allowed.end(), 1);
        const Bits upper = engine_.least_model(allowed);
        if (engine_.doomed(lower, upper)) return;
        for (std::size_t i = 0; i < depth; ++i)
            if (included[i] && !engine_.choice_holds(i, upper)) return;

        if (depth == engine_.choice_count()) {
            ++stats_.models_enumerated;
            models_.insert(lower);
            return;
        }
        ++stats_.choice_points;
        visit(depth + 1, included);
        included[depth] = 1;
        visit(depth + 1, included);
        included[depth] = 0;
    }

    const Engine& engine_;
    long bound_;
    std::size_t max_models_;
    SolveStats& stats_;
    long next_bound_ = kNoBound;
    std::set<Bits> models_;
    bool truncated_ = false;
};

bool canonical_less(const AnswerSet& a, const AnswerSet& b) { return render_atoms(a.atoms) < render_atoms(b.atoms); }

}  // namespace

std::vector<std::string> render_atoms(const std::set<Atom>& atoms) {
    std::vector<std::string> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) out.push_back(render(a));
    std::sort(out.begin(), out.end());
    return out;
}

std::set<Atom> least_model(const std::vector<GroundRule>& rules, const std::set<Atom>& base_facts) {
    GroundProgram g;
    g.facts = base_facts;
    g.definite_rules = rules;
    Engine e(g);
    return e.to_atoms(e.least_model({}));
}

long model_cost(const GroundProgram& g, const std::set<Atom>& atoms) {
    std::map<std::pair<long, std::vector<Term>>, bool> groups;
    for (const auto& m : g.minimize) groups[{m.weight, m.tuple}] |= atoms.count(m.condition) > 0;
    long total = 0;
    for (const auto& [key, holds] : groups)
        if (holds) total += key.first;
    return total;
}

SolveResult solve(const GroundProgram& g, const SolveConfig& config) {
    for (const auto& m : g.minimize)
        if (m.weight < 0) throw FragmentError("minimize weights must be non-negative");

    const auto start = std::chrono::steady_clock::now();
    const Engine engine(g);
    const std::size_t cap = std::max<std::size_t>(config.max_models, 1);

    SolveResult result;
    long bound = engine.cost(engine.least_model(Bits(engine.choice_count(), 0)));
    for (;;) {
        ++result.stats.passes;
        Search search(engine, bound, cap, result.stats);
        search.run();
        if (!search.models().empty()) {
            result.optimal_cost = bound;
            result.stats.truncated = search.truncated();
            for (const auto& m : search.models()) result.models.push_back({engine.to_atoms(m), engine.cost(m)});
            break;
        }
        if (search.next_bound() == kNoBound) {
            Bits everything(engine.choice_count(), 1);
            result.conflicting_constraints = engine.violated(engine.least_model(everything));
            if (result.conflicting_constraints.empty())
                result.conflicting_constraints = engine.violated(engine.least_model(Bits(engine.choice_count(), 0)));
            break;
        }
        bound = search.next_bound();
    }
    // Every pass after the first explores only nodes at the raised bound, so
    // the models of the successful pass all cost exactly `bound`.
    std::sort(result.models.begin(), result.models.end(), canonical_less);
    result.stats.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::set<Atom> consequences(const SolveResult& r, Mode mode) {
    if (r.models.empty()) throw EmptyResult("no answer set: the program is unsatisfiable");
    auto diagnoses = [](const AnswerSet& m) {
        std::set<Atom> out;
        for (const auto& a : m.atoms)
            if (a.predicate == "diagnosis" && a.args.size() == 1) out.insert(a);
        return out;
    };
    std::set<Atom> acc = diagnoses(r.models.front());
    for (std::size_t i = 1; i < r.models.size(); ++i) {
        const auto next = diagnoses(r.models[i]);
        if (mode == Mode::Brave) {
            acc.insert(next.begin(), next.end());
        } else {
            std::set<Atom> kept;
            std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(), std::inserter(kept, kept.end()));
            acc = std::move(kept);
        }
    }
    return acc;
}

namespace {
bool is_add_symptom(const Atom& a) {
    return a.predicate == "add" && a.args.size() == 1 && a.args[0].kind == Term::Kind::Compound &&
           a.args[0].name == "symptom" && a.args[0].args.size() == 1;
}
}  // namespace

bool inject_bridge(Program& p) {
    const bool wanted = std::any_of(p.rules.begin(), p.rules.end(), [](const Rule& r) {
        return r.is<ChoiceRule>() && is_add_symptom(r.as<ChoiceRule>().element);
    });
    if (!wanted) return false;
    const Term s = Term::variable("S");
    NormalRule bridge{Atom{"has", {Term::compound("symptom", {s})}},
                      {Literal{Atom{"add", {Term::compound("symptom", {s})}}, false}}};
    const bool present = std::any_of(p.rules.begin(), p.rules.end(), [&](const Rule& r) {
        return r.is<NormalRule>() && r.as<NormalRule>() == bridge;
    });
    if (present) return false;
    p.add(Rule{std::nullopt, std::move(bridge)}, {"<bridge>", 0});
    return true;
}

Solved solve_program(Program p, const SolveConfig& config) {
    if (config.bridge) inject_bridge(p);
    GroundProgram g = ground(p, config.grounding);
    SolveResult r = solve(g, config);
    return {std::move(p), std::move(g), std::move(r)};
}

std::string unsat_hint(const SolveResult& r, const Program& p) {
    if (!r.unsatisfiable()) return {};
    if (r.conflicting_constraints.empty()) return "no answer set exists";
    std::string out = "no answer set exists; unsatisfiable constraint";
    out += r.conflicting_constraints.size() > 1 ? "s: " : ": ";
    for (std::size_t i = 0; i < r.conflicting_constraints.size(); ++i) {
        const std::size_t origin = r.conflicting_constraints[i];
        if (i) out += "; ";
        out += origin < p.rules.size() ? render(p.rules[origin]) : "rule " + std::to_string(origin);
        if (origin < p.source_map.size() && p.source_map[origin].line)
            out += " (" + p.source_map[origin].file + ":" + std::to_string(p.source_map[origin].line) + ")";
    }
    return out;
}

Mode parse_mode(const std::string& s) {
    if (s == "brave") return Mode::Brave;
    if (s == "cautious") return Mode::Cautious;
    throw Error("unknown mode '" + s + "' (expected brave or cautious)");
}

std::string mode_name(Mode m) { return m == Mode::Brave ? "brave" : "cautious"; }

}  // namespace dxasp
