#include "dxasp/explanation.hpp"

#include <algorithm>
#include <json.hpp>

#include "dxasp/errors.hpp"
#include "dxasp/parser.hpp"

namespace dxasp {

Provenance derive_with_provenance(const std::vector<GroundRule>& rules, const std::set<Atom>& base_facts,
                                  const std::set<Atom>& chosen) {
    Provenance p;
    auto record = [&](const Atom& a, Support s, std::size_t origin, std::vector<Atom> body) {
        if (!p.atoms.insert(a).second) return false;
        p.records.emplace(a, DerivationRecord{a, s, origin, std::move(body)});
        p.order.push_back(a);
        return true;
    };
    for (const auto& f : base_facts) record(f, Support::Fact, 0, {});
    for (const auto& c : chosen) record(c, Support::Choice, 0, {});

    // Jacobi rounds: a rule fires in the round after its whole body is known;
    // ties inside a round go to the lowest source rule index.
    std::vector<bool> fired(rules.size(), false);
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::size_t> ready;
        for (std::size_t r = 0; r < rules.size(); ++r) {
            if (fired[r]) continue;
            const auto& body = rules[r].body;
            if (std::all_of(body.begin(), body.end(), [&](const Atom& a) { return p.atoms.count(a) > 0; }))
                ready.push_back(r);
        }
        std::stable_sort(ready.begin(), ready.end(),
                         [&](std::size_t x, std::size_t y) { return rules[x].origin < rules[y].origin; });
        std::vector<std::size_t> winners;
        std::set<Atom> heads;
        for (std::size_t r : ready) {
            fired[r] = true;
            if (!p.atoms.count(rules[r].head) && heads.insert(rules[r].head).second) winners.push_back(r);
        }
        for (std::size_t r : winners) {
            record(rules[r].head, Support::Rule, rules[r].origin, rules[r].body);
            changed = true;
        }
    }
    return p;
}

Provenance model_provenance(const GroundProgram& g, const std::set<Atom>& model) {
    std::set<Atom> chosen;
    for (const auto& c : g.choices)
        if (model.count(c.atom) && !g.facts.count(c.atom)) chosen.insert(c.atom);
    return derive_with_provenance(g.definite_rules, g.facts, chosen);
}

std::size_t ExplanationTree::depth() const {
    std::size_t d = 0;
    for (const auto& c : children) d = std::max(d, c.depth());
    return d + 1;
}

ExplanationTree explanation_tree(const Provenance& provenance, const Atom& goal) {
    auto it = provenance.records.find(goal);
    if (it == provenance.records.end()) throw UnknownAtom("no derivation recorded for " + render(goal));
    const DerivationRecord& rec = it->second;
    ExplanationTree t{goal, rec.support, {}};
    for (const auto& b : rec.body) t.children.push_back(explanation_tree(provenance, b));
    return t;
}

namespace {
void render_node(const ExplanationTree& t, std::size_t depth, std::string& out) {
    out.append(4 * depth, ' ');
    out += "|__ " + render(t.root) + "\n";
    for (const auto& c : t.children) render_node(c, depth + 1, out);
}

nlohmann::ordered_json to_json(const ExplanationTree& t) {
    nlohmann::ordered_json j;
    j["atom"] = render(t.root);
    j["support"] = t.support == Support::Fact ? "fact" : t.support == Support::Choice ? "choice" : "rule";
    j["children"] = nlohmann::ordered_json::array();
    for (const auto& c : t.children) j["children"].push_back(to_json(c));
    return j;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}
}  // namespace

std::string render_tree(const ExplanationTree& t) {
    std::string out = "*\n";
    render_node(t, 0, out);
    return out;
}

std::string tree_to_json(const ExplanationTree& t, int indent) { return to_json(t).dump(indent); }

std::string rule_label(const Program& p, std::size_t index) {
    if (index < p.rules.size() && p.rules[index].label) return *p.rules[index].label;
    return "r" + std::to_string(index);
}

CausalGraph causal_graph(const Program& p, const GroundProgram& g, const Provenance& provenance) {
    CausalGraph graph;
    graph.nodes = provenance.order;
    std::set<CausalEdge> seen;
    for (const auto& r : g.definite_rules) {
        if (!provenance.atoms.count(r.head)) continue;
        if (!std::all_of(r.body.begin(), r.body.end(), [&](const Atom& a) { return provenance.atoms.count(a) > 0; }))
            continue;
        for (const auto& b : r.body) {
            CausalEdge e{b, r.head, rule_label(p, r.origin)};
            if (seen.insert(e).second) graph.edges.push_back(std::move(e));
        }
    }
    return graph;
}

std::string render_dot(const CausalGraph& graph) {
    std::string out = "digraph causal {\n";
    for (const auto& n : graph.nodes) out += "  " + quoted(render(n)) + ";\n";
    for (const auto& e : graph.edges)
        out += "  " + quoted(render(e.from)) + " -> " + quoted(render(e.to)) + " [label=" + quoted(e.label) + "];\n";
    return out + "}\n";
}

}  // namespace dxasp
