#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "dxasp/errors.hpp"
#include "dxasp/explanation.hpp"
#include "dxasp/parser.hpp"
#include "dxasp/solving.hpp"

using namespace dxasp;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Solved golden_case() {
    Program p = load_program(DXASP_FIXTURE_DIR "/chickenpox.lp");
    for (const auto& r : load_program(DXASP_FIXTURE_DIR "/explain_patient.lp").rules) p.add(r);
    return solve_program(std::move(p));
}

void collect_pairs(const ExplanationTree& t, std::set<std::pair<Atom, Atom>>& out) {
    for (const auto& c : t.children) {
        out.insert({c.root, t.root});
        collect_pairs(c, out);
    }
}

}  // namespace

TEST_CASE("facts only") {
    const auto prov = derive_with_provenance({}, {parse_atom("a"), parse_atom("b")});
    CHECK(prov.records.size() == 2);
    for (const auto& [atom, rec] : prov.records) {
        CHECK(rec.support == Support::Fact);
        CHECK(rec.body.empty());
    }
}

TEST_CASE("propagated symptom records its body") {
    const auto g = ground(parse_program(
        "has(symptom(fatigue)).\nlinked_symptom(fatigue, lethargy).\n"
        "has(symptom(S2)) :- has(symptom(S1)), linked_symptom(S1, S2)."));
    const auto prov = derive_with_provenance(g.definite_rules, g.facts);
    const auto& rec = prov.records.at(parse_atom("has(symptom(lethargy))"));
    CHECK(rec.support == Support::Rule);
    CHECK(rec.body == std::vector<Atom>{parse_atom("has(symptom(fatigue))"), parse_atom("linked_symptom(fatigue, lethargy)")});
    CHECK(prov.atoms == least_model(g.definite_rules, g.facts));
}

TEST_CASE("first derivation wins") {
    const auto g = ground(parse_program("a.\nb.\nc :- b.\nc :- a."));
    const auto prov = derive_with_provenance(g.definite_rules, g.facts);
    CHECK(prov.records.count(parse_atom("c")) == 1);
    CHECK(prov.records.at(parse_atom("c")).rule_origin == 2);

    const auto later = ground(parse_program("a.\nx :- a.\nc :- x.\nc :- a."));
    const auto p2 = derive_with_provenance(later.definite_rules, later.facts);
    CHECK(p2.records.at(parse_atom("c")).rule_origin == 3);  // fires a round before the chain through x
}

TEST_CASE("chosen atoms are leaves") {
    const auto s = solve_program(parse_program("symptom(a).\n{ add(symptom(S)) : symptom(S) }.\nd :- has(symptom(a)).\n:- not d.\n#minimize { 1, S : add(symptom(S)) }."));
    REQUIRE(s.result.models.size() == 1);
    const auto prov = model_provenance(s.ground, s.result.models[0].atoms);
    CHECK(prov.records.at(parse_atom("add(symptom(a))")).support == Support::Choice);
    const auto tree = explanation_tree(prov, parse_atom("d"));
    CHECK(render_tree(tree) == "*\n|__ d\n    |__ has(symptom(a))\n        |__ add(symptom(a))\n");
}

TEST_CASE("golden explanation tree") {
    const auto s = golden_case();
    REQUIRE(s.result.optimal_cost == 0);
    const auto prov = model_provenance(s.ground, s.result.models[0].atoms);
    const auto tree = explanation_tree(prov, parse_atom("diagnosis(chickenpox)"));
    CHECK(render_tree(tree) == slurp(DXASP_FIXTURE_DIR "/explanation.golden"));

    bool itching_leaf = false, fever_subtree = false;
    for (const auto& c : tree.children) {
        if (c.root == parse_atom("has(symptom(itching))")) itching_leaf = c.children.empty();
        if (c.root == parse_atom("has(symptom(high_fever))"))
            for (const auto& g : c.children) fever_subtree |= g.root == parse_atom("has(symptom(mild_fever))");
    }
    CHECK(itching_leaf);
    CHECK(fever_subtree);
    CHECK(tree.depth() == 4);
}

TEST_CASE("tree invariants") {
    const auto s = golden_case();
    const auto& model = s.result.models[0].atoms;
    const auto prov = model_provenance(s.ground, model);
    const auto tree = explanation_tree(prov, parse_atom("diagnosis(chickenpox)"));
    const auto graph = causal_graph(s.program, s.ground, prov);

    std::set<std::pair<Atom, Atom>> pairs;
    collect_pairs(tree, pairs);
    std::set<std::pair<Atom, Atom>> edges;
    for (const auto& e : graph.edges) edges.insert({e.from, e.to});
    for (const auto& p : pairs) {
        CHECK(model.count(p.first));
        CHECK(edges.count(p));
    }

    std::function<void(const ExplanationTree&)> leaves = [&](const ExplanationTree& t) {
        if (t.children.empty()) CHECK(t.support != Support::Rule);
        for (const auto& c : t.children) leaves(c);
    };
    leaves(tree);
}

TEST_CASE("single node and missing goal") {
    const auto prov = derive_with_provenance({}, {parse_atom("has(symptom(itching))")});
    const auto t = explanation_tree(prov, parse_atom("has(symptom(itching))"));
    CHECK(t.children.empty());
    CHECK(render_tree(t) == "*\n|__ has(symptom(itching))\n");
    CHECK_THROWS_AS(explanation_tree(prov, parse_atom("diagnosis(x)")), UnknownAtom);
}

TEST_CASE("chain indentation") {
    const auto g = ground(parse_program("a.\nb :- a.\nc :- b.\nd :- c."));
    const auto prov = derive_with_provenance(g.definite_rules, g.facts);
    CHECK(render_tree(explanation_tree(prov, parse_atom("d"))) == "*\n|__ d\n    |__ c\n        |__ b\n            |__ a\n");
}

TEST_CASE("json tree") {
    const auto g = ground(parse_program("a.\nb :- a."));
    const auto prov = derive_with_provenance(g.definite_rules, g.facts);
    const auto js = tree_to_json(explanation_tree(prov, parse_atom("b")), -1);
    CHECK(js == R"({"atom":"b","support":"rule","children":[{"atom":"a","support":"fact","children":[]}]})");
}

TEST_CASE("causal graph of the labeled program") {
    const auto s = solve_program(load_program(DXASP_FIXTURE_DIR "/causal_example.lp"));
    REQUIRE(s.result.models.size() == 1);
    const auto prov = model_provenance(s.ground, s.result.models[0].atoms);
    const auto graph = causal_graph(s.program, s.ground, prov);
    const std::set<CausalEdge> expected{
        {parse_atom("drive"), parse_atom("punish"), "l"},
        {parse_atom("drunk"), parse_atom("punish"), "l"},
        {parse_atom("resist"), parse_atom("punish"), "m"},
        {parse_atom("punish"), parse_atom("prison"), "e"},
    };
    CHECK(std::set<CausalEdge>(graph.edges.begin(), graph.edges.end()) == expected);
    CHECK(graph.nodes.size() == 5);
    const auto dot = render_dot(graph);
    CHECK(dot.rfind("digraph causal {", 0) == 0);
    CHECK(dot.find("\"resist\" -> \"punish\" [label=\"m\"];") != std::string::npos);
}

TEST_CASE("causal graph edge cases") {
    const auto one = solve_program(parse_program("a."));
    const auto prov = model_provenance(one.ground, one.result.models[0].atoms);
    const auto graph = causal_graph(one.program, one.ground, prov);
    CHECK(graph.nodes.size() == 1);
    CHECK(graph.edges.empty());

    const auto link = solve_program(parse_program(
        "has(symptom(fatigue)).\nlinked_symptom(fatigue, lethargy).\n"
        "has(symptom(S2)) :- has(symptom(S1)), linked_symptom(S1, S2)."));
    const auto p2 = model_provenance(link.ground, link.result.models[0].atoms);
    const auto g2 = causal_graph(link.program, link.ground, p2);
    const std::set<CausalEdge> expected{
        {parse_atom("has(symptom(fatigue))"), parse_atom("has(symptom(lethargy))"), "r2"},
        {parse_atom("linked_symptom(fatigue, lethargy)"), parse_atom("has(symptom(lethargy))"), "r2"},
    };
    CHECK(std::set<CausalEdge>(g2.edges.begin(), g2.edges.end()) == expected);
}
