#pragma once

#include <cstddef>
#include <random>
#include <string>

#include "dxasp/language.hpp"

namespace dxasp::testing {

/// Diagnosis-shaped program: symptom declarations, patient facts, links,
/// diagnosis rules, extra constraints, the choice rule and a minimize
/// statement. At most 10 symptoms, 8 non-fact rules and 12 choice atoms.
struct FragmentShape {
    std::size_t max_symptoms = 10;
    std::size_t max_rules = 8;
    std::size_t max_tests = 2;         // extra ground choices `{ test(tK) }.`
    bool require_diagnosis = true;     // include `:- not diagnosis(_).`
};
Program random_fragment_program(std::mt19937& rng, const FragmentShape& shape = {});

/// Flat Datalog-style program over at most `max_constants` constants, with
/// choice rules, constraints (including anonymous negation) and a minimize.
Program random_datalog_program(std::mt19937& rng, std::size_t max_constants = 50);

/// Syntactically valid program exercising every rule shape, labels, nested
/// compound terms and negation. Not necessarily inside the solvable fragment.
Program random_syntax_program(std::mt19937& rng);

}  // namespace dxasp::testing
