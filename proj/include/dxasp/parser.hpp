#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dxasp/errors.hpp"
#include "dxasp/language.hpp"

namespace dxasp {

enum class TokenKind {
    Ident,      // lowercase identifier, also `not`
    Variable,   // uppercase identifier or `_`
    Number,
    Directive,  // #minimize
    If,         // :-
    Dot,
    Comma,
    Colon,
    Semicolon,
    LParen,
    RParen,
    LBrace,
    RBrace,
    At,
};

struct Token {
    TokenKind kind;
    std::string text;
    Position pos;

    friend bool operator==(const Token&, const Token&) = default;
};

std::string_view token_kind_name(TokenKind k);

/// Splits `text` into tokens; `%` comments run to end of line.
std::vector<Token> tokenize(std::string_view text);

/// Parses a whole program. `file` is only recorded in the source map.
Program parse_program(std::string_view text, const std::string& file = "<input>");

/// Parses a single atom such as `diagnosis(chickenpox)` (no trailing dot).
Atom parse_atom(std::string_view text);

/// Reads and parses a `.lp` file.
Program load_program(const std::string& path);

/// Safety check for one rule; throws SafetyError naming the first unsafe variable.
void check_safety(const Rule& rule, std::size_t rule_index, std::size_t line = 0);

std::string render(const Term& t);
std::string render(const Atom& a);
std::string render(const Literal& l);
std::string render(const Rule& r);
std::string render_program(const Program& p);

/// Maps free text such as " Mild Fever " onto a constant (`mild_fever`).
std::string normalize_symbol(std::string_view raw);

}  // namespace dxasp
