#include "dxasp/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace dxasp {

std::string_view token_kind_name(TokenKind k) {
    switch (k) {
        case TokenKind::Ident: return "identifier";
        case TokenKind::Variable: return "variable";
        case TokenKind::Number: return "number";
        case TokenKind::Directive: return "directive";
        case TokenKind::If: return "':-'";
        case TokenKind::Dot: return "'.'";
        case TokenKind::Comma: return "','";
        case TokenKind::Colon: return "':'";
        case TokenKind::Semicolon: return "';'";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::At: return "'@'";
    }
    return "?";
}

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    Position pos;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++pos.line;
                pos.column = 1;
            } else {
                ++pos.column;
            }
        }
    };
    auto emit = [&](TokenKind kind, std::size_t len) {
        out.push_back({kind, std::string(text.substr(i, len)), pos});
        advance(len);
    };

    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
        } else if (c == '%') {
            while (i < text.size() && text[i] != '\n') advance(1);
        } else if (c >= 'a' && c <= 'z') {
            std::size_t n = 1;
            while (i + n < text.size() && ident_char(text[i + n])) ++n;
            emit(TokenKind::Ident, n);
        } else if ((c >= 'A' && c <= 'Z') || c == '_') {
            std::size_t n = 1;
            while (i + n < text.size() && ident_char(text[i + n])) ++n;
            emit(TokenKind::Variable, n);
        } else if (c >= '0' && c <= '9') {
            std::size_t n = 1;
            while (i + n < text.size() && std::isdigit(static_cast<unsigned char>(text[i + n]))) ++n;
            emit(TokenKind::Number, n);
        } else if (c == '#') {
            std::size_t n = 1;
            while (i + n < text.size() && ident_char(text[i + n])) ++n;
            if (n == 1) throw LexError(pos, c);
            emit(TokenKind::Directive, n);
        } else if (c == ':') {
            if (i + 1 < text.size() && text[i + 1] == '-')
                emit(TokenKind::If, 2);
            else
                emit(TokenKind::Colon, 1);
        } else {
            TokenKind kind;
            switch (c) {
                case '.': kind = TokenKind::Dot; break;
                case ',': kind = TokenKind::Comma; break;
                case ';': kind = TokenKind::Semicolon; break;
                case '(': kind = TokenKind::LParen; break;
                case ')': kind = TokenKind::RParen; break;
                case '{': kind = TokenKind::LBrace; break;
                case '}': kind = TokenKind::RBrace; break;
                case '@': kind = TokenKind::At; break;
                default: throw LexError(pos, c);
            }
            emit(kind, 1);
        }
    }
    return out;
}

namespace {

class Parser {
public:
    Parser(std::vector<Token> tokens, std::size_t last_line)
        : tokens_(std::move(tokens)), last_line_(last_line) {}

    bool at_end() const { return i_ >= tokens_.size(); }

    std::size_t line() const {
        if (!at_end()) return tokens_[i_].pos.line;
        return tokens_.empty() ? last_line_ : tokens_.back().pos.line;
    }

    Rule rule() {
        Rule r;
        if (accept(TokenKind::At)) r.label = expect(TokenKind::Ident, "rule label").text;

        if (peek(TokenKind::LBrace)) {
            r.shape = choice();
        } else if (peek(TokenKind::Directive)) {
            r.shape = minimize();
        } else if (accept(TokenKind::If)) {
            r.shape = Constraint{body()};
            expect(TokenKind::Dot, "'.' or ','");
        } else {
            Atom head = atom();
            if (accept(TokenKind::Dot)) {
                r.shape = Fact{std::move(head)};
            } else {
                expect(TokenKind::If, "'.' or ':-'");
                r.shape = NormalRule{std::move(head), body()};
                expect(TokenKind::Dot, "'.' or ','");
            }
        }
        return r;
    }

    Atom atom() {
        const Token& name = expect(TokenKind::Ident, "predicate name");
        if (name.text == "not") fail("predicate name");
        Atom a{name.text, {}};
        if (accept(TokenKind::LParen)) {
            a.args = terms();
            expect(TokenKind::RParen, "')' or ','");
        }
        return a;
    }

private:
    ChoiceRule choice() {
        expect(TokenKind::LBrace, "'{'");
        ChoiceRule c{atom(), std::nullopt};
        if (accept(TokenKind::Colon)) c.guard = atom();
        expect(TokenKind::RBrace, "'}' or ':'");
        expect(TokenKind::Dot, "'.'");
        return c;
    }

    Minimize minimize() {
        const Token& d = expect(TokenKind::Directive, "directive");
        if (d.text != "#minimize") {
            --i_;
            fail("#minimize");
        }
        expect(TokenKind::LBrace, "'{'");
        const Token& w = expect(TokenKind::Number, "integer weight");
        Minimize m;
        try {
            m.weight = std::stol(w.text);
        } catch (const std::out_of_range&) {
            --i_;
            fail("integer weight within range");
        }
        while (accept(TokenKind::Comma)) m.terms.push_back(term());
        expect(TokenKind::Colon, "':' or ','");
        m.condition = atom();
        expect(TokenKind::RBrace, "'}'");
        expect(TokenKind::Dot, "'.'");
        return m;
    }

    std::vector<Literal> body() {
        std::vector<Literal> out;
        do {
            Literal lit;
            if (peek(TokenKind::Ident) && tokens_[i_].text == "not") {
                ++i_;
                lit.negated = true;
            }
            lit.atom = atom();
            out.push_back(std::move(lit));
        } while (accept(TokenKind::Comma));
        return out;
    }

    std::vector<Term> terms() {
        std::vector<Term> out;
        do out.push_back(term());
        while (accept(TokenKind::Comma));
        return out;
    }

    Term term() {
        if (peek(TokenKind::Variable)) return Term::variable(tokens_[i_++].text);
        const Token& name = expect(TokenKind::Ident, "term");
        if (name.text == "not") {
            --i_;
            fail("term");
        }
        if (accept(TokenKind::LParen)) {
            auto args = terms();
            expect(TokenKind::RParen, "')' or ','");
            return Term::compound(name.text, std::move(args));
        }
        return Term::constant(name.text);
    }

    bool peek(TokenKind k) const { return !at_end() && tokens_[i_].kind == k; }

    bool accept(TokenKind k) {
        if (!peek(k)) return false;
        ++i_;
        return true;
    }

    const Token& expect(TokenKind k, std::string_view what) {
        if (!peek(k)) fail(what);
        return tokens_[i_++];
    }

    [[noreturn]] void fail(std::string_view what) const {
        std::string found = at_end() ? "end of input" : "'" + tokens_[i_].text + "'";
        throw ParseError(line(), std::string(what), found);
    }

    std::vector<Token> tokens_;
    std::size_t i_ = 0;
    std::size_t last_line_;
};

std::size_t count_lines(std::string_view text) {
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

void check_safety(const Rule& rule, std::size_t rule_index, std::size_t line) {
    auto require = [&](const std::vector<std::string>& needed, const std::set<std::string>& bound,
                       bool allow_anonymous) {
        for (const auto& v : needed) {
            if (allow_anonymous && v == "_") continue;
            if (!bound.count(v) || v == "_") throw SafetyError(rule_index, v, line);
        }
    };
    auto positive_vars = [](const std::vector<Literal>& body) {
        std::set<std::string> bound;
        std::vector<std::string> vs;
        for (const auto& l : body)
            if (!l.negated) collect_variables(l.atom, vs);
        bound.insert(vs.begin(), vs.end());
        return bound;
    };

    std::vector<std::string> vs;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Fact>) {
                collect_variables(s.head, vs);
                require(vs, {}, false);
            } else if constexpr (std::is_same_v<T, NormalRule>) {
                const auto bound = positive_vars(s.body);
                collect_variables(s.head, vs);
                for (const auto& l : s.body)
                    if (l.negated) collect_variables(l.atom, vs);
                require(vs, bound, false);
            } else if constexpr (std::is_same_v<T, Constraint>) {
                const auto bound = positive_vars(s.body);
                for (const auto& l : s.body)
                    if (l.negated) collect_variables(l.atom, vs);
                require(vs, bound, true);
            } else if constexpr (std::is_same_v<T, ChoiceRule>) {
                std::vector<std::string> g;
                if (s.guard) collect_variables(*s.guard, g);
                collect_variables(s.element, vs);
                require(vs, {g.begin(), g.end()}, false);
            } else {
                std::vector<std::string> c;
                collect_variables(s.condition, c);
                for (const auto& t : s.terms) collect_variables(t, vs);
                require(vs, {c.begin(), c.end()}, false);
            }
        },
        rule.shape);
}

Program parse_program(std::string_view text, const std::string& file) {
    Parser parser(tokenize(text), count_lines(text));
    Program program;
    std::set<std::string> labels;
    bool seen_minimize = false;
    while (!parser.at_end()) {
        const std::size_t line = parser.line();
        Rule r = parser.rule();
        if (r.label && !labels.insert(*r.label).second)
            throw ParseError(line, "unique rule label", "duplicate '@" + *r.label + "'");
        if (r.is<Minimize>()) {
            if (seen_minimize) throw ParseError(line, "at most one #minimize statement", "'#minimize'");
            seen_minimize = true;
        }
        check_safety(r, program.rules.size(), line);
        program.add(std::move(r), {file, line});
    }
    return program;
}

Atom parse_atom(std::string_view text) {
    auto tokens = tokenize(text);
    Parser parser(std::move(tokens), 1);
    Atom a = parser.atom();
    if (!parser.at_end()) throw ParseError(parser.line(), "end of atom", "trailing tokens");
    return a;
}

Program load_program(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_program(ss.str(), path);
}

std::string render(const Term& t) {
    if (t.kind != Term::Kind::Compound) return t.name;
    std::string out = t.name + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ", ";
        out += render(t.args[i]);
    }
    return out + ")";
}

std::string render(const Atom& a) {
    if (a.args.empty()) return a.predicate;
    std::string out = a.predicate + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ", ";
        out += render(a.args[i]);
    }
    return out + ")";
}

std::string render(const Literal& l) { return (l.negated ? "not " : "") + render(l.atom); }

namespace {
std::string render_body(const std::vector<Literal>& body) {
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i) out += ", ";
        out += render(body[i]);
    }
    return out;
}
}  // namespace

std::string render(const Rule& r) {
    std::string out = r.label ? "@" + *r.label + " " : std::string{};
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Fact>) {
                out += render(s.head) + ".";
            } else if constexpr (std::is_same_v<T, NormalRule>) {
                out += render(s.head) + " :- " + render_body(s.body) + ".";
            } else if constexpr (std::is_same_v<T, Constraint>) {
                out += ":- " + render_body(s.body) + ".";
            } else if constexpr (std::is_same_v<T, ChoiceRule>) {
                out += "{ " + render(s.element);
                if (s.guard) out += " : " + render(*s.guard);
                out += " }.";
            } else {
                out += "#minimize { " + std::to_string(s.weight);
                for (const auto& t : s.terms) out += ", " + render(t);
                out += " : " + render(s.condition) + " }.";
            }
        },
        r.shape);
    return out;
}

std::string render_program(const Program& p) {
    std::string out;
    for (const auto& r : p.rules) out += render(r) + "\n";
    return out;
}

std::string normalize_symbol(std::string_view raw) {
    std::string out;
    bool pending_space = false;
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    for (std::size_t i = b; i < e; ++i) {
        const auto c = static_cast<unsigned char>(raw[i]);
        if (std::isspace(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) {
            out += '_';
            pending_space = false;
        }
        const char l = static_cast<char>(std::tolower(c));
        if ((l >= 'a' && l <= 'z') || (l >= '0' && l <= '9') || l == '_') out += l;
    }
    if (!is_constant_name(out)) throw NormalizeError(std::string(raw));
    return out;
}

}  // namespace dxasp
