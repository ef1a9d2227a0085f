#include "dxasp/errors.hpp"

#include <cstdio>
#include <string>

namespace dxasp {

namespace {
std::string printable(char c) {
    if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned char>(c));
        return buf;
    }
    return std::string(1, c);
}
}  // namespace

LexError::LexError(Position pos, char c)
    : Error("line " + std::to_string(pos.line) + ":" + std::to_string(pos.column) +
            ": unexpected character '" + printable(c) + "'"),
      position(pos),
      offending(c) {}

ParseError::ParseError(std::size_t l, std::string exp, std::string fnd)
    : Error("line " + std::to_string(l) + ": expected " + exp + ", found " + fnd),
      line(l),
      expected(std::move(exp)),
      found(std::move(fnd)) {}

SafetyError::SafetyError(std::size_t idx, std::string var, std::size_t l)
    : Error("line " + std::to_string(l) + ": rule " + std::to_string(idx) + " is unsafe: variable " + var +
            " does not occur in a positive body literal"),
      rule_index(idx),
      variable(std::move(var)),
      line(l) {}

NormalizeError::NormalizeError(std::string r)
    : Error("cannot normalize '" + r + "' into a constant"), raw(std::move(r)) {}

NormalizeError::NormalizeError(std::string r, std::size_t l)
    : Error("line " + std::to_string(l) + ": cannot normalize '" + r + "' into a constant"), raw(std::move(r)) {}

GroundingExplosion::GroundingExplosion(std::size_t l)
    : Error("grounding exceeded " + std::to_string(l) + " ground rules"), limit(l) {}

MissingPlaceholder::MissingPlaceholder(std::string n)
    : Error("unresolvable placeholder {" + n + "}"), name(std::move(n)) {}

CsvError::CsvError(std::size_t l, const std::string& what)
    : Error("line " + std::to_string(l) + ": " + what), line(l) {}

}  // namespace dxasp
