#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dxasp {

/// Base of every domain error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Position {
    std::size_t line = 1;
    std::size_t column = 1;
};

class LexError : public Error {
public:
    LexError(Position pos, char offending);
    Position position;
    char offending;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string expected, std::string found);
    std::size_t line;
    std::string expected;
    std::string found;
};

class SafetyError : public Error {
public:
    SafetyError(std::size_t rule_index, std::string variable, std::size_t line);
    std::size_t rule_index;
    std::string variable;
    std::size_t line;
};

class NormalizeError : public Error {
public:
    explicit NormalizeError(std::string raw);
    NormalizeError(std::string raw, std::size_t line);
    std::string raw;
};

class FragmentError : public Error {
public:
    using Error::Error;
};

class GroundingExplosion : public Error {
public:
    explicit GroundingExplosion(std::size_t limit);
    std::size_t limit;
};

class UnknownAtom : public Error {
public:
    using Error::Error;
};

class EmptyResult : public Error {
public:
    using Error::Error;
};

class MissingPlaceholder : public Error {
public:
    explicit MissingPlaceholder(std::string name);
    std::string name;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class CsvError : public Error {
public:
    CsvError(std::size_t line, const std::string& what);
    std::size_t line;
};

}  // namespace dxasp
