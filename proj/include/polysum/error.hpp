#pragma once

#include <stdexcept>
#include <string>

namespace polysum {

// Arithmetic failures (division by zero).
struct arithmetic_error : std::runtime_error {
    explicit arithmetic_error(const std::string &what) : std::runtime_error(what) {}
};

// A term/substitution mentions a variable outside the expected domain.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string &what) : std::runtime_error(what) {}
};

// Two values that must share a variable environment do not.
struct environment_error : std::runtime_error {
    explicit environment_error(const std::string &what) : std::runtime_error(what) {}
};

// Operation requires a reducible flow graph.
struct reducibility_error : std::runtime_error {
    explicit reducibility_error(const std::string &what) : std::runtime_error(what) {}
};

// Malformed input value (bad vertex map, bad generator set, ...).
struct input_error : std::runtime_error {
    explicit input_error(const std::string &what) : std::runtime_error(what) {}
};

// Syntax or semantic error in a text input, with position.
struct parse_error : std::runtime_error {
    int line;
    int column;
    std::string message; // bare message without the position prefix
    parse_error(int line_, int column_, const std::string &what)
        : std::runtime_error("line " + std::to_string(line_) + ", column " +
                             std::to_string(column_) + ": " + what),
          line(line_), column(column_), message(what) {}
};

} // namespace polysum
