#pragma once

#include <functional>
#include <string>

namespace sche {

/// Parses a closed-form expression of one variable `x` into an evaluable
/// function. Grammar: numbers, `x`, `pi`, + - * / ^ (right-assoc power),
/// unary minus, parentheses, and the calls cos(...), sin(...), sqrt(...).
/// Example: "1/3 + sqrt(3)*cos(x)/3". Throws std::invalid_argument with a
/// position marker on malformed input.
std::function<double(double)> parse_expression(const std::string& text);

}  // namespace sche
