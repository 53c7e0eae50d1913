#pragma once

#include <functional>
#include <memory>
#include <string>

namespace vexdelay
{

/// Values bound to the expression variables x, y, s and tau.
struct Bindings
{
    double x = 0;
    double y = 0;
    double s = 0;
    double tau = 0;
};

/// Compiled arithmetic expression.
///
/// Grammar: + - * / ^ (right associative, binds tighter than unary minus),
/// calls sin cos exp abs sqrt log step min max, constants pi e,
/// variables x y s tau (tau may be spelled with the Greek letter).
class Expression
{
public:
    Expression() = default;

    /// Throws ConfigError (kind expression) with the column of the offending token.
    static Expression parse(const std::string& text);

    double operator()(const Bindings& b) const { return eval_(b); }
    const std::string& text() const { return text_; }
    bool uses(char variable) const;

private:
    std::string text_;
    std::function<double(const Bindings&)> eval_ = [](const Bindings&) { return 0.0; };
    unsigned variables_ = 0;
};

}  // namespace vexdelay
