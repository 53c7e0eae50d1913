#include "vexdelay/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "vexdelay/errors.hpp"

namespace vexdelay
{

namespace
{

using Eval = std::function<double(const Bindings&)>;

unsigned variable_bit(char v)
{
    switch (v) {
    case 'x': return 1u;
    case 'y': return 2u;
    case 's': return 4u;
    case 't': return 8u;
    }
    return 0u;
}

class Parser
{
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Eval parse_all()
    {
        Eval e = expression();
        skip_space();
        if (pos_ < text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

    unsigned variables() const { return variables_; }

private:
    [[noreturn]] void fail(const std::string& message) const
    {
        throw ConfigError(ConfigError::Kind::expression,
                          "expression '" + text_ + "': " + message + " at column " +
                              std::to_string(pos_ + 1),
                          0, int(pos_ + 1));
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Eval expression()
    {
        Eval lhs = term();
        for (;;) {
            if (accept('+')) {
                Eval rhs = term();
                lhs = [lhs, rhs](const Bindings& b) { return lhs(b) + rhs(b); };
            } else if (accept('-')) {
                Eval rhs = term();
                lhs = [lhs, rhs](const Bindings& b) { return lhs(b) - rhs(b); };
            } else {
                return lhs;
            }
        }
    }

    Eval term()
    {
        Eval lhs = unary();
        for (;;) {
            if (accept('*')) {
                Eval rhs = unary();
                lhs = [lhs, rhs](const Bindings& b) { return lhs(b) * rhs(b); };
            } else if (accept('/')) {
                Eval rhs = unary();
                lhs = [lhs, rhs](const Bindings& b) { return lhs(b) / rhs(b); };
            } else {
                return lhs;
            }
        }
    }

    Eval unary()
    {
        if (accept('-')) {
            Eval inner = unary();
            return [inner](const Bindings& b) { return -inner(b); };
        }
        if (accept('+'))
            return unary();
        return power();
    }

    Eval power()
    {
        Eval base = primary();
        if (accept('^')) {
            Eval exponent = unary();
            return [base, exponent](const Bindings& b) { return std::pow(base(b), exponent(b)); };
        }
        return base;
    }

    Eval primary()
    {
        skip_space();
        if (pos_ >= text_.size())
            fail("unexpected end of input");
        const char c = text_[pos_];
        if (accept('(')) {
            Eval inner = expression();
            if (!accept(')'))
                fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        // UTF-8 Greek small tau.
        if (text_.compare(pos_, 2, "\xCF\x84") == 0) {
            pos_ += 2;
            return variable('t');
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Eval number()
    {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double value = std::strtod(begin, &end);
        if (end == begin)
            fail("malformed number");
        pos_ += std::size_t(end - begin);
        return [value](const Bindings&) { return value; };
    }

    Eval variable(char v)
    {
        variables_ |= variable_bit(v);
        switch (v) {
        case 'x': return [](const Bindings& b) { return b.x; };
        case 'y': return [](const Bindings& b) { return b.y; };
        case 's': return [](const Bindings& b) { return b.s; };
        default: return [](const Bindings& b) { return b.tau; };
        }
    }

    std::vector<Eval> arguments(const std::string& name)
    {
        if (!accept('('))
            fail("expected '(' after " + name);
        std::vector<Eval> args{expression()};
        while (accept(','))
            args.push_back(expression());
        if (!accept(')'))
            fail("expected ')' to close " + name);
        return args;
    }

    Eval identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);

        if (name == "x" || name == "y" || name == "s")
            return variable(name[0]);
        if (name == "tau")
            return variable('t');
        if (name == "pi")
            return [](const Bindings&) { return std::numbers::pi; };
        if (name == "e")
            return [](const Bindings&) { return std::numbers::e; };

        using Unary = double (*)(double);
        Unary f = nullptr;
        if (name == "sin") f = [](double a) { return std::sin(a); };
        else if (name == "cos") f = [](double a) { return std::cos(a); };
        else if (name == "exp") f = [](double a) { return std::exp(a); };
        else if (name == "abs") f = [](double a) { return std::abs(a); };
        else if (name == "sqrt") f = [](double a) { return std::sqrt(a); };
        else if (name == "log") f = [](double a) { return std::log(a); };
        else if (name == "step") f = [](double a) { return a >= 0.0 ? 1.0 : 0.0; };

        if (f) {
            const std::vector<Eval> args = arguments(name);
            if (args.size() != 1)
                fail(name + " takes one argument");
            Eval a = args[0];
            return [f, a](const Bindings& b) { return f(a(b)); };
        }
        if (name == "min" || name == "max") {
            const std::vector<Eval> args = arguments(name);
            if (args.size() != 2)
                fail(name + " takes two arguments");
            Eval a = args[0], c = args[1];
            if (name == "min")
                return [a, c](const Bindings& b) { return std::fmin(a(b), c(b)); };
            return [a, c](const Bindings& b) { return std::fmax(a(b), c(b)); };
        }
        pos_ = start;
        fail("unknown name '" + name + "'");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    unsigned variables_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text)
{
    Parser parser(text);
    Expression e;
    e.eval_ = parser.parse_all();
    e.variables_ = parser.variables();
    e.text_ = text;
    return e;
}

bool Expression::uses(char variable) const { return (variables_ & variable_bit(variable)) != 0; }

}  // namespace vexdelay
