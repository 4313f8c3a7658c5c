#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradbound {

/// Tiny arithmetic expression over the variables x, y, t with +, -, *, /,
/// parentheses, the constant pi, and the functions exp, sin, cos, abs.
/// Compiled once to a postfix program; evaluation is allocation-free.
class Expression {
  public:
    Expression() = default;

    static Expression parse(const std::string& text) {
        Parser p(text);
        Expression e;
        p.expr(e.prog_);
        p.skip_ws();
        if (!p.done()) p.fail("trailing input");
        e.text_ = text;
        for (const Op& op : e.prog_) {
            if (op.code == OpCode::PushX) e.uses_x_ = true;
            if (op.code == OpCode::PushY) e.uses_y_ = true;
            if (op.code == OpCode::PushT) e.uses_t_ = true;
        }
        return e;
    }

    double eval(double x, double y = 0.0, double t = 0.0) const {
        double stack[64];
        int top = -1;
        for (const Op& op : prog_) {
            switch (op.code) {
                case OpCode::PushConst: stack[++top] = op.value; break;
                case OpCode::PushX: stack[++top] = x; break;
                case OpCode::PushY: stack[++top] = y; break;
                case OpCode::PushT: stack[++top] = t; break;
                case OpCode::Add: --top; stack[top] += stack[top + 1]; break;
                case OpCode::Sub: --top; stack[top] -= stack[top + 1]; break;
                case OpCode::Mul: --top; stack[top] *= stack[top + 1]; break;
                case OpCode::Div: --top; stack[top] /= stack[top + 1]; break;
                case OpCode::Neg: stack[top] = -stack[top]; break;
                case OpCode::Exp: stack[top] = std::exp(stack[top]); break;
                case OpCode::Sin: stack[top] = std::sin(stack[top]); break;
                case OpCode::Cos: stack[top] = std::cos(stack[top]); break;
                case OpCode::Abs: stack[top] = std::abs(stack[top]); break;
                case OpCode::Sqrt: stack[top] = std::sqrt(stack[top]); break;
            }
        }
        return stack[0];
    }

    bool uses_x() const { return uses_x_; }
    bool uses_y() const { return uses_y_; }
    bool uses_t() const { return uses_t_; }
    bool empty() const { return prog_.empty(); }
    const std::string& text() const { return text_; }

  private:
    enum class OpCode { PushConst, PushX, PushY, PushT, Add, Sub, Mul, Div, Neg,
                        Exp, Sin, Cos, Abs, Sqrt };
    struct Op {
        OpCode code;
        double value = 0.0;
    };
    std::vector<Op> prog_;
    std::string text_;
    bool uses_x_ = false, uses_y_ = false, uses_t_ = false;

    struct Parser {
        const std::string& s;
        std::size_t i = 0;
        explicit Parser(const std::string& str) : s(str) {}

        [[noreturn]] void fail(const std::string& why) const {
            throw std::invalid_argument("expression error at position " + std::to_string(i) +
                                        " in \"" + s + "\": " + why);
        }
        void skip_ws() {
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        }
        bool done() const { return i >= s.size(); }
        bool consume(char c) {
            skip_ws();
            if (i < s.size() && s[i] == c) {
                ++i;
                return true;
            }
            return false;
        }

        void expr(std::vector<Op>& out) {
            term(out);
            while (true) {
                if (consume('+')) {
                    term(out);
                    out.push_back({OpCode::Add});
                } else if (consume('-')) {
                    term(out);
                    out.push_back({OpCode::Sub});
                } else {
                    break;
                }
            }
        }
        void term(std::vector<Op>& out) {
            factor(out);
            while (true) {
                if (consume('*')) {
                    factor(out);
                    out.push_back({OpCode::Mul});
                } else if (consume('/')) {
                    factor(out);
                    out.push_back({OpCode::Div});
                } else {
                    break;
                }
            }
        }
        void factor(std::vector<Op>& out) {
            skip_ws();
            if (consume('-')) {
                factor(out);
                out.push_back({OpCode::Neg});
                return;
            }
            if (consume('+')) {
                factor(out);
                return;
            }
            primary(out);
        }
        void primary(std::vector<Op>& out) {
            skip_ws();
            if (done()) fail("unexpected end of input");
            const char c = s[i];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t used = 0;
                double v;
                try {
                    v = std::stod(s.substr(i), &used);
                } catch (const std::exception&) {
                    fail("bad number");
                }
                i += used;
                out.push_back({OpCode::PushConst, v});
                return;
            }
            if (c == '(') {
                ++i;
                expr(out);
                if (!consume(')')) fail("expected ')'");
                return;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
                const std::string name = s.substr(i, j - i);
                i = j;
                if (name == "x") {
                    out.push_back({OpCode::PushX});
                    return;
                }
                if (name == "y") {
                    out.push_back({OpCode::PushY});
                    return;
                }
                if (name == "t") {
                    out.push_back({OpCode::PushT});
                    return;
                }
                if (name == "pi") {
                    out.push_back({OpCode::PushConst, std::acos(-1.0)});
                    return;
                }
                OpCode fn;
                if (name == "exp") fn = OpCode::Exp;
                else if (name == "sin") fn = OpCode::Sin;
                else if (name == "cos") fn = OpCode::Cos;
                else if (name == "abs") fn = OpCode::Abs;
                else if (name == "sqrt") fn = OpCode::Sqrt;
                else fail("unknown identifier '" + name + "'");
                if (!consume('(')) fail("expected '(' after function name");
                expr(out);
                if (!consume(')')) fail("expected ')'");
                out.push_back({fn});
                return;
            }
            fail(std::string("unexpected character '") + c + "'");
        }
    };
};

}  // namespace gradbound
