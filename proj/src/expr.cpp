#include "sche/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sche {
namespace {

struct Node {
  virtual ~Node() = default;
  virtual double eval(double x) const = 0;
};
using NodePtr = std::unique_ptr<Node>;

struct Constant : Node {
  double value;
  explicit Constant(double v) : value(v) {}
  double eval(double) const override { return value; }
};

struct Variable : Node {
  double eval(double x) const override { return x; }
};

struct Unary : Node {
  double (*fn)(double);
  NodePtr arg;
  Unary(double (*f)(double), NodePtr a) : fn(f), arg(std::move(a)) {}
  double eval(double x) const override { return fn(arg->eval(x)); }
};

struct Binary : Node {
  char op;
  NodePtr lhs, rhs;
  Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
  double eval(double x) const override {
    const double a = lhs->eval(x);
    const double b = rhs->eval(x);
    switch (op) {
      case '+': return a + b;
      case '-': return a - b;
      case '*': return a * b;
      case '/': return a / b;
      default: return std::pow(a, b);
    }
  }
};

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  NodePtr sum() {
    NodePtr e = product();
    for (;;) {
      skip_space();
      if (accept('+')) {
        e = std::make_unique<Binary>('+', std::move(e), product());
      } else if (accept('-')) {
        e = std::make_unique<Binary>('-', std::move(e), product());
      } else {
        return e;
      }
    }
  }

  NodePtr product() {
    NodePtr e = unary();
    for (;;) {
      skip_space();
      if (accept('*')) {
        e = std::make_unique<Binary>('*', std::move(e), unary());
      } else if (accept('/')) {
        e = std::make_unique<Binary>('/', std::move(e), unary());
      } else {
        return e;
      }
    }
  }

  // Power binds tighter than unary minus (-x^2 is -(x^2)), and its exponent
  // may itself carry a sign (x^-2). Right associative.
  NodePtr unary() {
    skip_space();
    if (accept('-')) {
      return std::make_unique<Binary>('-', std::make_unique<Constant>(0.0), unary());
    }
    accept('+');
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    skip_space();
    if (accept('^')) {
      return std::make_unique<Binary>('^', std::move(base), unary());
    }
    return base;
  }

  NodePtr atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return identifier();
    }
    fail("unexpected character");
  }

  NodePtr number() {
    const char* start = text_.c_str() + pos_;
    char* end = nullptr;
    const double value = std::strtod(start, &end);
    if (end == start) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - start);
    return std::make_unique<Constant>(value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    if (name == "x") return std::make_unique<Variable>();
    if (name == "pi") return std::make_unique<Constant>(M_PI);
    skip_space();
    expect('(');
    NodePtr arg = sum();
    expect(')');
    using Fn = double (*)(double);
    if (name == "cos") return std::make_unique<Unary>(static_cast<Fn>(std::cos), std::move(arg));
    if (name == "sin") return std::make_unique<Unary>(static_cast<Fn>(std::sin), std::move(arg));
    if (name == "sqrt") {
      return std::make_unique<Unary>(static_cast<Fn>(std::sqrt), std::move(arg));
    }
    pos_ = start;
    fail("unknown function '" + name + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_space();
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression error at position " + std::to_string(pos_) + ": " +
                                what + " in \"" + text_ + "\"");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::function<double(double)> parse_expression(const std::string& text) {
  Parser parser(text);
  std::shared_ptr<Node> root{parser.parse().release()};
  return [root](double x) { return root->eval(x); };
}

}  // namespace sche
