#include "wolbachia/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "wolbachia/errors.hpp"

namespace wolbachia {

struct Expression::Node {
  enum class Op { constant, variable, add, sub, mul, div, neg, sin, cos, exp, min, max };
  Op op;
  double value = 0.0;
};

namespace {

using Node = Expression::Node;
using Op = Node::Op;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<Node> run() {
    parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("expression", what + " at offset " + std::to_string(pos_) + " in \"" +
                                            std::string(text_) + "\"");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  void parse_sum() {
    parse_product();
    for (;;) {
      if (accept('+')) {
        parse_product();
        out_.push_back({Op::add});
      } else if (accept('-')) {
        parse_product();
        out_.push_back({Op::sub});
      } else {
        return;
      }
    }
  }

  void parse_product() {
    parse_unary();
    for (;;) {
      if (accept('*')) {
        parse_unary();
        out_.push_back({Op::mul});
      } else if (accept('/')) {
        parse_unary();
        out_.push_back({Op::div});
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (accept('-')) {
      parse_unary();
      out_.push_back({Op::neg});
    } else if (accept('+')) {
      parse_unary();
    } else {
      parse_primary();
    }
  }

  void parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      parse_sum();
      expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const char* first = text_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), value);
      if (ec != std::errc()) fail("malformed number");
      pos_ += static_cast<std::size_t>(ptr - first);
      out_.push_back({Op::constant, value});
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "x") {
        out_.push_back({Op::variable});
      } else if (name == "pi") {
        out_.push_back({Op::constant, std::numbers::pi});
      } else if (name == "sin" || name == "cos" || name == "exp") {
        expect('(');
        parse_sum();
        expect(')');
        out_.push_back({name == "sin" ? Op::sin : name == "cos" ? Op::cos : Op::exp});
      } else if (name == "min" || name == "max") {
        expect('(');
        parse_sum();
        expect(',');
        parse_sum();
        expect(')');
        out_.push_back({name == "min" ? Op::min : Op::max});
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
      }
      return;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Node> out_;
};

}  // namespace

Expression::Expression(std::string text, std::shared_ptr<const std::vector<Node>> program)
    : text_(std::move(text)), program_(std::move(program)) {}

Expression Expression::parse(std::string_view text) {
  auto program = std::make_shared<const std::vector<Node>>(Parser(text).run());
  return Expression(std::string(text), std::move(program));
}

double Expression::operator()(double x) const {
  std::vector<double> stack;
  stack.reserve(program_->size());
  for (const Node& node : *program_) {
    switch (node.op) {
      case Op::constant: stack.push_back(node.value); continue;
      case Op::variable: stack.push_back(x); continue;
      case Op::neg: stack.back() = -stack.back(); continue;
      case Op::sin: stack.back() = std::sin(stack.back()); continue;
      case Op::cos: stack.back() = std::cos(stack.back()); continue;
      case Op::exp: stack.back() = std::exp(stack.back()); continue;
      default: break;
    }
    const double rhs = stack.back();
    stack.pop_back();
    double& lhs = stack.back();
    switch (node.op) {
      case Op::add: lhs = lhs + rhs; break;
      case Op::sub: lhs = lhs - rhs; break;
      case Op::mul: lhs = lhs * rhs; break;
      case Op::div: lhs = lhs / rhs; break;
      case Op::min: lhs = std::min(lhs, rhs); break;
      case Op::max: lhs = std::max(lhs, rhs); break;
      default: break;
    }
  }
  return stack.back();
}

}  // namespace wolbachia
