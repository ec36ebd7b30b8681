#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace wolbachia {

/// A compiled closed-form function of one variable `x`.
///
/// Grammar: numbers, `x`, the constant `pi`, binary `+ - * /`, unary minus,
/// parentheses, `sin(.)`, `cos(.)`, `exp(.)`, `min(.,.)`, `max(.,.)`.
/// Parsing errors throw ValidationError with field "expression".
class Expression {
 public:
  static Expression parse(std::string_view text);

  double operator()(double x) const;
  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const std::vector<Node>> program);

  std::string text_;
  // Postfix program; immutable and shared between copies.
  std::shared_ptr<const std::vector<Node>> program_;
};

}  // namespace wolbachia
