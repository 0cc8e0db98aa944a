#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pairorth {

/// Caller passed arguments that violate an operation's preconditions.
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A matrix could not be built as a valid unit-column matrix.
class ConstructionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A bound evaluator was called outside its stated domain.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// The two selected columns are numerically parallel.
class DegeneratePairError : public std::runtime_error {
  public:
    DegeneratePairError(std::size_t i, std::size_t j, double inner_abs);

    std::size_t i() const noexcept { return i_; }
    std::size_t j() const noexcept { return j_; }
    double inner_abs() const noexcept { return inner_abs_; }

  private:
    std::size_t i_;
    std::size_t j_;
    double inner_abs_;
};

/// A leave-one-out distance could not be computed; `column()` names the culprit.
class SingularityError : public std::runtime_error {
  public:
    SingularityError(std::size_t column, const std::string& what);

    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t column_;
};

}  // namespace pairorth
