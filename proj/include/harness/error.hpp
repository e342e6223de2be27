#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace harness {

enum class ErrorKind {
  // weight validation
  NegativeWeight,
  MassNotOne,
  DegenerateSupport,
  SpanNotOne,
  // numerical budgets
  WindowTooLarge,
  WindowTooSmall,
  BudgetExceeded,
  QuadratureFailure,
  SeriesBudgetExceeded,
  TableTooSmall,
  TruncationTooCoarse,
  // analytic preconditions
  SpecMismatch,
  MeanNotZero,
  // scenarios and configuration
  UnknownKind,
  IncompleteParams,
  ConfigParse,
  Validation,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeWeight: return "NegativeWeight";
    case ErrorKind::MassNotOne: return "MassNotOne";
    case ErrorKind::DegenerateSupport: return "DegenerateSupport";
    case ErrorKind::SpanNotOne: return "SpanNotOne";
    case ErrorKind::WindowTooLarge: return "WindowTooLarge";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::SeriesBudgetExceeded: return "SeriesBudgetExceeded";
    case ErrorKind::TableTooSmall: return "TableTooSmall";
    case ErrorKind::TruncationTooCoarse: return "TruncationTooCoarse";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::MeanNotZero: return "MeanNotZero";
    case ErrorKind::UnknownKind: return "UnknownKind";
    case ErrorKind::IncompleteParams: return "IncompleteParams";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::Validation: return "Validation";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace harness
