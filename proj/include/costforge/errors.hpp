#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace costforge {

enum class ErrorKind {
    UnknownAction,
    UnknownFluent,
    NotApplicable,
    InapplicableAt,
    MissingCost,
    ParseError,
    ValidationError,
    MissingPrior,
    IoError,
    NonPositiveCost,
    DeadlineExceeded,
    Unsolvable,
    NoSolution,
};

std::string_view to_string(ErrorKind kind);

// Reasons attached to ValidationError.
enum class ValidationReason { NotSolving, NotSimple, UnknownAction, UnknownFluent };

std::string_view to_string(ValidationReason reason);

// Single exception type for the library. `index` carries the step index
// (InapplicableAt), line number (ParseError) or instance index
// (ValidationError) when one applies.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &message,
          std::optional<std::size_t> index = std::nullopt,
          std::optional<ValidationReason> reason = std::nullopt);

    ErrorKind kind() const { return kind_; }
    std::optional<std::size_t> index() const { return index_; }
    std::optional<ValidationReason> reason() const { return reason_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> index_;
    std::optional<ValidationReason> reason_;
};

[[noreturn]] void throw_error(ErrorKind kind, const std::string &message,
                              std::optional<std::size_t> index = std::nullopt);

}  // namespace costforge
