#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpad {

/// Distinct failure categories raised by the library. Every error thrown by
/// tpad is a tpad::Error carrying one of these codes.
enum class Errc {
  syntax,
  combinational_cycle,
  undriven_wire,
  multiple_drivers,
  arity_mismatch,
  width_mismatch,
  index_out_of_range,
  invalid_argument,
  unsatisfiable,
  zero_state,
  unsupported_degree,
  no_incorrect_configs,
  non_pair_required,
  overflow,
  unknown_target,
  topology,
  io,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse errors additionally carry the 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& msg)
      : Error(Errc::syntax, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace tpad
