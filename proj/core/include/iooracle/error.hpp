#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iooracle {

/// Every failure the library reports is an `Error` carrying one of these codes.
enum class Errc {
  invalid_config,
  capacity_exceeded,
  duplicate_residency,
  oversized_message,
  not_resident,
  operand_not_resident,
  wrong_mode,
  invalid_params,
  empty_sequence,
  trace_mismatch,
  dimension_mismatch,
  block_too_large,
  capacity_too_small,
  singular_diagonal,
  zero_pivot,
  not_spd,
  negative_weight,
  spec_invalid,
  insufficient_points,
  degenerate,
  parse_error,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace iooracle
