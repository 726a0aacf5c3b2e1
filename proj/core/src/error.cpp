#include "iooracle/error.hpp"

namespace iooracle {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_config: return "invalid_config";
    case Errc::capacity_exceeded: return "capacity_exceeded";
    case Errc::duplicate_residency: return "duplicate_residency";
    case Errc::oversized_message: return "oversized_message";
    case Errc::not_resident: return "not_resident";
    case Errc::operand_not_resident: return "operand_not_resident";
    case Errc::wrong_mode: return "wrong_mode";
    case Errc::invalid_params: return "invalid_params";
    case Errc::empty_sequence: return "empty_sequence";
    case Errc::trace_mismatch: return "trace_mismatch";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::block_too_large: return "block_too_large";
    case Errc::capacity_too_small: return "capacity_too_small";
    case Errc::singular_diagonal: return "singular_diagonal";
    case Errc::zero_pivot: return "zero_pivot";
    case Errc::not_spd: return "not_spd";
    case Errc::negative_weight: return "negative_weight";
    case Errc::spec_invalid: return "spec_invalid";
    case Errc::insufficient_points: return "insufficient_points";
    case Errc::degenerate: return "degenerate";
    case Errc::parse_error: return "parse_error";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace iooracle
