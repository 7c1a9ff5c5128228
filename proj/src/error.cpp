#include "tpad/error.hpp"

namespace tpad {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::syntax: return "syntax";
    case Errc::combinational_cycle: return "combinational_cycle";
    case Errc::undriven_wire: return "undriven_wire";
    case Errc::multiple_drivers: return "multiple_drivers";
    case Errc::arity_mismatch: return "arity_mismatch";
    case Errc::width_mismatch: return "width_mismatch";
    case Errc::index_out_of_range: return "index_out_of_range";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::unsatisfiable: return "unsatisfiable";
    case Errc::zero_state: return "zero_state";
    case Errc::unsupported_degree: return "unsupported_degree";
    case Errc::no_incorrect_configs: return "no_incorrect_configs";
    case Errc::non_pair_required: return "non_pair_required";
    case Errc::overflow: return "overflow";
    case Errc::unknown_target: return "unknown_target";
    case Errc::topology: return "topology";
    case Errc::io: return "io";
  }
  return "unknown";
}

}  // namespace tpad
