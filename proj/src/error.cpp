#include "squarecut/error.hpp"

namespace squarecut {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::invalid_template: return "invalid_template";
    case Errc::degenerate_template: return "degenerate_template";
    case Errc::no_intersection: return "no_intersection";
    case Errc::degenerate_ray: return "degenerate_ray";
    case Errc::format_error: return "format_error";
    case Errc::io_error: return "io_error";
    case Errc::invalid_geometry: return "invalid_geometry";
    case Errc::dimension_mismatch: return "dimension_mismatch";
    case Errc::empty_input: return "empty_input";
    case Errc::seed_out_of_image: return "seed_out_of_image";
    case Errc::empty_ray: return "empty_ray";
    case Errc::unbounded: return "unbounded";
    case Errc::solver_invariant: return "solver_invariant";
  }
  return "unknown";
}

}  // namespace squarecut
