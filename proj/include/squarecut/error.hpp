#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace squarecut {

enum class Errc {
  invalid_argument,
  invalid_template,
  degenerate_template,
  no_intersection,
  degenerate_ray,
  format_error,
  io_error,
  invalid_geometry,
  dimension_mismatch,
  empty_input,
  seed_out_of_image,
  empty_ray,
  unbounded,
  solver_invariant,
};

/// Stable snake_case name of an error code, used in JSON error payloads.
std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace squarecut
