#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tvflow {

enum class ErrorKind {
  invalid_argument,
  negative_weight,
  isolated_vertex,
  disconnected_graph,
  stochasticity_violation,
  detailed_balance_violation,
  not_connected,
  not_connected_after_restriction,
  empty_set,
  overlapping_sets,
  asymmetric_stencil,
  too_large,
  normalization_failure,
  not_balanced,
  nonzero_mean,
  method_unavailable,
  max_iters_exceeded,
  horizon_too_short,
  trial_not_compactly_supported,
  size_mismatch,
  parse_error,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tvflow
