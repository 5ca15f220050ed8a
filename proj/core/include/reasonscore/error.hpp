#pragma once

#include <stdexcept>
#include <string>

namespace reasonscore {

/// Error categories surfaced by the library. The CLI maps a subset of these
/// to process exit codes (see tools/).
enum class errc {
  empty_text,
  empty_chain,
  schema,
  config,
  dim_mismatch,
  empty_targets,
  zero_vector,
  missing_tokens,
  remote,
  fixture_miss,
  invalid_perplexity,
  not_applicable,
  rule_inapplicable,
  no_reference,
  perturbation_infeasible,
  degenerate_x,
  length_mismatch,
  join_failure,
  empty_group,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace reasonscore
