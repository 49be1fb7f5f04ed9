#ifndef ECZ_ERRORS_HPP
#define ECZ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ecz {

enum class errc {
  usage,
  io,
  missing_column,
  malformed_number,
  duplicate_id,
  length_mismatch,
  domain_violation,
  nonpositive_consumption,
  nonpositive_sum,
  empty_zone,
  too_few_rows,
  singular_kernel,
  degenerate_x,
  degenerate_sample,
  degenerate_mixture,
  index_out_of_range,
  config_error,
  internal,
};

const char* errc_name(errc c);

// All recoverable failures are thrown as Error; the CLI maps errc::usage to
// exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace ecz

#endif
