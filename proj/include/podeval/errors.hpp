#pragma once

#include <stdexcept>
#include <string>

namespace podeval {

// Exit-code categories shared between the library and the CLI so failures
// can be mapped without string matching.
enum class errc : int {
  ok = 0,
  bad_input = 2,       // parse errors, domain violations, empty/mismatched inputs
  degenerate_fit = 3,  // data that cannot support a fit (all-same, separation)
  no_valid_model = 4,  // every candidate model failed
};

class pod_error : public std::runtime_error {
 public:
  pod_error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

struct bad_domain : pod_error {
  explicit bad_domain(const std::string& w) : pod_error(errc::bad_input, w) {}
};

struct non_positive_axis : pod_error {
  explicit non_positive_axis(const std::string& w) : pod_error(errc::bad_input, w) {}
};

struct degenerate_data : pod_error {
  explicit degenerate_data(const std::string& w) : pod_error(errc::degenerate_fit, w) {}
};

struct flat_model : pod_error {
  explicit flat_model(const std::string& w) : pod_error(errc::degenerate_fit, w) {}
};

struct no_valid_model : pod_error {
  explicit no_valid_model(const std::string& w) : pod_error(errc::no_valid_model, w) {}
};

struct all_experiments_degenerate : pod_error {
  explicit all_experiments_degenerate(const std::string& w)
      : pod_error(errc::degenerate_fit, w) {}
};

struct empty_input : pod_error {
  explicit empty_input(const std::string& w) : pod_error(errc::bad_input, w) {}
};

struct key_mismatch : pod_error {
  explicit key_mismatch(const std::string& w) : pod_error(errc::bad_input, w) {}
};

// Parse failures carry the 1-based line number of the offending row.
struct parse_error : pod_error {
  parse_error(const std::string& file, long line, const std::string& w)
      : pod_error(errc::bad_input, file + ":" + std::to_string(line) + ": " + w),
        line_number(line) {}
  long line_number;
};

}  // namespace podeval
