#ifndef EHBAND_ERRORS_HPP
#define EHBAND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ehband {

// Base of all library errors. `code()` is a stable machine-readable tag.
class error : public std::runtime_error {
 public:
  error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class invalid_scenario_error : public error {
 public:
  explicit invalid_scenario_error(const std::string& what)
      : error("invalid-scenario", what) {}
};

// a = 0 paired with p > 0; the rate term has no continuous extension there.
class degenerate_allocation_error : public error {
 public:
  explicit degenerate_allocation_error(const std::string& what)
      : error("degenerate-allocation", what) {}
};

class out_of_domain_error : public error {
 public:
  explicit out_of_domain_error(const std::string& what)
      : error("out-of-domain", what) {}
};

class bracket_failure_error : public error {
 public:
  explicit bracket_failure_error(const std::string& what)
      : error("bracket-failure", what) {}
};

// A water-filling segment was asked for more energy than its slots can absorb.
class segment_infeasible_error : public error {
 public:
  explicit segment_infeasible_error(const std::string& what)
      : error("segment-infeasible", what) {}
};

class zero_rate_error : public error {
 public:
  explicit zero_rate_error(const std::string& what)
      : error("zero-rate", what) {}
};

class weights_not_equal_error : public error {
 public:
  explicit weights_not_equal_error(const std::string& what)
      : error("weights-not-equal", what) {}
};

class instance_too_large_error : public error {
 public:
  explicit instance_too_large_error(const std::string& what)
      : error("instance-too-large", what) {}
};

class io_error : public error {
 public:
  explicit io_error(const std::string& what) : error("io", what) {}
};

}  // namespace ehband

#endif
