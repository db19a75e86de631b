#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpd/harness.hpp"

namespace cpd::cli {

enum class Subcommand { simulate, converge, eps_scan, energy };

struct CliInvocation {
  Subcommand subcommand = Subcommand::simulate;
  std::string problem;
  std::vector<Method> methods;
  std::vector<double> eps;
  std::vector<double> h;
  double t_end = 1.0;
  std::optional<std::string> out;
  std::int64_t record_every = 1;
  int jobs = 1;
  double rtol = 1e-12;
  double atol = 1e-12;
  bool timing = false;
  /// Set when --help was requested; help_text holds the rendered usage.
  bool help = false;
  std::string help_text;
};

class UsageError : public std::exception {
 public:
  UsageError(std::string message, std::string usage)
      : message_(std::move(message)), usage_(std::move(usage)) {}
  const char* what() const noexcept override { return message_.c_str(); }
  const std::string& usage() const { return usage_; }

 private:
  std::string message_;
  std::string usage_;
};

/// Grid syntax: comma-separated items, each a decimal ("0.125"), a power
/// of two ("2^-3") or a dyadic range ("2^-4..2^-10", both ends inclusive).
std::vector<double> parse_grid(const std::string& text);

/// args excludes the program name. Throws UsageError on invalid input.
CliInvocation parse_args(const std::vector<std::string>& args);

/// Executes a parsed invocation, writing CSV to --out or `out`.
void execute(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Full front end: 0 on success, 1 on runtime failure, 2 on usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        bool color = false);

}  // namespace cpd::cli
