#ifndef BTQ_CLI_HPP
#define BTQ_CLI_HPP

#include <iostream>
#include <string>

#include "btq/jsonio.hpp"

namespace btq {

// exit codes: 0 ok, 2 config error, 3 budget exceeded / inconclusive,
// 4 theorem bound violated
enum ExitCode { kOk = 0, kConfigError = 2, kBudget = 3, kViolation = 4 };

struct RunConfig {
  int q = 2;
  int d = 2;
  std::string ideal = "1";
  int alpha = -1;           // default picked per command
  int max_level = 3;        // generator stream: maximal entry degree
  long long per_level_cap = 0;
  bool unimodular = false;
  int max_s = 2;
  long long max_order = 16;
  long long stab_cap = 64;  // stabilizer element lists emitted up to here
  int jobs = 1;             // worker cap (the pipeline currently uses one)
  unsigned seed = 1;
  std::string out_path;
  bool want_dot = false;
  std::string from_quotient;

  GroupSpec group() const;
};

// flat key = value file; flags override parsed values
void apply_config_file(const std::string& path, RunConfig& cfg);

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out,
                std::ostream& err);

// full argv entry point (CLI11 parsing)
int btq_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace btq

#endif
