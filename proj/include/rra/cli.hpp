#pragma once

#include <rra/core.hpp>

#include <optional>
#include <string>
#include <vector>

namespace rra::cli {

/// Merged view of command-line flags and the optional JSON config file.
/// Flags win over file values; zeros in grid_n / grid_step_deg mean "use the
/// command's documented default".
struct RunConfig {
  Direction direction{Direction::DL};
  std::string model;  // "general", "rayleigh" or "los"; required for boundary/check
  int M{100};
  double snr_db{0};
  double d_h{0.5};
  double theta1_deg{0}, theta2_deg{0};
  double beta1{1}, beta2{1};
  std::optional<double> gamma1, gamma2;  // default: equal to the betas
  double alpha1{0}, alpha2{0};
  double mu11{0}, mu12{0}, mu21{0}, mu22{0};
  long long grid_n{0};
  double grid_step_deg{0};
  bool oracle{false};
  std::string out;  // empty: stdout
  std::string format{"csv"};
  int precision{9};  // significant digits in CSV output
  std::vector<int> M_list;
  std::optional<std::vector<double>> separations_deg;
  bool snr_db_given{false};
};

/// Parse arguments, dispatch the subcommand, write the result.
/// Exit codes: 0 success (or convex for `check`), 1 non-convex (`check`
/// only), 2 invalid configuration, 3 I/O failure.
int run(int argc, const char* const* argv);

}  // namespace rra::cli
