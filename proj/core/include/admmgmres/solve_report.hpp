#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace admmgmres {

enum class SolveStatus { converged, max_iters, stalled, failed };

std::string_view to_string(SolveStatus s);

/// Outcome of one iterative solve.
///
/// residual_history[k] is the gating residual after k iterations (entry 0 is
/// the initial point), so its length is iterations + 1. For the ECQP solvers
/// the gating residual is the relative residual of the unaugmented saddle
/// system. mmetric_history, when filled, holds ||u - T(u)|| at the same
/// indices.
struct SolveReport {
  std::size_t iterations = 0;
  std::vector<double> residual_history;
  std::vector<double> mmetric_history;
  SolveStatus status = SolveStatus::max_iters;
  std::string metric;
  /// Diagnostic text for failed solves.
  std::string message;

  bool converged() const noexcept { return status == SolveStatus::converged; }
  double final_residual() const {
    return residual_history.empty() ? 0.0 : residual_history.back();
  }
};

/// CSV with header "iteration,saddle_residual,mmetric"; missing M-metric
/// entries are left empty.
void write_report_csv(std::ostream& os, const SolveReport& report);

}  // namespace admmgmres
