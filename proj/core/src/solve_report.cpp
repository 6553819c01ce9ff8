#include "admmgmres/solve_report.hpp"

#include <ostream>

#include "admmgmres/linalg/matrix_io.hpp"

namespace admmgmres {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::stalled: return "stalled";
    case SolveStatus::failed: return "failed";
  }
  return "unknown";
}

void write_report_csv(std::ostream& os, const SolveReport& report) {
  os << "iteration,saddle_residual,mmetric\n";
  for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
    os << k << ',' << linalg::format_double(report.residual_history[k]) << ',';
    if (k < report.mmetric_history.size())
      os << linalg::format_double(report.mmetric_history[k]);
    os << '\n';
  }
}

}  // namespace admmgmres
