#pragma once

#include "run_context.hpp"

#include <string>
#include <vector>

namespace homog::cli {

struct CellArgs {
  std::string obstacle = "ball:0.1";
  bool obstacle_given = false;
  std::vector<double> R{2.0, 3.0, 4.0, 6.0};
  std::vector<int> n{96};
  double mu = 1.0;
  double core_half = 0.16;
  int core_cells = 32;
};

struct CorrectorArgs {
  std::string obstacle = "ball:0.1";
  bool obstacle_given = false;
  double alpha = 2.0;
  bool alpha_given = false;
  std::vector<double> eps{0.5, 0.25, 0.125};
  std::vector<std::string> p{"2", "3", "inf"};
  int n = 64;
  int annulus_cells = 32;
  double band = 0.3;
  double band_inf = 0.2;
};

struct DarcyArgs {};

struct MicroArgs {
  std::string obstacle = "ball:0.1";
  bool obstacle_given = false;
  double alpha = 1.5;
  bool alpha_given = false;
  std::vector<double> eps{0.5, 0.25, 0.125};
  std::string resistance;
  std::vector<double> cell_R{2.0, 3.0, 4.0, 6.0};
  int cell_n = 64;
  int cells_per_period = 16;
  int core_cells = 8;
  double core_diameters = 1.6;
  double min_slope = 0.2;
  int poincare_n = 64;
};

struct PoincareArgs {
  std::string obstacle = "ball:0.1";
  bool obstacle_given = false;
  double alpha = 2.0;
  bool alpha_given = false;
  std::vector<double> eps{0.25, 0.125, 0.0625};
  int n = 64;
  double band = 0.2;
  /// Single-cell capacity check for a ball hole of this radius (0 disables).
  double radius = 0.05;
};

struct ReportArgs {
  std::vector<std::string> inputs;
};

int cmd_cell(const GlobalOptions& g, const CellArgs& a);
int cmd_corrector_rates(const GlobalOptions& g, const CorrectorArgs& a);
int cmd_darcy_run(const GlobalOptions& g, const DarcyArgs& a);
int cmd_micro_compare(const GlobalOptions& g, const MicroArgs& a);
int cmd_poincare(const GlobalOptions& g, const PoincareArgs& a);
int cmd_report(const GlobalOptions& g, const ReportArgs& a);

/// Full command line, including error mapping: 0 success, 1 configuration
/// error, 2 solver error, 3 failed property check. Errors are printed as
/// one JSON object on stderr.
int run(int argc, const char* const* argv);

}  // namespace homog::cli
