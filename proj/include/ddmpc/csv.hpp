#pragma once

#include <string>
#include <vector>

#include "ddmpc/types.hpp"

namespace ddmpc {

// Shared trajectory container: X has one column per state (T+1 of them),
// U one column per input (T of them).
struct Trajectory {
  Mat X;  // n x (T+1)
  Mat U;  // m x T
};

// Formats a double with 17 significant digits (lossless IEEE round trip).
std::string fmt17(double v);

// Trajectory CSV: header `t,x1..xn,u1..um`; one row per t = 0..T; the input
// cells are empty on the final row (there is no u_T).
std::string trajectory_to_csv(const Trajectory& traj);
Trajectory trajectory_from_csv_string(const std::string& text, const std::string& origin);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

// Per-step closed-loop log.
struct StepLogRow {
  long t = 0;
  double gamma = 0.0;
  double stage_cost = 0.0;
  double norm_u_su = 0.0;
  double norm_x_sx = 0.0;
  std::string solver_status;
  double solve_time = 0.0;
};

std::string step_log_to_csv(const std::vector<StepLogRow>& rows);
void write_step_log_csv(const std::string& path, const std::vector<StepLogRow>& rows);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace ddmpc
