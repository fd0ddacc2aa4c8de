#include "ddmpc/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ddmpc {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

double parse_cell(const std::string& cell, const std::string& origin, int lineno) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
    throw IoError(origin + ":" + std::to_string(lineno) + ": bad numeric cell '" + cell + "'");
  return v;
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trajectory_to_csv(const Trajectory& traj) {
  const int n = static_cast<int>(traj.X.rows());
  const int m = static_cast<int>(traj.U.rows());
  const long T = traj.U.cols();
  require_dims(traj.X.cols() == T + 1,
               "trajectory has " + std::to_string(traj.X.cols()) + " states for " +
                   std::to_string(T) + " inputs (want T+1)");
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (int j = 1; j <= m; ++j) out += ",u" + std::to_string(j);
  out += "\n";
  for (long t = 0; t <= T; ++t) {
    out += std::to_string(t);
    for (int i = 0; i < n; ++i) out += "," + fmt17(traj.X(i, t));
    for (int j = 0; j < m; ++j) out += (t < T) ? "," + fmt17(traj.U(j, t)) : ",";
    out += "\n";
  }
  return out;
}

Trajectory trajectory_from_csv_string(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError(origin + ": empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  int n = 0, m = 0;
  for (size_t i = 1; i < header.size(); ++i) {
    if (header[i].rfind("x", 0) == 0 && m == 0)
      ++n;
    else if (header[i].rfind("u", 0) == 0)
      ++m;
    else
      throw IoError(origin + ":1: unexpected column '" + header[i] + "'");
  }
  if (header.empty() || header[0] != "t" || n == 0)
    throw IoError(origin + ":1: expected header t,x1..xn,u1..um");

  std::vector<std::vector<double>> xs, us;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (static_cast<int>(cells.size()) != 1 + n + m)
      throw IoError(origin + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(1 + n + m) + " cells, got " + std::to_string(cells.size()));
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = parse_cell(cells[1 + i], origin, lineno);
    xs.push_back(std::move(x));
    bool all_empty = true, any_empty = false;
    for (int j = 0; j < m; ++j) {
      if (cells[1 + n + j].empty())
        any_empty = true;
      else
        all_empty = false;
    }
    if (all_empty && m > 0) {
      us.emplace_back();  // final row: no input
    } else {
      if (any_empty)
        throw IoError(origin + ":" + std::to_string(lineno) + ": partially empty input cells");
      std::vector<double> u(m);
      for (int j = 0; j < m; ++j) u[j] = parse_cell(cells[1 + n + j], origin, lineno);
      us.push_back(std::move(u));
    }
  }
  const long rows = static_cast<long>(xs.size());
  if (rows < 1) throw IoError(origin + ": no data rows");
  const long T = rows - 1;
  for (long t = 0; t < T; ++t)
    if (us[t].empty())
      throw IoError(origin + ": empty input cells before the final row (row t=" +
                    std::to_string(t) + ")");
  if (!us.empty() && !us[T].empty())
    throw IoError(origin + ": final row must have empty input cells");

  Trajectory traj;
  traj.X.resize(n, rows);
  traj.U.resize(m, T);
  for (long t = 0; t <= T; ++t)
    for (int i = 0; i < n; ++i) traj.X(i, t) = xs[t][i];
  for (long t = 0; t < T; ++t)
    for (int j = 0; j < m; ++j) traj.U(j, t) = us[t][j];
  return traj;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  write_text_file(path, trajectory_to_csv(traj));
}

Trajectory read_trajectory_csv(const std::string& path) {
  return trajectory_from_csv_string(read_text_file(path), path);
}

std::string step_log_to_csv(const std::vector<StepLogRow>& rows) {
  std::string out = "t,gamma,stage_cost,norm_u_Su,norm_x_Sx,solver_status,solve_time\n";
  for (const auto& r : rows) {
    out += std::to_string(r.t) + "," + fmt17(r.gamma) + "," + fmt17(r.stage_cost) + "," +
           fmt17(r.norm_u_su) + "," + fmt17(r.norm_x_sx) + "," + r.solver_status + "," +
           fmt17(r.solve_time) + "\n";
  }
  return out;
}

void write_step_log_csv(const std::string& path, const std::vector<StepLogRow>& rows) {
  write_text_file(path, step_log_to_csv(rows));
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ddmpc
