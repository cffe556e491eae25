#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "chainlab/io.hpp"
#include "chainlab/random.hpp"

namespace chainlab {
namespace {

TEST(FormatReal, SeventeenSignificantDigits) {
  EXPECT_EQ(format_real(0.0), "0");
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(-18.0), "-18");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(TrajectoryCsv, HeaderAndRows) {
  ChainParams p;
  p.N = 2;
  p.n = 2;
  const Trajectory traj = integrate(p, gaussian_state(2, 1), 0.5, default_time_step(p), 1000);
  std::ostringstream brief;
  write_trajectory_csv(brief, traj, false);
  EXPECT_EQ(brief.str().substr(0, brief.str().find('\n')), "t,H,power");

  std::ostringstream full;
  write_trajectory_csv(full, traj, true);
  std::istringstream lines(full.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "t,H,power,q_1,q_2,p_1,p_2");
  std::string row, last;
  int rows = 0;
  while (std::getline(lines, row)) {
    ++rows;
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 6);
    last = row;
  }
  EXPECT_EQ(rows, static_cast<int>(traj.size()));
  // Last row starts with the exact final time.
  EXPECT_EQ(last.substr(0, last.find(',')), "0.5");
}

TEST(TrajectoryCsv, Deterministic) {
  ChainParams p;
  p.N = 5;
  p.n = 3;
  auto render = [&] {
    std::ostringstream os;
    write_trajectory_csv(os, integrate(p, gaussian_state(5, 7), 3.0, default_time_step(p)), true);
    return os.str();
  };
  EXPECT_EQ(render(), render());
}

TEST(DimensionCsv, Rows) {
  std::ostringstream os;
  write_dimension_csv(os, {dimension_table(3)});
  EXPECT_EQ(os.str(), "N,n,D\n3,1,0\n3,2,2\n3,3,0\n");
}

TEST(ScanCsv, Columns) {
  std::ostringstream os;
  write_scan_csv(os, mean_dimensions(3), {0.5, 1.0});
  std::istringstream lines(os.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "N,S,S_over_Neps_0.5,S_over_Neps_1");
  std::getline(lines, line);
  EXPECT_EQ(line, "1,0,0,0");
  std::getline(lines, line);
  std::getline(lines, line);
  EXPECT_EQ(line.substr(0, line.find(',', 2)), "3,0.66666666666666663");
}

TEST(AverageJson, Fields) {
  const AverageReport r = cumulative_average(100);
  const auto doc = nlohmann::json::parse(average_report_json(r));
  EXPECT_EQ(doc.at("N0").get<std::int64_t>(), 100);
  EXPECT_EQ(doc.at("cumulative").get<double>(), r.cumulative);
  EXPECT_EQ(doc.at("ratio_to_log").get<double>(), r.ratio_to_log);
}

}  // namespace
}  // namespace chainlab
