// End-to-end tests of the command-line surface: exit codes, file artifacts,
// exact CSV headers, byte-identical reports, and the sweep/verify contract.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const std::string kTmp = ::testing::TempDir() + "spiralmin_cli";

RunResult run(const std::string& args, const std::string& env = "") {
  static bool made = [] {
    return std::system(("mkdir -p '" + kTmp + "'").c_str()) == 0;
  }();
  (void)made;
  const std::string out = kTmp + "/stdout.txt";
  const std::string err = kTmp + "/stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + SPIRALMIN_CLI_PATH +
                          " " + args + " > '" + out + "' 2> '" + err + "'";
  const int rc = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WEXITSTATUS(rc);
  res.out = read_file(out);
  res.err = read_file(err);
  return res;
}

double parse_field(const std::string& json, const std::string& key) {
  const auto pos = json.find("\"" + key + "\":");
  if (pos == std::string::npos) return std::nan("");
  return std::stod(json.substr(pos + key.size() + 3));
}

}  // namespace

TEST(Cli, CatalogListsEntries) {
  const RunResult r = run("catalog");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("\"legendrian_circle\""), std::string::npos);
  EXPECT_NE(r.out.find("\"legendrian_torus\""), std::string::npos);
  EXPECT_NE(r.out.find("\"real_equator(2)\""), std::string::npos);
  EXPECT_NE(r.out.find("\"claimed_eigenvalue\":2"), std::string::npos);
}

TEST(Cli, SteadySymmetricCase) {
  const RunResult r = run("steady --k1 1 --k2 1 --C1 -1");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NEAR(parse_field(r.out, "s"), M_PI / 4, 1e-10);
  EXPECT_NEAR(parse_field(r.out, "C2"), 16.0, 1e-9);
  EXPECT_NEAR(parse_field(r.out, "s1p_sq"), 1.0, 1e-9);
  EXPECT_NE(r.out.find("\"pass\":true"), std::string::npos);
}

TEST(Cli, SteadyUnrealizableAngleFails) {
  const RunResult r = run("steady --k1 1 --k2 1 --s 1.0471975511965976");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, ProfileRejectsEmptyDomain) {
  const RunResult r = run("profile --k1 1 --k2 1 --C1 1 --C2 8");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("not positive"), std::string::npos);
}

TEST(Cli, ProfileWritesSamplesAndMeta) {
  const RunResult r = run("profile --k1 1 --k2 1 --C1 1 --C2 32 --joints 3 --out prof",
                          "SPIRALMIN_OUT_DIR='" + kTmp + "'");
  EXPECT_EQ(r.exit_code, 0);
  const std::string csv = read_file(kTmp + "/prof.csv");
  ASSERT_FALSE(csv.empty());
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t_arc,s,s1,s2,a,b,branch_sign");
  const std::string meta = read_file(kTmp + "/prof.json");
  EXPECT_NE(meta.find("\"joints\":["), std::string::npos);
  EXPECT_NE(meta.find("\"denominator_root\""), std::string::npos);
  EXPECT_NE(meta.find("\"C2_min\":16"), std::string::npos);
}

TEST(Cli, VerifyPassesAndEchoesResolvedC2) {
  const RunResult r = run(
      "verify --left legendrian_circle --right legendrian_circle --C1 -1 "
      "--C2 auto1.5 --grid 4");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("\"C2_spec\":\"auto1.5\""), std::string::npos);
  EXPECT_NEAR(parse_field(r.out, "C2"), 24.0, 1e-9);
  EXPECT_NEAR(parse_field(r.out, "eigen_estimate"), 3.0, 1e-3);
  EXPECT_NE(r.out.find("\"pass\":true"), std::string::npos);
}

TEST(Cli, VerifyByteIdenticalReports) {
  const std::string args =
      "verify --left legendrian_circle --right legendrian_circle --C1 -1 "
      "--C2 auto1.5 --grid 4 --out rep.json";
  const std::string env = "SPIRALMIN_OUT_DIR='" + kTmp + "'";
  ASSERT_EQ(run(args, env).exit_code, 0);
  const std::string first = read_file(kTmp + "/rep.json");
  ASSERT_EQ(run(args, env).exit_code, 0);
  const std::string second = read_file(kTmp + "/rep.json");
  ASSERT_FALSE(first.empty());
  EXPECT_EQ(first, second);
  EXPECT_EQ(first.find("runtime"), std::string::npos);  // no timings in body
}

TEST(Cli, VerifyC1PlusOneProductIsMinimalButNotCtr) {
  const RunResult r = run(
      "verify --left legendrian_circle --right legendrian_circle --C1 1 "
      "--C2 auto1.5 --grid 4");
  EXPECT_EQ(r.exit_code, 0);  // the eigenvalue relation holds for any C1
  EXPECT_NE(r.out.find("\"expected_pass\":false"), std::string::npos);
  const auto ctr_pos = r.out.find("\"ctr\"");
  ASSERT_NE(ctr_pos, std::string::npos);
  EXPECT_GT(parse_field(r.out.substr(ctr_pos), "max_residual"), 1e-2);
}

TEST(Cli, IdentitiesExportsCsv) {
  const RunResult r = run(
      "identities --k1 2 --k2 3 --C1 -1 --C2 auto1.5 --points 500 --out idn",
      "SPIRALMIN_OUT_DIR='" + kTmp + "'");
  EXPECT_EQ(r.exit_code, 0);
  const std::string csv = read_file(kTmp + "/idn.csv");
  ASSERT_FALSE(csv.empty());
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "s,I,II,III,IV,X,im_part,re_part");
  // header + 500 rows, LF endings only
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 501);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const std::string json = read_file(kTmp + "/idn.json");
  EXPECT_NE(json.find("\"pass\":true"), std::string::npos);
}

TEST(Cli, SweepOrderingAndFailureRows) {
  const RunResult r = run(
      "sweep --k1 1 --k2 1 --C1-list=-1 --C2-mults 0.9,1.05,1.25,2,10 "
      "--grid 3 --out sweep.csv",
      "SPIRALMIN_OUT_DIR='" + kTmp + "'");
  EXPECT_EQ(r.exit_code, 0);
  std::ifstream is(kTmp + "/sweep.csv");
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line,
            "C1,C2_mult,C2,status,domain_width,half_period,joints,residual_max,"
            "eigen_estimate");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0][3], "EmptyDomain");  // 0.9 * C2_min has no domain
  double prev_width = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i][3], "ok");
    const double width = std::stod(rows[i][4]);
    EXPECT_GT(width, prev_width);  // strictly increasing in C2
    prev_width = width;
    EXPECT_LT(std::stod(rows[i][7]), 1e-4);
    EXPECT_NEAR(std::stod(rows[i][8]), 3.0, 1e-3);
  }
}

TEST(Cli, SingleCellSweepMatchesVerifyExactly) {
  const std::string env = "SPIRALMIN_OUT_DIR='" + kTmp + "'";
  ASSERT_EQ(run("sweep --k1 1 --k2 1 --C1-list=-1 --C2-mults 1.5 --grid 5 "
                "--out cell.csv",
                env)
                .exit_code,
            0);
  const RunResult v = run(
      "verify --left legendrian_circle --right legendrian_circle --C1 -1 "
      "--C2 auto1.5 --grid 5");
  ASSERT_EQ(v.exit_code, 0);

  std::ifstream is(kTmp + "/cell.csv");
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  ASSERT_GE(cells.size(), 9u);
  EXPECT_EQ(std::stod(cells[7]), parse_field(v.out, "residual_max"));
  EXPECT_EQ(std::stod(cells[8]), parse_field(v.out, "eigen_estimate"));
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("verify --left legendrian_circle").exit_code, 2);
  EXPECT_EQ(run("steady --k1 1 --k2 1").exit_code, 2);
  EXPECT_EQ(run("frobnicate").exit_code, 2);
  const RunResult r = run("verify --no-such-flag 3");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("usage error"), std::string::npos);
}
