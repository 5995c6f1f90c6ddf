#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef HINF_CLI_PATH
#error "HINF_CLI_PATH must be defined"
#endif
#ifndef HINF_TEST_DATA
#error "HINF_TEST_DATA must be defined"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const fs::path out_file = fs::temp_directory_path() / "hinf_cli_out.txt";
  const std::string command = std::string(HINF_CLI_PATH) + " " + args + " > " +
                              out_file.string() + " 2>&1";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  return result;
}

std::string data_file(const std::string& name) {
  return (fs::path(HINF_TEST_DATA) / name).string();
}

size_t count_lines(const std::string& text) {
  size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

}  // namespace

TEST_CASE("norm command") {
  SECTION("feedthrough example reports norm 1") {
    const RunResult r = run_cli("norm " + data_file("example1.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("norm               1") != std::string::npos);
    CHECK(r.output.find("Optimal") != std::string::npos);
  }

  SECTION("scalar lag, default band") {
    const RunResult r = run_cli("norm " + data_file("scalar05.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("norm               2") != std::string::npos);
    CHECK(r.output.find("theta_opt          0") != std::string::npos);
  }

  SECTION("high band") {
    const RunResult r =
        run_cli("norm " + data_file("scalar05.json") + " --high 1.5707963267948966");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0.894427") != std::string::npos);
  }

  SECTION("json report") {
    const RunResult r = run_cli("norm --json " + data_file("scalar05.json"));
    REQUIRE(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.output);
    CHECK(std::abs(j["norm"].get<double>() - 2.0) < 1e-5);
    CHECK(j["solver"]["status"] == "Optimal");
    CHECK(j["certificate"]["w"].size() == 1);
  }

  SECTION("exit codes") {
    CHECK(run_cli("norm /no/such/file.json").exit_code == 2);
    CHECK(run_cli("norm " + data_file("bad.json")).exit_code == 2);
    CHECK(run_cli("norm " + data_file("unstable.json")).exit_code == 3);
    CHECK(run_cli("norm --low 0.5 --high 0.5 " + data_file("scalar05.json"))
              .exit_code == 2);
    CHECK(run_cli("norm --low 9.0 " + data_file("scalar05.json")).exit_code == 2);
    CHECK(run_cli("bogus-subcommand").exit_code == 2);
  }
}

TEST_CASE("worst-input command") {
  namespace fs = std::filesystem;
  const fs::path csv = fs::temp_directory_path() / "hinf_worst.csv";

  SECTION("writes the requested number of rows") {
    const RunResult r = run_cli("worst-input " + data_file("example1.json") +
                                " --steps 10 --out " + csv.string());
    REQUIRE(r.exit_code == 0);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "k,w0_re,w0_im,z0_re,z0_im,running_power");
    size_t rows = 0;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    CHECK(rows == 10);
    // Memoryless example: running power is exactly 1 on every row.
    CHECK(r.output.find("final_running_power 1") != std::string::npos);
  }

  SECTION("long run approaches the claimed power") {
    const RunResult r = run_cli("worst-input " + data_file("scalar05.json") +
                                " --steps 10000 --out " + csv.string());
    REQUIRE(r.exit_code == 0);
    const size_t pos = r.output.find("relative_error");
    REQUIRE(pos != std::string::npos);
    const double rel = std::stod(r.output.substr(pos + 15));
    CHECK(rel <= 1e-2);
  }

  SECTION("rejects zero steps") {
    CHECK(run_cli("worst-input " + data_file("example1.json") + " --steps 0")
              .exit_code == 2);
  }

  SECTION("unwritable output path") {
    CHECK(run_cli("worst-input " + data_file("example1.json") +
                  " --steps 5 --out /no-such-dir/x.csv")
              .exit_code == 5);
  }
}

TEST_CASE("kyp-dual command") {
  SECTION("non-attained dual is flagged") {
    const RunResult r = run_cli("kyp-dual " + data_file("example1.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("NOT-ATTAINED") != std::string::npos);
    CHECK(r.output.find("lambda             1") != std::string::npos);
  }

  SECTION("controllable system attains") {
    const RunResult r = run_cli("kyp-dual " + data_file("scalar05.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("lambda             4") != std::string::npos);
    CHECK(r.output.find("attainment         ATTAINED") != std::string::npos);
  }

  SECTION("band dual") {
    const RunResult r = run_cli("kyp-dual --json --band 1.5707963267948966 "
                                "3.141592653589793 " +
                                data_file("scalar05.json"));
    REQUIRE(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.output);
    CHECK(std::abs(j["lambda"].get<double>() - 0.8) < 1e-4);
    CHECK(j["primal_dual_gap"].get<double>() < 1e-4);
  }
}

TEST_CASE("bode command") {
  SECTION("five-point grid of the scalar lag") {
    const RunResult r =
        run_cli("bode " + data_file("scalar05.json") + " --grid 5");
    REQUIRE(r.exit_code == 0);
    std::stringstream ss(r.output);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "theta,gain");
    std::vector<double> gains;
    while (std::getline(ss, line)) {
      const size_t comma = line.find(',');
      if (comma != std::string::npos)
        gains.push_back(std::stod(line.substr(comma + 1)));
    }
    REQUIRE(gains.size() == 5);
    CHECK(std::abs(gains[0] - 2.0 / 3.0) < 1e-12);       // theta = -pi
    CHECK(std::abs(gains[1] - 1.0 / std::sqrt(1.25)) < 1e-12);  // -pi/2
    CHECK(std::abs(gains[2] - 2.0) < 1e-12);             // 0
    CHECK(std::abs(gains[3] - 1.0 / std::sqrt(1.25)) < 1e-12);
    CHECK(std::abs(gains[4] - 2.0 / 3.0) < 1e-12);
  }

  SECTION("degenerate single-row grid starts at -pi") {
    const RunResult r = run_cli("bode " + data_file("example1.json") + " --grid 1");
    REQUIRE(r.exit_code == 0);
    CHECK(count_lines(r.output) == 2);
    CHECK(r.output.find("-3.14159265358979") != std::string::npos);
  }

  SECTION("byte-stable across runs") {
    const RunResult a = run_cli("bode " + data_file("scalar05.json") + " --grid 64");
    const RunResult b = run_cli("bode " + data_file("scalar05.json") + " --grid 64");
    CHECK(a.output == b.output);
  }
}
