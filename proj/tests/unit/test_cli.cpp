#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pathmine");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code =
      pathmine::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("pathmine_cli_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& sub = "") const { return (path / sub).string(); }
};

void write_sample_log(const fs::path& path) {
  std::ofstream out(path);
  out << "case,activity,timestamp\n";
  for (int c = 0; c < 4; ++c) {
    out << "k" << c << ",a,2021-01-01 10:00:00\n";
    out << "k" << c << ",b,2021-01-01 10:01:00\n";
  }
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("discover writes a pnml, a dot file and a kb manifest") {
  TempDir dir("discover");
  write_sample_log(dir.path / "log.csv");
  const CliResult result = run_cli({"discover", "--input", dir.str("log.csv"), "--miner", "im",
                                    "--out", dir.str("model"), "--log-level", "quiet"});
  CHECK(result.exit_code == 0);
  CHECK(fs::exists(dir.path / "model" / "net.pnml"));
  CHECK(fs::exists(dir.path / "model" / "net.dot"));
  CHECK(fs::exists(dir.path / "model" / "manifest.json"));
}

TEST_CASE("check against an empty kb directory exits with a data error") {
  TempDir dir("check_empty");
  write_sample_log(dir.path / "log.csv");
  fs::create_directories(dir.path / "kb");
  const CliResult result = run_cli({"check", "--input", dir.str("log.csv"), "--kb",
                                    dir.str("kb"), "--log-level", "quiet"});
  CHECK(result.exit_code == 2);
  CHECK(result.err == "error: empty knowledge base\n");
}

TEST_CASE("check prints a diagnosis csv to stdout") {
  TempDir dir("check_ok");
  write_sample_log(dir.path / "log.csv");
  REQUIRE(run_cli({"discover", "--input", dir.str("log.csv"), "--out", dir.str("kb"),
                   "--log-level", "quiet"})
              .exit_code == 0);
  const CliResult result = run_cli({"check", "--input", dir.str("log.csv"), "--kb", dir.str("kb"),
                                    "--log-level", "quiet"});
  CHECK(result.exit_code == 0);
  CHECK(result.out.substr(0, result.out.find('\n')) == "a,b,fitness,model_ref");
}

TEST_CASE("adapt leaves the input kb untouched and writes the updated one") {
  TempDir dir("adapt");
  write_sample_log(dir.path / "log.csv");
  {
    std::ofstream out(dir.path / "batch.csv");
    out << "case,activity,timestamp\n";
    for (int c = 0; c < 4; ++c) {
      out << "n" << c << ",a,2021-01-01 10:00:00\n";
      out << "n" << c << ",x,2021-01-01 10:01:00\n";
      out << "n" << c << ",b,2021-01-01 10:02:00\n";
    }
  }
  REQUIRE(run_cli({"discover", "--input", dir.str("log.csv"), "--out", dir.str("kb"),
                   "--log-level", "quiet"})
              .exit_code == 0);
  const std::string manifest_before = slurp(dir.path / "kb" / "manifest.json");

  const CliResult result =
      run_cli({"adapt", "--input", dir.str("batch.csv"), "--kb", dir.str("kb"), "--out-kb",
               dir.str("kb2"), "--min-pts", "2", "--log-level", "quiet"});
  CHECK(result.exit_code == 0);
  CHECK(slurp(dir.path / "kb" / "manifest.json") == manifest_before);
  CHECK(fs::exists(dir.path / "kb2" / "manifest.json"));
  CHECK(fs::exists(dir.path / "kb2" / "outcome.json"));
  const std::string manifest_after = slurp(dir.path / "kb2" / "manifest.json");
  CHECK(manifest_after.find("model_1") != std::string::npos);
}

TEST_CASE("generate writes one csv per disease") {
  TempDir dir("generate");
  const CliResult result =
      run_cli({"generate", "--n-diseases", "3", "--traces-per-disease", "5", "--out",
               dir.str("bench"), "--log-level", "quiet"});
  CHECK(result.exit_code == 0);
  CHECK(fs::exists(dir.path / "bench" / "disease_1.csv"));
  CHECK(fs::exists(dir.path / "bench" / "disease_2.csv"));
  CHECK(fs::exists(dir.path / "bench" / "positive.csv"));
}

TEST_CASE("evaluate is reproducible for a fixed seed") {
  TempDir dir("evaluate");
  const std::vector<std::string> base{
      "evaluate",  "--n-diseases", "3",  "--acts-min", "4",           "--acts-max",
      "5",         "--traces-per-disease", "8", "--repeats", "1",     "--gen-seed",
      "7",         "--seed",       "7",  "--log-level", "quiet",      "--out-csv"};
  auto with_out = [&](const std::string& out_csv) {
    auto args = base;
    args.push_back(out_csv);
    return args;
  };
  REQUIRE(run_cli(with_out(dir.str("r1.csv"))).exit_code == 0);
  REQUIRE(run_cli(with_out(dir.str("r2.csv"))).exit_code == 0);
  const std::string r1 = slurp(dir.path / "r1.csv");
  const std::string r2 = slurp(dir.path / "r2.csv");
  // identical apart from the measured wall time column
  auto strip_wall_time = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  CHECK(strip_wall_time(r1) == strip_wall_time(r2));
  CHECK(r1.substr(0, r1.find('\n')) ==
        "repeat,iteration,mode,miner,clusterer,auc,mean_simplicity,model_count,"
        "mean_fitness_neg,wall_time_ms");
}

TEST_CASE("usage errors exit with code 1") {
  const CliResult unknown = run_cli({"discover", "--nonsense"});
  CHECK(unknown.exit_code == 1);
  const CliResult missing = run_cli({"discover"});
  CHECK(missing.exit_code == 1);
  const CliResult nothing = run_cli({});
  CHECK(nothing.exit_code == 1);
}

TEST_CASE("help exits cleanly and lists defaults") {
  const CliResult help = run_cli({"--help"});
  CHECK(help.exit_code == 0);
  const CliResult sub_help = run_cli({"evaluate", "--help"});
  CHECK(sub_help.exit_code == 0);
  CHECK(sub_help.out.find("--threshold") != std::string::npos);
  CHECK(sub_help.out.find("0.9") != std::string::npos);   // threshold default
  CHECK(sub_help.out.find("--top-k") != std::string::npos);
  CHECK(sub_help.out.find("20") != std::string::npos);    // top-k default
}

TEST_CASE("missing input file is a data error") {
  const CliResult result = run_cli({"discover", "--input", "/nonexistent/log.csv", "--out",
                                    "/tmp/pathmine_cli_never", "--log-level", "quiet"});
  CHECK(result.exit_code == 2);
  CHECK(result.err.rfind("error:", 0) == 0);
}
