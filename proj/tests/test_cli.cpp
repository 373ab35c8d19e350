#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bai/cli.hpp"
#include "bai/errors.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = bai::cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void check_manifest(const nlohmann::json& j, const std::string& command) {
  CHECK(j.at("command") == command);
  CHECK(j.at("parameters").is_object());
  CHECK(j.at("master_seed").is_number_unsigned());
  CHECK(j.at("artifact_version").is_string());
  CHECK(j.at("timestamp").is_string());
}

}  // namespace

TEST_CASE("grids") {
  CHECK(bai::cli::parse_grid("0:1:0.25") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(bai::cli::parse_grid("0.3:0.7:0.2").size() == 3);
  CHECK(bai::cli::parse_grid("1.5,-2,3e-1") == std::vector<double>{1.5, -2, 0.3});
  CHECK(bai::cli::parse_count_grid("100,1000") == std::vector<std::uint64_t>{100, 1000});
  CHECK_THROWS_AS(bai::cli::parse_grid("1:0:0.1"), bai::UsageError);
  CHECK_THROWS_AS(bai::cli::parse_grid("0:1"), bai::UsageError);
  CHECK_THROWS_AS(bai::cli::parse_grid("0:1:0"), bai::UsageError);
  CHECK_THROWS_AS(bai::cli::parse_grid("a,b"), bai::UsageError);
  CHECK_THROWS_AS(bai::cli::parse_grid(""), bai::UsageError);
  CHECK_THROWS_AS(bai::cli::parse_count_grid("10.5"), bai::UsageError);
  CHECK(bai::cli::format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("solve prints gamma_star 0.5 with the manifest") {
  const auto r = run({"solve", "--sigma1", "1", "--sigma0", "1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"gamma_star\": 0.5,") != std::string::npos);
  const auto j = nlohmann::json::parse(r.out);
  check_manifest(j, "solve");
  CHECK(j.at("v_star").get<double>() == doctest::Approx(0.33994241495980732).epsilon(1e-14));
}

TEST_CASE("regret JSON") {
  auto r = run({"regret", "--gamma", "0.5", "--c", "0", "--mu1", "1", "--mu0", "0", "--sigma1", "1", "--sigma0", "1"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("closed_form").get<double>() == doctest::Approx(0.30853753872598690).epsilon(1e-14));
  CHECK_FALSE(j.contains("monte_carlo"));
  check_manifest(j, "regret");

  r = run({"regret", "--gamma", "0.5", "--c", "0", "--mu1", "1", "--mu0", "0", "--sigma1", "1", "--sigma0", "1",
           "--mc-reps", "500", "--seed", "3"});
  REQUIRE(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(j.at("monte_carlo").at("replications") == 500);
  CHECK(j.at("monte_carlo").at("low_replication_warning") == true);
  CHECK(j.at("master_seed") == 3);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("sweep CSV") {
  const auto r = run({"sweep", "--sigma1", "1", "--sigma0", "1", "--gamma-grid", "0.5:0.6:0.1", "--c-grid", "0",
                      "--delta-grid", "1.5035830493871289"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "gamma,c,delta,side,regret");
  CHECK(lines[1] == "0.5,0,1.50358304939,theta1,0.33994241496");
  CHECK(lines[2] == "0.5,0,1.50358304939,theta0,0.33994241496");
  CHECK(lines[3] == "0.6,0,1.50358304939,theta1,1.50358304939");
}

TEST_CASE("simulate CSV and output files") {
  const auto dir = std::filesystem::temp_directory_path() / "bai-cli-test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "sim.csv").string();
  const std::vector<std::string> args{"simulate", "--family", "bernoulli", "--policy", "fixed:0.3", "--n-grid",
                                      "100,400", "--gap-grid", "0:1:1", "--reps", "300", "--seed", "5"};
  auto with_output = args;
  with_output.insert(with_output.end(), {"-o", path});
  const auto r = run(with_output);
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const std::string csv = slurp(path);
  CHECK(csv.rfind("family,policy,n,gap,h1,h0,scaled_regret,std_error,replications,seed\n", 0) == 0);
  CHECK(csv.find("bernoulli,fixed:0.3,400,1,0.5,-0.5,") != std::string::npos);
  CHECK(csv.find("bernoulli,fixed:0.3,100,0,0,-0,0,0,300,5") != std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(path + ".manifest.json"));
  check_manifest(manifest, "simulate");
  CHECK(manifest.at("parameters").at("policy") == "fixed:0.3");
  CHECK_FALSE(manifest.at("parameters").contains("threads"));

  // stdout and file carry the same bytes
  CHECK(run(args).out == csv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("identical arguments give identical bytes across thread counts") {
  const std::vector<std::string> args{"simulate", "--family", "gaussian", "--policy", "two-stage", "--n-grid",
                                      "64,256", "--gap-grid", "0.5,1.5", "--reps", "1500", "--seed", "9"};
  auto one = args, many = args;
  one.insert(one.end(), {"--threads", "1"});
  many.insert(many.end(), {"--threads", "8"});
  const auto a = run(one), b = run(one), c = run(many);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
}

TEST_CASE("exit codes") {
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"solve", "--sigma1", "abc", "--sigma0", "1"}).code == 2);
  CHECK(run({"solve", "--sigma1", "1"}).code == 2);
  CHECK(run({"solve", "--sigma1", "1", "--sigma0", "1", "--bogus"}).code == 2);
  CHECK(run({"sweep", "--sigma1", "1", "--sigma0", "1", "--gamma-grid", "x", "--c-grid", "0", "--delta-grid", "1"}).code == 2);
  CHECK(run({"simulate", "--family", "poisson", "--policy", "neyman", "--n-grid", "10", "--gap-grid", "1", "--reps",
             "10", "--seed", "1"}).code == 2);
  // domain errors exit 1
  const auto neg = run({"solve", "--sigma1", "-1", "--sigma0", "1"});
  CHECK(neg.code == 1);
  CHECK(neg.err.find("sigma") != std::string::npos);
  CHECK(run({"simulate", "--family", "bernoulli", "--policy", "neyman", "--n-grid", "4", "--gap-grid", "5",
             "--reps", "10", "--seed", "1"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).out == "0.1.0\n");
}
