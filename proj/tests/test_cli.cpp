#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "sbmlab_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(SBMLAB_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string out(const std::string& name) { return (scratch() / name).string(); }

}  // namespace

TEST_CASE("generate writes a self-describing edge list") {
  REQUIRE(run("generate --n 1000 --a 5 --b 1 --seed 7 -o " + out("g.txt")) == 0);
  const auto text = slurp(out("g.txt"));
  CHECK(text.rfind("# sbmlab generate\n# config {", 0) == 0);
  CHECK(text.find("\"seed\":7") != std::string::npos);
  CHECK(fs::exists(out("g.txt.log")));
  CHECK(slurp(out("g.txt.log")).find("timestamp") != std::string::npos);
  REQUIRE(run("generate --n 1000 --a 5 --b 1 --seed 7 -o " + out("g2.txt")) == 0);
  CHECK(slurp(out("g2.txt")) == text);
}

TEST_CASE("cycles and estimate read an edge list") {
  REQUIRE(run("generate --n 500 --a 5 --b 1 --seed 3 -o " + out("h.txt")) == 0);
  REQUIRE(run("cycles --input " + out("h.txt") + " --k 4 --method nb -o " + out("c.json")) == 0);
  const auto j = slurp(out("c.json"));
  CHECK(j.find("\"X_k\"") != std::string::npos);
  CHECK(j.find("\"flagged_fraction\"") != std::string::npos);
  REQUIRE(run("cycles --input " + out("h.txt") + " --k 4 --method exact -o " + out("e.json")) == 0);
  REQUIRE(run("estimate --input " + out("h.txt") + " --k 3 -o " + out("est.json")) == 0);
  CHECK(slurp(out("est.json")).find("\"d_hat\"") != std::string::npos);
}

TEST_CASE("outputs do not depend on the thread count") {
  const std::string args = "poisson-check --n 2000 --a 5 --b 1 --k 3 --trials 120 --seed 1";
  REQUIRE(run(args + " --threads 1 -o " + out("p1.csv")) == 0);
  REQUIRE(run(args + " --threads 3 -o " + out("p3.csv")) == 0);
  CHECK(slurp(out("p1.csv")) == slurp(out("p3.csv")));
  CHECK(slurp(out("p1.csv")).find("model,n,a,b,k,trials,emp_mean,emp_var,pred_mean,flagged_fraction,pass\n") !=
        std::string::npos);
}

TEST_CASE("config file with flag precedence") {
  {
    std::ofstream cfg(out("cfg.json"));
    cfg << R"({"command": "tree-recon", "a": 3, "b": 1, "R": 3, "trials": 500, "seed": 9})";
  }
  REQUIRE(run("tree-recon --config " + out("cfg.json") + " --R 2 -o " + out("t.csv")) == 0);
  const auto text = slurp(out("t.csv"));
  CHECK(text.find("\"R\":2") != std::string::npos);
  CHECK(text.find("\"seed\":9") != std::string::npos);
  CHECK(text.find("\n3,1,2,0.5,0.5,2,500,") != std::string::npos);
  CHECK(text.find(",3,500,") == std::string::npos);

  std::ofstream bad(out("bad.json"));
  bad << R"({"bogus": 1})";
  bad.close();
  CHECK(run("tree-recon --config " + out("bad.json")) == 2);
}

TEST_CASE("exit codes") {
  CHECK(run("generate --n 10 --a 1 --b 5") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("distinguish --input " + out("h.txt") + " --a 3 --b 1 --k 4") == 2);
  CHECK(run("moments --n 30 --trials 10") == 3);
  CHECK(run("generate --n 10 --a 2 --b 1 -o /nonexistent/dir/g.txt") == 1);
  CHECK(run("cycles --input /nonexistent/g.txt --k 3") == 1);
  CHECK(run("poisson-check --help") == 0);
}
