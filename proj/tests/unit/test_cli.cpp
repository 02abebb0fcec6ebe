#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with `args`, capturing stdout; stderr is discarded.
Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + COGH_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string scenario(const char* name) { return std::string(COGH_SCENARIOS) + "/" + name; }
std::string malformed(const char* name) { return std::string(COGH_TEST_DATA) + "/malformed/" + name; }

}  // namespace

TEST_CASE("cli validate") {
  const Run ok = cli("validate --scenario " + scenario("canonical.chs"));
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("ok: 5 rooms", 0) == 0);
  CHECK(cli("validate --scenario /nonexistent/x.chs").code == 2);
}

TEST_CASE("cli exit codes for malformed files") {
  for (const auto& e : std::filesystem::directory_iterator(std::string(COGH_TEST_DATA) + "/malformed")) {
    const int code = cli("validate --scenario \"" + e.path().string() + "\"").code;
    CHECK_MESSAGE((code == 1 || code == 2), e.path().filename().string());
  }
}

TEST_CASE("cli argument errors") {
  CHECK(cli("").code == 2);
  CHECK(cli("validate").code == 2);
  CHECK(cli("learn --scenario " + scenario("canonical.chs") + " --bogus").code == 2);
  CHECK(cli("learn --scenario " + scenario("canonical.chs") + " --runs 0").code == 2);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("cli plan with horizon too short fails") {
  const auto tmp = std::filesystem::temp_directory_path() / "cogh_cli_short.chs";
  std::ifstream in(scenario("canonical.chs"));
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  const auto pos = text.find("; horizon = ");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, text.find('\n', pos) - pos, "horizon = 1");
  std::ofstream(tmp) << text;
  CHECK(cli("plan --episodes 0 --scenario " + tmp.string()).code == 1);
  std::filesystem::remove(tmp);
}

TEST_CASE("cli plan and learn outputs") {
  const Run plan = cli("plan --exact --episodes 0 --scenario " + scenario("canonical.chs"));
  CHECK(plan.code == 0);
  CHECK(plan.out.find("cost:") != std::string::npos);
  CHECK(plan.out.find("rooms:r4-") != std::string::npos);

  const auto out = std::filesystem::temp_directory_path() / "cogh_cli_learn.csv";
  const Run learn =
      cli("learn --agent flat --runs 2 --episodes 2 --seed 3 --scenario " + scenario("canonical.chs") + " --out " +
          out.string());
  CHECK(learn.code == 0);
  std::ifstream f(out);
  std::string header;
  std::getline(f, header);
  CHECK(header == "agent,run,episode,steps,cumulative_steps");
  int rows = 0;
  for (std::string line; std::getline(f, line);) ++rows;
  CHECK(rows == 4);
  std::filesystem::remove(out);
  CHECK(cli("learn --runs 1 --episodes 1 --scenario " + scenario("canonical.chs") + " --out /nonexistent/d/x.csv")
            .code == 2);
}

TEST_CASE("cli sweep") {
  const Run r = cli("sweep --episodes 5 --p 1.0,1.0 --scenario " + scenario("canonical.chs"));
  CHECK(r.code == 0);
  CHECK(r.out.rfind("p_intended,room_path,expected_steps\n1,r4-", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
  CHECK(cli("sweep --p 1.5 --scenario " + scenario("canonical.chs")).code == 2);
}
