#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "circlesum/runner.hpp"
#include "test_util.hpp"

using namespace circlesum;
using testutil::TempDir;

namespace {

ExperimentConfig load_text(const std::string& text,
                           const std::string& command = "",
                           std::optional<unsigned> workers = std::nullopt) {
  return load_experiment(KeyValueConfig::parse_text(text), command,
                         std::nullopt, workers);
}

int run_text(const std::string& text, const std::string& out_prefix,
             unsigned workers, std::string* diag = nullptr) {
  auto cfg = KeyValueConfig::parse_text(text);
  ExperimentConfig ex = load_experiment(cfg, "", out_prefix, workers);
  return run_experiment_status(ex, diag);
}

const char* kEvalSumConfig = R"(
command = eval-sum

[system]
n = 2
block1 = x1 + x2

[params]
P = 3
alpha = 0
)";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("uniform grids in row-major order") {
  GradedSystem one = testutil::block_system(1, 1, {"x1"});
  auto g4 = alpha_grid(one, 4);
  REQUIRE(g4.size() == 4);
  for (int k = 0; k < 4; ++k)
    CHECK(g4[k].blocks[0][0] == static_cast<long double>(k) / 4.0L);

  GradedSystem two;
  two.n = 2;
  two.blocks = {{parse_polynomial("x1", 2), parse_polynomial("x2", 2)}};
  auto g2 = alpha_grid(two, 2);
  REQUIRE(g2.size() == 4);
  CHECK(g2[0].blocks[0] == std::vector<long double>{0.0L, 0.0L});
  CHECK(g2[1].blocks[0] == std::vector<long double>{0.0L, 0.5L});
  CHECK(g2[2].blocks[0] == std::vector<long double>{0.5L, 0.0L});
  CHECK(g2[3].blocks[0] == std::vector<long double>{0.5L, 0.5L});

  CHECK_THROWS_AS(alpha_grid(one, 0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_grid(two, 100000), budget_error);

  // multi-block shapes enumerate block 1 slowest
  GradedSystem mixed;
  mixed.n = 1;
  mixed.blocks = {{parse_polynomial("x1", 1)}, {parse_polynomial("x1^2", 1)}};
  auto gm = alpha_grid(mixed, 2);
  REQUIRE(gm.size() == 4);
  CHECK(gm[1].blocks[0][0] == 0.0L);
  CHECK(gm[1].blocks[1][0] == 0.5L);
  CHECK(gm[2].blocks[0][0] == 0.5L);
  CHECK(gm[2].blocks[1][0] == 0.0L);
}

TEST_CASE("config parsing, sections, and diagnostics") {
  auto cfg = KeyValueConfig::parse_text("a = 1\n[s]\nb = two # comment\n");
  CHECK(cfg.get_int("a") == 1);
  CHECK(cfg.get_string("s.b") == "two");
  CHECK(!cfg.has("s.c"));
  CHECK_THROWS_AS(KeyValueConfig::parse_text("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_text("justakey\n"), ConfigError);
  CHECK_THROWS_AS(cfg.get_int("s.b"), ConfigError);
}

TEST_CASE("experiment validation catches the contract violations") {
  CHECK_THROWS_AS(load_text("command = fly-to-the-moon\n"), ConfigError);
  CHECK_THROWS_AS(load_text("command = eval-sum\n", "scan-alpha"), ConfigError);

  // the command may come from the invocation alone
  std::string no_command = "[system]\nn = 1\nblock1 = x1\n";
  CHECK(load_text(no_command, "compute-b1").command == "compute-b1");
  CHECK_THROWS_AS(load_text(no_command), ConfigError);

  // malformed polynomial: diagnostic carries the config line number
  std::string bad = "command = eval-sum\n[system]\nn = 1\nblock1 = x1^\n";
  try {
    load_text(bad);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }

  // misgraded system
  std::string misgraded = "command = eval-sum\n[system]\nn = 1\nblock2 = x1\n";
  CHECK_THROWS_AS(load_text(misgraded), ConfigError);
}

TEST_CASE("eval-sum produces the forced value and manifest") {
  TempDir dir;
  std::string prefix = dir.file("eval");
  std::string diag;
  int status = run_text(kEvalSumConfig, prefix, 2, &diag);
  REQUIRE_MESSAGE(status == 0, diag);

  std::string csv = testutil::read_file(prefix + ".csv");
  CHECK(csv == "re,im,abs\n16,0,16\n");

  auto manifest = nlohmann::json::parse(testutil::read_file(prefix + ".json"));
  CHECK(manifest["summary"]["re"].get<double>() == 16.0);
  CHECK(manifest["command"] == "eval-sum");
  CHECK(manifest["workers"] == 2);
  CHECK(manifest["config"]["system.n"] == "2");
  CHECK(manifest.contains("started_utc"));
}

TEST_CASE("exit statuses distinguish validation from budget exhaustion") {
  TempDir dir;
  std::string diag;

  // a missing [system] section fails validation before any file is written
  std::string no_system_prefix = dir.file("nosys");
  CHECK(run_text("command = eval-sum\n", no_system_prefix, 1, &diag) == 1);
  CHECK(diag.find("[system]") != std::string::npos);
  CHECK(!std::filesystem::exists(no_system_prefix + ".csv"));

  // lattice budget exhaustion surfaces as status 2
  std::string big = R"(
command = eval-sum
[system]
n = 2
block1 = x1 + x2
[params]
P = 1000000000
alpha = 0
)";
  int status = run_text(big, dir.file("big"), 1, &diag);
  CHECK(status == 2);
  CHECK(diag.find("budget") != std::string::npos);

  // a validation failure inside the runner surfaces as status 1
  std::string short_alpha = R"(
command = eval-sum
[system]
n = 2
block1 = x1 + x2
[params]
P = 3
alpha = 0, 0
)";
  CHECK(run_text(short_alpha, dir.file("bad"), 1, &diag) == 1);
}

TEST_CASE("dichotomy runs emit one row per grid point") {
  TempDir dir;
  std::string config = R"(
command = verify-dichotomy
[system]
n = 1
block2 = x1^2
[params]
P = 16
delta = 0.5
omega = 0.05
resolution = 16
)";
  std::string prefix = dir.file("dich");
  std::string diag;
  REQUIRE_MESSAGE(run_text(config, prefix, 2, &diag) == 0, diag);
  std::string csv = testutil::read_file(prefix + ".csv");
  std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 17);  // header + 16 grid rows
  CHECK(csv.rfind("alpha_2_1,abs_S,bound_i,q,classification\n", 0) == 0);
}

TEST_CASE("csv outputs are byte-identical across runs and worker counts") {
  std::string config = R"(
command = scan-alpha
[system]
n = 1
block2 = x1^2
[params]
P = 21
resolution = 64
)";
  TempDir dir;
  std::string diag;
  REQUIRE_MESSAGE(run_text(config, dir.file("a"), 1, &diag) == 0, diag);
  REQUIRE_MESSAGE(run_text(config, dir.file("b"), 1, &diag) == 0, diag);
  REQUIRE_MESSAGE(run_text(config, dir.file("c"), 8, &diag) == 0, diag);
  std::string a = testutil::read_file(dir.file("a") + ".csv");
  std::string b = testutil::read_file(dir.file("b") + ".csv");
  std::string c = testutil::read_file(dir.file("c") + ".csv");
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.size() > 64);

  // manifests agree except for the timestamps
  auto ja = nlohmann::json::parse(testutil::read_file(dir.file("a") + ".json"));
  auto jc = nlohmann::json::parse(testutil::read_file(dir.file("c") + ".json"));
  CHECK(ja["summary"] == jc["summary"]);
  CHECK(ja["config"] == jc["config"]);
}

TEST_CASE("remaining commands run end to end") {
  TempDir dir;
  std::string diag;

  std::string count = R"(
command = count-variety
[system]
n = 2
block2 = x1^2 + x2^2
[params]
ell = 2
R0 = 1,2,4
)";
  REQUIRE_MESSAGE(run_text(count, dir.file("count"), 2, &diag) == 0, diag);
  CHECK(testutil::read_file(dir.file("count") + ".csv") ==
        "ell,R0,z\n2,1,1\n2,2,1\n2,4,1\n");

  std::string est = R"(
command = estimate-g
[system]
n = 2
block2 = x1^2
[params]
ell = 2
R0 = 2,4,8,16
)";
  REQUIRE_MESSAGE(run_text(est, dir.file("est"), 2, &diag) == 0, diag);
  auto je = nlohmann::json::parse(testutil::read_file(dir.file("est") + ".json"));
  CHECK(je["summary"]["g_hat"].get<double>() > 0.5);

  std::string b1cfg = R"(
command = compute-b1
[system]
n = 3
block1 = x1 + x2 + x3
)";
  REQUIRE_MESSAGE(run_text(b1cfg, dir.file("b1"), 1, &diag) == 0, diag);
  auto jb = nlohmann::json::parse(testutil::read_file(dir.file("b1") + ".json"));
  CHECK(jb["summary"]["b1"].get<int>() == 3);

  std::string thr = R"(
command = thresholds
[system]
n = 1
block2 = x1^2
[params]
R0 = 2,4,8
)";
  REQUIRE_MESSAGE(run_text(thr, dir.file("thr"), 2, &diag) == 0, diag);
  auto jt = nlohmann::json::parse(testutil::read_file(dir.file("thr") + ".json"));
  CHECK(jt["summary"]["gamma_sum"]["exact"] == "2");
  CHECK(jt["summary"]["omega_sup"]["exact"] == "1/18");

  std::string sing = R"(
command = singular-integral
[system]
n = 1
block1 = x1
[params]
tau = 0.5
tol = 1e-9
)";
  REQUIRE_MESSAGE(run_text(sing, dir.file("sing"), 1, &diag) == 0, diag);
  auto js = nlohmann::json::parse(testutil::read_file(dir.file("sing") + ".json"));
  CHECK(js["summary"]["im"].get<double>() ==
        doctest::Approx(2.0 / 3.14159265358979).epsilon(1e-6));

  std::string psc = R"(
command = partial-summation-check
[params]
n = 2
N = 5,4
instances = 6
seed = 7
)";
  REQUIRE_MESSAGE(run_text(psc, dir.file("psc"), 1, &diag) == 0, diag);
  auto jp = nlohmann::json::parse(testutil::read_file(dir.file("psc") + ".json"));
  CHECK(jp["summary"]["max_residual"].get<double>() <= 1e-8);
}

}  // TEST_SUITE
