#include <string>

#include "doctest.h"
#include "stablescat/config.hpp"
#include "stablescat/errors.hpp"
#include "stablescat/experiment.hpp"
#include "stablescat/selftest.hpp"

using namespace stablescat;

namespace {

const std::string kBase = R"([model]
d = 3
alpha = 1

[potential]
kind = ball
height = 1
radius = 1

[jump]
kind = shell
beta = 2
R = 1
Rp = 0.5

[mc]
n_paths = 60
dt_max = 0.004
seed = 42

[sweep]
kind = small_eps
grid = 0.01, 0.1
)";

std::string with(const std::string& from, const std::string& to) {
  std::string s = kBase;
  s.replace(s.find(from), from.size(), to);
  return s;
}

int line_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("config parses every section") {
  const auto c = parse_config(kBase);
  CHECK(c.model.d == 3);
  CHECK(c.potential.kind == PotentialKind::ball);
  CHECK(c.jump.R == 1.0);
  CHECK(c.jump.Rp == 0.5);
  CHECK(c.mc.seed == 42u);
  CHECK(c.mc.n_paths == 60);
  CHECK(c.sweep == SweepKind::small_eps);
  REQUIRE(c.grid.size() == 2);
  CHECK(c.grid[1] == 0.1);
}

TEST_CASE("empty sweep grid is a validation error") {
  const auto text = with("grid = 0.01, 0.1", "grid =");
  CHECK_THROWS_AS(parse_config(text), ConfigError);
  CHECK(line_of(text) == 23);
}

TEST_CASE("config errors carry the key and its line") {
  CHECK(line_of(with("height = 1", "hieght = 1")) == 7);
  CHECK(line_of(with("alpha = 1", "alpha = 2.5")) == 3);
  CHECK(line_of(with("kind = shell", "kind = annulus")) == 11);
  CHECK(line_of(with("grid = 0.01, 0.1", "grid = 0.1, 0.01")) == 23);
  CHECK(line_of(with("seed = 42", "seed = -3")) == 19);
  CHECK_THROWS_AS(parse_config(with("seed = 42\n", "")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("kind = small_eps", "kind = bracket")), ConfigError);  // alpha = 1
  try {
    parse_config(with("radius = 1", "radius = 0"));
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "potential.radius");
  }
}

TEST_CASE("config hash ignores comments and formatting") {
  const auto a = parse_config(kBase);
  const auto b = parse_config("; comment\n" + with("n_paths = 60", "n_paths   =   60") + "\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(parse_config(with("seed = 42", "seed = 43"))));
  CHECK(config_hash(a).size() == 64);
}

TEST_CASE("digests match known vectors") {
  CHECK(git_blob_digest("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_digest("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("identical config and seed give byte-identical CSV") {
  const auto cfg = parse_config(kBase);
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  CHECK(a.csv == b.csv);
  const auto nl = a.csv.find('\n');
  REQUIRE(nl != std::string::npos);
  const std::string header = a.csv.substr(0, nl);
  CHECK(header.find("config_sha256=" + config_hash(cfg)) != std::string::npos);
  CHECK(header.find("digest=" + git_blob_digest(a.csv.substr(nl + 1))) != std::string::npos);
  CHECK(a.csv.substr(nl + 1, 30) == "eps,value,stderr,target,rel_ga");
  CHECK(a.table.rows.size() == 2);

  const auto other = run_experiment(parse_config(with("seed = 42", "seed = 44")));
  CHECK(other.csv != a.csv);
}

TEST_CASE("svg plot has one marker per finite row") {
  CsvTable t;
  t.columns = {"x", "y", "s"};
  t.rows = {{"1", "2", "0.1"}, {"10", "3", "0.2"}, {"100", "nan", "0"}};
  const auto svg = render_svg(t, "demo");
  std::size_t n = 0;
  for (auto p = svg.find("<circle"); p != std::string::npos; p = svg.find("<circle", p + 1)) ++n;
  CHECK(n == 2);
  CHECK(svg.find("(log)") != std::string::npos);
}

TEST_CASE("selftest flags a corrupted jump-kernel constant" * doctest::timeout(300)) {
  SelftestOptions bad;
  bad.c_levy_factor = 1.01;
  const auto rep = run_selftest(bad);
  CHECK_FALSE(rep.passed());
  bool tail_failed = false;
  for (const auto& c : rep.checks)
    if (c.name.rfind("small-time tail", 0) == 0 && !c.passed) tail_failed = true;
  CHECK(tail_failed);
}
