#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "spingain/cli.hpp"
#include "spingain/io.hpp"

using namespace spingain;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "spingain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// "key = value" line of the gain command output
double value_of(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + " = ", 0) == 0) return parse_number(line.substr(key.size() + 3));
  FAIL("missing key " << key);
  return 0.0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("spingain_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double x : {0.0, 1.0, -2.5, 1.0 / 3.0, 6.02214076e23, 4.9e-324, std::nextafter(1.0, 2.0)})
    CHECK(parse_number(format_number(x)) == x);
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(std::isnan(parse_number("nan")));
  CHECK_THROWS_AS(parse_number("1.5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_number(""), std::invalid_argument);
}

TEST_CASE("CSV round-trip preserves the fit exactly") {
  SweepRequest req;
  req.strategy = Strategy::L;
  req.n_values = {128, 256, 512, 1024, 2048, 4096, 8192};
  const auto recs = sweep_n(req);
  std::stringstream csv;
  write_csv(csv, recs);
  CHECK(csv.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  const auto back = read_csv(csv);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].n_atoms == recs[i].n_atoms);
    CHECK(back[i].xi_inv_sq == recs[i].xi_inv_sq);
    CHECK(back[i].chit == recs[i].chit);
    CHECK(back[i].strategy == recs[i].strategy);
  }
  const auto a = fit_exponent(recs), b = fit_exponent(back);
  CHECK(a.exponent == b.exponent);
  CHECK(a.exponent_stderr == b.exponent_stderr);
}

TEST_CASE("CSV reader rejects malformed input") {
  std::istringstream bad_header("N,strategy\n1,l\n");
  CHECK_THROWS_AS(read_csv(bad_header), std::invalid_argument);
  std::istringstream short_row(std::string(kCsvHeader) + "\n100,l,none\n");
  CHECK_THROWS_AS(read_csv(short_row), std::invalid_argument);
  std::istringstream bad_number(std::string(kCsvHeader) + "\n100,l,none,0,0,0.5,1,x,0,1,1,1,0\n");
  CHECK_THROWS_AS(read_csv(bad_number), std::invalid_argument);
  std::istringstream nan_gain(std::string(kCsvHeader) + "\n100,l,none,0,0,0.5,1,0.1,0,nan,1,1,0\n");
  const auto recs = read_csv(nan_gain);
  REQUIRE(recs.size() == 1);
  CHECK(!recs[0].ok());
}

TEST_CASE("SVG output is well formed") {
  std::vector<Series> series{{"a<b & c", {1, 10, 100}, {1, 5, 20}}, {"empty", {}, {}}};
  const auto svg = render_svg(series, {"title \"q\""});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("a&lt;b &amp; c") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("a<b") == std::string::npos);
}

TEST_CASE("gain command examples") {
  auto r = run({"gain", "--n", "10000", "--strategy", "mai", "--alpha", "0.5", "--sigma", "1"});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "xi_inv_sq_over_n") == doctest::Approx(0.368).epsilon(2e-3));

  r = run({"gain", "--n", "100", "--strategy", "l", "--chit", "0"});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "xi_inv_sq") == doctest::Approx(1.0).epsilon(1e-12));

  r = run({"gain", "--n", "64", "--strategy", "q", "--optimize-time", "--oracle", "dense"});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "dense_relative_error") < 1e-10);
}

TEST_CASE("invalid configurations exit with code 2") {
  CHECK(run({"gain", "--n", "100", "--strategy", "l"}).code == 2);
  CHECK(run({"gain", "--n", "100", "--strategy", "l", "--chit", "0.1", "--alpha", "0.6"}).code == 2);
  CHECK(run({"gain", "--n", "100", "--strategy", "cubic", "--chit", "0.1"}).code == 2);
  CHECK(run({"gain", "--n", "100", "--strategy", "l", "--alpha", "0.3"}).code == 2);
  CHECK(run({"gain", "--n", "100", "--strategy", "l", "--chit", "0.1", "--chitau", "-0.1"}).code == 2);
  CHECK(run({"gain", "--n", "32", "--strategy", "l", "--chit", "0.1", "--oracle", "mc",
             "--noise", "ballistic", "--epsilon", "0.1", "--gamma", "0.5"})
            .code == 2);
  CHECK(run({"gain", "--n", "100", "--strategy", "qfi", "--chit", "0.1", "--noise", "diffusive", "--epsilon",
             "0.1"})
            .code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("unwritable output exits with code 3") {
  const auto r = run({"sweep", "--strategy", "l", "--n-list", "64,128", "--alpha", "0.6", "--out",
                      "/nonexistent/dir/out.csv"});
  CHECK(r.code == 3);
}

TEST_CASE("config files and command-line precedence") {
  TempDir dir;
  {
    std::ofstream cfg(dir / "gain.cfg");
    cfg << "# comment line\nn = 100\nstrategy = \"l\"\nchit = 0.3\n";
  }
  auto r = run({"gain", "--config", (dir / "gain.cfg").string()});
  REQUIRE(r.code == 0);
  const double from_file = value_of(r.out, "chit");
  CHECK(from_file == 0.3);

  r = run({"gain", "--config", (dir / "gain.cfg").string(), "--chit", "0.05"});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "chit") == 0.05);

  {
    std::ofstream cfg(dir / "bad.cfg");
    cfg << "n = 100\nstrategy = l\nchit = 0.1\nwobble = 3\n";
  }
  CHECK(run({"gain", "--config", (dir / "bad.cfg").string()}).code == 2);
  CHECK(run({"gain", "--config", (dir / "missing.cfg").string()}).code == 2);
}

TEST_CASE("sweep CSV is byte-identical across thread counts") {
  TempDir dir;
  const std::vector<std::string> base{"sweep", "--strategy", "q", "--n-list", "50,100,200,400,800", "--alpha", "0.6"};
  auto a = base, b = base;
  a.insert(a.end(), {"--threads", "1", "--out", (dir / "a.csv").string()});
  b.insert(b.end(), {"--threads", "3", "--out", (dir / "b.csv").string()});
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);
  const auto ta = slurp(dir / "a.csv");
  CHECK(!ta.empty());
  CHECK(ta == slurp(dir / "b.csv"));
}

TEST_CASE("sweep then fit") {
  TempDir dir;
  const auto csv = (dir / "l.csv").string();
  REQUIRE(run({"sweep", "--strategy", "l", "--n-pow2", "7:12", "--optimize-time", "--out", csv, "--svg",
               (dir / "l.svg").string()})
              .code == 0);
  CHECK(slurp(dir / "l.svg").find("</svg>") != std::string::npos);
  auto r = run({"fit", "--in", csv});
  REQUIRE(r.code == 0);
  const double exponent = value_of(r.out, "exponent");
  CHECK(exponent > 0.6);
  CHECK(exponent < 0.8);

  std::ifstream in(csv);
  CHECK(fit_exponent(read_csv(in)).exponent == exponent);

  r = run({"fit", "--in", csv, "--json", "-"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out.substr(r.out.find('{')));
  CHECK(j["exponent"].get<double>() == exponent);

  CHECK(run({"fit", "--in", (dir / "none.csv").string()}).code == 2);
}

TEST_CASE("echo sweep without noise equals zero-strength ballistic noise") {
  const std::vector<std::string> base{"sweep", "--strategy", "mai", "--n-list", "100,1000,10000", "--alpha", "0.6"};
  auto a = base, b = base;
  a.insert(a.end(), {"--noise", "none"});
  b.insert(b.end(), {"--noise", "ballistic", "--epsilon", "0", "--gamma", "0.65"});
  const auto ra = run(a), rb = run(b);
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  std::istringstream ia(ra.out), ib(rb.out);
  const auto x = read_csv(ia), y = read_csv(ib);
  REQUIRE(x.size() == 3);
  REQUIRE(y.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(x[i].xi_inv_sq - y[i].xi_inv_sq) <= 1e-12 * x[i].xi_inv_sq);
}

TEST_CASE("figure 2 command") {
  TempDir dir;
  const auto r = run({"figure", "fig2", "--n-list", "100,1000,10000", "--alpha-step", "0.05", "--out",
                      (dir / "fig2.csv").string(), "--svg", (dir / "fig2.svg").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("crossover width N=100") != std::string::npos);
  std::ifstream in(dir / "fig2.csv");
  CHECK(read_csv(in).size() == 3 * 11);
}

TEST_CASE("gain JSON output") {
  const auto r = run({"gain", "--n", "200", "--strategy", "nl", "--alpha", "0.6", "--json", "-"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out.substr(r.out.find('{')));
  CHECK(j["N"] == 200);
  CHECK(j["strategy"] == "nl");
  CHECK(j["noise"]["kind"] == "none");
  CHECK(j["coefficients"].size() == 3);
  CHECK(j["xi_inv_sq"].get<double>() > 1.0);
}
