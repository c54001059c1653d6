#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "rkum/io.hpp"

namespace fs = std::filesystem;
using namespace rkum;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rkum");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() /
            ("rkum_test_" + tag + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string str(const std::string& leaf = "") const { return (leaf.empty() ? path_ : path_ / leaf).string(); }

 private:
  fs::path path_;
};

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

double kcor_from(const fs::path& solution) {
  return nlohmann::json::parse(io::read_file(solution)).at("kcor").at(0).get<double>();
}

}  // namespace

TEST(Csv, RoundTripIsExact) {
  Eigen::MatrixXd m(2, 3);
  m << 0.1, -2.5e-300, 1.0 / 3.0, 1e17, -0.0, 42;
  const Eigen::MatrixXd back = io::parse_csv(io::matrix_to_csv(m, {"a", "b", "c"}), true, "t");
  EXPECT_EQ(back, m);
}

TEST(Csv, ParseErrors) {
  EXPECT_THROW(io::parse_csv("1,2\n3\n", false, "t"), DataError);
  EXPECT_THROW(io::parse_csv("1,x\n", false, "t"), DataError);
  EXPECT_THROW(io::parse_csv("a,b\n", true, "t"), DataError);
  EXPECT_EQ(io::parse_csv("1,2\r\n\n3,4\n", false, "t").rows(), 2);
}

TEST(Hash, Fnv1aReferenceValues) {
  EXPECT_EQ(io::fnv1a64(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a64("a"), "af63dc4c8601ec8c");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, cli::usage);
  EXPECT_EQ(run_cli({"simulate"}).code, cli::usage);
  EXPECT_EQ(run_cli({"simulate", "--mode", "four-view"}).code, cli::usage);
  EXPECT_EQ(run_cli({"fit", "--x", "a.csv"}).code, cli::usage);
  EXPECT_EQ(run_cli({"fit", "--x", "a.csv", "--y", "b.csv", "--ncomp", "0"}).code, cli::usage);
}

TEST(Cli, MissingInputIsDataError) {
  TempDir t("missing");
  EXPECT_EQ(run_cli({"--out", t.str(), "--quiet", "fit", "--x", t.str("none.csv"), "--y",
                     t.str("none.csv")})
                .code,
            cli::data);
}

TEST(Cli, SimulateIsReproducible) {
  TempDir a("sim_a"), b("sim_b");
  for (const auto* t : {&a, &b})
    ASSERT_EQ(run_cli({"--seed", "5", "--out", t->str(), "--quiet", "simulate", "--mode", "two-view",
                       "--n", "40"})
                  .code,
              0);
  for (const char* f : {"x.csv", "y.csv", "x_clean.csv", "y_clean.csv", "manifest.json"})
    EXPECT_EQ(io::read_file(a.path() / f), io::read_file(b.path() / f)) << f;
  const auto manifest = nlohmann::json::parse(io::read_file(a.path() / "manifest.json"));
  EXPECT_EQ(manifest.at("contaminated_indices").size(), 2u);
  EXPECT_EQ(io::read_csv(a.path() / "x.csv").rows(), 40);
}

TEST(Cli, ThreeViewWritesMethylation) {
  TempDir t("sim3");
  ASSERT_EQ(run_cli({"--out", t.str(), "--quiet", "simulate", "--mode", "three-view", "--n", "30"}).code, 0);
  EXPECT_TRUE(fs::exists(t.path() / "z.csv"));
  const auto manifest = nlohmann::json::parse(io::read_file(t.path() / "manifest.json"));
  EXPECT_EQ(manifest.at("cluster_labels").size(), 30u);
}

TEST(Cli, FitIdenticalViewsGivesUnitCorrelation) {
  TempDir t("fit_same");
  Eigen::MatrixXd x(6, 2);
  x << 1, 0, 0, 1, 2, 1, -1, 3, 0.5, -2, 4, 4;
  io::write_csv(t.path() / "x.csv", x);
  ASSERT_EQ(run_cli({"--out", t.str(), "--quiet", "fit", "--x", t.str("x.csv"), "--y", t.str("x.csv"),
                     "--kernel", "linear", "--loss", "square", "--kappa", "0", "--ncomp", "2"})
                .code,
            0);
  EXPECT_NEAR(kcor_from(t.path() / "solution.json"), 1.0, 1e-5);
  const Eigen::MatrixXd v = io::read_csv(t.path() / "variates.csv", true);
  EXPECT_EQ(v.rows(), 6);
}

TEST(Cli, FitLossChoiceMatters) {
  TempDir t("fit_loss");
  ASSERT_EQ(run_cli({"--out", t.str(), "--quiet", "simulate", "--mode", "two-view", "--n", "40"}).code, 0);
  std::vector<double> kcor;
  for (const char* loss : {"square", "huber"}) {
    const fs::path out = t.path() / loss;
    ASSERT_EQ(run_cli({"--out", out.string(), "--quiet", "fit", "--x", t.str("x.csv"), "--y",
                       t.str("y.csv"), "--loss", loss, "--ncomp", "2"})
                  .code,
              0);
    kcor.push_back(kcor_from(out / "solution.json"));
  }
  EXPECT_NE(kcor[0], kcor[1]);
}

TEST(Cli, FitRowMismatchIsDataError) {
  TempDir t("fit_rows");
  io::write_csv(t.path() / "a.csv", Eigen::MatrixXd::Random(5, 2));
  io::write_csv(t.path() / "b.csv", Eigen::MatrixXd::Random(4, 2));
  EXPECT_EQ(run_cli({"--out", t.str(), "--quiet", "fit", "--x", t.str("a.csv"), "--y", t.str("b.csv")}).code,
            cli::data);
}

TEST(Cli, InfluenceSingleMethodCsvOnly) {
  TempDir t("influence");
  ASSERT_EQ(run_cli({"--out", t.str(), "--quiet", "simulate", "--mode", "two-view", "--n", "40"}).code, 0);
  const fs::path out = t.path() / "inf";
  ASSERT_EQ(run_cli({"--out", out.string(), "--quiet", "influence", "--data", t.str(), "--methods",
                     "huber", "--format", "csv"})
                .code,
            0);
  int profiles = 0;
  for (const auto& e : fs::directory_iterator(out))
    if (e.path().filename().string().rfind("profile_", 0) == 0) ++profiles;
  EXPECT_EQ(profiles, 2);
  EXPECT_FALSE(fs::exists(out / "influence.svg"));
  EXPECT_TRUE(fs::exists(out / "influence_manifest.json"));
}

TEST(Cli, CompareTableShape) {
  TempDir t("compare");
  ASSERT_EQ(run_cli({"--out", t.str(), "--quiet", "simulate", "--mode", "two-view", "--n", "40"}).code, 0);
  const fs::path out = t.path() / "cmp";
  ASSERT_EQ(run_cli({"--out", out.string(), "--quiet", "compare", "--data", t.str(), "--methods",
                     "kernel,hampel,huber"})
                .code,
            0);
  EXPECT_EQ(count_lines(io::read_file(out / "compare.csv")), 1 + 3 * 2);
  EXPECT_EQ(run_cli({"--out", out.string(), "--quiet", "compare", "--data", t.str(), "--methods", ""}).code,
            cli::usage);
}
