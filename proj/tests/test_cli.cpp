#include "cli.hpp"

#include "hybowave/checkpoint.hpp"
#include "hybowave/model.hpp"
#include "hybowave/synthetic.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace hwn;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hybowave");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

std::vector<std::string> fields(const std::string& line, char sep) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  for (std::string x; std::getline(ss, x, sep);) f.push_back(x);
  return f;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hybowave_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // 100-edge ring with chords on labelled nodes.
  std::string write_hundred_edges() {
    std::ofstream f(path("edges.tsv"));
    f << "# protein pairs\n";
    for (int i = 0; i < 40; ++i) f << "P" << i << "\tP" << (i + 1) % 40 << "\n";
    int added = 0;
    for (int i = 0; i < 40 && added < 60; ++i) {
      for (int step : {3, 7}) {
        if (added < 60) {
          f << "P" << i << "\tP" << (i + step) % 40 << "\n";
          ++added;
        }
      }
    }
    return path("edges.tsv");
  }

  std::string write_benchmark() {
    EXPECT_EQ(run_cli({"synth", "--seed", "0", "--out", path("bench.tsv")}).code, 0);
    return path("bench.tsv");
  }

  fs::path dir_;
};

const std::vector<std::string> kQuick{"--set", "max_epochs=15", "--set", "input_dim=16", "--set", "hidden_dim=8"};

std::vector<std::string> with_quick(std::vector<std::string> args) {
  args.insert(args.end(), kQuick.begin(), kQuick.end());
  return args;
}

}  // namespace

TEST_F(CliTest, SplitCountsAndDeterminism) {
  const std::string edges = write_hundred_edges();
  const Result r = run_cli({"split", "--edges", edges, "--seed", "3", "--out", path("a.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("edges=100 train=85 val=5 test=10"), std::string::npos) << r.out;
  ASSERT_EQ(run_cli({"split", "--edges", edges, "--seed", "3", "--out", path("b.json")}).code, 0);
  EXPECT_EQ(read_text_file(path("a.json")), read_text_file(path("b.json")));
}

TEST_F(CliTest, MalformedEdgeListExitsTwoWithLine) {
  {
    std::ofstream f(path("bad.tsv"));
    f << "a\tb\nb\tc\nbroken line\n";
  }
  const Result r = run_cli({"split", "--edges", path("bad.tsv"), "--out", path("s.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":3:"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"split", "--edges", path("missing.tsv"), "--out", path("s.json")}).code, 2);
  EXPECT_EQ(run_cli({"split", "--bogus"}).code, 2);
  EXPECT_EQ(run_cli({"train", "--edges", path("bad.tsv"), "--set", "nonsense=1"}).code, 2);
}

TEST_F(CliTest, TrainRecordsProvenanceAndIsReproducible) {
  const std::string edges = write_benchmark();
  const Result r = run_cli(with_quick({"train", "--edges", edges, "--out", path("run1")}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("train: test_auc=", 0), 0u) << r.out;
  const auto metrics = nlohmann::json::parse(read_text_file(path("run1/metrics.json")));
  const auto& prov = metrics.at("provenance");
  EXPECT_EQ(prov.at("learning_rate"), 0.001);
  EXPECT_EQ(prov.at("temperature"), 0.2);
  EXPECT_EQ(prov.at("dropout"), 0.2);
  EXPECT_EQ(prov.at("scales"), nlohmann::json::parse("[1,2,3,4]"));
  EXPECT_TRUE(fs::exists(path("run1/checkpoint.json")));

  ASSERT_EQ(run_cli(with_quick({"train", "--edges", edges, "--out", path("run2")})).code, 0);
  EXPECT_EQ(read_text_file(path("run1/metrics.json")), read_text_file(path("run2/metrics.json")));
  EXPECT_EQ(read_text_file(path("run1/checkpoint.json")), read_text_file(path("run2/checkpoint.json")));

  ASSERT_EQ(run_cli(with_quick({"train", "--edges", edges, "--set", "use_wavelet=false", "--out", path("nw")})).code, 0);
  const auto nw = nlohmann::json::parse(read_text_file(path("nw/metrics.json")));
  EXPECT_EQ(nw.at("provenance").at("use_wavelet"), false);

  ASSERT_EQ(run_cli(with_quick({"train", "--edges", edges, "--repeats", "2", "--out", path("rep")})).code, 0);
  const auto rep = nlohmann::json::parse(read_text_file(path("rep/metrics.json")));
  EXPECT_EQ(rep.at("repeats").at("seeds"), nlohmann::json::parse("[0,1]"));
}

TEST_F(CliTest, TrainWithSplitManifest) {
  const std::string edges = write_benchmark();
  ASSERT_EQ(run_cli({"split", "--edges", edges, "--seed", "0", "--out", path("split.json")}).code, 0);
  ASSERT_EQ(run_cli(with_quick({"train", "--edges", edges, "--split", path("split.json"), "--out", path("a")})).code, 0);
  ASSERT_EQ(run_cli(with_quick({"train", "--edges", edges, "--out", path("b")})).code, 0);
  // Default split uses the config seed (0), so both runs see the same data.
  EXPECT_EQ(read_text_file(path("a/metrics.json")), read_text_file(path("b/metrics.json")));

  const std::string other = write_hundred_edges();
  EXPECT_EQ(run_cli(with_quick({"train", "--edges", other, "--split", path("split.json")})).code, 2);
}

TEST_F(CliTest, DivergenceExitsThree) {
  const std::string edges = write_benchmark();
  const Result r = run_cli({"train", "--edges", edges, "--set", "learning_rate=1e300", "--set", "max_epochs=5",
                            "--out", path("div")});
  EXPECT_EQ(r.code, 3) << r.out << r.err;
}

TEST_F(CliTest, PredictImportanceAndScores) {
  const std::string edges = write_benchmark();
  ASSERT_EQ(run_cli(with_quick({"train", "--edges", edges, "--out", path("run")})).code, 0);
  const std::string ck = path("run/checkpoint.json");
  {
    std::ofstream f(path("pairs.tsv"));
    f << "h0\tl0_0_0\nm0_0\tm0_0\nh1\th2\nl2_2_8\tm1_0\n";
  }
  ASSERT_EQ(run_cli({"predict", "--checkpoint", ck, "--pairs", path("pairs.tsv"), "--out", path("p.tsv")}).code, 0);
  const auto rows = lines_of(path("p.tsv"));
  ASSERT_EQ(rows.size(), 4u);
  const auto top = fields(rows[0], '\t');
  EXPECT_EQ(top[0], "m0_0");
  EXPECT_EQ(top[1], "m0_0");
  EXPECT_EQ(std::stod(top[2]), 0.0);

  const Checkpoint c = load_checkpoint(ck);
  const Graph g = c.graph();
  const Model model(g, c.config.model_config());
  const Eigen::MatrixXd emb = model.embed(c.params);
  double prev = 1.0;
  for (const auto& line : rows) {
    const auto f = fields(line, '\t');
    ASSERT_EQ(f.size(), 4u);
    const NodeId u = *g.index().find(f[0]);
    const NodeId v = *g.index().find(f[1]);
    const double s = model.scores(emb, {{u, v}})(0);
    EXPECT_EQ(std::stod(f[2]), s);
    EXPECT_EQ(std::stod(f[3]), link_probability(-s, c.params.decoder));
    EXPECT_LE(std::stod(f[3]), prev);
    prev = std::stod(f[3]);
  }

  {
    std::ofstream f(path("unknown.tsv"));
    f << "h0\tnot_a_node\n";
  }
  const Result bad = run_cli({"predict", "--checkpoint", ck, "--pairs", path("unknown.tsv"), "--out", path("x.tsv")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("not_a_node"), std::string::npos);

  ASSERT_EQ(run_cli({"predict", "--checkpoint", ck, "--topk", "7", "--out", path("top.tsv")}).code, 0);
  const auto topk = lines_of(path("top.tsv"));
  EXPECT_EQ(topk.size(), 7u);
  for (const auto& line : topk) {
    const auto f = fields(line, '\t');
    EXPECT_FALSE(g.has_edge(*g.index().find(f[0]), *g.index().find(f[1])));
  }

  ASSERT_EQ(run_cli({"importance", "--checkpoint", ck, "--out", path("imp.csv")}).code, 0);
  const auto imp = lines_of(path("imp.csv"));
  ASSERT_EQ(imp.size(), 11u);
  EXPECT_EQ(imp[0], "rank,feature,weight");
  double last = 2.0;
  for (std::size_t i = 1; i < imp.size(); ++i) {
    const auto f = fields(imp[i], ',');
    EXPECT_EQ(std::stoi(f[0]), static_cast<int>(i));
    const double w = std::stod(f[2]);
    EXPECT_LE(w, 1.0);
    EXPECT_LE(w, last);
    last = w;
  }
}

TEST_F(CliTest, AblateAndScaleSweepTables) {
  const std::string edges = write_benchmark();
  std::vector<std::string> a{"ablate", "--edges", edges, "--set", "max_epochs=3", "--set", "input_dim=8",
                             "--out", path("ablate.csv")};
  ASSERT_EQ(run_cli(a).code, 0);
  const auto ab = lines_of(path("ablate.csv"));
  ASSERT_EQ(ab.size(), 7u);
  EXPECT_EQ(ab[0], "encoder,wavelet_contrastive,auc,aupr,auc_std,aupr_std,repeats");
  EXPECT_EQ(ab[1].rfind("lorentz_gnn,on,", 0), 0u);

  std::vector<std::string> s{"scale-sweep", "--edges", edges, "--set", "max_epochs=3", "--set", "input_dim=8",
                             "--scales", "1,2,3,4", "--scales", "2,5", "--out", path("sweep.csv")};
  ASSERT_EQ(run_cli(s).code, 0);
  const auto sw = lines_of(path("sweep.csv"));
  ASSERT_EQ(sw.size(), 3u);
  EXPECT_EQ(sw[0], "scales,k,auc,aupr,auc_std,aupr_std,repeats");
  EXPECT_EQ(sw[1].rfind("\"1,2,3,4\",4,", 0), 0u);
  EXPECT_EQ(run_cli({"scale-sweep", "--edges", edges, "--scales", "3,1", "--out", path("bad.csv")}).code, 2);
}

TEST_F(CliTest, VerifyGradientsAndHelp) {
  const Result r = run_cli({"verify-gradients"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("verify-gradients: PASS", 0), 0u) << r.out;
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}
