#include "eekd/harness.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace eekd;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("eekd_test_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string tiny_config(const std::string& experiment, const std::string& extra = "") {
  return R"({
    "experiment": ")" + experiment + R"(",
    "seeds": [0, 1],
    "dataset": {"kind": "blobs", "n_train": 120, "n_test": 40, "num_classes": 4, "dim": 5, "noise": 1.0},
    "teacher": {"hidden": [12, 12], "epochs": 4, "batch_size": 32},
    "student": {"hidden": [6], "epochs": 2, "batch_size": 32},
    "distill": {"M": 2, "embed_dim": 4})" +
         extra + "}";
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny(const std::string& experiment, const std::string& extra = "") {
  return parse_config(tiny_config(experiment, extra));
}

double row_value(const Report& r, const std::string& variant, std::uint64_t seed, const std::string& metric) {
  for (const auto& row : r.rows())
    if (row.variant == variant && row.seed == seed && row.metric == metric) return row.value;
  throw std::runtime_error("missing row " + variant + "/" + metric);
}

}  // namespace

// ---------------------------------------------------------------------------
// report

TEST(Report, CsvLayoutAndAggregates) {
  Report r("demo");
  r.add("b", 2, "acc", 0.5);
  r.add("a", 1, "acc", 0.25);
  r.add("b", 1, "acc", 0.75);
  r.add("b", 1, "wall_clock_seconds", 3.5, false);
  const std::string csv = r.to_csv();
  std::istringstream lines(csv);
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) {
    ASSERT_FALSE(line.empty());
    EXPECT_EQ(line.back(), '\r');
    all.push_back(line.substr(0, line.size() - 1));
  }
  ASSERT_GE(all.size(), 5u);
  EXPECT_EQ(all[0], "experiment,variant,seed,metric,value,deterministic");
  EXPECT_EQ(all[1], "demo,a,1,acc,0.25,1");
  EXPECT_EQ(all[2], "demo,b,1,acc,0.75,1");
  EXPECT_EQ(all[3], "demo,b,1,wall_clock_seconds,3.5,0");
  EXPECT_EQ(all[4], "demo,b,2,acc,0.5,1");
  EXPECT_NE(csv.find("demo,b,mean,acc,0.625,1\r\n"), std::string::npos);
  EXPECT_NE(csv.find("demo,b,std,acc,0.1767766952966369,1\r\n"), std::string::npos);
  EXPECT_NE(csv.find("demo,a,std,acc,0,1\r\n"), std::string::npos);
}

TEST(Report, RejectsDuplicatesAndNonFinite) {
  Report r("x");
  r.add("v", 0, "m", 1.0);
  EXPECT_THROW(r.add("v", 0, "m", 2.0), InvariantError);
  EXPECT_THROW(r.add("v", 1, "m", std::nan("")), NumericError);
}

TEST(Report, FieldQuotingAndNumberFormat) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1600.0), "1600");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Report, JsonCarriesSameNumbersAsCsv) {
  Report r("demo");
  r.add("v", 0, "acc", 1.0 / 3.0);
  r.add("v", 1, "acc", 2.0 / 3.0);
  r.add("v", 0, "wall_clock_seconds", 0.1, false);
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(j["experiment"], "demo");
  EXPECT_EQ(j["nondeterministic_metrics"][0], "wall_clock_seconds");
  EXPECT_EQ(j["variants"][0]["seeds"][1]["metrics"]["acc"].get<double>(), 2.0 / 3.0);
  EXPECT_EQ(j["variants"][0]["aggregate"]["acc"]["mean"].get<double>(), 0.5);
}

// ---------------------------------------------------------------------------
// config parsing

TEST(Config, DefaultsFilledIn) {
  const ExperimentConfig c = parse_config(R"({"experiment": "distill", "seeds": [3], "dataset": {}})");
  EXPECT_EQ(c.kind, ExperimentKind::kDistill);
  EXPECT_EQ(c.dataset.n_train, 2000);
  EXPECT_EQ(c.dataset.dim, 20);
  EXPECT_EQ(c.teacher.spec.hidden_dims, (std::vector<int>{64, 64}));
  EXPECT_EQ(c.teacher.epochs, 60);
  EXPECT_EQ(c.distill.student.spec.hidden_dims, std::vector<int>{16});
  EXPECT_EQ(c.distill.student.epochs, 40);
  EXPECT_EQ(c.distill.num_snapshots, 5);
  EXPECT_EQ(c.distill.loss.alpha, 0.5);
  EXPECT_EQ(c.distill.loss.tau, 5.0);
  EXPECT_EQ(c.distill.strategy.kind, WeightKind::kAttention);
  EXPECT_EQ(c.m_values, std::vector<int>{5});
}

TEST(Config, ErrorsAreConfigErrors) {
  const char* bad[] = {
      "{not json",
      R"({"experiment": "distill", "seeds": [0], "dataset": {}, "bogus": 1})",
      R"({"experiment": "nope", "seeds": [0], "dataset": {}})",
      R"({"experiment": "distill", "seeds": [], "dataset": {}})",
      R"({"experiment": "distill", "dataset": {}})",
      R"({"experiment": "distill", "seeds": [0]})",
      R"({"experiment": "distill", "seeds": [0], "dataset": {"n_train": 10, "n_test": 1}})",
      R"({"experiment": "distill", "seeds": [0], "dataset": {}, "distill": {"tau": 0}})",
      R"({"experiment": "distill", "seeds": [0], "dataset": {}, "distill": {"alpha": 2}})",
      R"({"experiment": "distill", "seeds": [0], "dataset": {}, "distill": {"strategy": "max"}})",
      R"({"experiment": "distill", "seeds": [0], "dataset": {}, "distill": {"cache_targets": true}})",
      R"({"experiment": "distill", "seeds": [0], "dataset": {}, "teacher": {"epochs": "ten"}})",
      R"({"experiment": "distill", "seeds": [0], "dataset": {}, "teacher": {"schedule": "cyclic-cosine"}})",
      R"({"experiment": "principle3", "seeds": [0], "dataset": {}})",
      R"({"experiment": "principle1", "seeds": [0], "dataset": {}, "teacher": {"epochs": 62}})",
      R"({"experiment": "distill", "seeds": [0], "dataset": {"kind": "idx", "train_images": "x",
          "train_labels": "x", "test_images": "x", "test_labels": "x"}})",
  };
  for (const char* text : bad) EXPECT_THROW(parse_config(text), ConfigError) << text;
}

// ---------------------------------------------------------------------------
// experiments on tiny configs

TEST(Experiments, Principle2ReportsEveryStrategy) {
  const Report r = run_experiment(tiny("principle2"));
  EXPECT_EQ(r.variants(), (std::vector<std::string>{"attention", "linear-decrease", "linear-increase",
                                                    "mean"}));
  for (const auto& v : {"attention", "mean"}) {
    const double acc = row_value(r, v, 1, "teacher_acc");
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
  }
}

TEST(Experiments, Principle1ReportsThreeVariants) {
  const Report r = run_experiment(tiny("principle1"));
  EXPECT_EQ(r.variants(), (std::vector<std::string>{"cycle-ensemble", "nocycle-ensemble", "single-teacher"}));
}

TEST(Experiments, Principle3CostGrowsOnlyInDistillation) {
  const Report r = run_experiment(tiny("principle3", R"(, "m_values": [1, 2, 4])"));
  EXPECT_EQ(r.variants(), (std::vector<std::string>{"M01", "M02", "M04"}));
  for (std::uint64_t seed : {0, 1}) {
    EXPECT_EQ(row_value(r, "M01", seed, "teacher_train_forwards"), 4 * 120);
    EXPECT_EQ(row_value(r, "M04", seed, "teacher_train_forwards"), 4 * 120);
    EXPECT_EQ(row_value(r, "M04", seed, "distill_teacher_forwards"), 4 * 2 * 120);
  }
}

TEST(Experiments, SedCompareSingleModelsCoincide) {
  const Report r = run_experiment(tiny("sed-compare", R"(, "m_values": [1, 2])"));
  for (std::uint64_t seed : {0, 1}) {
    EXPECT_EQ(row_value(r, "eekd-M01", seed, "student_acc"), row_value(r, "sed-M01", seed, "student_acc"));
    EXPECT_EQ(row_value(r, "sed-M02", seed, "teacher_train_forwards"),
              2 * row_value(r, "eekd-M02", seed, "teacher_train_forwards"));
  }
}

TEST(Experiments, TrainTeacherWritesLoadableCheckpoints) {
  const fs::path dir = fresh_dir("teacher");
  ExperimentConfig c = tiny("train-teacher", R"(, "save_checkpoints": true)");
  c.output_dir = dir;
  const Report r = run_experiment(c);
  const Checkpoint ck = load_checkpoint(dir / "checkpoints" / "seed-1" / "epoch-004.eekd");
  EXPECT_EQ(ck.epoch, 4);
  EXPECT_EQ(ck.teacher_seed, 2u);
  EXPECT_EQ(row_value(r, "teacher", 1, "snapshot_e004_acc"), row_value(r, "teacher", 1, "teacher_acc"));
  EXPECT_TRUE(fs::exists(dir / "checkpoints" / "seed-0" / "epoch-002.eekd"));
}

TEST(Experiments, DistillAndSedVariants) {
  EXPECT_EQ(run_experiment(tiny("distill")).variants(),
            (std::vector<std::string>{"eekd-M02", "kd", "student"}));
  EXPECT_EQ(run_experiment(tiny("sed")).variants(), std::vector<std::string>{"sed-M02"});
}

// ---------------------------------------------------------------------------
// run() and the CLI

TEST(Run, MalformedConfigExitsOneWithoutOutput) {
  const fs::path dir = fresh_dir("malformed");
  const fs::path cfg = write_config(dir, "{\"experiment\": ");
  RunOptions o{cfg, std::nullopt, dir / "out", true};
  EXPECT_EQ(run(o), 1);
  EXPECT_FALSE(fs::exists(dir / "out"));
  o.config = dir / "missing.json";
  EXPECT_EQ(run(o), 1);
}

TEST(Run, WritesCsvAndJsonThatAgree) {
  const fs::path dir = fresh_dir("agree");
  const fs::path cfg = write_config(dir, tiny_config("distill"));
  ASSERT_EQ(run({cfg, 7, dir / "out", true}), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  std::istringstream csv(slurp(dir / "out" / "report.csv"));
  std::string line;
  std::getline(csv, line);
  int checked = 0;
  while (std::getline(csv, line)) {
    line.pop_back();
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    ASSERT_EQ(f.size(), 6u);
    if (f[2] == "mean" || f[2] == "std") continue;
    EXPECT_EQ(f[2], "7");
    bool found = false;
    for (const auto& v : j["variants"])
      if (v["variant"] == f[1]) {
        EXPECT_EQ(v["seeds"][0]["metrics"][f[3]].get<double>(), std::stod(f[4])) << line;
        found = true;
      }
    EXPECT_TRUE(found) << line;
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = fresh_dir("cli");
  const std::string cli = EEKD_CLI_PATH;
  EXPECT_NE(std::system((cli + " > /dev/null 2>&1").c_str()), 0);
  write_config(dir, R"({"experiment": "distill", "seeds": [0], "dataset": {}, "extra": 1})");
  const int rc = std::system((cli + " run --quiet --config " + (dir / "config.json").string() + " 2>/dev/null").c_str());
  EXPECT_EQ(WEXITSTATUS(rc), 1);
  write_config(dir, tiny_config("sed"));
  const std::string ok = "EEKD_OUT=" + (dir / "out").string() + " " + cli + " run --quiet --seed-override 3 --config " +
                         (dir / "config.json").string();
  EXPECT_EQ(WEXITSTATUS(std::system(ok.c_str())), 0);
  EXPECT_NE(slurp(dir / "out" / "report.csv").find("sed,sed-M02,3,student_acc,"), std::string::npos);
}
