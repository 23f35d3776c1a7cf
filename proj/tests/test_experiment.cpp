#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/experiment.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace don;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("don_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("sample tool writes jsonl with latent coefficients") {
  auto out = fresh_dir("sample");
  json cfg = {{"tool", "sample"},
              {"measure", {{"family", "shiftedSine"}, {"dim", 1}}},
              {"count", 3},
              {"gridN", 16},
              {"seed", 5}};
  run_tool(cfg.dump(), out.string());
  std::istringstream lines(slurp(out / "samples.jsonl"));
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    json row = json::parse(line);
    CHECK(row["values"].size() == 16);
    CHECK(row["latent"].size() == 1);
    ++rows;
  }
  CHECK(rows == 3);
  json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["tool"] == "sample");
  CHECK(manifest["seed"] == 5);
}

TEST_CASE("oracle tool dumps (u, Gu) pairs") {
  auto out = fresh_dir("oracle");
  json cfg = {{"tool", "oracle"},
              {"operator", {{"kind", "burgers"}, {"T", 0.5}, {"gridN", 64}}},
              {"measure", {{"family", "shiftedSine"}, {"dim", 1}}},
              {"count", 2},
              {"seed", 1}};
  run_tool(cfg.dump(), out.string());
  std::istringstream lines(slurp(out / "dataset.jsonl"));
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) {
    json row = json::parse(line);
    CHECK(row["u"].size() == 64);
    CHECK(row["Gu"].size() == 64);
    CHECK(row["meta"]["operator"] == "burgers");
    ++rows;
  }
  CHECK(rows == 2);
}

TEST_CASE("encdec-error tool emits the bound column and is rerun-stable") {
  auto out1 = fresh_dir("encdec1");
  auto out2 = fresh_dir("encdec2");
  json cfg = {{"tool", "encdec-error"},
              {"measure", {{"family", "gaussianKernel"}, {"ell", 0.5}, {"dim", 1}}},
              {"mList", {5, 9}},
              {"Nmc", 40},
              {"seed", 3}};
  run_tool(cfg.dump(), out1.string());
  run_tool(cfg.dump(), out2.string());
  std::string csv1 = slurp(out1 / "encdec_error.csv");
  CHECK(csv1 == slurp(out2 / "encdec_error.csv"));  // byte-identical bodies
  CHECK(csv1.rfind("config_hash,seed,m,estimate,stderr,bound,status", 0) == 0);
  // decimal-point formatting only
  CHECK(csv1.find(',') != std::string::npos);
  CHECK(csv1.find(';') == std::string::npos);
}

TEST_CASE("spectrum tool: k, lambda_k, lower_bound_p columns") {
  auto out = fresh_dir("spectrum");
  json cfg = {{"tool", "spectrum"},
              {"measure", {{"family", "shiftedSine"}, {"dim", 1}}},
              {"count", 64},
              {"p", 4},
              {"gridN", 32},
              {"seed", 2}};
  run_tool(cfg.dump(), out.string());
  std::string csv = slurp(out / "spectrum.csv");
  CHECK(csv.rfind("config_hash,seed,k,lambda_k,lower_bound_p", 0) == 0);
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 5);  // header + 4 rows
}

TEST_CASE("train then evaluate round trip through checkpoints") {
  auto out = fresh_dir("train");
  json cfg = {{"tool", "train"},
              {"operator", {{"kind", "pendulum"}, {"T", 1.0}, {"steps", 48}, {"inputN", 9}}},
              {"measure",
               {{"family", "paramFourier"},
                {"alphaDecay", {{"C", 0.4}, {"ell", 1.0}}},
                {"K", 3},
                {"dim", 1}}},
              {"arch", {{"sensors", 9}, {"p", 3}, {"branchWidth", 12}, {"trunkWidth", 12}}},
              {"train", {{"Nu", 16}, {"Ny", 4}, {"epochs", 8}, {"batch", 8}}},
              {"seed", 4}};
  run_tool(cfg.dump(), out.string());
  CHECK(fs::exists(out / "checkpoint.json"));
  CHECK(fs::exists(out / "history.csv"));

  DeepOnet net = deeponet_from_json(slurp(out / "checkpoint.json"));
  CHECK(net.p() == 3);
  CHECK(net.sensors.count() == 9);

  auto out2 = fresh_dir("evaluate");
  json ecfg = {{"tool", "evaluate"},
               {"operator", cfg["operator"]},
               {"measure", cfg["measure"]},
               {"checkpoint", (out / "checkpoint.json").string()},
               {"Nmc", 16},
               {"seed", 9}};
  run_tool(ecfg.dump(), out2.string());
  json rep = json::parse(slurp(out2 / "report.json"));
  CHECK(rep["total"].get<double>() >= 0.0);
  CHECK(rep["samples"] == 16);
}

TEST_CASE("experiment: encoding sweep rows carry hash and seed; reruns identical") {
  auto out1 = fresh_dir("exp1");
  auto out2 = fresh_dir("exp2");
  json cfg = {{"tool", "experiment"},
              {"experiment", "encodingSweep"},
              {"measure", {{"family", "gaussianKernel"}, {"ell", 0.5}, {"dim", 1}}},
              {"sweep", {{"m", {5, 9}}}},
              {"Nmc", 30},
              {"seeds", {11, 12}},
              {"seed", 11}};
  run_tool(cfg.dump(), out1.string(), 2);
  run_tool(cfg.dump(), out2.string(), 1);  // thread count must not matter
  std::string csv = slurp(out1 / "experiment.csv");
  CHECK(csv == slurp(out2 / "experiment.csv"));
  std::string hash = config_hash(json::parse(cfg.dump()).dump());
  CHECK(csv.find(hash) != std::string::npos);
  CHECK(csv.find("11,5,") != std::string::npos);
  CHECK(csv.find("12,9,") != std::string::npos);
}

TEST_CASE("experiment: pushforward spectrum study through an operator") {
  auto out = fresh_dir("specstudy");
  json cfg = {{"tool", "experiment"},
              {"experiment", "spectrumStudy"},
              {"operator", {{"kind", "burgers"}, {"T", 1.0}, {"gridN", 64}}},
              {"measure", {{"family", "shiftedSine"}, {"dim", 1}}},
              {"count", 48},
              {"p", 4},
              {"seeds", {4}},
              {"seed", 4}};
  run_tool(cfg.dump(), out.string());
  std::string csv = slurp(out / "experiment.csv");
  std::istringstream lines(csv);
  std::string header, r1;
  std::getline(lines, header);
  std::getline(lines, r1);
  CHECK(header.find("lambda_k,lower_bound_p") != std::string::npos);
  CHECK(r1.find(",ok") != std::string::npos);
}

TEST_CASE("encdec-error tool with the pseudoinverse decoder") {
  auto out = fresh_dir("encdec_pinv");
  json cfg = {{"tool", "encdec-error"},
              {"measure", {{"family", "gaussianKernel"}, {"ell", 0.5}, {"dim", 1}}},
              {"decoder", "pseudoinverse"},
              {"mEig", 4},
              {"M", 64},
              {"mList", {4}},
              {"Nmc", 24},
              {"seed", 12}};
  run_tool(cfg.dump(), out.string());
  std::string csv = slurp(out / "encdec_error.csv");
  CHECK(csv.find(",ok") != std::string::npos);
  // no closed-form bound column for this decoder
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(row.find(",,ok") != std::string::npos);
}

TEST_CASE("experiment: emulation check row flags exactness") {
  auto out = fresh_dir("emu");
  json cfg = {{"tool", "experiment"},
              {"experiment", "emulationCheck"},
              {"sweep", {{"m", {9}}, {"n", {3}}, {"eps", {1e-2}}}},
              {"dt", 0.05},
              {"trials", 3},
              {"seeds", {7}},
              {"seed", 7}};
  run_tool(cfg.dump(), out.string());
  std::string csv = slurp(out / "experiment.csv");
  // exact_flag column equals 1
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(row.find(",ok") != std::string::npos);
  CHECK(row.find(",1,") != std::string::npos);
}

TEST_CASE("config errors: empty sweep and bad tool report as invalid") {
  auto out = fresh_dir("bad");
  json cfg = {{"tool", "experiment"},
              {"experiment", "encodingSweep"},
              {"measure", {{"family", "gaussianKernel"}, {"ell", 0.5}, {"dim", 1}}},
              {"sweep", {{"m", json::array()}}},
              {"seed", 1}};
  CHECK_THROWS_AS(run_tool(cfg.dump(), out.string()), InvalidArgument);
  CHECK(!fs::exists(out / "experiment.csv"));  // no files written on usage errors

  CHECK_THROWS_AS(run_tool("{\"tool\":\"nope\"}", out.string()), InvalidArgument);
  CHECK_THROWS_AS(run_tool("not json", out.string()), InvalidArgument);
}

TEST_CASE("experiment: pendulum rows carry the full error report; failures recorded per row") {
  auto out = fresh_dir("pend_exp");
  json cfg = {{"tool", "experiment"},
              {"experiment", "pendulum"},
              {"operator", {{"kind", "pendulum"}, {"T", 1.0}, {"steps", 48}, {"inputN", 9}}},
              {"measure",
               {{"family", "paramFourier"},
                {"alphaDecay", {{"C", 0.4}, {"ell", 1.0}}},
                {"K", 3},
                {"dim", 1}}},
              {"arch", {{"branchWidth", 12}, {"trunkWidth", 12}}},
              {"train", {{"epochs", 6}, {"batch", 8}}},
              // second sweep point has an even sensor count: the DFT-decoder
              // based decomposition rejects it, the run must continue
              {"sweep", {{"m", {9, 8}}, {"p", {3}}, {"Nu", {12}}, {"Ny", {4}}}},
              {"Nmc", 12},
              {"seeds", {5}},
              {"seed", 5}};
  run_tool(cfg.dump(), out.string(), 2);
  std::string csv = slurp(out / "experiment.csv");
  std::istringstream lines(csv);
  std::string header, row_ok, row_bad;
  std::getline(lines, header);
  std::getline(lines, row_ok);
  std::getline(lines, row_bad);
  CHECK(header.find("total,total_stderr,total_l1,encoding,approximation,reconstruction") !=
        std::string::npos);
  CHECK(row_ok.find(",ok") != std::string::npos);
  CHECK(row_bad.find("failed:") != std::string::npos);
}

TEST_CASE("experiment: linearFunctional sweep decays with sensor count") {
  auto out = fresh_dir("linf_exp");
  json cfg = {{"tool", "experiment"},
              {"experiment", "linearFunctional"},
              {"operator", {{"kind", "integralFunctional"}, {"gridN", 33}}},
              {"measure", {{"family", "gaussianKernel"}, {"ell", 1.2}, {"dim", 2}}},
              {"sweep", {{"m", {4, 32}}}},
              {"NuTrain", 400},
              {"NuTest", 400},
              {"seeds", {3}},
              {"seed", 3}};
  run_tool(cfg.dump(), out.string());
  std::string csv = slurp(out / "experiment.csv");
  std::istringstream lines(csv);
  std::string header, r1, r2;
  std::getline(lines, header);
  std::getline(lines, r1);
  std::getline(lines, r2);
  auto test_mse = [](const std::string& row) {
    // columns: hash,seed,m,train_mse,test_mse,status
    std::size_t p = row.rfind(",ok");
    REQUIRE(p != std::string::npos);
    std::size_t q = row.rfind(',', p - 1);
    return std::stod(row.substr(q + 1, p - q - 1));
  };
  CHECK(test_mse(r2) < test_mse(r1));
}

TEST_CASE("emulate tool writes the exactness row") {
  auto out = fresh_dir("emulate_tool");
  json cfg = {{"tool", "emulate"}, {"m", 9},      {"n", 3},    {"dt", 0.05},
              {"eps", 1e-2},       {"trials", 3}, {"seed", 2}};
  run_tool(cfg.dump(), out.string());
  std::string csv = slurp(out / "emulate.csv");
  CHECK(csv.find("max_dev,exact_flag") != std::string::npos);
  CHECK(csv.find(",1,") != std::string::npos);
}

TEST_CASE("evaluate with decomposition reports all error components") {
  auto out = fresh_dir("train_decomp");
  json cfg = {{"tool", "train"},
              {"operator", {{"kind", "pendulum"}, {"T", 1.0}, {"steps", 48}, {"inputN", 9}}},
              {"measure",
               {{"family", "paramFourier"},
                {"alphaDecay", {{"C", 0.4}, {"ell", 1.0}}},
                {"K", 3},
                {"dim", 1}}},
              {"arch", {{"sensors", 9}, {"p", 3}, {"branchWidth", 12}, {"trunkWidth", 12}}},
              {"train", {{"Nu", 12}, {"Ny", 4}, {"epochs", 6}, {"batch", 8}}},
              {"seed", 6}};
  run_tool(cfg.dump(), out.string());
  auto out2 = fresh_dir("eval_decomp");
  json ecfg = {{"tool", "evaluate"},
               {"operator", cfg["operator"]},
               {"measure", cfg["measure"]},
               {"checkpoint", (out / "checkpoint.json").string()},
               {"decomposition", true},
               {"Nmc", 12},
               {"seed", 8}};
  run_tool(ecfg.dump(), out2.string());
  json rep = json::parse(slurp(out2 / "report.json"));
  for (const char* key : {"total", "encoding", "approximation", "reconstruction",
                          "spectralLower", "lipR", "lipRP"})
    CHECK(rep[key].get<double>() >= 0.0);
  CHECK(rep["total"].get<double>() + 4.0 * rep["totalStderr"].get<double>() >=
        rep["spectralLower"].get<double>());
}

TEST_CASE("deeponet checkpoint json round trip with analytic trunk") {
  Grid yg = Grid::torus(16, 1);
  DeepOnet net;
  net.sensors = SensorSet::equispaced(5, 1);
  Rng rng(3);
  net.branch = Mlp::he_init({5, 8, 2}, rng);
  net.trunk = Trunk::analytic(analytic_trunk(TrunkBasis::Source::Fourier, 2, yg));
  DeepOnet back = deeponet_from_json(deeponet_to_json(net));
  MeasureSpec ms;
  ms.family = MeasureSpec::Family::ShiftedSine;
  Rng r2(8);
  FieldSample u = sample(ms, Grid::torus(32, 1), r2);
  auto a = net.eval_grid(u);
  auto b = back.eval_grid(u);
  for (std::size_t q = 0; q < a.size(); ++q) CHECK(a[q] == doctest::Approx(b[q]).epsilon(1e-14));
}
