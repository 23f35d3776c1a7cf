#include "core/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/gadgets.hpp"
#include "json.hpp"

namespace don {

using nlohmann::json;
namespace fs = std::filesystem;

const char* version() { return "0.1.0"; }

std::string config_hash(const std::string& canonical_json) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical_json) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw NumericalError("cannot open output file " + p.string());
  out << content;
}

json measure_json(const MeasureSpec& m) { return json::parse(m.to_json()); }

std::vector<bool> mask_from_json(const json& j, const Grid& g) {
  if (j.is_string()) {
    std::string tag = j.get<std::string>();
    std::vector<bool> mask(g.size(), false);
    if (tag == "lowerTriangle") {
      for (std::size_t q = 0; q < g.size(); ++q) {
        auto p = g.point_at(q);
        mask[q] = p[1] < p[0];
      }
      return mask;
    }
    if (tag == "all") {
      mask.assign(g.size(), true);
      return mask;
    }
    throw InvalidArgument("unknown mask tag '" + tag + "'");
  }
  auto v = j.get<std::vector<int>>();
  require(v.size() == g.size(), "mask length does not match grid");
  std::vector<bool> mask(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) mask[i] = v[i] != 0;
  return mask;
}

}  // namespace

std::unique_ptr<Operator> operator_from_json(const std::string& text) {
  json j = json::parse(text);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "pendulum") {
    return std::make_unique<PendulumOperator>(j.value("gamma", 1.0), j.value("T", 1.0),
                                              j.value("steps", 256), j.value("inputN", 33));
  }
  if (kind == "elliptic") {
    int n = j.value("gridN", 64);
    Grid g = Grid::torus(n, 1);
    std::vector<double> rhs(g.size());
    std::string tag = j.value("rhs", "cosx");
    for (std::size_t q = 0; q < g.size(); ++q) {
      double x = g.point_at(q)[0];
      if (tag == "cosx")
        rhs[q] = std::cos(x);
      else if (tag == "sinx")
        rhs[q] = std::sin(x);
      else
        throw InvalidArgument("elliptic rhs tag must be cosx or sinx");
    }
    return std::make_unique<EllipticOperator>(FieldSample(g, rhs), j.value("tol", 1e-10));
  }
  if (kind == "allenCahn") {
    return std::make_unique<AllenCahnOperator>(j.value("T", 0.5), j.value("dt", 0.01),
                                               j.value("gridN", 64));
  }
  if (kind == "burgers") {
    return std::make_unique<BurgersOperator>(j.value("T", kTwoPi / 4.0), j.value("gridN", 256),
                                             j.value("cfl", 0.9), j.value("exact", true));
  }
  if (kind == "integralFunctional") {
    int n = j.value("gridN", 65);
    Grid g = Grid::torus(n, 2);
    auto mask = mask_from_json(j.contains("mask") ? j["mask"] : json("lowerTriangle"), g);
    return std::make_unique<IntegralFunctionalOperator>(g, std::move(mask));
  }
  throw InvalidArgument("unknown operator kind '" + kind + "'");
}

std::string deeponet_to_json(const DeepOnet& net) {
  json j;
  j["branch"] = json::parse(net.branch.to_json());
  j["cellAverage"] = net.cell_average_encoder;
  json sens;
  sens["dim"] = net.sensors.dim;
  sens["kind"] = net.sensors.kind == SensorSet::Kind::Equispaced  ? "equispaced"
                 : net.sensors.kind == SensorSet::Kind::Random    ? "random"
                                                                  : "cellCenters";
  sens["dx"] = net.sensors.dx;
  json locs = json::array();
  for (const auto& x : net.sensors.locations) locs.push_back({x[0], x[1]});
  sens["locations"] = locs;
  j["sensors"] = sens;

  json trunk;
  json grid;
  const Grid& g = net.trunk.ygrid;
  grid["kind"] = g.kind == DomainKind::Torus ? "torus" : g.kind == DomainKind::Interval ? "interval" : "point";
  grid["n"] = g.n;
  grid["dim"] = g.dim;
  grid["extent"] = g.extent;
  trunk["ygrid"] = grid;
  if (net.trunk.kind == Trunk::Kind::Neural) {
    trunk["kind"] = "neural";
    trunk["net"] = json::parse(net.trunk.net.to_json());
  } else {
    trunk["kind"] = "analytic";
    trunk["source"] = net.trunk.basis.source == TrunkBasis::Source::Fourier    ? "fourier"
                      : net.trunk.basis.source == TrunkBasis::Source::Legendre ? "legendre"
                      : net.trunk.basis.source == TrunkBasis::Source::Pca      ? "pca"
                                                                               : "neural";
    trunk["bias"] = net.trunk.basis.bias;
    trunk["members"] = net.trunk.basis.members;
  }
  j["trunk"] = trunk;
  return j.dump();
}

namespace {

Grid grid_from_json(const json& g) {
  std::string kind = g.value("kind", "torus");
  if (kind == "torus") return Grid::torus(g.value("n", 64), g.value("dim", 1));
  if (kind == "interval") return Grid::interval(g.value("n", 65), g.value("extent", 1.0));
  return Grid::point();
}

}  // namespace

DeepOnet deeponet_from_json(const std::string& text) {
  json j = json::parse(text);
  DeepOnet net;
  net.branch = Mlp::from_json(j.at("branch").dump());
  net.cell_average_encoder = j.value("cellAverage", false);
  const json& sens = j.at("sensors");
  std::string skind = sens.value("kind", "equispaced");
  net.sensors.kind = skind == "random"        ? SensorSet::Kind::Random
                     : skind == "cellCenters" ? SensorSet::Kind::CellCenters
                                              : SensorSet::Kind::Equispaced;
  net.sensors.dim = sens.value("dim", 1);
  net.sensors.dx = sens.value("dx", 0.0);
  for (const auto& x : sens.at("locations"))
    net.sensors.locations.push_back({x[0].get<double>(), x[1].get<double>()});

  const json& trunk = j.at("trunk");
  Grid ygrid = grid_from_json(trunk.at("ygrid"));
  if (trunk.at("kind").get<std::string>() == "neural") {
    net.trunk = Trunk::neural(Mlp::from_json(trunk.at("net").dump()), ygrid);
  } else {
    TrunkBasis basis;
    basis.ygrid = ygrid;
    std::string src = trunk.value("source", "fourier");
    basis.source = src == "legendre" ? TrunkBasis::Source::Legendre
                   : src == "pca"    ? TrunkBasis::Source::Pca
                   : src == "neural" ? TrunkBasis::Source::Neural
                                     : TrunkBasis::Source::Fourier;
    basis.bias = trunk.at("bias").get<std::vector<double>>();
    basis.members = trunk.at("members").get<std::vector<std::vector<double>>>();
    net.trunk = Trunk::analytic(std::move(basis));
  }
  return net;
}

// ---- tool runners ---------------------------------------------------------

namespace {

struct ToolContext {
  json cfg;
  fs::path out;
  std::string hash;
  std::uint64_t seed = 0;
  int threads = 1;
};

std::string manifest(const ToolContext& ctx, const std::vector<std::string>& files) {
  json m;
  m["tool"] = ctx.cfg.value("tool", "");
  m["configHash"] = ctx.hash;
  m["seed"] = ctx.seed;
  m["version"] = version();
  m["files"] = files;
  m["createdAt"] = static_cast<long long>(std::time(nullptr));
  m["config"] = ctx.cfg;
  std::string text = m.dump(2);
  write_file(ctx.out / "manifest.json", text);
  return text;
}

MeasureSpec measure_from_cfg(const json& cfg, const char* key = "measure") {
  require(cfg.contains(key), std::string("config missing '") + key + "'");
  return MeasureSpec::from_json(cfg.at(key).dump());
}

std::string run_sample(ToolContext& ctx) {
  MeasureSpec m = measure_from_cfg(ctx.cfg);
  int count = ctx.cfg.value("count", 8);
  int grid_n = ctx.cfg.value("gridN", 64);
  require(count >= 1, "sample: count >= 1");
  Grid g = Grid::torus(grid_n, m.dim);
  std::ostringstream os;
  for (int i = 0; i < count; ++i) {
    Rng rng(ctx.seed, static_cast<std::uint64_t>(i));
    FieldSample f = sample(m, g, rng);
    json row;
    row["values"] = f.values;
    if (f.latent) row["latent"] = *f.latent;
    os << row.dump() << "\n";
  }
  write_file(ctx.out / "samples.jsonl", os.str());
  return manifest(ctx, {"samples.jsonl"});
}

std::string run_oracle(ToolContext& ctx) {
  MeasureSpec m = measure_from_cfg(ctx.cfg);
  auto op = operator_from_json(ctx.cfg.at("operator").dump());
  int count = ctx.cfg.value("count", 8);
  require(count >= 1, "oracle: count >= 1");
  std::ostringstream os;
  for (int i = 0; i < count; ++i) {
    Rng rng(ctx.seed, static_cast<std::uint64_t>(i));
    FieldSample u = sample(m, op->input_grid(), rng);
    FieldSample gu = op->apply(u);
    json row;
    row["u"] = u.values;
    row["Gu"] = gu.values;
    json meta;
    meta["seed"] = ctx.seed;
    meta["index"] = i;
    meta["operator"] = op->name();
    if (u.latent) meta["latent"] = *u.latent;
    row["meta"] = meta;
    os << row.dump() << "\n";
  }
  write_file(ctx.out / "dataset.jsonl", os.str());
  return manifest(ctx, {"dataset.jsonl"});
}

std::string run_encdec_error(ToolContext& ctx) {
  MeasureSpec m = measure_from_cfg(ctx.cfg);
  std::vector<int> ms = ctx.cfg.value("mList", std::vector<int>{5, 9, 17, 33});
  int nmc = ctx.cfg.value("Nmc", 2000);
  std::string dec = ctx.cfg.value("decoder", "dft");
  std::ostringstream csv;
  csv << "config_hash,seed,m,estimate,stderr,bound,status\n";
  for (int mm : ms) {
    csv << ctx.hash << "," << ctx.seed << "," << mm << ",";
    try {
      EncDecPair pair;
      double bound = std::nan("");
      if (dec == "dft") {
        pair = dft_pair(mm);
        if (m.family == MeasureSpec::Family::GaussianKernel && m.dim == 1)
          bound = std::sqrt(2.0 * kTwoPi * std::erfc((mm / 2) * m.ell / std::sqrt(2.0)));
      } else if (dec == "pseudoinverse") {
        // the swept m is the retained eigenmode count; default sensor count
        // follows the 4 |D| m omega^2 log m rule
        int m_eig = mm;
        auto basis = std::make_shared<GaussianKernelBasis>(m.ell, m.effective_truncation(), m.dim);
        double omega_sq = 0.0;
        for (int j = 0; j < m_eig; ++j) {
          double sup = fourier_sup(enumerate_wavenumbers(m_eig, m.dim)[j]);
          omega_sq = std::max(omega_sq, sup * sup);
        }
        double domain = m.dim == 2 ? kTwoPi * kTwoPi : kTwoPi;
        int M = ctx.cfg.value(
            "M", static_cast<int>(std::ceil(4.0 * domain * m_eig * omega_sq *
                                            std::log(std::max(2.0, double(m_eig))))));
        Rng srng(ctx.seed, 0xABCDEF);
        auto sensors = SensorSet::random(M, m.dim, srng);
        pair = pseudoinverse_pair(basis, m_eig, sensors);
      } else {
        throw InvalidArgument("encdec-error: decoder must be dft or pseudoinverse");
      }
      int refn = ctx.cfg.value("refGridN", 4 * std::max(mm, 2 * m.effective_truncation()) + 1);
      auto est = encoding_error_mc(m, pair, nmc, ctx.seed, Grid::torus(refn, m.dim));
      csv << fmt(est.value) << "," << fmt(est.stderr_) << ","
          << (std::isnan(bound) ? "" : fmt(bound)) << ",ok\n";
    } catch (const std::exception& e) {
      csv << ",,," << "failed:" << e.what() << "\n";
    }
  }
  write_file(ctx.out / "encdec_error.csv", csv.str());
  return manifest(ctx, {"encdec_error.csv"});
}

std::string run_spectrum(ToolContext& ctx) {
  MeasureSpec m = measure_from_cfg(ctx.cfg);
  int count = ctx.cfg.value("count", 256);
  int p = ctx.cfg.value("p", 16);
  std::unique_ptr<Operator> op;
  if (ctx.cfg.contains("operator")) op = operator_from_json(ctx.cfg.at("operator").dump());
  Grid g = op ? op->input_grid() : Grid::torus(ctx.cfg.value("gridN", 256), m.dim);
  std::vector<FieldSample> push;
  push.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng rng(ctx.seed, static_cast<std::uint64_t>(i));
    FieldSample u = sample(m, g, rng);
    push.push_back(op ? op->apply(u) : std::move(u));
  }
  SpectrumEstimate spec = empirical_spectrum(push, p);
  std::ostringstream csv;
  csv << "config_hash,seed,k,lambda_k,lower_bound_p\n";
  for (int k = 0; k < p; ++k) {
    csv << ctx.hash << "," << ctx.seed << "," << (k + 1) << "," << fmt(spec.eigenvalues[k]) << ","
        << fmt(std::sqrt(spec.tail_sum(k + 1))) << "\n";
  }
  write_file(ctx.out / "spectrum.csv", csv.str());
  return manifest(ctx, {"spectrum.csv"});
}

DeepOnet build_net_from_cfg(const json& cfg, const Operator& op, std::uint64_t seed) {
  json arch = cfg.value("arch", json::object());
  int m = arch.value("sensors", 17);
  int p = arch.value("p", 8);
  int bw = arch.value("branchWidth", 128);
  int tw = arch.value("trunkWidth", 128);
  std::string trunk_kind = arch.value("trunk", "neural");
  bool cell_avg = arch.value("cellAverage", false);

  DeepOnet net;
  net.cell_average_encoder = cell_avg;
  Grid in = op.input_grid();
  if (cell_avg)
    net.sensors = SensorSet::cell_centers(m);
  else
    net.sensors = SensorSet::equispaced(m, in.dim);
  Rng rng(seed, 0xA11CE);
  int m_eff = net.sensors.count();
  net.branch = Mlp::he_init({m_eff, bw, bw, p}, rng);
  if (trunk_kind == "neural") {
    net.trunk = Trunk::neural(Mlp::he_init({1, tw, tw, p + 1}, rng), op.output_grid());
  } else if (trunk_kind == "fourier") {
    net.trunk = Trunk::analytic(analytic_trunk(TrunkBasis::Source::Fourier, p, op.output_grid()));
  } else if (trunk_kind == "legendre") {
    net.trunk = Trunk::analytic(analytic_trunk(TrunkBasis::Source::Legendre, p, op.output_grid()));
  } else {
    throw InvalidArgument("arch.trunk must be neural, fourier or legendre");
  }
  return net;
}

TrainConfig train_cfg_from_json(const json& cfg, std::uint64_t seed) {
  json t = cfg.value("train", json::object());
  TrainConfig tc;
  tc.n_samples = t.value("Nu", 128);
  tc.n_y = t.value("Ny", 8);
  tc.y_sampling = t.value("ySampling", "random") == "quadrature" ? YSampling::Quadrature
                                                                 : YSampling::RandomUniform;
  tc.epochs = t.value("epochs", 200);
  tc.batch = t.value("batch", 32);
  tc.lr = t.value("lr", 1e-3);
  tc.seed = seed;
  return tc;
}

std::string run_train(ToolContext& ctx) {
  MeasureSpec m = measure_from_cfg(ctx.cfg);
  auto op = operator_from_json(ctx.cfg.at("operator").dump());
  DeepOnet net = build_net_from_cfg(ctx.cfg, *op, ctx.seed);
  TrainConfig tc = train_cfg_from_json(ctx.cfg, ctx.seed);
  DonDataset data = make_dataset(*op, m, net.sensors, net.cell_average_encoder, tc.n_samples,
                                 tc.n_y, tc.y_sampling, ctx.seed + 1);
  int test_n = ctx.cfg.value("testSamples", std::max(16, tc.n_samples / 4));
  DonDataset test = make_dataset(*op, m, net.sensors, net.cell_average_encoder, test_n, tc.n_y,
                                 tc.y_sampling, ctx.seed ^ 0x7e57ULL);
  TrainHistory hist = train(net, data, tc, &test);
  write_file(ctx.out / "checkpoint.json", deeponet_to_json(net));
  std::ostringstream csv;
  csv << "config_hash,seed,epoch,train_loss,test_loss\n";
  for (std::size_t e = 0; e < hist.train_loss.size(); ++e)
    csv << ctx.hash << "," << ctx.seed << "," << e << "," << fmt(hist.train_loss[e]) << ","
        << fmt(hist.test_loss[e]) << "\n";
  write_file(ctx.out / "history.csv", csv.str());
  return manifest(ctx, {"checkpoint.json", "history.csv"});
}

std::string run_evaluate(ToolContext& ctx) {
  MeasureSpec m = measure_from_cfg(ctx.cfg);
  auto op = operator_from_json(ctx.cfg.at("operator").dump());
  std::string ck_path = ctx.cfg.at("checkpoint").get<std::string>();
  std::ifstream in(ck_path);
  if (!in) throw InvalidArgument("evaluate: cannot open checkpoint " + ck_path);
  std::stringstream ss;
  ss << in.rdbuf();
  DeepOnet net = deeponet_from_json(ss.str());
  int nmc = ctx.cfg.value("Nmc", 128);
  json rep;
  if (ctx.cfg.value("decomposition", false)) {
    require(net.sensors.count() % 2 == 1,
            "evaluate: error decomposition needs an odd sensor count (DFT decoder)");
    EncDecPair pair = dft_pair(net.sensors.count());
    ErrorReport r = error_decomposition(net, *op, m, pair, nmc, ctx.seed);
    rep["total"] = r.total.value;
    rep["totalStderr"] = r.total.stderr_;
    rep["totalL1"] = r.total_l1.value;
    rep["encoding"] = r.encoding.value;
    rep["approximation"] = r.approximation.value;
    rep["reconstruction"] = r.reconstruction.value;
    rep["spectralLower"] = r.spectral_lower;
    rep["lipG"] = r.lip_g;
    rep["lipR"] = r.lip_r;
    rep["lipRP"] = r.lip_rp;
    rep["upperBoundHolds"] = r.upper_bound_holds;
  } else {
    auto e2 = total_error_mc(net, *op, m, nmc, ctx.seed, ErrorNorm::L2);
    auto e1 = total_error_mc(net, *op, m, nmc, ctx.seed, ErrorNorm::L1);
    rep["total"] = e2.value;
    rep["totalStderr"] = e2.stderr_;
    rep["totalL1"] = e1.value;
    rep["totalL1Stderr"] = e1.stderr_;
  }
  rep["samples"] = nmc;
  write_file(ctx.out / "report.json", rep.dump(2));
  return manifest(ctx, {"report.json"});
}

std::string run_emulate(ToolContext& ctx) {
  int m = ctx.cfg.value("m", 33);
  int n = ctx.cfg.value("n", 10);
  double dt = ctx.cfg.value("dt", 0.05);
  double eps = ctx.cfg.value("eps", 1e-3);
  int trials = ctx.cfg.value("trials", 20);
  GadgetNet em = ac_emulator_net(m, n, dt, eps);
  GadgetNet cubic = cubic_net(eps);
  double max_dev = 0.0;
  double max_scheme_dev = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(ctx.seed, static_cast<std::uint64_t>(t));
    std::vector<double> u0(m);
    for (auto& v : u0) v = rng.uniform(-1.0, 1.0);
    auto net_out = em.net.forward(u0);
    auto ref = ac_emulator_reference(cubic, m, n, dt, u0);
    for (int i = 0; i < m; ++i) max_dev = std::max(max_dev, std::abs(net_out[i] - ref[i]));
    auto exact = solve_allen_cahn(u0, dt, n);
    for (int i = 0; i < m; ++i)
      max_scheme_dev = std::max(max_scheme_dev, std::abs(net_out[i] - exact[i]));
  }
  std::ostringstream csv;
  csv << "config_hash,seed,m,n,dt,eps,max_dev,exact_flag,max_scheme_dev,size,depth\n";
  csv << ctx.hash << "," << ctx.seed << "," << m << "," << n << "," << fmt(dt) << "," << fmt(eps)
      << "," << fmt(max_dev) << "," << (max_dev <= 1e-12 ? 1 : 0) << "," << fmt(max_scheme_dev)
      << "," << em.net.size() << "," << em.net.depth() << "\n";
  write_file(ctx.out / "emulate.csv", csv.str());
  return manifest(ctx, {"emulate.csv"});
}

// one row of a DeepONet training experiment
std::string deeponet_experiment_row(const ToolContext& ctx, const json& point,
                                    std::uint64_t seed) {
  json cfg = ctx.cfg;
  cfg["arch"] = point;
  MeasureSpec m = measure_from_cfg(cfg);
  auto op = operator_from_json(cfg.at("operator").dump());
  DeepOnet net = build_net_from_cfg(cfg, *op, seed);
  TrainConfig tc = train_cfg_from_json(cfg, seed);
  if (point.contains("Nu")) tc.n_samples = point["Nu"].get<int>();
  if (point.contains("Ny")) tc.n_y = point["Ny"].get<int>();
  DonDataset data = make_dataset(*op, m, net.sensors, net.cell_average_encoder, tc.n_samples,
                                 tc.n_y, tc.y_sampling, seed + 1);
  train(net, data, tc);
  int nmc = cfg.value("Nmc", 200);
  require(net.sensors.count() % 2 == 1,
          "experiment: error decomposition needs an odd sensor count (DFT decoder)");
  EncDecPair pair = dft_pair(net.sensors.count());
  ErrorReport r = error_decomposition(net, *op, m, pair, nmc, seed ^ 0xE7A1ULL);
  std::ostringstream row;
  row << point.value("sensors", 17) << "," << point.value("p", 8) << "," << tc.n_samples << ","
      << tc.n_y << "," << fmt(r.total.value) << "," << fmt(r.total.stderr_) << ","
      << fmt(r.total_l1.value) << "," << fmt(r.encoding.value) << ","
      << fmt(r.approximation.value) << "," << fmt(r.reconstruction.value) << ","
      << fmt(r.spectral_lower) << "," << fmt(r.lip_g) << "," << fmt(r.lip_r) << ","
      << fmt(r.lip_rp) << "," << (r.upper_bound_holds ? 1 : 0);
  return row.str();
}

std::string run_experiment(ToolContext& ctx) {
  std::string tag = ctx.cfg.value("experiment", "");
  json sweep = ctx.cfg.value("sweep", json::object());
  std::vector<std::uint64_t> seeds = ctx.cfg.value("seeds", std::vector<std::uint64_t>{ctx.seed});
  require(!seeds.empty(), "experiment: empty seed list");

  std::ostringstream csv;
  std::vector<std::string> rows;
  std::string header;

  if (tag == "encodingSweep") {
    MeasureSpec m = measure_from_cfg(ctx.cfg);
    std::vector<int> ms = sweep.value("m", std::vector<int>{5, 9, 17, 33});
    require(!ms.empty(), "experiment: empty m sweep");
    int nmc = ctx.cfg.value("Nmc", 2000);
    header = "config_hash,seed,m,estimate,stderr,bound,status";
    struct Point {
      int m;
      std::uint64_t seed;
    };
    std::vector<Point> points;
    for (int mm : ms)
      for (auto s : seeds) points.push_back({mm, s});
    rows.resize(points.size());
    parallel_for(points.size(), ctx.threads, [&](std::size_t i) {
      std::ostringstream r;
      r << ctx.hash << "," << points[i].seed << "," << points[i].m << ",";
      try {
        EncDecPair pair = dft_pair(points[i].m);
        double bound =
            std::sqrt(2.0 * kTwoPi * std::erfc((points[i].m / 2) * m.ell / std::sqrt(2.0)));
        int refn = 4 * std::max(points[i].m, 2 * m.effective_truncation()) + 1;
        auto est = encoding_error_mc(m, pair, nmc, points[i].seed, Grid::torus(refn, 1));
        r << fmt(est.value) << "," << fmt(est.stderr_) << "," << fmt(bound) << ",ok";
      } catch (const std::exception& e) {
        r << ",,," << "failed:" << e.what();
      }
      rows[i] = r.str();
    });
  } else if (tag == "spectrumStudy") {
    MeasureSpec m = measure_from_cfg(ctx.cfg);
    auto op_json = ctx.cfg.contains("operator") ? ctx.cfg["operator"].dump() : "";
    int count = ctx.cfg.value("count", 512);
    int p = ctx.cfg.value("p", 32);
    header = "config_hash,seed,k,lambda_k,lower_bound_p,status";
    for (auto s : seeds) {
      try {
        auto op = op_json.empty() ? nullptr : operator_from_json(op_json);
        Grid g = op ? op->input_grid() : Grid::torus(ctx.cfg.value("gridN", 256), m.dim);
        std::vector<FieldSample> push;
        push.reserve(count);
        for (int i = 0; i < count; ++i) {
          Rng rng(s, static_cast<std::uint64_t>(i));
          FieldSample u = sample(m, g, rng);
          push.push_back(op ? op->apply(u) : std::move(u));
        }
        SpectrumEstimate spec = empirical_spectrum(push, p);
        for (int k = 0; k < p; ++k) {
          std::ostringstream r;
          r << ctx.hash << "," << s << "," << (k + 1) << "," << fmt(spec.eigenvalues[k]) << ","
            << fmt(std::sqrt(spec.tail_sum(k + 1))) << ",ok";
          rows.push_back(r.str());
        }
      } catch (const std::exception& e) {
        rows.push_back(ctx.hash + "," + std::to_string(s) + ",,,," + "failed:" + e.what());
      }
    }
  } else if (tag == "emulationCheck") {
    header = "config_hash,seed,m,n,dt,eps,max_dev,exact_flag,max_scheme_dev,size,depth,status";
    std::vector<int> ms = sweep.value("m", std::vector<int>{33});
    std::vector<int> ns = sweep.value("n", std::vector<int>{10});
    std::vector<double> epss = sweep.value("eps", std::vector<double>{1e-3});
    require(!ms.empty() && !ns.empty() && !epss.empty(), "experiment: empty sweep");
    for (int mm : ms)
      for (int nn : ns)
        for (double ee : epss)
          for (auto s : seeds) {
            std::ostringstream r;
            double dt = ctx.cfg.value("dt", 0.05);
            r << ctx.hash << "," << s << "," << mm << "," << nn << "," << fmt(dt) << ","
              << fmt(ee) << ",";
            try {
              GadgetNet em = ac_emulator_net(mm, nn, dt, ee);
              GadgetNet cubic = cubic_net(ee);
              double max_dev = 0.0, max_scheme = 0.0;
              int trials = ctx.cfg.value("trials", 20);
              for (int t = 0; t < trials; ++t) {
                Rng rng(s, static_cast<std::uint64_t>(t));
                std::vector<double> u0(mm);
                for (auto& v : u0) v = rng.uniform(-1.0, 1.0);
                auto net_out = em.net.forward(u0);
                auto ref = ac_emulator_reference(cubic, mm, nn, dt, u0);
                auto exact = solve_allen_cahn(u0, dt, nn);
                for (int i = 0; i < mm; ++i) {
                  max_dev = std::max(max_dev, std::abs(net_out[i] - ref[i]));
                  max_scheme = std::max(max_scheme, std::abs(net_out[i] - exact[i]));
                }
              }
              r << fmt(max_dev) << "," << (max_dev <= 1e-12 ? 1 : 0) << "," << fmt(max_scheme)
                << "," << em.net.size() << "," << em.net.depth() << ",ok";
            } catch (const std::exception& e) {
              r << ",,,,," << "failed:" << e.what();
            }
            rows.push_back(r.str());
          }
  } else if (tag == "generalizationSweep") {
    MeasureSpec m = measure_from_cfg(ctx.cfg);
    auto op = operator_from_json(ctx.cfg.at("operator").dump());
    GenGapConfig gc;
    gc.n_values = sweep.value("Nu", gc.n_values);
    require(!gc.n_values.empty(), "experiment: empty Nu sweep");
    gc.seeds = seeds;
    json t = ctx.cfg.value("train", json::object());
    gc.epochs = t.value("epochs", gc.epochs);
    gc.batch = t.value("batch", gc.batch);
    gc.lr = t.value("lr", gc.lr);
    json arch = ctx.cfg.value("arch", json::object());
    gc.p = arch.value("p", gc.p);
    gc.branch_width = arch.value("branchWidth", gc.branch_width);
    gc.trunk_width = arch.value("trunkWidth", gc.trunk_width);
    gc.sensor_count = arch.value("sensors", gc.sensor_count);
    header = "config_hash,seed,Nu,gap,median_gap,status";
    auto rows_out = generalization_gap(*op, m, gc, ctx.seed);
    for (const auto& row : rows_out) {
      for (std::size_t si = 0; si < row.gaps.size(); ++si) {
        std::ostringstream r;
        r << ctx.hash << "," << gc.seeds[si] << "," << row.n_train << "," << fmt(row.gaps[si])
          << "," << fmt(row.median_gap) << ",ok";
        rows.push_back(r.str());
      }
    }
  } else if (tag == "linearFunctional") {
    MeasureSpec m = measure_from_cfg(ctx.cfg);
    auto op = operator_from_json(ctx.cfg.at("operator").dump());
    auto* ifop = dynamic_cast<IntegralFunctionalOperator*>(op.get());
    require(ifop != nullptr, "linearFunctional: operator must be integralFunctional");
    std::vector<int> ms = sweep.value("m", std::vector<int>{4, 16, 64});
    require(!ms.empty(), "experiment: empty m sweep");
    int n_train = ctx.cfg.value("NuTrain", 2000);
    int n_test = ctx.cfg.value("NuTest", 4000);
    header = "config_hash,seed,m,train_mse,test_mse,status";
    for (auto s : seeds) {
      int max_m = *std::max_element(ms.begin(), ms.end());
      Rng srng(s, 0x5E45);
      SensorSet all = SensorSet::random(max_m, 2, srng);
      // draw all latent vectors once; nested sensor subsets share them
      auto modes = kl_modes(m);
      std::vector<std::vector<double>> latents(n_train + n_test);
      for (int i = 0; i < n_train + n_test; ++i) {
        Rng rng(s, static_cast<std::uint64_t>(i));
        latents[i] = sample_latent(m, rng);
      }
      // targets
      Grid g2 = ifop->input_grid();
      std::vector<double> targets(latents.size());
      {
        // quadrature of each basis mode over the mask
        std::vector<double> mode_integral(modes.size(), 0.0);
        for (std::size_t q = 0; q < g2.size(); ++q) {
          if (!ifop->mask()[q]) continue;
          double w = g2.weight(q);
          auto pt = g2.point_at(q);
          for (std::size_t k = 0; k < modes.size(); ++k)
            mode_integral[k] += w * fourier_basis(modes[k].k, pt);
        }
        for (std::size_t i = 0; i < latents.size(); ++i) {
          double acc = 0.0;
          for (std::size_t k = 0; k < modes.size(); ++k)
            acc += modes[k].scale * latents[i][k] * mode_integral[k];
          targets[i] = acc;
        }
      }
      for (int mm : ms) {
        std::ostringstream r;
        r << ctx.hash << "," << s << "," << mm << ",";
        try {
          SensorSet sub = all;
          sub.locations.assign(all.locations.begin(), all.locations.begin() + mm);
          std::vector<std::vector<double>> enc_train(n_train), enc_test(n_test);
          for (int i = 0; i < n_train; ++i)
            enc_train[i] = eval_measure_at(m, latents[i], sub.locations);
          for (int i = 0; i < n_test; ++i)
            enc_test[i] = eval_measure_at(m, latents[n_train + i], sub.locations);
          std::vector<double> y_train(targets.begin(), targets.begin() + n_train);
          auto [w, b] = fit_affine_branch_lsq(enc_train, y_train);
          auto mse = [&](const std::vector<std::vector<double>>& X, int offset, int count) {
            double acc = 0.0;
            for (int i = 0; i < count; ++i) {
              double pred = b;
              for (int j = 0; j < mm; ++j) pred += w[j] * X[i][j];
              double d = pred - targets[offset + i];
              acc += d * d;
            }
            return acc / count;
          };
          r << fmt(mse(enc_train, 0, n_train)) << "," << fmt(mse(enc_test, n_train, n_test))
            << ",ok";
        } catch (const std::exception& e) {
          r << ",," << "failed:" << e.what();
        }
        rows.push_back(r.str());
      }
    }
  } else if (tag == "pendulum" || tag == "elliptic" || tag == "allenCahn" || tag == "burgers") {
    header =
        "config_hash,seed,sensors,p,Nu,Ny,total,total_stderr,total_l1,encoding,approximation,"
        "reconstruction,spectral_lower,lip_g,lip_r,lip_rp,upper_bound_holds,status";
    std::vector<int> ms = sweep.value("m", std::vector<int>{17});
    std::vector<int> ps = sweep.value("p", std::vector<int>{8});
    std::vector<int> nus = sweep.value("Nu", std::vector<int>{128});
    std::vector<int> nys = sweep.value("Ny", std::vector<int>{8});
    require(!ms.empty() && !ps.empty() && !nus.empty() && !nys.empty(),
            "experiment: empty sweep");
    struct Point {
      json arch;
      std::uint64_t seed;
    };
    std::vector<Point> points;
    json base_arch = ctx.cfg.value("arch", json::object());
    for (int mm : ms)
      for (int pp : ps)
        for (int nu : nus)
          for (int ny : nys)
            for (auto s : seeds) {
              json a = base_arch;
              a["sensors"] = mm;
              a["p"] = pp;
              a["Nu"] = nu;
              a["Ny"] = ny;
              points.push_back({a, s});
            }
    rows.resize(points.size());
    parallel_for(points.size(), ctx.threads, [&](std::size_t i) {
      std::ostringstream r;
      r << ctx.hash << "," << points[i].seed << ",";
      try {
        r << deeponet_experiment_row(ctx, points[i].arch, points[i].seed) << ",ok";
      } catch (const std::exception& e) {
        r << points[i].arch.value("sensors", 0) << "," << points[i].arch.value("p", 0)
          << ",,,,,,,,,,,,," << "failed:" << e.what();
      }
      rows[i] = r.str();
    });
  } else {
    throw InvalidArgument("unknown experiment tag '" + tag + "'");
  }

  csv << header << "\n";
  for (const auto& r : rows) csv << r << "\n";
  write_file(ctx.out / "experiment.csv", csv.str());
  return manifest(ctx, {"experiment.csv"});
}

}  // namespace

std::string run_tool(const std::string& config_json, const std::string& out_dir, int threads) {
  json cfg;
  try {
    cfg = json::parse(config_json);
  } catch (const std::exception& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  require(cfg.is_object() && cfg.contains("tool"), "config must be an object with a 'tool' field");
  ToolContext ctx;
  ctx.cfg = cfg;
  ctx.out = out_dir;
  ctx.seed = cfg.value("seed", 0ULL);
  ctx.threads = threads;
  ctx.hash = config_hash(cfg.dump());
  fs::create_directories(ctx.out);

  std::string tool = cfg.at("tool").get<std::string>();
  if (tool == "sample") return run_sample(ctx);
  if (tool == "oracle") return run_oracle(ctx);
  if (tool == "encdec-error") return run_encdec_error(ctx);
  if (tool == "spectrum") return run_spectrum(ctx);
  if (tool == "train") return run_train(ctx);
  if (tool == "evaluate") return run_evaluate(ctx);
  if (tool == "emulate") return run_emulate(ctx);
  if (tool == "experiment") return run_experiment(ctx);
  throw InvalidArgument("unknown tool '" + tool + "'");
}

}  // namespace don
