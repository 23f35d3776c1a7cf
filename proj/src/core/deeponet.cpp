#include "core/deeponet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace don {

// ---- operators ---------------------------------------------------------------

PendulumOperator::PendulumOperator(double gamma, double T, int steps, int input_n)
    : gamma_(gamma), T_(T), steps_(steps), input_n_(input_n) {
  require(T > 0 && steps >= 2 && input_n >= 3, "PendulumOperator: bad shape");
}

FieldSample PendulumOperator::apply(const FieldSample& u) const {
  require(u.grid.same_shape(input_grid()), "PendulumOperator: input grid mismatch");
  TrigInterp1d f(u.values);
  double T = T_;
  auto forcing = [&f, T](double t) { return f(kTwoPi * t / T); };
  auto traj = solve_pendulum(forcing, gamma_, T_, steps_);
  return FieldSample(traj.time, traj.v1);
}

EllipticOperator::EllipticOperator(FieldSample rhs, double tol) : rhs_(std::move(rhs)), tol_(tol) {
  require(rhs_.grid.kind == DomainKind::Torus && rhs_.grid.dim == 1,
          "EllipticOperator: rhs on a 1-d periodic grid");
}

FieldSample EllipticOperator::apply(const FieldSample& a) const {
  return solve_elliptic(a, rhs_, tol_);
}

AllenCahnOperator::AllenCahnOperator(double T, double dt, int grid_n)
    : T_(T), dt_(dt), grid_n_(grid_n) {
  require(T > 0 && dt > 0 && dt <= 0.5, "AllenCahnOperator: need T > 0, 0 < dt <= 1/2");
  steps_ = std::max(1, static_cast<int>(std::lround(T / dt)));
  dt_ = T / steps_;
  require(dt_ <= 0.5, "AllenCahnOperator: adjusted dt exceeds 1/2");
}

FieldSample AllenCahnOperator::apply(const FieldSample& u) const {
  require(u.grid.same_shape(input_grid()), "AllenCahnOperator: input grid mismatch");
  return FieldSample(u.grid, solve_allen_cahn(u.values, dt_, steps_));
}

BurgersOperator::BurgersOperator(double T, int grid_n, double cfl, bool prefer_exact)
    : T_(T), cfl_(cfl), grid_n_(grid_n), prefer_exact_(prefer_exact) {
  require(T >= 0, "BurgersOperator: T >= 0");
}

FieldSample BurgersOperator::apply(const FieldSample& u) const {
  require(u.grid.same_shape(input_grid()), "BurgersOperator: input grid mismatch");
  if (prefer_exact_ && u.latent && u.latent->size() == 1 && T_ <= kTwoPi / 4.0) {
    return burgers_exact_shifted_sine((*u.latent)[0], T_, u.grid);
  }
  return FieldSample(u.grid, solve_conslaw_lxf(u.values, Flux::burgers(), T_, cfl_));
}

IntegralFunctionalOperator::IntegralFunctionalOperator(Grid grid2d, std::vector<bool> mask)
    : grid_(grid2d), mask_(std::move(mask)) {
  require(grid_.dim == 2 && grid_.kind == DomainKind::Torus,
          "IntegralFunctionalOperator: 2-d torus grid");
  require(mask_.size() == grid_.size(), "IntegralFunctionalOperator: mask/grid mismatch");
}

FieldSample IntegralFunctionalOperator::apply(const FieldSample& u) const {
  require(u.grid.same_shape(grid_), "IntegralFunctionalOperator: input grid mismatch");
  return FieldSample(Grid::point(), {integral_functional(u, mask_)});
}

// ---- trunk -------------------------------------------------------------------

Trunk Trunk::analytic(TrunkBasis basis) {
  Trunk t;
  t.kind = Kind::Analytic;
  t.ygrid = basis.ygrid;
  t.p = basis.p();
  t.basis = std::move(basis);
  if (t.basis.source == TrunkBasis::Source::Fourier) {
    t.fourier_modes = enumerate_wavenumbers(t.p, t.ygrid.dim);
  }
  if (t.ygrid.kind == DomainKind::Torus && t.ygrid.dim == 1 &&
      (t.basis.source == TrunkBasis::Source::Pca)) {
    for (const auto& m : t.basis.members) t.member_cache.emplace_back(m);
    t.bias_cache.emplace_back(t.basis.bias);
  }
  return t;
}

Trunk Trunk::neural(Mlp net, const Grid& ygrid) {
  require(net.input_dim() == 1, "Trunk::neural: trunk net takes the scalar output point");
  Trunk t;
  t.kind = Kind::Neural;
  t.p = net.output_dim() - 1;
  require(t.p >= 1, "Trunk::neural: output dim must be p+1 >= 2");
  t.net = std::move(net);
  t.ygrid = ygrid;
  return t;
}

std::vector<double> Trunk::eval(double y) const {
  std::vector<double> out(static_cast<std::size_t>(p) + 1);
  if (kind == Kind::Neural) {
    auto v = net.forward({y / ygrid.extent});
    return v;  // [tau_0 .. tau_p]
  }
  if (ygrid.kind == DomainKind::Point) {
    out[0] = basis.bias.empty() ? 0.0 : basis.bias[0];
    for (int k = 0; k < p; ++k) out[k + 1] = basis.members[k][0];
    return out;
  }
  switch (basis.source) {
    case TrunkBasis::Source::Fourier:
      out[0] = 0.0;
      for (int k = 0; k < p; ++k) out[k + 1] = fourier_basis(fourier_modes[k], {y, 0.0});
      return out;
    default: {
      // grid-valued members (PCA): cached trigonometric interpolants on the torus,
      // linear interpolation on intervals
      if (!member_cache.empty()) {
        out[0] = bias_cache.empty() ? 0.0 : bias_cache[0](y);
        for (int k = 0; k < p; ++k) out[k + 1] = member_cache[k](y);
        return out;
      }
      FieldSample bias_f(ygrid, basis.bias);
      out[0] = eval_field(bias_f, {y, 0.0});
      for (int k = 0; k < p; ++k) {
        FieldSample mf(ygrid, basis.members[k]);
        out[k + 1] = eval_field(mf, {y, 0.0});
      }
      return out;
    }
  }
}

TrunkBasis Trunk::materialize() const {
  if (kind == Kind::Analytic) return basis;
  TrunkBasis out;
  out.source = TrunkBasis::Source::Neural;
  out.ygrid = ygrid;
  out.bias.resize(ygrid.size());
  out.members.assign(p, std::vector<double>(ygrid.size()));
  for (std::size_t q = 0; q < ygrid.size(); ++q) {
    auto v = net.forward({ygrid.point_at(q)[0] / ygrid.extent});
    out.bias[q] = v[0];
    for (int k = 0; k < p; ++k) out.members[k][q] = v[k + 1];
  }
  return out;
}

// ---- DeepOnet ------------------------------------------------------------------

std::vector<double> DeepOnet::encode(const FieldSample& u) const {
  if (cell_average_encoder) return encode_cell_average(as_field_fn(u), sensors);
  return encode_pointwise(u, sensors);
}

std::vector<double> DeepOnet::eval_grid_encoded(const std::vector<double>& enc) const {
  auto beta = branch.forward(enc);
  TrunkBasis mat = trunk.materialize();
  return reconstruct(beta, mat);
}

std::vector<double> DeepOnet::eval_grid(const FieldSample& u) const {
  return eval_grid_encoded(encode(u));
}

double DeepOnet::eval_at(const std::vector<double>& enc, double y) const {
  auto beta = branch.forward(enc);
  auto tau = trunk.eval(y);
  double s = tau[0];
  for (int k = 0; k < p(); ++k) s += beta[k] * tau[k + 1];
  return s;
}

// ---- dataset / loss / training --------------------------------------------------

namespace {

struct OutputEval {
  // evaluator of one output sample at arbitrary y
  std::shared_ptr<TrigInterp1d> trig;
  std::shared_ptr<FieldSample> field;

  double operator()(double y) const {
    if (trig) return (*trig)(y);
    return eval_field(*field, {y, 0.0});
  }
};

OutputEval make_output_eval(const FieldSample& gu) {
  OutputEval ev;
  if (gu.grid.kind == DomainKind::Torus && gu.grid.dim == 1)
    ev.trig = std::make_shared<TrigInterp1d>(gu.values);
  else
    ev.field = std::make_shared<FieldSample>(gu);
  return ev;
}

}  // namespace

DonDataset make_dataset(const Operator& op, const MeasureSpec& measure, const SensorSet& sensors,
                        bool cell_average, int n_samples, int n_y, YSampling ys,
                        std::uint64_t seed) {
  require(n_samples >= 1 && n_y >= 1, "make_dataset: positive sample counts");
  Grid in_grid = op.input_grid();
  Grid out_grid = op.output_grid();
  DonDataset d;
  d.enc.resize(n_samples);
  d.ypts.resize(n_samples);
  d.targets.resize(n_samples);
  d.weights.resize(n_samples);
  bool point_output = out_grid.kind == DomainKind::Point;
  double U = point_output ? 1.0 : out_grid.extent;
  d.domain_measure = U;
  for (int i = 0; i < n_samples; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    auto latent = sample_latent(measure, rng);
    FieldSample u = field_from_latent(measure, latent, in_grid);
    if (cell_average)
      d.enc[i] = encode_cell_average(as_field_fn(u), sensors);
    else
      d.enc[i] = eval_measure_at(measure, latent, sensors.locations);
    FieldSample gu = op.apply(u);
    if (point_output) {
      d.ypts[i] = {0.0};
      d.targets[i] = {gu.values[0]};
      d.weights[i] = {1.0};
      continue;
    }
    auto ev = make_output_eval(gu);
    d.ypts[i].resize(n_y);
    d.targets[i].resize(n_y);
    d.weights[i].resize(n_y);
    if (ys == YSampling::RandomUniform) {
      for (int k = 0; k < n_y; ++k) {
        double y = rng.uniform(0.0, U);
        d.ypts[i][k] = y;
        d.targets[i][k] = ev(y);
        d.weights[i][k] = U / n_y;
      }
    } else {
      // trapezoidal nodes on the output domain (periodic: uniform nodes/weights)
      Grid qg = out_grid.kind == DomainKind::Torus ? Grid::torus(n_y, 1)
                                                   : Grid::interval(n_y, U);
      for (int k = 0; k < n_y; ++k) {
        double y = qg.point_at(k)[0];
        d.ypts[i][k] = y;
        d.targets[i][k] = ev(y);
        d.weights[i][k] = qg.weight(k);
      }
    }
  }
  return d;
}

double empirical_loss(const DeepOnet& net, const DonDataset& data) {
  require(data.count() >= 1, "empirical_loss: empty dataset");
  double acc = 0.0;
  for (int j = 0; j < data.count(); ++j) {
    auto beta = net.branch.forward(data.enc[j]);
    for (std::size_t k = 0; k < data.ypts[j].size(); ++k) {
      auto tau = net.trunk.eval(data.ypts[j][k]);
      double pred = tau[0];
      for (int i = 0; i < net.p(); ++i) pred += beta[i] * tau[i + 1];
      double r = pred - data.targets[j][k];
      acc += data.weights[j][k] * r * r;
    }
  }
  return acc / data.count();
}

TrainHistory train(DeepOnet& net, const DonDataset& data, const TrainConfig& cfg,
                   const DonDataset* test_data) {
  require(data.count() >= 1, "train: empty dataset");
  bool neural_trunk = net.trunk.kind == Trunk::Kind::Neural && cfg.train_trunk;
  AdamState branch_state = AdamState::init(net.branch, cfg.lr);
  AdamState trunk_state;
  if (neural_trunk) trunk_state = AdamState::init(net.trunk.net, cfg.lr);

  TrainHistory hist;
  int N = data.count();
  std::vector<int> order(N);
  for (int i = 0; i < N; ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng(cfg.seed, 1000003ULL + static_cast<std::uint64_t>(epoch));
    // Fisher-Yates keyed by (seed, epoch)
    for (int i = N - 1; i > 0; --i) {
      int j = erng.uniform_int(i + 1);
      std::swap(order[i], order[j]);
    }
    for (int start = 0; start < N; start += cfg.batch) {
      int bs = std::min(cfg.batch, N - start);
      auto branch_grad = net.branch.zero_grad();
      auto trunk_grad = neural_trunk ? net.trunk.net.zero_grad() : std::vector<Mlp::Layer>{};
      double inv = 1.0 / bs;
      for (int bi = 0; bi < bs; ++bi) {
        int j = order[start + bi];
        Mlp::Tape btape;
        auto beta = net.branch.forward_tape(data.enc[j], btape);
        std::vector<double> dbeta(net.p(), 0.0);
        for (std::size_t k = 0; k < data.ypts[j].size(); ++k) {
          double y = data.ypts[j][k];
          double w = data.weights[j][k];
          if (neural_trunk) {
            Mlp::Tape ttape;
            auto tau = net.trunk.net.forward_tape({y / net.trunk.ygrid.extent}, ttape);
            double pred = tau[0];
            for (int i = 0; i < net.p(); ++i) pred += beta[i] * tau[i + 1];
            double r = pred - data.targets[j][k];
            double c = 2.0 * inv * w * r;
            std::vector<double> dtau(static_cast<std::size_t>(net.p()) + 1);
            dtau[0] = c;
            for (int i = 0; i < net.p(); ++i) {
              dtau[i + 1] = c * beta[i];
              dbeta[i] += c * tau[i + 1];
            }
            net.trunk.net.backward(ttape, dtau, trunk_grad);
          } else {
            auto tau = net.trunk.eval(y);
            double pred = tau[0];
            for (int i = 0; i < net.p(); ++i) pred += beta[i] * tau[i + 1];
            double r = pred - data.targets[j][k];
            double c = 2.0 * inv * w * r;
            for (int i = 0; i < net.p(); ++i) dbeta[i] += c * tau[i + 1];
          }
        }
        net.branch.backward(btape, dbeta, branch_grad);
      }
      adam_step(net.branch, branch_state, branch_grad);
      if (neural_trunk) adam_step(net.trunk.net, trunk_state, trunk_grad);
    }
    double tl = empirical_loss(net, data);
    hist.train_loss.push_back(tl);
    if (test_data) hist.test_loss.push_back(empirical_loss(net, *test_data));
    if (!(tl < cfg.divergence_abort))
      throw NumericalError("train: loss diverged at epoch " + std::to_string(epoch) +
                           " (loss = " + std::to_string(tl) + ")");
  }
  return hist;
}

std::pair<std::vector<double>, double> fit_affine_branch_lsq(
    const std::vector<std::vector<double>>& enc, const std::vector<double>& targets) {
  require(!enc.empty() && enc.size() == targets.size(), "fit_affine_branch_lsq: bad data");
  int N = static_cast<int>(enc.size());
  int m = static_cast<int>(enc[0].size());
  Eigen::MatrixXd X(N, m + 1);
  Eigen::VectorXd y(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < m; ++j) X(i, j) = enc[i][j];
    X(i, m) = 1.0;
    y[i] = targets[i];
  }
  Eigen::MatrixXd A = X.transpose() * X;
  A.diagonal().array() += 1e-12 * std::max(1.0, A.diagonal().maxCoeff());
  Eigen::VectorXd sol = A.ldlt().solve(X.transpose() * y);
  std::vector<double> w(sol.data(), sol.data() + m);
  return {w, sol[m]};
}

// ---- error measurement -----------------------------------------------------------

McEstimate total_error_mc(const DeepOnet& net, const Operator& op, const MeasureSpec& measure,
                          int Nmc, std::uint64_t seed, ErrorNorm norm) {
  require(Nmc >= 2, "total_error_mc: Nmc >= 2");
  Grid in_grid = op.input_grid();
  TrunkBasis mat = net.trunk.materialize();
  std::vector<double> vals(Nmc);
  for (int i = 0; i < Nmc; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    FieldSample u = sample(measure, in_grid, rng);
    FieldSample gu = op.apply(u);
    auto beta = net.branch.forward(net.encode(u));
    auto pred = reconstruct(beta, mat);
    require(pred.size() == gu.values.size(), "total_error_mc: output grid mismatch");
    if (norm == ErrorNorm::L2) {
      double s = 0.0;
      for (std::size_t q = 0; q < pred.size(); ++q) {
        double dd = pred[q] - gu.values[q];
        s += gu.grid.weight(q) * dd * dd;
      }
      vals[i] = s;
    } else {
      double s = 0.0;
      for (std::size_t q = 0; q < pred.size(); ++q)
        s += gu.grid.weight(q) * std::abs(pred[q] - gu.values[q]);
      vals[i] = s;
    }
  }
  return norm == ErrorNorm::L2 ? jackknife_rms(vals) : jackknife_mean(vals);
}

ErrorReport error_decomposition(const DeepOnet& net, const Operator& op,
                                const MeasureSpec& measure, const EncDecPair& pair, int Nmc,
                                std::uint64_t seed) {
  require(Nmc >= 2, "error_decomposition: Nmc >= 2");
  require(static_cast<bool>(pair.decode_on), "error_decomposition: decoder required");
  Grid in_grid = op.input_grid();
  TrunkBasis mat = net.trunk.materialize();
  // trained trunks may be numerically degenerate; the least-squares dual keeps
  // R o P the orthogonal projection onto their span
  ProjectionOperator proj = dual_basis_pinv(mat);

  ErrorReport rep;
  rep.sample_count = Nmc;
  rep.total = total_error_mc(net, op, measure, Nmc, seed, ErrorNorm::L2);
  rep.total_l1 = total_error_mc(net, op, measure, Nmc, seed, ErrorNorm::L1);
  rep.encoding = encoding_error_mc(measure, pair, Nmc, seed, in_grid);

  // approximation error: || A(E(u)) - P(G(D(E(u)))) ||_{l2} over E_# mu
  std::vector<double> sq_a(Nmc);
  std::vector<FieldSample> push;
  push.reserve(Nmc);
  double lip_g = 0.0;
  FieldSample prev_u, prev_gu;
  for (int i = 0; i < Nmc; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    FieldSample u = sample(measure, in_grid, rng);
    auto enc = net.encode(u);
    auto beta = net.branch.forward(enc);
    auto dec_values = pair.decode_on(enc, in_grid);
    FieldSample gu_dec = op.apply(FieldSample(in_grid, dec_values));
    auto alpha = project(gu_dec.values, proj);
    double s = 0.0;
    for (int k = 0; k < net.p(); ++k) s += (beta[k] - alpha[k]) * (beta[k] - alpha[k]);
    sq_a[i] = s;
    FieldSample gu = op.apply(u);
    if (i > 0) {
      double du = 0.0, dg = 0.0;
      for (std::size_t q = 0; q < u.values.size(); ++q) {
        double d = u.values[q] - prev_u.values[q];
        du += u.grid.weight(q) * d * d;
      }
      for (std::size_t q = 0; q < gu.values.size(); ++q) {
        double d = gu.values[q] - prev_gu.values[q];
        dg += gu.grid.weight(q) * d * d;
      }
      if (du > 1e-24) lip_g = std::max(lip_g, std::sqrt(dg / du));
    }
    prev_u = u;
    prev_gu = gu;
    push.push_back(std::move(gu));
  }
  rep.approximation = jackknife_rms(sq_a);
  rep.reconstruction = reconstruction_error_mc(push, mat, proj);
  rep.lip_g = lip_g;
  rep.lip_r = lip_reconstruct(mat);
  rep.lip_rp = lip_reconstruct_project(mat, proj);

  SpectrumEstimate spec = empirical_spectrum(push, std::min<int>(net.p(), Nmc));
  rep.spectral_lower = std::sqrt(spec.tail_sum(net.p()));

  double bound = rep.lip_g * rep.lip_rp * rep.encoding.value + rep.lip_r * rep.approximation.value +
                 rep.reconstruction.value;
  rep.upper_bound_holds = rep.total.value <= bound + 4.0 * rep.total.stderr_;
  return rep;
}

std::vector<GenGapRow> generalization_gap(const Operator& op, const MeasureSpec& measure,
                                          const GenGapConfig& cfg, std::uint64_t master_seed) {
  require(!cfg.n_values.empty() && !cfg.seeds.empty(), "generalization_gap: empty sweep");
  int max_n = *std::max_element(cfg.n_values.begin(), cfg.n_values.end());
  SensorSet sensors = SensorSet::equispaced(cfg.sensor_count, 1);

  std::uint64_t test_seed = master_seed ^ 0x7465737400000001ULL;
  std::uint64_t ref_seed = master_seed ^ 0x7265660000000001ULL;
  DonDataset test = make_dataset(op, measure, sensors, false, cfg.test_multiple * max_n, 1,
                                 YSampling::RandomUniform, test_seed);

  auto make_net = [&](std::uint64_t seed) {
    Rng rng(seed, 77);
    DeepOnet net;
    net.sensors = sensors;
    net.branch = Mlp::he_init({cfg.sensor_count, cfg.branch_width, cfg.branch_width, cfg.p}, rng);
    Mlp tnet = Mlp::he_init({1, cfg.trunk_width, cfg.trunk_width, cfg.p + 1}, rng);
    net.trunk = Trunk::neural(std::move(tnet), op.output_grid());
    return net;
  };

  // reference large-N run approximating the population-loss minimizer
  TrainConfig ref_cfg;
  ref_cfg.n_samples = cfg.ref_multiple * max_n;
  ref_cfg.n_y = 1;
  ref_cfg.epochs = cfg.epochs;
  ref_cfg.batch = cfg.batch;
  ref_cfg.lr = cfg.lr;
  ref_cfg.seed = ref_seed;
  DonDataset ref_data = make_dataset(op, measure, sensors, false, ref_cfg.n_samples, 1,
                                     YSampling::RandomUniform, ref_seed + 1);
  DeepOnet ref_net = make_net(ref_seed);
  train(ref_net, ref_data, ref_cfg);
  double ref_loss = empirical_loss(ref_net, test);

  std::vector<GenGapRow> rows;
  for (int n : cfg.n_values) {
    GenGapRow row;
    row.n_train = n;
    for (std::uint64_t s : cfg.seeds) {
      std::uint64_t run_seed = master_seed * 1000003ULL + s;
      TrainConfig tc;
      tc.n_samples = n;
      tc.n_y = 1;
      tc.epochs = cfg.epochs;
      tc.batch = cfg.batch;
      tc.lr = cfg.lr;
      tc.seed = run_seed;
      DonDataset data = make_dataset(op, measure, sensors, false, n, 1,
                                     YSampling::RandomUniform, run_seed + 13);
      DeepOnet net = make_net(run_seed);
      train(net, data, tc);
      row.gaps.push_back(empirical_loss(net, test) - ref_loss);
    }
    row.median_gap = median(row.gaps);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace don
