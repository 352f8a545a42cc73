#include "sgsample/experiments.hpp"

#include "parallel.hpp"
#include "sgsample/error.hpp"
#include "sgsample/metrics.hpp"
#include "sgsample/posterior_sampler.hpp"
#include "sgsample/prior_sampler.hpp"
#include "sgsample/testfns.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>

namespace sgsample {

namespace {

using Clock = std::chrono::steady_clock;

// Seed key for the independent oracle batches behind the Monte-Carlo floor.
constexpr std::uint64_t kFloorKey = 0x9E3779B97F4A7C15ull;
// Seed key for the Euler-Maruyama reference cloud.
constexpr std::uint64_t kReferenceKey = 0xD1B54A32D192ED03ull;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  return m;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(long long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

ProductKernel make_kernel(const ExperimentConfig& c, double lengthscale) {
  MaternParams base;
  base.smoothness = c.smoothness;
  base.lengthscale = lengthscale;
  return ProductKernel(c.dimension, base, c.variance);
}

ProductKernel make_kernel(const ExperimentConfig& c) { return make_kernel(c, c.lengthscale); }

Box domain_or(const ExperimentConfig& c, double lo, double hi) {
  if (c.domain.size() == 2) return Box::cube(c.dimension, c.domain[0], c.domain[1]);
  return Box::cube(c.dimension, lo, hi);
}

PointSet box_points(Rng& rng, Eigen::Index n, const Box& box) {
  return uniform_points(rng, n, box.lower, box.upper);
}

InsgSolverOptions solver_options(const ExperimentConfig& c) {
  InsgSolverOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.preconditioner = parse_preconditioner(c.preconditioner);
  return o;
}

double timing_value(const ExperimentConfig& c, double seconds) { return c.timing ? seconds : 0.0; }

// Draws `replicates` rows with draw(k, rng), timing each one.
struct TimedBatch {
  Matrix values;
  std::vector<double> seconds;
  std::vector<int> iterations;
  int unconverged = 0;
};

using DrawFn = std::function<Vector(Rng&, int& iterations, bool& converged)>;

TimedBatch run_replicates(const ExperimentConfig& c, Eigen::Index width, const DrawFn& draw) {
  TimedBatch b;
  b.values.resize(c.replicates, width);
  b.seconds.assign(static_cast<std::size_t>(c.replicates), 0.0);
  b.iterations.assign(static_cast<std::size_t>(c.replicates), 0);
  std::vector<char> ok(static_cast<std::size_t>(c.replicates), 1);
  detail::parallel_for(c.replicates, c.threads, [&](int k) {
    Rng rng(c.seed, replicate_stream(static_cast<std::uint64_t>(k)));
    int iters = 0;
    bool converged = true;
    const auto t0 = Clock::now();
    const Vector v = draw(rng, iters, converged);
    b.seconds[static_cast<std::size_t>(k)] = seconds_since(t0);
    b.values.row(k) = v.transpose();
    b.iterations[static_cast<std::size_t>(k)] = iters;
    ok[static_cast<std::size_t>(k)] = converged ? 1 : 0;
  });
  b.unconverged = static_cast<int>(std::count(ok.begin(), ok.end(), 0));
  return b;
}

GaussianMoments zero_mean(Matrix cov) {
  GaussianMoments g;
  g.mean = Vector::Zero(cov.rows());
  g.covariance = std::move(cov);
  return g;
}

// Closed-form SoR prior covariance K_ZU K_UU^{-1} K_UZ.
Matrix sor_prior_covariance(const ProductKernel& kernel, const PointSet& z, const SparseGrid& grid) {
  const LowerTriangularFactor chol = cholesky(kernel_matrix(kernel, grid.points(), grid.points()));
  Matrix a = kernel_matrix(kernel, grid.points(), z);
  chol.lower.triangularView<Eigen::Lower>().solveInPlace(a);
  Matrix cov = a.transpose() * a;
  return 0.5 * (cov + cov.transpose());
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw LookupError("no column '" + std::string(name) + "'");
}

const std::string& CsvTable::cell(std::size_t row, std::string_view name) const {
  if (row >= rows.size()) throw LookupError("row out of range");
  return rows[row][column(name)];
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  return std::stod(cell(row, name));
}

void write_csv(std::ostream& out, std::string_view command, const ExperimentConfig& config,
               const CsvTable& table) {
  out << "# sgsample " << version() << '\n';
  out << "# command: " << command << '\n';
  out << "# config: " << config.to_json() << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

CsvTable prior_bench(const ExperimentConfig& c) {
  c.validate();
  if (c.method == "matheron-exact") throw InvalidConfigError("prior-bench supports chol, rff and insg");
  const ProductKernel kernel = make_kernel(c);
  const Box box = domain_or(c, 0.0, 1.0);
  const std::vector<long long> sizes = c.sizes.empty() ? std::vector<long long>{64, 128, 256, 512, 1024} : c.sizes;

  CsvTable t;
  t.columns = {"method", "d", "eta", "n_s", "replicates", "setup_seconds", "seconds_per_draw", "w2", "w2_floor"};
  Rng setup(c.seed, 0);

  if (c.analytic) {
    const std::vector<int> levels = c.levels.empty() ? std::vector<int>{c.eta} : c.levels;
    for (long long ns : sizes) {
      const PointSet z = box_points(setup, ns, box);
      const GaussianMoments truth = zero_mean(kernel_matrix(kernel, z, z));
      for (int eta : levels) {
        const SparseGrid grid(eta, c.dimension, box);
        const double w2 = w2_gaussian(truth, zero_mean(sor_prior_covariance(kernel, z, grid))).distance;
        t.rows.push_back({"insg-analytic", fmt(c.dimension), fmt(eta), fmt(ns), "0", "0", "0", fmt(w2), "0"});
      }
    }
    return t;
  }

  auto grid = std::make_shared<const SparseGrid>(c.eta, c.dimension, box);
  for (long long ns : sizes) {
    const PointSet z = box_points(setup, ns, box);
    const Matrix kzz = kernel_matrix(kernel, z, z);
    const GaussianMoments truth = zero_mean(kzz);

    const auto t0 = Clock::now();
    DrawFn draw;
    if (c.method == "chol") {
      auto chol = std::make_shared<LowerTriangularFactor>(cholesky(kzz));
      draw = [chol](Rng& rng, int&, bool&) -> Vector {
        return chol->lower.triangularView<Eigen::Lower>() * rng.normal_vector(chol->size());
      };
    } else if (c.method == "insg") {
      auto sampler = std::make_shared<InsgPriorSampler>(kernel, grid);
      auto kzu = std::make_shared<Matrix>(kernel_matrix(kernel, z, grid->points()));
      draw = [sampler, kzu](Rng& rng, int&, bool&) -> Vector { return *kzu * sampler->draw_inducing(rng); };
    } else {
      const double sigma = std::sqrt(kernel.variance());
      draw = [&kernel, &z, &c, sigma](Rng& rng, int&, bool&) -> Vector {
        const RffFeatures f = RffFeatures::draw(kernel, c.rff_features, rng);
        return sigma * f.feature_matrix(z).rowwise().sum();
      };
    }
    const double setup_seconds = seconds_since(t0);
    const TimedBatch b = run_replicates(c, ns, draw);
    const double w2 = w2_gaussian(empirical_moments(b.values), truth).distance;
    const double floor = monte_carlo_floor(truth, c.replicates, c.seed ^ kFloorKey);
    t.rows.push_back({c.method, fmt(c.dimension), fmt(c.eta), fmt(ns), fmt(c.replicates),
                      fmt(timing_value(c, setup_seconds)), fmt(timing_value(c, median(b.seconds))),
                      fmt(w2), fmt(floor)});
  }
  return t;
}

CsvTable posterior_bench(const ExperimentConfig& c) {
  c.validate();
  const ProductKernel kernel = make_kernel(c);
  const Box box = domain_or(c, -5.0, 5.0);
  const std::vector<long long> sizes = c.sizes.empty() ? std::vector<long long>{256, 512, 1024} : c.sizes;
  auto grid = std::make_shared<const SparseGrid>(c.eta, c.dimension, box);

  CsvTable t;
  t.columns = {"method", "d", "eta", "n", "m", "replicates", "setup_seconds", "seconds_per_draw",
               "w2", "w2_floor", "pcg_iterations_mean", "unconverged"};
  Rng setup(c.seed, 0);
  const double noise_sd = std::sqrt(c.noise_variance);
  for (long long n : sizes) {
    Observations obs;
    obs.x = box_points(setup, n, box);
    obs.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector xi = obs.x.row(i).transpose();
      obs.y(i) = griewank(std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())),
                          c.griewank_standard_sign) + noise_sd * setup.normal();
    }
    obs.noise_variance = c.noise_variance;
    const PointSet xs = box_points(setup, c.test_points, box);
    const Eigen::Index m = xs.rows();

    const auto t0 = Clock::now();
    DrawFn draw;
    GaussianMoments target;
    if (c.method == "chol") {
      target = exact_posterior_moments(kernel, obs, xs);
      auto chol = std::make_shared<LowerTriangularFactor>(cholesky(target.covariance));
      auto mean = std::make_shared<Vector>(target.mean);
      draw = [chol, mean](Rng& rng, int&, bool&) -> Vector {
        return chol->lower.triangularView<Eigen::Lower>() * rng.normal_vector(chol->size()) + *mean;
      };
    } else if (c.method == "matheron-exact") {
      auto s = std::make_shared<ExactMatheronSampler>(kernel, obs, xs);
      draw = [s, noise_sd, n](Rng& rng, int&, bool&) -> Vector {
        const auto [fx, fs] = s->draw_prior(rng);
        return s->update(fx, fs, noise_sd * rng.normal_vector(n));
      };
    } else if (c.method == "insg") {
      auto s = std::make_shared<InsgPosteriorSampler>(kernel, obs, grid, solver_options(c));
      auto ksu = std::make_shared<Matrix>(s->cross_covariance(xs));
      draw = [s, ksu, m](Rng& rng, int& iters, bool& converged) -> Vector {
        const auto d = s->draw(*ksu, Vector::Zero(m), rng);
        iters = d.iterations;
        converged = d.converged;
        return d.values;
      };
    } else {
      Matrix kxx = kernel_matrix(kernel, obs.x, obs.x);
      kxx.diagonal().array() += c.noise_variance;
      auto chol = std::make_shared<LowerTriangularFactor>(cholesky(kxx));
      auto ksx = std::make_shared<Matrix>(kernel_matrix(kernel, xs, obs.x));
      const double sigma = std::sqrt(kernel.variance());
      draw = [chol, ksx, sigma, noise_sd, &kernel, &obs, &xs, &c](Rng& rng, int&, bool&) -> Vector {
        const RffFeatures f = RffFeatures::draw(kernel, c.rff_features, rng);
        const Vector fx = sigma * f.feature_matrix(obs.x).rowwise().sum();
        const Vector fs = sigma * f.feature_matrix(xs).rowwise().sum();
        const Vector eps = noise_sd * rng.normal_vector(obs.size());
        return fs + *ksx * chol->solve(obs.y - fx - eps);
      };
    }
    const double setup_seconds = seconds_since(t0);
    if (c.method == "insg") target = sor_posterior_moments(kernel, obs, xs, *grid);
    else if (c.method != "chol") target = exact_posterior_moments(kernel, obs, xs);

    const TimedBatch b = run_replicates(c, m, draw);
    const double w2 = w2_gaussian(empirical_moments(b.values), target).distance;
    const double floor = monte_carlo_floor(target, c.replicates, c.seed ^ kFloorKey);
    const double iters = std::accumulate(b.iterations.begin(), b.iterations.end(), 0.0) /
                         static_cast<double>(b.iterations.size());
    t.rows.push_back({c.method, fmt(c.dimension), fmt(c.eta), fmt(n), fmt(static_cast<long long>(m)),
                      fmt(c.replicates), fmt(timing_value(c, setup_seconds)),
                      fmt(timing_value(c, median(b.seconds))), fmt(w2), fmt(floor), fmt(iters),
                      fmt(b.unconverged)});
  }
  return t;
}

namespace {

// One posterior draw at `candidates` given the current observations.
Vector thompson_draw(const ExperimentConfig& c, const ProductKernel& kernel, const Observations& obs,
                     const PointSet& candidates, const std::shared_ptr<const SparseGrid>& grid, Rng& rng) {
  const Eigen::Index m = candidates.rows();
  if (c.method == "insg") {
    const InsgPosteriorSampler s(kernel, obs, grid, solver_options(c));
    return s.draw(s.cross_covariance(candidates), Vector::Zero(m), rng).values;
  }
  if (c.method == "chol") {
    const GaussianMoments post = exact_posterior_moments(kernel, obs, candidates);
    return cholesky(post.covariance).lower.triangularView<Eigen::Lower>() * rng.normal_vector(m) + post.mean;
  }
  if (c.method == "matheron-exact") {
    const ExactMatheronSampler s(kernel, obs, candidates);
    const auto [fx, fs] = s.draw_prior(rng);
    return s.update(fx, fs, std::sqrt(obs.noise_variance) * rng.normal_vector(obs.size()));
  }
  Matrix kxx = kernel_matrix(kernel, obs.x, obs.x);
  kxx.diagonal().array() += obs.noise_variance;
  const LowerTriangularFactor chol = cholesky(kxx);
  const double sigma = std::sqrt(kernel.variance());
  const RffFeatures f = RffFeatures::draw(kernel, c.rff_features, rng);
  const Vector fx = sigma * f.feature_matrix(obs.x).rowwise().sum();
  const Vector fs = sigma * f.feature_matrix(candidates).rowwise().sum();
  const Vector eps = std::sqrt(obs.noise_variance) * rng.normal_vector(obs.size());
  return fs + kernel_matrix(kernel, candidates, obs.x) * chol.solve(obs.y - fx - eps);
}

double ackley_row(const PointSet& x, Eigen::Index i) {
  const Vector xi = x.row(i).transpose();
  return ackley(std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
}

}  // namespace

CsvTable thompson(const ExperimentConfig& c) {
  c.validate();
  const Box box = domain_or(c, -5.0, 5.0);
  const std::vector<double> lengthscales =
      c.lengthscales.empty() ? std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6} : c.lengthscales;
  const std::vector<std::uint64_t> seeds =
      c.seeds.empty() ? std::vector<std::uint64_t>{9, 99, 999, 9999, 99999} : c.seeds;
  auto grid = std::make_shared<const SparseGrid>(c.eta, c.dimension, box);

  CsvTable t;
  t.columns = {"method", "d", "lengthscale", "seed", "iteration", "regret"};
  for (double ell : lengthscales) {
    const ProductKernel kernel = make_kernel(c, ell);
    for (std::uint64_t seed : seeds) {
      Rng setup(seed, 0);
      Observations obs;
      obs.noise_variance = c.noise_variance;
      obs.x = box_points(setup, c.initial_points, box);
      obs.y.resize(obs.x.rows());
      for (Eigen::Index i = 0; i < obs.x.rows(); ++i) obs.y(i) = ackley_row(obs.x, i);
      double best = obs.y.minCoeff();
      for (int it = 1; it <= c.iterations; ++it) {
        const PointSet cand = box_points(setup, c.candidates, box);
        Rng rng(seed, replicate_stream(static_cast<std::uint64_t>(it)));
        const Vector f = thompson_draw(c, kernel, obs, cand, grid, rng);
        Eigen::Index pick = 0;
        f.minCoeff(&pick);
        const Eigen::Index n = obs.x.rows();
        obs.x.conservativeResize(n + 1, Eigen::NoChange);
        obs.x.row(n) = cand.row(pick);
        obs.y.conservativeResize(n + 1);
        obs.y(n) = ackley_row(cand, pick);
        best = std::min(best, obs.y(n));
        t.rows.push_back({c.method, fmt(c.dimension), fmt(ell), fmt(seed), fmt(it), fmt(best)});
      }
    }
  }
  return t;
}

namespace {

// Posterior draw of one increment coordinate at a single state.
class IncrementModel {
 public:
  IncrementModel(const ExperimentConfig& c, const ProductKernel& kernel, Observations obs,
                 std::shared_ptr<const SparseGrid> grid)
      : c_(c), kernel_(kernel), obs_(std::move(obs)) {
    if (c.method == "insg") {
      insg_ = std::make_unique<InsgPosteriorSampler>(kernel, obs_, std::move(grid), solver_options(c));
    } else {
      Matrix kxx = kernel_matrix(kernel, obs_.x, obs_.x);
      kxx.diagonal().array() += obs_.noise_variance;
      chol_ = cholesky(kxx);
      alpha_ = chol_.solve(obs_.y);
    }
  }

  double draw(const PointSet& state, Rng& rng, bool& converged) const {
    if (insg_) {
      const auto d = insg_->draw(insg_->cross_covariance(state), Vector::Zero(1), rng);
      converged = d.converged;
      return d.values(0);
    }
    const Vector k = kernel_matrix(kernel_, obs_.x, state).col(0);
    if (c_.method == "chol") {
      Vector a = k;
      chol_.lower.triangularView<Eigen::Lower>().solveInPlace(a);
      const double var = std::max(0.0, kernel_.variance() - a.squaredNorm());
      return k.dot(alpha_) + std::sqrt(var) * rng.normal();
    }
    const double sigma = std::sqrt(kernel_.variance());
    const RffFeatures f = RffFeatures::draw(kernel_, c_.rff_features, rng);
    const Vector fx = sigma * f.feature_matrix(obs_.x).rowwise().sum();
    const double fs = sigma * f.feature_matrix(state).sum();
    const Vector eps = std::sqrt(obs_.noise_variance) * rng.normal_vector(obs_.size());
    return fs + k.dot(chol_.solve(obs_.y - fx - eps));
  }

 private:
  const ExperimentConfig& c_;
  ProductKernel kernel_;
  Observations obs_;
  std::unique_ptr<InsgPosteriorSampler> insg_;
  LowerTriangularFactor chol_;
  Vector alpha_;
};

}  // namespace

CsvTable fitzhugh(const ExperimentConfig& c) {
  c.validate();
  if (c.dimension != 2) throw InvalidConfigError("fitzhugh needs dimension 2");
  if (c.method == "matheron-exact") throw InvalidConfigError("fitzhugh supports chol, rff and insg");
  FitzHughParams params;
  params.noise_variance = c.noise_variance;
  const Box box{{-2.5, -1.0}, {2.5, 2.0}};
  const ProductKernel kernel = make_kernel(c);
  auto grid = std::make_shared<const SparseGrid>(c.eta, 2, box);

  // Training increments y = x_{t+1} - x_t at uniform states with uniform currents.
  Rng setup(c.seed, 0);
  const PointSet x = box_points(setup, c.training_points, box);
  Observations obs_v, obs_w;
  obs_v.x = obs_w.x = x;
  obs_v.noise_variance = obs_w.noise_variance = c.noise_variance;
  obs_v.y.resize(x.rows());
  obs_w.y.resize(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double a = setup.uniform();
    const State2 s{x(i, 0), x(i, 1)};
    const State2 next = euler_maruyama_step(s, a, params, setup);
    obs_v.y(i) = next[0] - s[0];
    obs_w.y(i) = next[1] - s[1];
  }
  const IncrementModel model_v(c, kernel, obs_v, grid);
  const IncrementModel model_w(c, kernel, obs_w, grid);

  const int n = c.replicates;
  Matrix sim(n, 2), ref(n, 2);
  sim.rowwise() = Eigen::RowVector2d(-2.5, -1.0);
  ref = sim;

  CsvTable t;
  t.columns = {"method", "step", "seconds", "w2_state", "mean_v", "mean_w", "max_abs_v", "max_abs_w", "unconverged"};
  for (int step = 1; step <= c.steps; ++step) {
    std::vector<char> ok(static_cast<std::size_t>(n), 1);
    const auto t0 = Clock::now();
    detail::parallel_for(n, c.threads, [&](int k) {
      const std::uint64_t stream =
          replicate_stream(static_cast<std::uint64_t>(step - 1) * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(k));
      Rng rng(c.seed, stream);
      const PointSet state = sim.row(k);
      bool cv = true, cw = true;
      const double dv = model_v.draw(state, rng, cv);
      const double dw = model_w.draw(state, rng, cw);
      sim(k, 0) += dv;
      sim(k, 1) += dw;
      ok[static_cast<std::size_t>(k)] = (cv && cw) ? 1 : 0;
    });
    const double seconds = seconds_since(t0);
    for (int k = 0; k < n; ++k) {
      const std::uint64_t stream =
          replicate_stream(static_cast<std::uint64_t>(step - 1) * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(k));
      Rng rng(c.seed ^ kReferenceKey, stream);
      const double a = rng.uniform();
      const State2 next = euler_maruyama_step({ref(k, 0), ref(k, 1)}, a, params, rng);
      ref(k, 0) = next[0];
      ref(k, 1) = next[1];
    }
    const double w2 = w2_gaussian(empirical_moments(sim), empirical_moments(ref)).distance;
    t.rows.push_back({c.method, fmt(step), fmt(timing_value(c, seconds)), fmt(w2), fmt(sim.col(0).mean()),
                      fmt(sim.col(1).mean()), fmt(sim.col(0).cwiseAbs().maxCoeff()),
                      fmt(sim.col(1).cwiseAbs().maxCoeff()),
                      fmt(static_cast<int>(std::count(ok.begin(), ok.end(), 0)))});
  }
  return t;
}

std::vector<PreconditionerRun> preconditioner_study(const ExperimentConfig& c) {
  c.validate();
  const ProductKernel kernel = make_kernel(c);
  const Box box = domain_or(c, -5.0, 5.0);
  const long long n = c.sizes.empty() ? 256 : c.sizes.front();
  auto grid = std::make_shared<const SparseGrid>(c.eta, c.dimension, box);
  Rng setup(c.seed, 0);
  const PointSet x = box_points(setup, n, box);
  const SorOperator op(kernel, grid, x, c.noise_variance);
  const Vector v = setup.normal_vector(op.size());

  std::vector<std::string> names = c.preconditioners;
  if (names.empty()) names = {"identity", "jacobi", "as", "tas"};
  // Subdomain factors are shared by the one- and two-level variants.
  std::vector<Preconditioner::BlockPtr> subdomains;
  std::vector<PreconditionerRun> runs;
  for (const auto& name : names) {
    PreconditionerRun run;
    run.kind = parse_preconditioner(name);
    const auto t0 = Clock::now();
    Preconditioner p = Preconditioner::identity(op.size());
    if (run.kind == PreconditionerKind::kAdditiveSchwarz || run.kind == PreconditionerKind::kTwoLevelAdditiveSchwarz) {
      if (subdomains.empty()) subdomains = subdomain_blocks(op);
      std::vector<Preconditioner::BlockPtr> blocks = subdomains;
      if (run.kind == PreconditionerKind::kTwoLevelAdditiveSchwarz) blocks.push_back(coarse_block(op));
      p = Preconditioner::from_blocks(run.kind, op.size(), std::move(blocks));
    } else {
      p = build_preconditioner(run.kind, op);
    }
    run.setup_seconds = seconds_since(t0);
    try {
      run.result = pcg(op, p, v, PcgOptions{c.tol, c.max_iter});
    } catch (const DivergenceError& e) {
      run.diverged = true;
      run.result.iterations = e.iteration();
      run.result.trace = e.trace();
      run.result.converged = false;
      run.result.residual = std::numeric_limits<double>::infinity();
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

CsvTable precond_bench(const ExperimentConfig& c) {
  CsvTable t;
  t.columns = {"preconditioner", "iteration", "residual_norm", "converged"};
  for (const auto& run : preconditioner_study(c)) {
    const std::string name(to_string(run.kind));
    const std::string conv = run.result.converged ? "1" : "0";
    for (std::size_t i = 0; i < run.result.trace.size(); ++i)
      t.rows.push_back({name, fmt(static_cast<long long>(i)), fmt(run.result.trace[i]), conv});
  }
  return t;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"prior-bench", "posterior-bench", "thompson", "fitzhugh",
                                              "precond-bench"};
  return names;
}

CsvTable run_command(std::string_view command, const ExperimentConfig& config) {
  if (command == "prior-bench") return prior_bench(config);
  if (command == "posterior-bench") return posterior_bench(config);
  if (command == "thompson") return thompson(config);
  if (command == "fitzhugh") return fitzhugh(config);
  if (command == "precond-bench") return precond_bench(config);
  throw InvalidConfigError("unknown command '" + std::string(command) + "'");
}

}  // namespace sgsample
