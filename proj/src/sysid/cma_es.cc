// Copyright 2026 The realm-desk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "realm/sysid/cma_es.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>
#include "realm/common/rng.h"

namespace realm::sysid {
namespace {

void EvaluateAll(const Objective& objective, const std::vector<Eigen::VectorXd>& xs,
                 std::vector<double>& values, int workers) {
  values.assign(xs.size(), 0.0);
  const int n = static_cast<int>(xs.size());
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) values[i] = objective(xs[i]);
    return;
  }
  std::vector<std::thread> threads;
  const int count = std::min(workers, n);
  for (int w = 0; w < count; ++w) {
    threads.emplace_back([&, w] {
      for (int i = w; i < n; i += count) values[i] = objective(xs[i]);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

int DefaultPopulationSize(int dimension) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dimension))));
}

OptimizeResult CmaEsMinimize(const Objective& objective, const Eigen::VectorXd& init_mean,
                             const CmaEsOptions& options) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const int n = static_cast<int>(init_mean.size());
  if (n < 1) throw std::invalid_argument("CMA-ES needs at least one dimension");
  if (!(options.init_sigma > 0.0)) throw std::invalid_argument("init_sigma must be > 0");
  const int lambda = options.lambda > 0 ? options.lambda : DefaultPopulationSize(n);
  if (options.budget < lambda) {
    throw std::invalid_argument("budget must be at least the population size");
  }
  const int mu = lambda / 2;

  VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights(i) = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();

  const double dn = n;
  const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
  const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
  const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) /
                                            ((dn + 2.0) * (dn + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

  VectorXd mean = init_mean;
  double sigma = options.init_sigma;
  VectorXd pc = VectorXd::Zero(n), ps = VectorXd::Zero(n);
  MatrixXd cov = MatrixXd::Identity(n, n);
  MatrixXd basis = MatrixXd::Identity(n, n);
  VectorXd scales = VectorXd::Ones(n);
  MatrixXd inv_sqrt = MatrixXd::Identity(n, n);

  OptimizeResult result;
  result.x = init_mean;
  result.value = objective(init_mean);
  result.evaluations = 1;

  CounterRng rng(options.seed);
  std::vector<VectorXd> xs(lambda), zs(lambda);
  std::vector<double> values;
  int generation = 0;
  while (result.evaluations + lambda <= options.budget) {
    ++generation;
    for (int k = 0; k < lambda; ++k) {
      zs[k].resize(n);
      for (int i = 0; i < n; ++i) zs[k](i) = rng.Normal();
      xs[k] = mean + sigma * (basis * scales.cwiseProduct(zs[k]));
    }
    EvaluateAll(objective, xs, values, options.workers);
    result.evaluations += lambda;

    std::vector<int> order(lambda);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    for (int k = 0; k < lambda; ++k) {
      if (values[k] < result.value) {
        result.value = values[k];
        result.x = xs[k];
      }
    }
    result.trace.push_back(result.value);

    const VectorXd old_mean = mean;
    mean.setZero();
    for (int i = 0; i < mu; ++i) mean += weights(i) * xs[order[i]];
    const VectorXd step = (mean - old_mean) / sigma;

    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt * step);
    const double ps_norm = ps.norm();
    const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * generation)) / chi_n <
                      1.4 + 2.0 / (dn + 1.0);
    pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * step;

    MatrixXd rank_mu = MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) {
      const VectorXd y = (xs[order[i]] - old_mean) / sigma;
      rank_mu += weights(i) * y * y.transpose();
    }
    const double hsig_fix = hsig ? 0.0 : cc * (2.0 - cc);
    cov = (1.0 - c1 - cmu) * cov + c1 * (pc * pc.transpose() + hsig_fix * cov) + cmu * rank_mu;
    sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

    cov = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
    VectorXd ev = eig.eigenvalues().cwiseMax(1e-300);
    basis = eig.eigenvectors();
    scales = ev.cwiseSqrt();
    inv_sqrt = basis * scales.cwiseInverse().asDiagonal() * basis.transpose();

    // Collapse: no candidate can differ from the mean in double precision, or
    // the whole generation tied.
    const double spread = sigma * scales.maxCoeff();
    const double mean_scale = std::max(1.0, mean.cwiseAbs().maxCoeff());
    if (!(spread > 1e-15 * mean_scale) || !std::isfinite(sigma)) break;
    if (values[order.front()] == values[order.back()] && generation > 1 &&
        result.evaluations > 10 * lambda) {
      break;
    }
  }
  return result;
}

OptimizeResult AnnealRefine(const Objective& objective, const Eigen::VectorXd& start,
                            const AnnealOptions& options) {
  if (options.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  const int n = static_cast<int>(start.size());
  OptimizeResult result;
  result.x = start;
  result.value = objective(start);
  result.evaluations = 1;
  CounterRng rng(HashCombine(options.seed, 0x616e6e65616cULL));
  double scale = options.initial_scale;
  for (int round = 0; round < options.rounds; ++round) {
    for (int k = 0; k < options.proposals_per_round; ++k) {
      const double u = rng.Uniform(-1.0, 1.0);
      Eigen::VectorXd candidate = result.x;
      candidate(k % n) += std::log1p(u * scale);
      const double value = objective(candidate);
      ++result.evaluations;
      if (value < result.value) {
        result.value = value;
        result.x = candidate;
      }
    }
    result.trace.push_back(result.value);
    scale *= options.decay;
  }
  return result;
}

}  // namespace realm::sysid
