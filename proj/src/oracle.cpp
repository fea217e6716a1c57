// oracle.cpp

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "lfseq/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace lfseq {

namespace {

void ApplyLeak(const FbProblem &problem, Vector *v) {
  double lambda = problem.LeakyCoeff();
  if (lambda != 0.0) *v += lambda * v->sum() * problem.Initial();
}

// Emission-weighted sequence weight at the given log-likelihoods.
double SeqWeight(const std::vector<int> &pdf_seq, double trans_mass,
                 const LogLikes &loglikes, const Matrix *boost) {
  double log_em = 0.0;
  for (size_t t = 0; t < pdf_seq.size(); t++) {
    log_em += loglikes(t, pdf_seq[t]);
    if (boost != nullptr) log_em -= (*boost)(t, pdf_seq[t]);
  }
  return trans_mass * std::exp(log_em);
}

}  // namespace

PathEnumeration EnumeratePdfSequences(const FbProblem &problem, int num_frames,
                                      int num_pdfs, int cap) {
  PathEnumeration paths;
  paths.num_frames = num_frames;

  Vector v0 = problem.Initial();
  ApplyLeak(problem, &v0);

  std::vector<int> seq(num_frames);
  // Depth-first over pdf prefixes, carrying the transition-only state mass.
  auto recurse = [&](auto &&self, int depth, const Vector &v) -> void {
    if (depth == num_frames) {
      double mass = v.dot(problem.FinalProbs());
      if (mass > 0.0) {
        Require(static_cast<int>(paths.pdf_seqs.size()) < cap,
                "path enumeration exceeds cap of ", cap, " sequences");
        paths.pdf_seqs.push_back(seq);
        paths.trans_mass.push_back(mass);
      }
      return;
    }
    const auto &arcs = problem.ArcsAt(depth);
    const auto &probs = problem.ArcProbsAt(depth);
    for (int j = 0; j < num_pdfs; j++) {
      Vector next = Vector::Zero(problem.NumStates());
      bool any = false;
      for (size_t a = 0; a < arcs.size(); a++) {
        if (arcs[a].pdf != j) continue;
        double m = v(arcs[a].src) * probs[a];
        if (m != 0.0) {
          next(arcs[a].dst) += m;
          any = true;
        }
      }
      if (!any) continue;
      ApplyLeak(problem, &next);
      seq[depth] = j;
      self(self, depth + 1, next);
    }
  };
  recurse(recurse, 0, v0);
  return paths;
}

double OracleTotal(const PathEnumeration &paths, const LogLikes &loglikes,
                   const Matrix *boost) {
  double total = 0.0;
  for (size_t i = 0; i < paths.pdf_seqs.size(); i++)
    total += SeqWeight(paths.pdf_seqs[i], paths.trans_mass[i], loglikes, boost);
  return total;
}

Matrix OracleGamma(const PathEnumeration &paths, const LogLikes &loglikes,
                   const Matrix *boost) {
  Matrix gamma = Matrix::Zero(loglikes.rows(), loglikes.cols());
  double total = 0.0;
  for (size_t i = 0; i < paths.pdf_seqs.size(); i++) {
    double w = SeqWeight(paths.pdf_seqs[i], paths.trans_mass[i], loglikes, boost);
    total += w;
    for (int t = 0; t < paths.num_frames; t++)
      gamma(t, paths.pdf_seqs[i][t]) += w;
  }
  Require(total > 0.0, "oracle: zero total path mass");
  return gamma / total;
}

double OracleAvgAccuracy(const PathEnumeration &paths, const LogLikes &loglikes,
                         const Matrix &acc) {
  double total = 0.0, weighted = 0.0;
  for (size_t i = 0; i < paths.pdf_seqs.size(); i++) {
    double w = SeqWeight(paths.pdf_seqs[i], paths.trans_mass[i], loglikes, nullptr);
    double a = 0.0;
    for (int t = 0; t < paths.num_frames; t++)
      a += acc(t, paths.pdf_seqs[i][t]);
    total += w;
    weighted += w * a;
  }
  Require(total > 0.0, "oracle: zero total path mass");
  return weighted / total;
}

Matrix OracleAbar(const PathEnumeration &paths, const LogLikes &loglikes,
                  const Matrix &acc) {
  Matrix mass = Matrix::Zero(loglikes.rows(), loglikes.cols());
  Matrix acc_mass = Matrix::Zero(loglikes.rows(), loglikes.cols());
  for (size_t i = 0; i < paths.pdf_seqs.size(); i++) {
    double w = SeqWeight(paths.pdf_seqs[i], paths.trans_mass[i], loglikes, nullptr);
    double a = 0.0;
    for (int t = 0; t < paths.num_frames; t++)
      a += acc(t, paths.pdf_seqs[i][t]);
    for (int t = 0; t < paths.num_frames; t++) {
      int j = paths.pdf_seqs[i][t];
      mass(t, j) += w;
      acc_mass(t, j) += w * a;
    }
  }
  Matrix abar = Matrix::Zero(loglikes.rows(), loglikes.cols());
  for (int t = 0; t < abar.rows(); t++)
    for (int j = 0; j < abar.cols(); j++)
      if (mass(t, j) > 0.0) abar(t, j) = acc_mass(t, j) / mass(t, j);
  return abar;
}

double DenseTotalLogprob(const FbProblem &problem, const LogLikes &loglikes,
                         const Matrix *boost) {
  const int num_states = problem.NumStates();
  const int num_frames = static_cast<int>(loglikes.rows());
  Matrix leak = Matrix::Identity(num_states, num_states);
  if (problem.LeakyCoeff() != 0.0)
    leak += problem.LeakyCoeff() * problem.Initial() *
            Vector::Ones(num_states).transpose();

  Vector v = leak * problem.Initial();
  double log_scale = 0.0;
  for (int t = 0; t < num_frames; t++) {
    Matrix transfer = Matrix::Zero(num_states, num_states);
    const auto &arcs = problem.ArcsAt(t);
    const auto &probs = problem.ArcProbsAt(t);
    for (size_t a = 0; a < arcs.size(); a++) {
      double em = std::exp(loglikes(t, arcs[a].pdf) -
                           (boost ? (*boost)(t, arcs[a].pdf) : 0.0));
      transfer(arcs[a].dst, arcs[a].src) += probs[a] * em;
    }
    v = leak * (transfer * v);
    double s = v.sum();
    Require(s > 0.0, "dense oracle: mass vanished at frame ", t);
    v /= s;
    log_scale += std::log(s);
  }
  double final_mass = v.dot(problem.FinalProbs());
  Require(final_mass > 0.0, "dense oracle: no final mass");
  return log_scale + std::log(final_mass);
}

OracleOutput OracleCriterion(const PathEnumeration &den_paths,
                             const PathEnumeration &num_paths,
                             const LogLikes &loglikes,
                             const CriterionConfig &cfg,
                             const Matrix &table_gamma) {
  cfg.Validate();
  Matrix boost;
  const Matrix *boost_ptr = nullptr;
  if (cfg.boost != 0.0) {
    boost = cfg.boost * table_gamma;
    boost_ptr = &boost;
  }
  AccuracyModel acc_model{table_gamma, cfg.silence_pdfs, cfg.silence_scale};
  Matrix acc = acc_model.FrameAccuracies();

  auto objective_at = [&](const LogLikes &ll) -> double {
    double obj;
    if (cfg.kind == CriterionKind::kSmbr) {
      obj = OracleAvgAccuracy(den_paths, ll, acc);
    } else {
      obj = std::log(OracleTotal(num_paths, ll)) -
            std::log(OracleTotal(den_paths, ll, boost_ptr));
    }
    if (cfg.xent_smooth != 0.0)
      obj += XentRegularizer(table_gamma, ll, cfg.xent_smooth).value;
    return obj;
  };

  OracleOutput out;
  out.objective = objective_at(loglikes);
  out.grad = Matrix::Zero(loglikes.rows(), loglikes.cols());
  const double step = 1e-5;
  LogLikes perturbed = loglikes;
  for (int t = 0; t < loglikes.rows(); t++) {
    for (int j = 0; j < loglikes.cols(); j++) {
      perturbed(t, j) = loglikes(t, j) + step;
      double up = objective_at(perturbed);
      perturbed(t, j) = loglikes(t, j) - step;
      double down = objective_at(perturbed);
      perturbed(t, j) = loglikes(t, j);
      out.grad(t, j) = (up - down) / (2.0 * step);
    }
  }
  return out;
}

RandomInstance MakeRandomInstance(uint64_t seed,
                                  const RandomInstanceOptions &opts) {
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uniform_real = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  const int states_per_phone = uniform_int(1, 2);
  const int max_phones = std::max(1, opts.max_states / states_per_phone);
  const int num_phones = uniform_int(1, max_phones);
  const int raw_pdfs = num_phones * states_per_phone;

  std::vector<int> pdf_map(raw_pdfs);
  for (int i = 0; i < raw_pdfs; i++)
    pdf_map[i] = i % std::min(raw_pdfs, opts.max_pdfs);
  HmmTopology topo(num_phones, states_per_phone, uniform_real(0.3, 0.7),
                   std::move(pdf_map));

  auto random_row = [&](int size) {
    Vector row(size);
    for (int i = 0; i < size; i++) row(i) = uniform_real(0.2, 1.0);
    return Vector(row / row.sum());
  };
  Vector start = random_row(num_phones + 1);
  Matrix bigram(num_phones, num_phones + 1);
  for (int h = 0; h < num_phones; h++)
    bigram.row(h) = random_row(num_phones + 1).transpose();
  PhoneLm lm(std::move(start), std::move(bigram), 1.0);

  RandomInstance inst;
  inst.topo = topo;
  inst.lm = lm;
  inst.den = BuildDenominatorGraph(lm, topo, opts.leaky_coeff);

  const int min_frames = std::max(2, states_per_phone);
  const int num_frames = uniform_int(min_frames, std::max(min_frames, opts.max_frames));

  // Random alignment filling exactly num_frames.
  const int max_segments = num_frames / states_per_phone;
  const int num_segments = uniform_int(1, max_segments);
  std::vector<int> durations(num_segments, states_per_phone);
  for (int extra = num_frames - num_segments * states_per_phone; extra > 0; extra--)
    durations[uniform_int(0, num_segments - 1)]++;
  inst.ali.utt_id = "rand" + std::to_string(seed);
  for (int seg = 0; seg < num_segments; seg++) {
    int phone = uniform_int(0, num_phones - 1);
    std::vector<int> state_frames(states_per_phone, 1);
    for (int extra = durations[seg] - states_per_phone; extra > 0; extra--)
      state_frames[uniform_int(0, states_per_phone - 1)]++;
    for (int k = 0; k < states_per_phone; k++)
      for (int r = 0; r < state_frames[k]; r++)
        inst.ali.frames.push_back({phone, k, topo.PdfOf(phone, k)});
  }

  int tolerance = opts.tolerance >= 0 ? opts.tolerance : uniform_int(0, 1);
  inst.sup = BuildNumeratorGraph(inst.ali, tolerance, topo);

  std::normal_distribution<double> normal(0.0, 1.0);
  inst.loglikes.resize(num_frames, topo.NumPdfs());
  for (int t = 0; t < num_frames; t++)
    for (int j = 0; j < topo.NumPdfs(); j++) inst.loglikes(t, j) = normal(rng);
  return inst;
}

namespace {

double RelErr(double a, double b) {
  double denom = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) / denom;
}

double GradRelErr(const Matrix &a, const Matrix &b) {
  // Entries are bounded posterior differences, so a unit floor makes this an
  // absolute comparison for vanishing gradients (where central differences
  // only deliver roundoff noise).
  double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1.0});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

std::vector<OracleCheckResult> RunOracleCheck(int num_instances, uint64_t seed,
                                              double objective_tol,
                                              double grad_tol) {
  std::vector<CriterionConfig> configs(3);
  configs[0].kind = CriterionKind::kMmi;
  configs[1].kind = CriterionKind::kBmmi;
  configs[1].boost = 0.2;
  configs[2].kind = CriterionKind::kSmbr;
  configs[2].silence_scale = 0.013;

  std::vector<OracleCheckResult> results;
  for (const CriterionConfig &base_cfg : configs) {
    OracleCheckResult res;
    res.criterion = CriterionKindName(base_cfg.kind);
    for (int i = 0; i < num_instances; i++) {
      RandomInstanceOptions opts;
      opts.leaky_coeff = (i % 2 == 0) ? 0.0 : 0.1;
      RandomInstance inst =
          MakeRandomInstance(seed + static_cast<uint64_t>(i) * 1000003, opts);

      CriterionConfig cfg = base_cfg;
      if (cfg.kind == CriterionKind::kSmbr)
        cfg.silence_pdfs = inst.topo.PhonePdfs(0);

      Matrix table_gamma =
          ComputeNumeratorStats(inst.sup, inst.loglikes, inst.den.NumPdfs()).gamma;
      CriterionOutput prod = ComputeCriterionFrozen(
          inst.den, inst.sup, inst.loglikes, cfg, table_gamma);

      FbProblem den_problem(inst.den);
      FbProblem num_problem(inst.sup);
      PathEnumeration den_paths = EnumeratePdfSequences(
          den_problem, inst.sup.NumFrames(), inst.den.NumPdfs());
      PathEnumeration num_paths = EnumeratePdfSequences(
          num_problem, inst.sup.NumFrames(), inst.den.NumPdfs());
      OracleOutput oracle =
          OracleCriterion(den_paths, num_paths, inst.loglikes, cfg, table_gamma);

      res.max_objective_rel_err = std::max(
          res.max_objective_rel_err, RelErr(prod.objective, oracle.objective));
      res.max_grad_rel_err =
          std::max(res.max_grad_rel_err, GradRelErr(prod.grad, oracle.grad));
    }
    res.passed = res.max_objective_rel_err <= objective_tol &&
                 res.max_grad_rel_err <= grad_tol;
    results.push_back(res);
  }
  return results;
}

}  // namespace lfseq
