// criteria.cpp

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

#include "lfseq/criteria.hpp"

#include <algorithm>
#include <cmath>

namespace lfseq {

CriterionKind ParseCriterionKind(const std::string &name) {
  if (name == "mmi") return CriterionKind::kMmi;
  if (name == "bmmi") return CriterionKind::kBmmi;
  if (name == "smbr") return CriterionKind::kSmbr;
  Fail("unknown criterion '", name, "' (valid: mmi, bmmi, smbr)");
}

std::string CriterionKindName(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::kMmi: return "mmi";
    case CriterionKind::kBmmi: return "bmmi";
    case CriterionKind::kSmbr: return "smbr";
  }
  return "?";
}

void CriterionConfig::Validate() const {
  Require(boost >= 0.0, "boosting factor must be >= 0");
  Require(kind != CriterionKind::kMmi || boost == 0.0,
          "plain MMI requires boost = 0");
  Require(silence_scale > 0.0 && silence_scale <= 1.0,
          "silence scale must lie in (0, 1]");
  Require(xent_smooth >= 0.0, "xent smooth factor must be >= 0");
}

Matrix AccuracyModel::FrameAccuracies() const {
  Matrix acc = gamma_num;
  for (int j : silence_pdfs) {
    Require(j >= 0 && j < acc.cols(), "silence pdf ", j, " out of range");
    acc.col(j) *= silence_scale;
  }
  return acc;
}

NumeratorStats ComputeNumeratorStats(const Supervision &sup,
                                     const LogLikes &loglikes, int num_pdfs) {
  Require(sup.NumFrames() == loglikes.rows(), "supervision '", sup.UttId(),
          "' has ", sup.NumFrames(), " frames but log-likelihoods have ",
          loglikes.rows());
  Require(sup.MaxPdfPlusOne() <= num_pdfs && num_pdfs == loglikes.cols(),
          "pdf count mismatch between supervision, graph and log-likelihoods");
  FbProblem problem(sup);
  NumeratorStats stats;
  AlphaBeta ab = Forward(problem, loglikes);
  Backward(problem, loglikes, nullptr, &ab);
  stats.logprob = ab.total_logprob;
  stats.gamma = Occupancies(problem, loglikes, nullptr, ab);
  return stats;
}

namespace {

CriterionOutput ComputeWithTables(const DenominatorGraph &den,
                                  const NumeratorStats &num,
                                  const LogLikes &loglikes,
                                  const CriterionConfig &cfg,
                                  const Matrix &table_gamma) {
  cfg.Validate();
  Require(den.NumPdfs() == loglikes.cols(), "graph has ", den.NumPdfs(),
          " pdfs but log-likelihoods have ", loglikes.cols());

  CriterionOutput out;
  out.num_logprob = num.logprob;

  FbProblem den_problem(den);
  if (cfg.kind == CriterionKind::kSmbr) {
    AccuracyModel acc_model{table_gamma, cfg.silence_pdfs, cfg.silence_scale};
    Matrix acc = acc_model.FrameAccuracies();
    AlphaBeta ab = Forward(den_problem, loglikes);
    Backward(den_problem, loglikes, nullptr, &ab);
    SmbrQuantities smbr = SmbrForward(den_problem, loglikes, acc, ab);
    SmbrGradientTerms terms = SmbrBackward(den_problem, loglikes, acc, ab, &smbr);
    out.den_logprob = ab.total_logprob;
    out.avg_accuracy = smbr.total_avg_accuracy;
    out.objective = smbr.total_avg_accuracy;
    out.grad = (terms.gamma.array() *
                (terms.abar.array() - smbr.total_avg_accuracy))
                   .matrix();
  } else {
    // MMI and bMMI share one code path; b = 0 means no boost table at all,
    // so the arithmetic is bit-identical to plain MMI.
    Matrix boost;
    const Matrix *boost_ptr = nullptr;
    if (cfg.boost != 0.0) {
      boost = cfg.boost * table_gamma;
      boost_ptr = &boost;
    }
    AlphaBeta ab = Forward(den_problem, loglikes, boost_ptr);
    Backward(den_problem, loglikes, boost_ptr, &ab);
    Matrix gamma_den = Occupancies(den_problem, loglikes, boost_ptr, ab);
    out.den_logprob = ab.total_logprob;
    out.objective = out.num_logprob - out.den_logprob;
    out.grad = num.gamma - gamma_den;
  }

  if (cfg.xent_smooth != 0.0) {
    XentResult xent = XentRegularizer(table_gamma, loglikes, cfg.xent_smooth);
    out.xent_value = xent.value;
    out.objective += xent.value;
    out.grad += xent.grad;
  }
  Require(out.grad.allFinite(), "non-finite criterion gradient");
  return out;
}

}  // namespace

CriterionOutput ComputeCriterion(const DenominatorGraph &den,
                                 const Supervision &sup,
                                 const LogLikes &loglikes,
                                 const CriterionConfig &cfg) {
  // The numerator occupancies double as the table inputs, tracking the
  // current model.
  NumeratorStats num = ComputeNumeratorStats(sup, loglikes, den.NumPdfs());
  return ComputeWithTables(den, num, loglikes, cfg, num.gamma);
}

CriterionOutput ComputeCriterionFrozen(const DenominatorGraph &den,
                                       const Supervision &sup,
                                       const LogLikes &loglikes,
                                       const CriterionConfig &cfg,
                                       const Matrix &frozen_gamma_num) {
  NumeratorStats num = ComputeNumeratorStats(sup, loglikes, den.NumPdfs());
  return ComputeWithTables(den, num, loglikes, cfg, frozen_gamma_num);
}

CriterionOutput ComputeMmi(const DenominatorGraph &den, const Supervision &sup,
                           const LogLikes &loglikes, const CriterionConfig &cfg) {
  Require(cfg.kind == CriterionKind::kMmi, "config kind is not mmi");
  return ComputeCriterion(den, sup, loglikes, cfg);
}

CriterionOutput ComputeBmmi(const DenominatorGraph &den, const Supervision &sup,
                            const LogLikes &loglikes, const CriterionConfig &cfg) {
  Require(cfg.kind == CriterionKind::kBmmi, "config kind is not bmmi");
  return ComputeCriterion(den, sup, loglikes, cfg);
}

CriterionOutput ComputeSmbr(const DenominatorGraph &den, const Supervision &sup,
                            const LogLikes &loglikes, const CriterionConfig &cfg) {
  Require(cfg.kind == CriterionKind::kSmbr, "config kind is not smbr");
  return ComputeCriterion(den, sup, loglikes, cfg);
}

XentResult XentRegularizer(const Matrix &gamma_num, const LogLikes &loglikes,
                           double smooth) {
  Require(gamma_num.rows() == loglikes.rows() &&
              gamma_num.cols() == loglikes.cols(),
          "xent target dimensions do not match the log-likelihoods");
  XentResult result;
  result.grad = Matrix::Zero(loglikes.rows(), loglikes.cols());
  if (smooth == 0.0) return result;

  for (int t = 0; t < loglikes.rows(); t++) {
    double max_ll = loglikes.row(t).maxCoeff();
    Eigen::ArrayXd shifted = loglikes.row(t).transpose().array() - max_ll;
    double log_z = std::log(shifted.exp().sum());
    Eigen::ArrayXd log_softmax = shifted - log_z;
    result.value += smooth * (gamma_num.row(t).transpose().array() * log_softmax).sum();
    result.grad.row(t) =
        smooth * (gamma_num.row(t).transpose().array() - log_softmax.exp())
                     .matrix()
                     .transpose();
  }
  return result;
}

}  // namespace lfseq
