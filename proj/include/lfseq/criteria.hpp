// lfseq/criteria.hpp
// Objective values and gradients w.r.t. the pseudo log-likelihoods for the
// MMI, boosted-MMI and state-level minimum Bayes risk criteria, plus the
// cross-entropy regularizer. All objectives are maximized.

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

#ifndef LFSEQ_CRITERIA_HPP
#define LFSEQ_CRITERIA_HPP

#include "lfseq/forward_backward.hpp"
#include "lfseq/graph.hpp"
#include "lfseq/supervision.hpp"

#include <string>
#include <vector>

namespace lfseq {

enum class CriterionKind { kMmi, kBmmi, kSmbr };

CriterionKind ParseCriterionKind(const std::string &name);
std::string CriterionKindName(CriterionKind kind);

struct CriterionConfig {
  CriterionKind kind = CriterionKind::kMmi;
  double boost = 0.0;          // b, must be 0 for plain MMI
  double silence_scale = 1.0;  // mu, used by sMBR only
  double xent_smooth = 0.0;
  std::vector<int> silence_pdfs;

  void Validate() const;
};

// Per-frame reference accuracies: a(t, j) = gamma_num(t, j), scaled by mu
// for silence pdfs.
struct AccuracyModel {
  Matrix gamma_num;
  std::vector<int> silence_pdfs;
  double silence_scale = 1.0;

  Matrix FrameAccuracies() const;
};

struct CriterionOutput {
  double objective = 0.0;
  Matrix grad;  // T x J, d objective / d loglikes
  double num_logprob = 0.0;
  double den_logprob = 0.0;
  double avg_accuracy = 0.0;  // sMBR only
  double xent_value = 0.0;
};

// Numerator forward-backward: log-probability and occupancies gamma_num.
struct NumeratorStats {
  double logprob = 0.0;
  Matrix gamma;  // T x J
};
NumeratorStats ComputeNumeratorStats(const Supervision &sup,
                                     const LogLikes &loglikes, int num_pdfs);

// Full criterion: numerator occupancies are recomputed from `loglikes` and
// used both as the gradient's gamma_num and as the boost / accuracy / xent
// target tables.
CriterionOutput ComputeCriterion(const DenominatorGraph &den,
                                 const Supervision &sup,
                                 const LogLikes &loglikes,
                                 const CriterionConfig &cfg);

// Same computation with the boost / accuracy / xent target tables held at
// `frozen_gamma_num` instead of being recomputed. The tables enter the
// objective as constants, which is the convention the analytic gradients
// assume; finite-difference checks must go through this entry point.
CriterionOutput ComputeCriterionFrozen(const DenominatorGraph &den,
                                       const Supervision &sup,
                                       const LogLikes &loglikes,
                                       const CriterionConfig &cfg,
                                       const Matrix &frozen_gamma_num);

CriterionOutput ComputeMmi(const DenominatorGraph &den, const Supervision &sup,
                           const LogLikes &loglikes, const CriterionConfig &cfg);
CriterionOutput ComputeBmmi(const DenominatorGraph &den, const Supervision &sup,
                            const LogLikes &loglikes, const CriterionConfig &cfg);
CriterionOutput ComputeSmbr(const DenominatorGraph &den, const Supervision &sup,
                            const LogLikes &loglikes, const CriterionConfig &cfg);

// value = smooth * sum_t sum_j gamma_num(t, j) * log softmax(ll(t, .))_j,
// grad = smooth * (gamma_num - softmax(ll)) per frame.
struct XentResult {
  double value = 0.0;
  Matrix grad;
};
XentResult XentRegularizer(const Matrix &gamma_num, const LogLikes &loglikes,
                           double smooth);

}  // namespace lfseq

#endif  // LFSEQ_CRITERIA_HPP
