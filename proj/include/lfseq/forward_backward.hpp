// lfseq/forward_backward.hpp
// Scaled forward-backward over denominator graphs and supervisions, with
// leaky-HMM redistribution and the accuracy-carrying recursions used by the
// state-level minimum Bayes risk criterion.

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

#ifndef LFSEQ_FORWARD_BACKWARD_HPP
#define LFSEQ_FORWARD_BACKWARD_HPP

#include "lfseq/common.hpp"
#include "lfseq/graph.hpp"
#include "lfseq/supervision.hpp"

#include <optional>
#include <vector>

namespace lfseq {

// T x J matrix of pseudo log-likelihoods log p(o_t | s_t = j). The raw model
// output is used as-is: no acoustic scaling and no division by the prior.
using LogLikes = Matrix;

// Uniform view of the two graph kinds the recursions run over. Supervisions
// have unit arc weights, unit initial/final weights and no leak.
class FbProblem {
 public:
  explicit FbProblem(const DenominatorGraph &graph);
  explicit FbProblem(const Supervision &sup);

  int NumStates() const { return num_states_; }
  double LeakyCoeff() const { return leaky_coeff_; }
  const Vector &Initial() const { return initial_; }
  const Vector &FinalProbs() const { return final_probs_; }

  // Arcs consuming 0-based frame t, parallel probability array.
  const std::vector<Arc> &ArcsAt(int t) const {
    return sup_ ? sup_->ArcsAt(t) : *den_arcs_;
  }
  const std::vector<double> &ArcProbsAt(int t) const {
    return sup_ ? sup_arc_probs_[t] : den_arc_probs_;
  }

 private:
  const Supervision *sup_ = nullptr;
  const std::vector<Arc> *den_arcs_ = nullptr;
  std::vector<double> den_arc_probs_;
  std::vector<std::vector<double>> sup_arc_probs_;
  int num_states_ = 0;
  double leaky_coeff_ = 0.0;
  Vector initial_, final_probs_;
};

// Per-frame renormalized alphas/betas with accumulated log scales.
// alpha.row(t) sums to 1; beta is compatibly scaled so that
// sum_s alpha(t, s) * beta(t, s) is constant over t.
struct AlphaBeta {
  Matrix alpha;       // (T+1) x S
  Matrix beta;        // (T+1) x S
  Vector log_scales;  // length T+1, log c_t
  double total_logprob = 0.0;
};

// Accuracy-carrying quantities of the single-pass sMBR computation.
// alpha_mbr(s, t) = expected accumulated accuracy given state s at time t;
// beta_mbr(s, t) = expected accuracy still to come.
struct SmbrQuantities {
  Matrix alpha_mbr;  // (T+1) x S
  Matrix beta_mbr;   // (T+1) x S, filled by SmbrBackward
  double total_avg_accuracy = 0.0;
};

// Denominator occupancies plus the conditional expected path accuracy
// used by the sMBR gradient.
struct SmbrGradientTerms {
  Matrix gamma;  // T x J
  Matrix abar;   // T x J, E[path accuracy | pdf j consumed at frame t]
};

// Alpha recursion. When `boost` is supplied the emission probability is
// p(o_t | j) * exp(-boost(t, j)); boost never mutates the log-likelihoods.
// Fills alpha, log_scales and total_logprob.
AlphaBeta Forward(const FbProblem &problem, const LogLikes &loglikes,
                  const Matrix *boost = nullptr);

// Beta recursion mirroring Forward; the leak is applied as the transpose of
// the forward leak. Must be called with the AlphaBeta returned by Forward
// under the same boost table.
void Backward(const FbProblem &problem, const LogLikes &loglikes,
              const Matrix *boost, AlphaBeta *ab);

// Per-frame pdf posteriors from a completed AlphaBeta. Leak transitions are
// non-emitting and contribute no occupancy; every row sums to 1.
Matrix Occupancies(const FbProblem &problem, const LogLikes &loglikes,
                   const Matrix *boost, const AlphaBeta &ab);

// Accuracy forward pass alongside an already-computed alpha recursion.
// acc is the T x J per-frame state-level accuracy table.
SmbrQuantities SmbrForward(const FbProblem &problem, const LogLikes &loglikes,
                           const Matrix &acc, const AlphaBeta &ab);

// Accuracy backward pass; fills smbr->beta_mbr and returns the gradient
// terms. Together with Forward/SmbrForward this is one forward and one
// backward sweep in total.
SmbrGradientTerms SmbrBackward(const FbProblem &problem, const LogLikes &loglikes,
                               const Matrix &acc, const AlphaBeta &ab,
                               SmbrQuantities *smbr);

}  // namespace lfseq

#endif  // LFSEQ_FORWARD_BACKWARD_HPP
