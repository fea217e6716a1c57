// lfseq/oracle.hpp
// Brute-force reference implementations used by tests and the oracle-check
// command: exhaustive enumeration of emission-label sequences (with the leak
// expanded explicitly), dense-matrix recursions, and by-the-book objective
// sums with finite-difference gradients.

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

#ifndef LFSEQ_ORACLE_HPP
#define LFSEQ_ORACLE_HPP

#include "lfseq/criteria.hpp"
#include "lfseq/forward_backward.hpp"
#include "lfseq/graph.hpp"
#include "lfseq/supervision.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lfseq {

// All complete initial->final label sequences of length T. Every quantity in
// the objectives depends on a path only through its pdf sequence, so state
// paths sharing a pdf sequence are merged: trans_mass is the summed
// transition/leak/initial/final mass with emissions factored out. Leak
// transitions are expanded as explicit non-emitting steps before each frame
// and before finalization, with probability lambda * P_0(destination).
struct PathEnumeration {
  int num_frames = 0;
  std::vector<std::vector<int>> pdf_seqs;
  std::vector<double> trans_mass;
};

constexpr int kDefaultEnumerationCap = 200000;

PathEnumeration EnumeratePdfSequences(const FbProblem &problem, int num_frames,
                                      int num_pdfs,
                                      int cap = kDefaultEnumerationCap);

// sum over sequences of trans_mass * prod_t p'(o_t | j_t); boost optional.
double OracleTotal(const PathEnumeration &paths, const LogLikes &loglikes,
                   const Matrix *boost = nullptr);

// Posterior gamma(t, j) by explicit summation.
Matrix OracleGamma(const PathEnumeration &paths, const LogLikes &loglikes,
                   const Matrix *boost = nullptr);

// Expected path accuracy (and conditional variant) by explicit summation.
double OracleAvgAccuracy(const PathEnumeration &paths, const LogLikes &loglikes,
                         const Matrix &acc);
Matrix OracleAbar(const PathEnumeration &paths, const LogLikes &loglikes,
                  const Matrix &acc);

// Independent dense-matrix forward: per-frame S x S transfer matrices with
// the leak as an explicit rank-1 update.
double DenseTotalLogprob(const FbProblem &problem, const LogLikes &loglikes,
                         const Matrix *boost = nullptr);

// Objective by explicit summation, gradient by central finite differences
// (step 1e-5) on the log-likelihoods. The boost / accuracy / xent tables are
// frozen at `table_gamma`, matching the analytic convention.
struct OracleOutput {
  double objective = 0.0;
  Matrix grad;
};
OracleOutput OracleCriterion(const PathEnumeration &den_paths,
                             const PathEnumeration &num_paths,
                             const LogLikes &loglikes,
                             const CriterionConfig &cfg,
                             const Matrix &table_gamma);

// Seeded random instances for equivalence testing.
struct RandomInstanceOptions {
  int max_states = 6;
  int max_pdfs = 5;
  int max_frames = 6;
  double leaky_coeff = 0.0;
  int tolerance = -1;  // -1: random in {0, 1}
};

struct RandomInstance {
  HmmTopology topo;
  PhoneLm lm;
  DenominatorGraph den;
  Alignment ali;
  Supervision sup;
  LogLikes loglikes;
};

RandomInstance MakeRandomInstance(uint64_t seed,
                                  const RandomInstanceOptions &opts);

// Production-vs-oracle comparison over seeded instances; prints one line per
// criterion and returns false if any tolerance is exceeded.
struct OracleCheckResult {
  std::string criterion;
  double max_objective_rel_err = 0.0;
  double max_grad_rel_err = 0.0;
  bool passed = false;
};
std::vector<OracleCheckResult> RunOracleCheck(int num_instances, uint64_t seed,
                                              double objective_tol,
                                              double grad_tol);

}  // namespace lfseq

#endif  // LFSEQ_ORACLE_HPP
