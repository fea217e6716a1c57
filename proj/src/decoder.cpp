// decoder.cpp

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

#include "lfseq/decoder.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace lfseq {

DecodeResult Decode(const DenominatorGraph &graph, const LogLikes &loglikes) {
  Require(graph.HasPhoneInfo(), "decoding needs phone info on the graph");
  Require(loglikes.cols() == graph.NumPdfs(), "log-likelihood width ",
          loglikes.cols(), " does not match graph pdf count ",
          graph.NumPdfs());
  const int num_states = graph.NumStates();
  const int num_frames = static_cast<int>(loglikes.rows());
  const double kNegInf = -std::numeric_limits<double>::infinity();
  const std::vector<Arc> &arcs = graph.Arcs();

  // score[t][s]: best log probability of reaching s after t frames. Arcs are
  // scanned in index order and only strict improvements are kept, so ties go
  // to the smallest arc index.
  Vector score(num_states);
  for (int s = 0; s < num_states; s++)
    score(s) = graph.Initial()(s) > 0.0 ? std::log(graph.Initial()(s))
                                        : kNegInf;
  std::vector<std::vector<int>> backptr(
      num_frames, std::vector<int>(num_states, -1));  // arc index per (t, dst)
  Vector next(num_states);
  for (int t = 0; t < num_frames; t++) {
    next.setConstant(kNegInf);
    for (int a = 0; a < static_cast<int>(arcs.size()); a++) {
      const Arc &arc = arcs[a];
      if (score(arc.src) == kNegInf) continue;
      double cand = score(arc.src) + arc.log_prob + loglikes(t, arc.pdf);
      if (cand > next(arc.dst)) {
        next(arc.dst) = cand;
        backptr[t][arc.dst] = a;
      }
    }
    score = next;
  }

  int best_state = -1;
  double best = kNegInf;
  for (int s = 0; s < num_states; s++) {
    if (graph.FinalProbs()(s) <= 0.0 || score(s) == kNegInf) continue;
    double cand = score(s) + std::log(graph.FinalProbs()(s));
    if (cand > best) {
      best = cand;
      best_state = s;
    }
  }
  Require(best_state >= 0, "no complete path through the graph");

  DecodeResult result;
  result.log_score = best;
  result.states.assign(num_frames + 1, -1);
  result.pdfs.assign(num_frames, -1);
  result.states[num_frames] = best_state;
  for (int t = num_frames - 1; t >= 0; t--) {
    const Arc &arc = arcs[backptr[t][result.states[t + 1]]];
    result.pdfs[t] = arc.pdf;
    result.states[t] = arc.src;
  }

  // Collapse the state path to phones. Frame t is emitted by states[t + 1];
  // a new phone instance begins when an arc enters state 0 of a phone from a
  // different phone, or re-enters from the last state of the same phone.
  // With a single-state topology a same-phone self transition cannot be told
  // apart from a re-entry; it is treated as a continuation.
  const int n = graph.StatesPerPhone();
  for (int t = 0; t < num_frames; t++) {
    int src = result.states[t], dst = result.states[t + 1];
    int dst_phone = graph.PhoneOfState(dst);
    bool entry;
    if (t == 0) {
      entry = true;
    } else {
      int src_phone = graph.PhoneOfState(src);
      int src_k = src - src_phone * n, dst_k = dst - dst_phone * n;
      entry = dst_k == 0 &&
              (dst_phone != src_phone || (src_k == n - 1 && n > 1));
    }
    if (entry) result.phones.push_back(dst_phone);
  }
  return result;
}

double EditCounts::ErrorRate() const {
  if (ref_length == 0) return TotalErrors() == 0 ? 0.0 : 1.0;
  return static_cast<double>(TotalErrors()) / ref_length;
}

void EditCounts::Add(const EditCounts &other) {
  substitutions += other.substitutions;
  insertions += other.insertions;
  deletions += other.deletions;
  ref_length += other.ref_length;
}

EditCounts PhoneEditDistance(const std::vector<int> &hyp,
                             const std::vector<int> &ref) {
  const int nr = static_cast<int>(ref.size());
  const int nh = static_cast<int>(hyp.size());
  Eigen::MatrixXi cost(nr + 1, nh + 1);
  for (int i = 0; i <= nr; i++) cost(i, 0) = i;
  for (int j = 0; j <= nh; j++) cost(0, j) = j;
  for (int i = 1; i <= nr; i++) {
    for (int j = 1; j <= nh; j++) {
      int sub = cost(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int ins = cost(i, j - 1) + 1;
      int del = cost(i - 1, j) + 1;
      cost(i, j) = std::min(sub, std::min(ins, del));
    }
  }

  EditCounts counts;
  counts.ref_length = nr;
  int i = nr, j = nh;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      int sub_cost = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      if (cost(i, j) == cost(i - 1, j - 1) + sub_cost) {
        counts.substitutions += sub_cost;
        i--;
        j--;
        continue;
      }
    }
    if (j > 0 && cost(i, j) == cost(i, j - 1) + 1) {
      counts.insertions++;
      j--;
      continue;
    }
    counts.deletions++;
    i--;
  }
  return counts;
}

}  // namespace lfseq
