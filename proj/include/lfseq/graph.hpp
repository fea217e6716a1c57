// lfseq/graph.hpp
// Cyclic denominator graph: phone LM composed with the HMM topology.

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

#ifndef LFSEQ_GRAPH_HPP
#define LFSEQ_GRAPH_HPP

#include "lfseq/common.hpp"
#include "lfseq/phone_lm.hpp"
#include "lfseq/text_io.hpp"
#include "lfseq/topology.hpp"

#include <iosfwd>
#include <vector>

namespace lfseq {

// An emitting transition. The pdf is the label consumed when traversing the
// arc (the destination state's pdf under the build convention here).
struct Arc {
  int src = 0;
  int dst = 0;
  int pdf = 0;
  double log_prob = 0.0;
};

// Weighted cyclic acceptor over HMM states. Leakiness (coefficient lambda) is
// not materialized as arcs; the forward-backward applies it algorithmically.
// Immutable after construction.
class DenominatorGraph {
 public:
  DenominatorGraph() = default;
  DenominatorGraph(int num_states, int num_pdfs, std::vector<Arc> arcs,
                   Vector initial, Vector final_probs, double leaky_coeff);

  int NumStates() const { return num_states_; }
  int NumPdfs() const { return num_pdfs_; }
  double LeakyCoeff() const { return leaky_coeff_; }
  const std::vector<Arc> &Arcs() const { return arcs_; }
  const Vector &Initial() const { return initial_; }
  const Vector &FinalProbs() const { return final_probs_; }

  // Arc indices grouped by source / destination state.
  const std::vector<int> &OutArcs(int state) const { return out_arcs_[state]; }
  const std::vector<int> &InArcs(int state) const { return in_arcs_[state]; }

  // Phone metadata for decoding (dense state layout s = phone * n + k).
  // Not part of the serialized format; re-attach after deserialization.
  void AttachPhoneInfo(int states_per_phone);
  bool HasPhoneInfo() const { return states_per_phone_ > 0; }
  int StatesPerPhone() const { return states_per_phone_; }
  int PhoneOfState(int state) const { return state / states_per_phone_; }

  // Checks initial normalization, arc sanity, reachability from initial
  // states and co-reachability of final states. Throws on violation.
  void Validate() const;

  void Write(std::ostream &os) const;
  static DenominatorGraph Read(LineReader *reader);

 private:
  void BuildIndex();

  int num_states_ = 0;
  int num_pdfs_ = 0;
  double leaky_coeff_ = 0.0;
  std::vector<Arc> arcs_;
  Vector initial_;      // P_0, sums to 1
  Vector final_probs_;  // per-state termination probability
  std::vector<std::vector<int>> out_arcs_, in_arcs_;
  int states_per_phone_ = 0;
};

// Expands the phone LM with the topology: one state chain per phone,
// cross-phone arcs weighted by forward_prob * P(next | cur), final weight
// forward_prob * P(end | cur), P_0 from P(. | start) renormalized over phones.
DenominatorGraph BuildDenominatorGraph(const PhoneLm &lm, const HmmTopology &topo,
                                       double leaky_coeff);

void WriteDenominatorGraphFile(const std::string &path, const DenominatorGraph &g);
DenominatorGraph ReadDenominatorGraphFile(const std::string &path);

}  // namespace lfseq

#endif  // LFSEQ_GRAPH_HPP
