// lfseq/supervision.hpp
// Per-utterance alignments and time-constrained numerator graphs.

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

#ifndef LFSEQ_SUPERVISION_HPP
#define LFSEQ_SUPERVISION_HPP

#include "lfseq/common.hpp"
#include "lfseq/graph.hpp"
#include "lfseq/text_io.hpp"
#include "lfseq/topology.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lfseq {

struct AlignedFrame {
  int phone = 0;
  int state = 0;  // state index within the phone
  int pdf = 0;
};

// Ground-truth frame-level alignment of one utterance.
struct Alignment {
  std::string utt_id;
  std::vector<AlignedFrame> frames;

  int NumFrames() const { return static_cast<int>(frames.size()); }
  std::vector<int> PhoneSequence() const;  // one entry per phone segment

  // Checks that phones segment into contiguous runs whose states walk
  // 0..n-1 in order and that pdfs match the topology.
  void Validate(const HmmTopology &topo) const;
};

// Acyclic time-constrained acceptor over reference state sequences.
// Numerator state ids are shared across frame layers; an arc listed under
// frame t connects a layer-t state to a layer-(t+1) state. All arcs carry
// weight 1.
class Supervision {
 public:
  Supervision() = default;
  Supervision(std::string utt_id, int num_frames, int num_states,
              std::vector<std::vector<Arc>> frame_arcs,
              std::vector<int> initial_states, std::vector<int> final_states);

  const std::string &UttId() const { return utt_id_; }
  int NumFrames() const { return num_frames_; }
  int NumStates() const { return num_states_; }
  const std::vector<Arc> &ArcsAt(int t) const { return frame_arcs_[t]; }
  const std::vector<int> &InitialStates() const { return initial_states_; }
  const std::vector<int> &FinalStates() const { return final_states_; }

  // Largest pdf id referenced, plus one.
  int MaxPdfPlusOne() const;

  // Rejects empty languages (no complete initial->final path).
  void Validate() const;

  void Write(std::ostream &os) const;
  static Supervision Read(LineReader *reader);

 private:
  std::string utt_id_;
  int num_frames_ = 0;
  int num_states_ = 0;
  std::vector<std::vector<Arc>> frame_arcs_;  // frame_arcs_[t], t in [0, T)
  std::vector<int> initial_states_, final_states_;
};

// Builds the numerator graph with label tolerance: each boundary between
// consecutive state runs of the alignment may shift by up to `tolerance`
// frames, clamped to the utterance bounds; every run keeps at least one
// frame. tolerance = 0 accepts exactly the aligned pdf sequence.
Supervision BuildNumeratorGraph(const Alignment &ali, int tolerance,
                                const HmmTopology &topo);

void WriteAlignments(std::ostream &os, const std::vector<Alignment> &alis);
std::vector<Alignment> ReadAlignments(LineReader *reader);
void WriteAlignmentsFile(const std::string &path, const std::vector<Alignment> &alis);
std::vector<Alignment> ReadAlignmentsFile(const std::string &path);

void WriteSupervisionFile(const std::string &path, const Supervision &sup);
Supervision ReadSupervisionFile(const std::string &path);

}  // namespace lfseq

#endif  // LFSEQ_SUPERVISION_HPP
