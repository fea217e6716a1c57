// lfseq/synth_data.hpp
// Synthetic phone-recognition corpus with ground-truth alignments.

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

#ifndef LFSEQ_SYNTH_DATA_HPP
#define LFSEQ_SYNTH_DATA_HPP

#include "lfseq/common.hpp"
#include "lfseq/supervision.hpp"
#include "lfseq/topology.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lfseq {

// Generative model: phone transcript from a random (seeded) bigram over the
// non-silence phones, optional silence at utterance start/end, per-state
// geometric durations, spherical Gaussian emissions per pdf.
struct GenerativeSpec {
  int num_phones = 6;  // including silence phone 0
  int states_per_phone = 2;
  double self_loop_prob = 0.75;  // geometric durations, mean 4 frames/state
  int feature_dim = 10;
  double sigma = 1.0;
  double mean_separation_sigmas = 2.5;
  int min_frames = 20;
  int max_frames = 60;
  double silence_prob = 0.7;  // silence insertion at start and at end
  uint64_t seed = 0;

  HmmTopology Topology() const;
  // J x D pdf means, pairwise separated by >= mean_separation_sigmas * sigma
  // in at least one coordinate.
  Matrix PdfMeans() const;
  // True transcript bigram over non-silence phones: rows are phones
  // 1..num_phones-1, columns the same phones plus end-of-sequence.
  Matrix TranscriptBigram() const;

  void Validate() const;
};

struct Utterance {
  std::string utt_id;
  Matrix features;  // T x D
  Alignment ali;
};

// Deterministic given spec.seed; alignments are the true sampled state
// sequences.
std::vector<Utterance> GenerateCorpus(const GenerativeSpec &spec, int num_utts,
                                      const std::string &utt_prefix);

// Directory layout: <dir>/<utt_id>.feats (MAT files), <dir>/alignments.txt,
// <dir>/transcripts.txt.
void WriteCorpus(const std::string &dir, const std::vector<Utterance> &corpus);
std::vector<Utterance> ReadCorpus(const std::string &dir);

}  // namespace lfseq

#endif  // LFSEQ_SYNTH_DATA_HPP
