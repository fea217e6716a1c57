// lfseq/decoder.hpp
// Viterbi decoding over the denominator graph and phone error scoring.

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

#ifndef LFSEQ_DECODER_HPP
#define LFSEQ_DECODER_HPP

#include "lfseq/common.hpp"
#include "lfseq/forward_backward.hpp"
#include "lfseq/graph.hpp"

#include <vector>

namespace lfseq {

struct DecodeResult {
  double log_score = 0.0;          // best-path log probability
  std::vector<int> states;         // T + 1 states
  std::vector<int> pdfs;           // T emission labels
  std::vector<int> phones;         // collapsed phone sequence
};

// Exact Viterbi over the emitting arcs; the leak is ignored (treated as
// lambda = 0). Ties are broken toward the smallest arc index, so the result
// is deterministic. Requires phone info on the graph for the collapse.
DecodeResult Decode(const DenominatorGraph &graph, const LogLikes &loglikes);

struct EditCounts {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int ref_length = 0;

  int TotalErrors() const { return substitutions + insertions + deletions; }
  double ErrorRate() const;
  void Add(const EditCounts &other);
};

// Levenshtein alignment of hyp against ref; on cost ties the traceback
// prefers substitution over insertion over deletion.
EditCounts PhoneEditDistance(const std::vector<int> &hyp,
                             const std::vector<int> &ref);

}  // namespace lfseq

#endif  // LFSEQ_DECODER_HPP
