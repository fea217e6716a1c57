// lfseq/phone_lm.hpp
// Bigram phone language model with uniform-floor interpolation.

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

#ifndef LFSEQ_PHONE_LM_HPP
#define LFSEQ_PHONE_LM_HPP

#include "lfseq/common.hpp"
#include "lfseq/text_io.hpp"

#include <iosfwd>
#include <vector>

namespace lfseq {

// Histories are `start` or a phone id; predictions are a phone id or
// end-of-sequence. Silence is an ordinary phone with id 0.
class PhoneLm {
 public:
  static constexpr int kOrder = 2;

  PhoneLm() = default;
  // start: length vocab_size + 1 (last entry = end-of-sequence).
  // bigram: vocab_size x (vocab_size + 1), row = history phone.
  PhoneLm(Vector start, Matrix bigram, double interp_weight);

  int VocabSize() const { return static_cast<int>(bigram_.rows()); }
  double InterpWeight() const { return interp_weight_; }
  int EndIndex() const { return VocabSize(); }

  double StartProb(int phone) const { return start_(phone); }
  double StartEndProb() const { return start_(EndIndex()); }
  double Prob(int history, int next) const { return bigram_(history, next); }
  double EndProb(int history) const { return bigram_(history, EndIndex()); }

  const Vector &StartRow() const { return start_; }
  const Matrix &BigramRows() const { return bigram_; }

  // Every row (start and per-history) must sum to 1 +- 1e-9 and contain no
  // negative entries. Throws on violation.
  void Validate() const;

  void Write(std::ostream &os) const;
  static PhoneLm Read(LineReader *reader);

 private:
  Vector start_;   // vocab_size + 1
  Matrix bigram_;  // vocab_size x (vocab_size + 1)
  double interp_weight_ = 0.0;
};

// Maximum-likelihood bigram interpolated with the uniform distribution over
// {all phones, end}: P = w * ML + (1 - w) * uniform. Histories never observed
// fall back to the uniform row.
PhoneLm EstimatePhoneLm(const std::vector<std::vector<int>> &phone_sequences,
                        int vocab_size, double interpolation_weight);

void WritePhoneLmFile(const std::string &path, const PhoneLm &lm);
PhoneLm ReadPhoneLmFile(const std::string &path);

}  // namespace lfseq

#endif  // LFSEQ_PHONE_LM_HPP
