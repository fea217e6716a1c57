// topology.cpp

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

#include "lfseq/topology.hpp"

#include <algorithm>
#include <numeric>

namespace lfseq {

HmmTopology::HmmTopology(int num_phones, int states_per_phone,
                         double self_loop_prob)
    : HmmTopology(num_phones, states_per_phone, self_loop_prob, [&] {
        std::vector<int> dense(num_phones * states_per_phone);
        std::iota(dense.begin(), dense.end(), 0);
        return dense;
      }()) {}

HmmTopology::HmmTopology(int num_phones, int states_per_phone,
                         double self_loop_prob, std::vector<int> pdf_map)
    : num_phones_(num_phones),
      states_per_phone_(states_per_phone),
      self_loop_(Vector::Constant(states_per_phone, self_loop_prob)),
      pdf_map_(std::move(pdf_map)) {
  Require(num_phones_ >= 1, "topology needs at least one phone");
  Require(states_per_phone_ >= 1, "topology needs at least one state per phone");
  Require(self_loop_prob >= 0.0 && self_loop_prob < 1.0,
          "self-loop probability must lie in [0, 1), got ", self_loop_prob);
  Require(static_cast<int>(pdf_map_.size()) == num_phones_ * states_per_phone_,
          "pdf map has wrong size");
  num_pdfs_ = *std::max_element(pdf_map_.begin(), pdf_map_.end()) + 1;
  Validate();
}

std::vector<int> HmmTopology::PhonePdfs(int phone) const {
  Require(phone >= 0 && phone < num_phones_, "phone id out of range");
  std::vector<int> pdfs;
  for (int k = 0; k < states_per_phone_; k++) {
    int j = PdfOf(phone, k);
    if (std::find(pdfs.begin(), pdfs.end(), j) == pdfs.end()) pdfs.push_back(j);
  }
  return pdfs;
}

void HmmTopology::Validate() const {
  std::vector<bool> seen(num_pdfs_, false);
  for (int j : pdf_map_) {
    Require(j >= 0 && j < num_pdfs_, "pdf id out of range");
    seen[j] = true;
  }
  for (int j = 0; j < num_pdfs_; j++)
    Require(seen[j], "pdf ids are not dense: ", j, " unused");
  for (int k = 0; k < states_per_phone_; k++) {
    double sum = SelfLoopProb(k) + ForwardProb(k);
    Require(std::abs(sum - 1.0) <= 1e-9, "state ", k,
            " transition probabilities sum to ", sum);
  }
}

}  // namespace lfseq
