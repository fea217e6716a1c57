// lfseq/topology.hpp
// Left-to-right HMM topology shared by every phone.

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

#ifndef LFSEQ_TOPOLOGY_HPP
#define LFSEQ_TOPOLOGY_HPP

#include "lfseq/common.hpp"

#include <vector>

namespace lfseq {

// Each phone is a chain of `states_per_phone` states. State k has a self-loop
// and a forward transition (the last state's forward transition leaves the
// phone). Each (phone, state) pair maps to a pdf id; by default the mapping
// is the dense one pdf = phone * states_per_phone + state, but pdfs may be
// shared across states as long as ids stay dense in [0, num_pdfs).
class HmmTopology {
 public:
  HmmTopology() = default;

  // Dense pdf assignment, identical (self, forward) rows for every state.
  HmmTopology(int num_phones, int states_per_phone, double self_loop_prob);

  // Custom pdf assignment: pdf_map is num_phones x states_per_phone,
  // row-major, ids dense in [0, max+1).
  HmmTopology(int num_phones, int states_per_phone, double self_loop_prob,
              std::vector<int> pdf_map);

  int NumPhones() const { return num_phones_; }
  int StatesPerPhone() const { return states_per_phone_; }
  int NumPdfs() const { return num_pdfs_; }

  double SelfLoopProb(int state) const { return self_loop_(state); }
  double ForwardProb(int state) const { return 1.0 - self_loop_(state); }

  int PdfOf(int phone, int state) const {
    return pdf_map_[phone * states_per_phone_ + state];
  }

  // Pdfs assigned to a given phone (used for the silence pdf set).
  std::vector<int> PhonePdfs(int phone) const;

  // Minimum frames a single phone instance must occupy.
  int MinDuration() const { return states_per_phone_; }

  void Validate() const;

 private:
  int num_phones_ = 0;
  int states_per_phone_ = 0;
  int num_pdfs_ = 0;
  Vector self_loop_;          // per state within a phone
  std::vector<int> pdf_map_;  // num_phones * states_per_phone
};

}  // namespace lfseq

#endif  // LFSEQ_TOPOLOGY_HPP
