// lfseq/grad_check.hpp
// End-to-end finite-difference validation of the parameter gradients:
// features -> net -> criterion, every weight and bias perturbed.

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

#ifndef LFSEQ_GRAD_CHECK_HPP
#define LFSEQ_GRAD_CHECK_HPP

#include "lfseq/criteria.hpp"
#include "lfseq/net.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lfseq {

struct GradCheckOptions {
  int feature_dim = 3;
  std::vector<int> hidden_dims = {5};
  int max_states = 6;
  int max_pdfs = 4;
  int max_frames = 5;
  double leaky_coeff = 0.1;
  double fd_step = 1e-5;
};

struct GradCheckResult {
  std::string criterion;
  double max_rel_err = 0.0;  // inf-norm relative disagreement
  bool passed = false;
};

// One seeded random instance per call; checks mmi, bmmi (b = 0.2) and smbr
// (mu = 0.013). The boost / accuracy tables are frozen at the unperturbed
// parameters, matching the analytic gradient convention.
std::vector<GradCheckResult> RunNetGradCheck(uint64_t seed,
                                             const GradCheckOptions &opts,
                                             double tol);

}  // namespace lfseq

#endif  // LFSEQ_GRAD_CHECK_HPP
