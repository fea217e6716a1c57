// lfseq/common.hpp

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

#ifndef LFSEQ_COMMON_HPP
#define LFSEQ_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lfseq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// All file formats write probabilities and log-probabilities with 17
// significant digits so that round-trips are bit exact for doubles.
constexpr int kTextPrecision = 17;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

template <typename... Args>
[[noreturn]] inline void Fail(const Args &...args) {
  std::ostringstream os;
  (os << ... << args);
  throw Error(os.str());
}

template <typename... Args>
inline void Require(bool cond, const Args &...args) {
  if (!cond) Fail(args...);
}

// Runs fn(i) for i in [0, n). Results must not depend on execution order;
// callers that reduce should reduce in index order afterwards.
inline void ParallelFor(int n, int num_threads, const std::function<void(int)> &fn) {
  if (n <= 0) return;
  if (num_threads <= 0)
    num_threads = static_cast<int>(std::thread::hardware_concurrency());
  if (num_threads < 1) num_threads = 1;
  if (num_threads == 1 || n == 1) {
    for (int i = 0; i < n; i++) fn(i);
    return;
  }
  int workers = std::min(num_threads, n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; w++) {
    threads.emplace_back([&, w]() {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto &t : threads) t.join();
}

}  // namespace lfseq

#endif  // LFSEQ_COMMON_HPP
