// test_synth_data.cpp

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

#include "lfseq/synth_data.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

using namespace lfseq;

TEST_CASE("generation is deterministic in the seed") {
  GenerativeSpec spec;
  spec.seed = 17;
  auto a = GenerateCorpus(spec, 20, "u");
  auto b = GenerateCorpus(spec, 20, "u");
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); i++) {
    CHECK(a[i].utt_id == b[i].utt_id);
    CHECK((a[i].features - b[i].features).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a[i].ali.frames.size() == b[i].ali.frames.size());
    for (size_t t = 0; t < a[i].ali.frames.size(); t++)
      CHECK(a[i].ali.frames[t].pdf == b[i].ali.frames[t].pdf);
  }
}

TEST_CASE("utterances respect the frame range and validate") {
  GenerativeSpec spec;
  spec.seed = 3;
  HmmTopology topo = spec.Topology();
  for (const Utterance &utt : GenerateCorpus(spec, 50, "u")) {
    CHECK(utt.ali.NumFrames() >= spec.min_frames);
    CHECK(utt.ali.NumFrames() <= spec.max_frames);
    CHECK(utt.features.rows() == utt.ali.NumFrames());
    CHECK(utt.features.cols() == spec.feature_dim);
    utt.ali.Validate(topo);
  }
}

TEST_CASE("pdf means are pairwise separated") {
  GenerativeSpec spec;
  Matrix means = spec.PdfMeans();
  double min_sep = spec.mean_separation_sigmas * spec.sigma;
  for (int a = 0; a < means.rows(); a++)
    for (int b = a + 1; b < means.rows(); b++)
      CHECK((means.row(a) - means.row(b)).cwiseAbs().maxCoeff() >=
            min_sep - 1e-12);
}

TEST_CASE("empirical transcript bigram matches the generative one") {
  GenerativeSpec spec;
  spec.seed = 29;
  // A wide frame range disables rejection, so transcript statistics are an
  // unbiased sample of the generative bigram.
  spec.min_frames = 4;
  spec.max_frames = 100000;
  Matrix bigram = spec.TranscriptBigram();
  const int vocab = spec.num_phones - 1;
  Matrix counts = Matrix::Zero(vocab, vocab + 1);
  for (const Utterance &utt : GenerateCorpus(spec, 10000, "u")) {
    std::vector<int> phones;
    for (int p : utt.ali.PhoneSequence())
      if (p != 0) phones.push_back(p - 1);  // drop silence, re-index
    for (size_t i = 0; i + 1 < phones.size(); i++)
      counts(phones[i], phones[i + 1]) += 1.0;
    if (!phones.empty()) counts(phones.back(), vocab) += 1.0;
  }
  for (int h = 0; h < vocab; h++) {
    double total = counts.row(h).sum();
    REQUIRE(total > 0.0);
    for (int n = 0; n <= vocab; n++)
      CHECK(std::abs(counts(h, n) / total - bigram(h, n)) <= 0.02);
  }
}

TEST_CASE("corpus write/read round-trips") {
  GenerativeSpec spec;
  spec.seed = 31;
  auto corpus = GenerateCorpus(spec, 5, "rt");
  auto dir = std::filesystem::temp_directory_path() / "lfseq_corpus_rt";
  std::filesystem::remove_all(dir);
  WriteCorpus(dir.string(), corpus);
  auto back = ReadCorpus(dir.string());
  REQUIRE(back.size() == corpus.size());
  for (size_t i = 0; i < back.size(); i++) {
    CHECK(back[i].utt_id == corpus[i].utt_id);
    CHECK((back[i].features - corpus[i].features).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(back[i].ali.frames.size() == corpus[i].ali.frames.size());
    for (size_t t = 0; t < back[i].ali.frames.size(); t++) {
      CHECK(back[i].ali.frames[t].phone == corpus[i].ali.frames[t].phone);
      CHECK(back[i].ali.frames[t].state == corpus[i].ali.frames[t].state);
      CHECK(back[i].ali.frames[t].pdf == corpus[i].ali.frames[t].pdf);
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("degenerate specs are rejected") {
  GenerativeSpec spec;
  spec.min_frames = 1;
  spec.max_frames = 1;  // a 2-state phone cannot fit one frame
  CHECK_THROWS_AS(GenerateCorpus(spec, 1, "u"), Error);
}
