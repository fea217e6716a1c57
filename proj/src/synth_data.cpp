// synth_data.cpp

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

#include "lfseq/text_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace lfseq {

void GenerativeSpec::Validate() const {
  Require(num_phones >= 2, "need at least one non-silence phone");
  Require(states_per_phone >= 1, "states_per_phone must be positive");
  Require(self_loop_prob >= 0.0 && self_loop_prob < 1.0,
          "self_loop_prob must be in [0, 1)");
  Require(feature_dim >= 1, "feature_dim must be positive");
  Require(sigma >= 0.0, "sigma must be non-negative");
  Require(min_frames >= 1 && max_frames >= min_frames, "bad frame range");
  Require(silence_prob >= 0.0 && silence_prob <= 1.0, "bad silence_prob");
}

HmmTopology GenerativeSpec::Topology() const {
  return HmmTopology(num_phones, states_per_phone, self_loop_prob);
}

Matrix GenerativeSpec::PdfMeans() const {
  int num_pdfs = num_phones * states_per_phone;
  Matrix means = Matrix::Zero(num_pdfs, feature_dim);
  double sep = mean_separation_sigmas * sigma;
  // Pdf j gets a spike on coordinate j % D whose height grows with each wrap,
  // so any two pdfs differ by >= sep in some coordinate.
  for (int j = 0; j < num_pdfs; j++)
    means(j, j % feature_dim) = sep * (1.0 + j / feature_dim);
  return means;
}

Matrix GenerativeSpec::TranscriptBigram() const {
  int vocab = num_phones - 1;  // non-silence phones
  std::mt19937_64 rng(seed ^ 0x5eedb16ULL);
  std::uniform_real_distribution<double> dist(0.2, 1.0);
  Matrix bigram(vocab, vocab + 1);
  for (int r = 0; r < vocab; r++) {
    // Fixed end probability keeps expected transcript length moderate.
    double end_prob = 0.3;
    Vector row(vocab);
    for (int c = 0; c < vocab; c++) row(c) = dist(rng);
    row *= (1.0 - end_prob) / row.sum();
    bigram.row(r).head(vocab) = row.transpose();
    bigram(r, vocab) = end_prob;
  }
  return bigram;
}

namespace {

// Samples a transcript of non-silence phones (phone ids, not bigram indices).
std::vector<int> SampleTranscript(const Matrix &bigram, int vocab,
                                  std::mt19937_64 *rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> phones;
  int prev = -1;  // -1: start; start distribution is uniform over the vocab
  for (;;) {
    double u = unit(*rng);
    int next = vocab;  // bigram column index; vocab = end
    if (prev < 0) {
      next = std::min(static_cast<int>(u * vocab), vocab - 1);
    } else {
      double acc = 0.0;
      for (int c = 0; c <= vocab; c++) {
        acc += bigram(prev, c);
        if (u < acc || c == vocab) {
          next = c;
          break;
        }
      }
    }
    if (next == vocab) break;    // cannot happen on the first draw
    phones.push_back(next + 1);  // phone ids are 1-based (0 is silence)
    prev = next;
  }
  return phones;
}

int SampleDuration(double self_loop_prob, std::mt19937_64 *rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int frames = 1;
  while (unit(*rng) < self_loop_prob) frames++;
  return frames;
}

}  // namespace

std::vector<Utterance> GenerateCorpus(const GenerativeSpec &spec, int num_utts,
                                      const std::string &utt_prefix) {
  spec.Validate();
  Require(num_utts >= 1, "num_utts must be positive");
  HmmTopology topo = spec.Topology();
  Matrix means = spec.PdfMeans();
  Matrix bigram = spec.TranscriptBigram();
  int vocab = spec.num_phones - 1;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<Utterance> corpus;
  corpus.reserve(num_utts);
  for (int u = 0; u < num_utts; u++) {
    // Rejection-sample until the frame count lands in range.
    std::vector<AlignedFrame> frames;
    const int kMaxTries = 10000;
    int tries = 0;
    for (;; tries++) {
      Require(tries < kMaxTries,
              "could not sample an utterance in the frame range; "
              "spec is degenerate");
      std::vector<int> phones = SampleTranscript(bigram, vocab, &rng);
      if (unit(rng) < spec.silence_prob) phones.insert(phones.begin(), 0);
      if (unit(rng) < spec.silence_prob) phones.push_back(0);
      frames.clear();
      for (int phone : phones) {
        for (int k = 0; k < spec.states_per_phone; k++) {
          int dur = SampleDuration(spec.self_loop_prob, &rng);
          for (int d = 0; d < dur; d++)
            frames.push_back({phone, k, topo.PdfOf(phone, k)});
        }
      }
      int total = static_cast<int>(frames.size());
      if (total >= spec.min_frames && total <= spec.max_frames) break;
    }

    Utterance utt;
    std::ostringstream id;
    id << utt_prefix << std::setw(6) << std::setfill('0') << u;
    utt.utt_id = id.str();
    utt.ali.utt_id = utt.utt_id;
    utt.ali.frames = frames;
    int num_frames = static_cast<int>(frames.size());
    utt.features.resize(num_frames, spec.feature_dim);
    for (int t = 0; t < num_frames; t++)
      for (int d = 0; d < spec.feature_dim; d++)
        utt.features(t, d) = means(frames[t].pdf, d) + spec.sigma * noise(rng);
    corpus.push_back(std::move(utt));
  }
  return corpus;
}

void WriteCorpus(const std::string &dir, const std::vector<Utterance> &corpus) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<Alignment> alis;
  alis.reserve(corpus.size());
  auto trans = OpenOutput((fs::path(dir) / "transcripts.txt").string());
  for (const Utterance &utt : corpus) {
    WriteMatrixFile((fs::path(dir) / (utt.utt_id + ".feats")).string(),
                    utt.features);
    alis.push_back(utt.ali);
    trans << utt.utt_id;
    for (int phone : utt.ali.PhoneSequence()) trans << ' ' << phone;
    trans << '\n';
  }
  Require(trans.good(), "write failed for transcripts in '", dir, "'");
  WriteAlignmentsFile((fs::path(dir) / "alignments.txt").string(), alis);
}

std::vector<Utterance> ReadCorpus(const std::string &dir) {
  namespace fs = std::filesystem;
  std::vector<Alignment> alis =
      ReadAlignmentsFile((fs::path(dir) / "alignments.txt").string());
  std::vector<Utterance> corpus;
  corpus.reserve(alis.size());
  for (Alignment &ali : alis) {
    Utterance utt;
    utt.utt_id = ali.utt_id;
    utt.features =
        ReadMatrixFile((fs::path(dir) / (utt.utt_id + ".feats")).string());
    Require(utt.features.rows() == ali.NumFrames(),
            "feature/alignment length mismatch for '", utt.utt_id, "'");
    utt.ali = std::move(ali);
    corpus.push_back(std::move(utt));
  }
  return corpus;
}

}  // namespace lfseq
