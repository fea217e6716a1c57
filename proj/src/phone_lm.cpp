// phone_lm.cpp

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

#include "lfseq/phone_lm.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace lfseq {

namespace {
constexpr double kRowSumTol = 1e-9;

void CheckRow(const Vector &row, const std::string &what) {
  Require(std::abs(row.sum() - 1.0) <= kRowSumTol,
          "phone LM row for ", what, " sums to ", row.sum(), ", expected 1");
  Require((row.array() >= 0.0).all(), "phone LM row for ", what,
          " has a negative probability");
}
}  // namespace

PhoneLm::PhoneLm(Vector start, Matrix bigram, double interp_weight)
    : start_(std::move(start)),
      bigram_(std::move(bigram)),
      interp_weight_(interp_weight) {
  Require(start_.size() == bigram_.rows() + 1,
          "phone LM start row has wrong size");
}

void PhoneLm::Validate() const {
  Require(VocabSize() >= 1, "phone LM has empty vocabulary");
  CheckRow(start_, "START");
  for (int h = 0; h < VocabSize(); h++)
    CheckRow(bigram_.row(h).transpose(), "history " + std::to_string(h));
}

PhoneLm EstimatePhoneLm(const std::vector<std::vector<int>> &phone_sequences,
                        int vocab_size, double interpolation_weight) {
  Require(!phone_sequences.empty(), "cannot estimate a phone LM from an empty corpus");
  Require(vocab_size >= 1, "vocab_size must be positive");
  Require(interpolation_weight >= 0.0 && interpolation_weight <= 1.0,
          "interpolation weight must lie in [0, 1], got ", interpolation_weight);

  const int end = vocab_size;
  Vector start_counts = Vector::Zero(vocab_size + 1);
  Matrix counts = Matrix::Zero(vocab_size, vocab_size + 1);
  for (const auto &seq : phone_sequences) {
    Require(!seq.empty(), "empty phone sequence in corpus");
    for (int p : seq)
      Require(p >= 0 && p < vocab_size, "phone id ", p, " out of range [0, ",
              vocab_size, ")");
    start_counts(seq.front()) += 1.0;
    for (size_t i = 0; i + 1 < seq.size(); i++) counts(seq[i], seq[i + 1]) += 1.0;
    counts(seq.back(), end) += 1.0;
  }

  const double uniform = 1.0 / (vocab_size + 1);
  auto interpolate = [&](const Vector &c) -> Vector {
    double total = c.sum();
    Vector ml = total > 0.0 ? Vector(c / total)
                            : Vector(Vector::Constant(vocab_size + 1, uniform));
    return interpolation_weight * ml +
           (1.0 - interpolation_weight) * Vector::Constant(vocab_size + 1, uniform);
  };

  Vector start = interpolate(start_counts);
  Matrix bigram(vocab_size, vocab_size + 1);
  for (int h = 0; h < vocab_size; h++)
    bigram.row(h) = interpolate(counts.row(h).transpose()).transpose();

  PhoneLm lm(std::move(start), std::move(bigram), interpolation_weight);
  lm.Validate();
  return lm;
}

void PhoneLm::Write(std::ostream &os) const {
  os << "LM " << VocabSize() << ' ' << kOrder << ' '
     << FormatDouble(interp_weight_) << '\n';
  auto write_row = [&](const std::string &hist, const Vector &row) {
    for (int n = 0; n <= VocabSize(); n++) {
      if (row(n) <= 0.0) continue;  // zero entries are implicit
      os << "P " << hist << ' ';
      if (n == EndIndex())
        os << "END";
      else
        os << n;
      os << ' ' << FormatDouble(row(n)) << '\n';
    }
  };
  write_row("START", start_);
  for (int h = 0; h < VocabSize(); h++)
    write_row(std::to_string(h), bigram_.row(h).transpose());
}

PhoneLm PhoneLm::Read(LineReader *reader) {
  std::vector<std::string> tokens;
  if (!reader->Next(&tokens)) reader->FailHere("expected LM header");
  if (tokens.size() != 4 || tokens[0] != "LM")
    reader->FailHere("expected 'LM <vocab> <order> <interp>' header");
  int vocab = reader->ParseInt(tokens[1]);
  int order = reader->ParseInt(tokens[2]);
  double interp = reader->ParseDouble(tokens[3]);
  if (vocab < 1) reader->FailHere("vocab size must be positive");
  if (order != PhoneLm::kOrder)
    reader->FailHere("unsupported LM order ", order, " (only ", PhoneLm::kOrder,
                     " is supported)");

  Vector start = Vector::Zero(vocab + 1);
  Matrix bigram = Matrix::Zero(vocab, vocab + 1);
  while (reader->Next(&tokens)) {
    if (tokens.size() != 4 || tokens[0] != "P")
      reader->FailHere("expected 'P <hist> <next|END> <prob>'");
    int next = tokens[2] == "END" ? vocab : reader->ParseInt(tokens[2]);
    if (next < 0 || next > vocab) reader->FailHere("phone id out of range");
    double prob = reader->ParseDouble(tokens[3]);
    if (!(prob > 0.0) || prob > 1.0)
      reader->FailHere("probability must lie in (0, 1], got ", tokens[3]);
    if (tokens[1] == "START") {
      start(next) = prob;
    } else {
      int hist = reader->ParseInt(tokens[1]);
      if (hist < 0 || hist >= vocab) reader->FailHere("history id out of range");
      bigram(hist, next) = prob;
    }
  }
  PhoneLm lm(std::move(start), std::move(bigram), interp);
  lm.Validate();
  return lm;
}

void WritePhoneLmFile(const std::string &path, const PhoneLm &lm) {
  auto os = OpenOutput(path);
  lm.Write(os);
  Require(os.good(), "write failed for '", path, "'");
}

PhoneLm ReadPhoneLmFile(const std::string &path) {
  auto is = OpenInput(path);
  LineReader reader(is, path);
  return PhoneLm::Read(&reader);
}

}  // namespace lfseq
