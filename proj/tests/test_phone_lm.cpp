// test_phone_lm.cpp

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

#include <doctest.h>

#include <sstream>

using namespace lfseq;

TEST_CASE("single observed continuation with weight 1 is deterministic") {
  PhoneLm lm = EstimatePhoneLm({{1, 2}, {1, 2}}, 3, 1.0);
  CHECK(lm.Prob(1, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lm.EndProb(2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interpolated start probability matches hand computation") {
  // Vocab {0, 1, 2}; both start events split between phones 1 and 2, so
  // ML P(1|start) = 0.5 and the uniform floor over 3 phones + end is 1/4:
  // 0.5 * 0.5 + 0.5 * 0.25 = 0.375.
  PhoneLm lm = EstimatePhoneLm({{1}, {2}}, 3, 0.5);
  CHECK(lm.StartProb(1) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(lm.StartProb(2) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(lm.StartProb(0) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(lm.StartEndProb() == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("zero ML weight gives uniform rows") {
  PhoneLm lm = EstimatePhoneLm({{0, 1, 2, 1}}, 3, 0.0);
  for (int h = 0; h < 3; h++)
    for (int n = 0; n <= 3; n++)
      CHECK(lm.Prob(h, n) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("unseen histories fall back to the uniform row") {
  PhoneLm lm = EstimatePhoneLm({{1, 1}}, 3, 0.9);  // phone 2 never a history
  for (int n = 0; n <= 3; n++)
    CHECK(lm.Prob(2, n) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("all rows are normalized") {
  PhoneLm lm = EstimatePhoneLm({{0, 1}, {1, 2, 2}, {2}}, 3, 0.7);
  CHECK(lm.StartRow().sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (int h = 0; h < 3; h++)
    CHECK(lm.BigramRows().row(h).sum() == doctest::Approx(1.0).epsilon(1e-12));
  lm.Validate();
}

TEST_CASE("estimation rejects bad input") {
  CHECK_THROWS_AS(EstimatePhoneLm({}, 3, 0.9), Error);
  CHECK_THROWS_AS(EstimatePhoneLm({{1, 5}}, 3, 0.9), Error);  // id >= vocab
}

TEST_CASE("serialization round-trips bit-for-bit") {
  PhoneLm lm = EstimatePhoneLm({{0, 1}, {1, 2, 2}, {2}}, 3, 0.7);
  std::stringstream ss;
  lm.Write(ss);
  LineReader reader(ss, "<mem>");
  PhoneLm back = PhoneLm::Read(&reader);
  CHECK(back.InterpWeight() == lm.InterpWeight());
  CHECK((back.StartRow() - lm.StartRow()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.BigramRows() - lm.BigramRows()).cwiseAbs().maxCoeff() == 0.0);
  std::stringstream ss2;
  back.Write(ss2);
  std::stringstream ss3;
  lm.Write(ss3);
  CHECK(ss2.str() == ss3.str());
}

TEST_CASE("deserialization enforces normalization") {
  std::stringstream ss;
  ss << "LM 2 2 1\n"
     << "P START 0 0.5\n"      // start row sums to 0.5: invalid
     << "P 0 END 1\n"
     << "P 1 END 1\n";
  LineReader reader(ss, "<mem>");
  CHECK_THROWS_AS(PhoneLm::Read(&reader), Error);
}

TEST_CASE("deserialization rejects probabilities outside (0, 1]") {
  std::stringstream ss;
  ss << "LM 2 2 1\n"
     << "P START 0 1.5\n"
     << "P 0 END 1\n"
     << "P 1 END 1\n";
  LineReader reader(ss, "<mem>");
  CHECK_THROWS_AS(PhoneLm::Read(&reader), Error);
}
