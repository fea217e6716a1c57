// test_text_io.cpp

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

#include "lfseq/text_io.hpp"

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

using namespace lfseq;

TEST_CASE("FormatDouble round-trips doubles exactly") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist(0.0, 100.0);
  for (int i = 0; i < 1000; i++) {
    double x = dist(rng);
    CHECK(std::stod(FormatDouble(x)) == x);
  }
  CHECK(std::stod(FormatDouble(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("matrix write/read is the identity") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist;
  Matrix m(5, 3);
  for (int r = 0; r < 5; r++)
    for (int c = 0; c < 3; c++) m(r, c) = dist(rng);

  std::stringstream ss;
  WriteMatrix(ss, m);
  LineReader reader(ss, "<mem>");
  Matrix back = ReadMatrix(&reader);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

  // A second serialization of the read-back matrix is byte-identical.
  std::stringstream ss2;
  WriteMatrix(ss2, back);
  std::stringstream ss3;
  WriteMatrix(ss3, m);
  CHECK(ss2.str() == ss3.str());
}

TEST_CASE("LineReader rejects malformed numbers with location info") {
  std::stringstream ss("MAT 2 2\n1.0 2.0\n3.0 oops\n");
  LineReader reader(ss, "bad.mat");
  CHECK_THROWS_WITH_AS(ReadMatrix(&reader),
                       doctest::Contains("bad.mat"), Error);
}

TEST_CASE("ReadMatrix rejects truncated input") {
  std::stringstream ss("MAT 3 2\n1 2\n3 4\n");
  LineReader reader(ss, "<mem>");
  CHECK_THROWS_AS(ReadMatrix(&reader), Error);
}

TEST_CASE("OpenInput fails on missing file") {
  CHECK_THROWS_AS(OpenInput("/nonexistent/definitely/missing.txt"), Error);
}
