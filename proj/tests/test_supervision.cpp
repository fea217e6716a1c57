// test_supervision.cpp

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

#include "lfseq/supervision.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

using namespace lfseq;

namespace {

Alignment MakeAlignment(const HmmTopology &topo,
                        const std::vector<std::pair<int, int>> &runs) {
  // runs: (phone, frames-per-state) segments walking states 0..n-1.
  Alignment ali;
  ali.utt_id = "t";
  for (auto [phone, frames] : runs)
    for (int k = 0; k < topo.StatesPerPhone(); k++)
      for (int f = 0; f < frames; f++)
        ali.frames.push_back({phone, k, topo.PdfOf(phone, k)});
  return ali;
}

// All pdf sequences accepted by the supervision, by depth-first search.
std::set<std::vector<int>> AcceptedLanguage(const Supervision &sup) {
  std::set<std::vector<int>> language;
  std::vector<int> seq;
  std::function<void(int, int)> dfs = [&](int state, int t) {
    if (t == sup.NumFrames()) {
      const auto &finals = sup.FinalStates();
      if (std::find(finals.begin(), finals.end(), state) != finals.end())
        language.insert(seq);
      return;
    }
    for (const Arc &arc : sup.ArcsAt(t)) {
      if (arc.src != state) continue;
      seq.push_back(arc.pdf);
      dfs(arc.dst, t + 1);
      seq.pop_back();
    }
  };
  for (int s : sup.InitialStates()) dfs(s, 0);
  return language;
}

}  // namespace

TEST_CASE("zero tolerance accepts exactly the aligned pdf sequence") {
  HmmTopology topo(2, 2, 0.5);
  Alignment ali = MakeAlignment(topo, {{0, 2}, {1, 1}});
  ali.Validate(topo);
  Supervision sup = BuildNumeratorGraph(ali, 0, topo);
  sup.Validate();

  std::vector<int> expected;
  for (const AlignedFrame &f : ali.frames) expected.push_back(f.pdf);
  auto language = AcceptedLanguage(sup);
  REQUIRE(language.size() == 1);
  CHECK(*language.begin() == expected);
}

TEST_CASE("tolerance 1 lets a single boundary fall on three frames") {
  // One-state phones; phones 0 then 1 with the boundary after frame 5.
  HmmTopology topo(2, 1, 0.5);
  Alignment ali;
  ali.utt_id = "t";
  for (int t = 0; t < 10; t++) {
    int phone = t < 5 ? 0 : 1;
    ali.frames.push_back({phone, 0, topo.PdfOf(phone, 0)});
  }
  Supervision sup = BuildNumeratorGraph(ali, 1, topo);
  auto language = AcceptedLanguage(sup);
  CHECK(language.size() == 3);  // boundary at frame 4, 5 or 6
  for (const auto &seq : language) {
    // Every accepted string is 0^k 1^(10-k).
    CHECK(std::is_sorted(seq.begin(), seq.end()));
  }
}

TEST_CASE("the accepted language is non-decreasing in tolerance") {
  HmmTopology topo(3, 2, 0.5);
  Alignment ali = MakeAlignment(topo, {{0, 1}, {2, 2}, {1, 1}});
  auto prev = AcceptedLanguage(BuildNumeratorGraph(ali, 0, topo));
  for (int tol = 1; tol <= 3; tol++) {
    auto cur = AcceptedLanguage(BuildNumeratorGraph(ali, tol, topo));
    CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    CHECK(cur.size() >= prev.size());
    prev = cur;
  }
}

TEST_CASE("large tolerance clamps instead of failing") {
  HmmTopology topo(2, 2, 0.5);
  Alignment ali = MakeAlignment(topo, {{0, 1}, {1, 1}});  // 4 frames
  Supervision sup = BuildNumeratorGraph(ali, 100, topo);
  sup.Validate();
  CHECK(!AcceptedLanguage(sup).empty());
}

TEST_CASE("alignment validation catches broken state walks") {
  HmmTopology topo(2, 2, 0.5);
  Alignment ali;
  ali.utt_id = "t";
  ali.frames.push_back({0, 1, topo.PdfOf(0, 1)});  // starts at state 1
  ali.frames.push_back({0, 1, topo.PdfOf(0, 1)});
  CHECK_THROWS_AS(ali.Validate(topo), Error);
}

TEST_CASE("serialization round-trips the accepted language") {
  HmmTopology topo(2, 2, 0.5);
  Alignment ali = MakeAlignment(topo, {{0, 1}, {1, 2}});
  Supervision sup = BuildNumeratorGraph(ali, 1, topo);
  std::stringstream ss;
  sup.Write(ss);
  LineReader reader(ss, "<mem>");
  Supervision back = Supervision::Read(&reader);
  back.Validate();
  CHECK(back.UttId() == sup.UttId());
  CHECK(back.NumFrames() == sup.NumFrames());
  CHECK(AcceptedLanguage(back) == AcceptedLanguage(sup));
  std::stringstream ss2, ss3;
  back.Write(ss2);
  sup.Write(ss3);
  CHECK(ss2.str() == ss3.str());
}

TEST_CASE("alignment files round-trip") {
  HmmTopology topo(2, 2, 0.5);
  std::vector<Alignment> alis = {MakeAlignment(topo, {{0, 1}, {1, 2}}),
                                 MakeAlignment(topo, {{1, 3}})};
  alis[0].utt_id = "utt_a";
  alis[1].utt_id = "utt_b";
  std::stringstream ss;
  WriteAlignments(ss, alis);
  LineReader reader(ss, "<mem>");
  std::vector<Alignment> back = ReadAlignments(&reader);
  REQUIRE(back.size() == 2);
  for (int i = 0; i < 2; i++) {
    CHECK(back[i].utt_id == alis[i].utt_id);
    REQUIRE(back[i].frames.size() == alis[i].frames.size());
    for (size_t t = 0; t < back[i].frames.size(); t++) {
      CHECK(back[i].frames[t].phone == alis[i].frames[t].phone);
      CHECK(back[i].frames[t].state == alis[i].frames[t].state);
      CHECK(back[i].frames[t].pdf == alis[i].frames[t].pdf);
    }
  }
}

TEST_CASE("infeasible alignments are rejected") {
  HmmTopology topo(2, 2, 0.5);
  Alignment ali;
  ali.utt_id = "t";
  ali.frames.push_back({0, 0, topo.PdfOf(0, 0)});  // 1 frame, needs 2
  CHECK_THROWS_AS(ali.Validate(topo), Error);
}
