// supervision.cpp

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

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace lfseq {

std::vector<int> Alignment::PhoneSequence() const {
  std::vector<int> phones;
  for (size_t i = 0; i < frames.size(); i++) {
    bool segment_start =
        i == 0 || frames[i].phone != frames[i - 1].phone ||
        frames[i].state < frames[i - 1].state;  // phone repeated back to back
    if (segment_start) phones.push_back(frames[i].phone);
  }
  return phones;
}

void Alignment::Validate(const HmmTopology &topo) const {
  Require(!frames.empty(), "alignment '", utt_id, "' is empty");
  const int n = topo.StatesPerPhone();
  int run_state = -1;
  for (size_t i = 0; i < frames.size(); i++) {
    const AlignedFrame &f = frames[i];
    Require(f.phone >= 0 && f.phone < topo.NumPhones(), "alignment '", utt_id,
            "': phone ", f.phone, " out of range");
    Require(f.state >= 0 && f.state < n, "alignment '", utt_id, "': state ",
            f.state, " out of range");
    Require(f.pdf == topo.PdfOf(f.phone, f.state), "alignment '", utt_id,
            "': frame ", i, " pdf ", f.pdf, " disagrees with topology");
    bool new_phone = i == 0 || f.phone != frames[i - 1].phone ||
                     f.state < frames[i - 1].state;
    if (new_phone) {
      Require(f.state == 0, "alignment '", utt_id, "': phone segment at frame ",
              i, " starts in state ", f.state);
      if (i > 0)
        Require(frames[i - 1].state == n - 1, "alignment '", utt_id,
                "': phone segment ends before its last state at frame ", i - 1);
      run_state = 0;
    } else {
      Require(f.state == run_state || f.state == run_state + 1, "alignment '",
              utt_id, "': state jump at frame ", i);
      run_state = f.state;
    }
  }
  Require(frames.back().state == n - 1, "alignment '", utt_id,
          "': utterance ends before the phone's last state");
}

Supervision::Supervision(std::string utt_id, int num_frames, int num_states,
                         std::vector<std::vector<Arc>> frame_arcs,
                         std::vector<int> initial_states,
                         std::vector<int> final_states)
    : utt_id_(std::move(utt_id)),
      num_frames_(num_frames),
      num_states_(num_states),
      frame_arcs_(std::move(frame_arcs)),
      initial_states_(std::move(initial_states)),
      final_states_(std::move(final_states)) {
  Require(static_cast<int>(frame_arcs_.size()) == num_frames_,
          "supervision '", utt_id_, "': frame arc table has wrong length");
  Validate();
}

int Supervision::MaxPdfPlusOne() const {
  int max_pdf = -1;
  for (const auto &arcs : frame_arcs_)
    for (const Arc &a : arcs) max_pdf = std::max(max_pdf, a.pdf);
  return max_pdf + 1;
}

void Supervision::Validate() const {
  Require(num_frames_ >= 1, "supervision '", utt_id_, "' has no frames");
  Require(num_states_ >= 1, "supervision '", utt_id_, "' has no states");
  Require(!initial_states_.empty() && !final_states_.empty(), "supervision '",
          utt_id_, "' lacks initial or final states");
  auto check_state = [&](int s) {
    Require(s >= 0 && s < num_states_, "supervision '", utt_id_,
            "': state index ", s, " out of range");
  };
  for (int s : initial_states_) check_state(s);
  for (int s : final_states_) check_state(s);

  // Nonempty language: layer-by-layer reachability intersected with
  // backward reachability from the finals.
  std::vector<bool> reach(num_states_, false);
  for (int s : initial_states_) reach[s] = true;
  for (int t = 0; t < num_frames_; t++) {
    std::vector<bool> next(num_states_, false);
    for (const Arc &a : frame_arcs_[t]) {
      check_state(a.src);
      check_state(a.dst);
      Require(a.pdf >= 0, "supervision '", utt_id_, "': negative pdf");
      if (reach[a.src]) next[a.dst] = true;
    }
    reach.swap(next);
  }
  bool complete = false;
  for (int s : final_states_) complete |= reach[s];
  Require(complete, "supervision '", utt_id_,
          "' has no complete path from an initial to a final state");
}

Supervision BuildNumeratorGraph(const Alignment &ali, int tolerance,
                                const HmmTopology &topo) {
  Require(tolerance >= 0, "tolerance must be >= 0");
  ali.Validate(topo);
  const int num_frames = ali.NumFrames();

  // State runs of the alignment: run m covers [starts[m], starts[m+1]).
  struct Run {
    int phone, state, pdf;
    int start;
  };
  std::vector<Run> runs;
  for (int i = 0; i < num_frames; i++) {
    const AlignedFrame &f = ali.frames[i];
    bool new_run = runs.empty() || f.phone != runs.back().phone ||
                   f.state != runs.back().state ||
                   (f.state == 0 && i > 0 && ali.frames[i - 1].state != 0);
    if (new_run) runs.push_back({f.phone, f.state, f.pdf, i});
  }
  const int num_runs = static_cast<int>(runs.size());

  // Run m may emit frame t iff t lies within the run's tolerance window.
  auto in_window = [&](int m, int t) {
    int lo = std::max(runs[m].start - tolerance, 0);
    int hi = (m + 1 < num_runs) ? runs[m + 1].start + tolerance : num_frames;
    hi = std::min(hi, num_frames);
    if (m == 0) lo = 0;
    return t >= lo && t < hi;
  };

  // Numerator states: 0 = pre-utterance start, 1 + m = "just emitted from
  // run m". Forward reachability per layer, then backward pruning.
  const int num_states = 1 + num_runs;
  const int final_state = num_runs;
  std::vector<std::vector<bool>> reach(num_frames + 1,
                                       std::vector<bool>(num_states, false));
  reach[0][0] = true;
  auto try_arc = [&](int t, int src, int m_dst) {
    if (m_dst >= num_runs || !in_window(m_dst, t)) return;
    reach[t + 1][1 + m_dst] = true;
    (void)src;
  };
  for (int t = 0; t < num_frames; t++) {
    for (int s = 0; s < num_states; s++) {
      if (!reach[t][s]) continue;
      if (s == 0) {
        try_arc(t, 0, 0);
      } else {
        int m = s - 1;
        try_arc(t, s, m);      // stay in the same run
        try_arc(t, s, m + 1);  // advance to the next run
      }
    }
  }

  std::vector<std::vector<bool>> alive(num_frames + 1,
                                       std::vector<bool>(num_states, false));
  alive[num_frames][final_state] =
      reach[num_frames][final_state];
  Require(alive[num_frames][final_state], "supervision for '", ali.utt_id,
          "' is infeasible (utterance shorter than the minimum durations)");
  std::vector<std::vector<Arc>> frame_arcs(num_frames);
  for (int t = num_frames - 1; t >= 0; t--) {
    auto add_arc = [&](int src, int m_dst) {
      if (m_dst >= num_runs || !in_window(m_dst, t)) return;
      int dst = 1 + m_dst;
      if (!reach[t][src] || !alive[t + 1][dst]) return;
      frame_arcs[t].push_back({src, dst, runs[m_dst].pdf, 0.0});
      alive[t][src] = true;
    };
    for (int s = 0; s < num_states; s++) {
      if (s == 0) {
        if (t == 0) add_arc(0, 0);
      } else {
        add_arc(s, s - 1);  // self
        add_arc(s, s);      // advance
      }
    }
  }

  return Supervision(ali.utt_id, num_frames, num_states, std::move(frame_arcs),
                     {0}, {final_state});
}

void Supervision::Write(std::ostream &os) const {
  os << "SUP " << utt_id_ << ' ' << num_frames_ << '\n';
  for (int s : initial_states_) os << "I " << s << '\n';
  for (int s : final_states_) os << "F " << s << '\n';
  for (int t = 0; t < num_frames_; t++) {
    os << "T " << t << '\n';
    for (const Arc &a : frame_arcs_[t])
      os << "A " << a.src << ' ' << a.dst << ' ' << a.pdf << '\n';
  }
}

Supervision Supervision::Read(LineReader *reader) {
  std::vector<std::string> tokens;
  if (!reader->Next(&tokens)) reader->FailHere("expected SUP header");
  if (tokens.size() != 3 || tokens[0] != "SUP")
    reader->FailHere("expected 'SUP <utt_id> <T>' header");
  std::string utt_id = tokens[1];
  int num_frames = reader->ParseInt(tokens[2]);
  if (num_frames < 1) reader->FailHere("frame count must be positive");

  std::vector<std::vector<Arc>> frame_arcs(num_frames);
  std::vector<int> initial, final_states;
  int cur_frame = -1;
  int max_state = -1;
  while (reader->Next(&tokens)) {
    if (tokens[0] == "I" && tokens.size() == 2) {
      initial.push_back(reader->ParseInt(tokens[1]));
      max_state = std::max(max_state, initial.back());
    } else if (tokens[0] == "F" && tokens.size() == 2) {
      final_states.push_back(reader->ParseInt(tokens[1]));
      max_state = std::max(max_state, final_states.back());
    } else if (tokens[0] == "T" && tokens.size() == 2) {
      cur_frame = reader->ParseInt(tokens[1]);
      if (cur_frame < 0 || cur_frame >= num_frames)
        reader->FailHere("frame index ", cur_frame, " out of range");
    } else if (tokens[0] == "A" && tokens.size() == 4) {
      if (cur_frame < 0) reader->FailHere("arc before any 'T <t>' line");
      Arc a;
      a.src = reader->ParseInt(tokens[1]);
      a.dst = reader->ParseInt(tokens[2]);
      a.pdf = reader->ParseInt(tokens[3]);
      a.log_prob = 0.0;
      max_state = std::max({max_state, a.src, a.dst});
      frame_arcs[cur_frame].push_back(a);
    } else {
      reader->FailHere("unrecognized record '", tokens[0], "'");
    }
  }
  try {
    return Supervision(std::move(utt_id), num_frames, max_state + 1,
                       std::move(frame_arcs), std::move(initial),
                       std::move(final_states));
  } catch (const Error &e) {
    reader->FailHere(e.what());
  }
}

void WriteAlignments(std::ostream &os, const std::vector<Alignment> &alis) {
  for (const Alignment &ali : alis) {
    os << ali.utt_id;
    for (const AlignedFrame &f : ali.frames)
      os << ' ' << f.phone << ':' << f.state << ':' << f.pdf;
    os << '\n';
  }
}

std::vector<Alignment> ReadAlignments(LineReader *reader) {
  std::vector<Alignment> alis;
  std::vector<std::string> tokens;
  while (reader->Next(&tokens)) {
    Require(tokens.size() >= 2, reader->SourceName(), ":", reader->LineNumber(),
            ": alignment line needs an utterance id and at least one frame");
    Alignment ali;
    ali.utt_id = tokens[0];
    for (size_t i = 1; i < tokens.size(); i++) {
      AlignedFrame f;
      if (std::sscanf(tokens[i].c_str(), "%d:%d:%d", &f.phone, &f.state,
                      &f.pdf) != 3)
        reader->FailHere("malformed frame '", tokens[i],
                         "', expected phone:state:pdf");
      ali.frames.push_back(f);
    }
    alis.push_back(std::move(ali));
  }
  return alis;
}

void WriteAlignmentsFile(const std::string &path,
                         const std::vector<Alignment> &alis) {
  auto os = OpenOutput(path);
  WriteAlignments(os, alis);
  Require(os.good(), "write failed for '", path, "'");
}

std::vector<Alignment> ReadAlignmentsFile(const std::string &path) {
  auto is = OpenInput(path);
  LineReader reader(is, path);
  return ReadAlignments(&reader);
}

void WriteSupervisionFile(const std::string &path, const Supervision &sup) {
  auto os = OpenOutput(path);
  sup.Write(os);
  Require(os.good(), "write failed for '", path, "'");
}

Supervision ReadSupervisionFile(const std::string &path) {
  auto is = OpenInput(path);
  LineReader reader(is, path);
  return Supervision::Read(&reader);
}

}  // namespace lfseq
