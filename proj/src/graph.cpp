// graph.cpp

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

#include "lfseq/graph.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <ostream>

namespace lfseq {

DenominatorGraph::DenominatorGraph(int num_states, int num_pdfs,
                                   std::vector<Arc> arcs, Vector initial,
                                   Vector final_probs, double leaky_coeff)
    : num_states_(num_states),
      num_pdfs_(num_pdfs),
      leaky_coeff_(leaky_coeff),
      arcs_(std::move(arcs)),
      initial_(std::move(initial)),
      final_probs_(std::move(final_probs)) {
  BuildIndex();
  Validate();
}

void DenominatorGraph::BuildIndex() {
  out_arcs_.assign(num_states_, {});
  in_arcs_.assign(num_states_, {});
  for (int a = 0; a < static_cast<int>(arcs_.size()); a++) {
    const Arc &arc = arcs_[a];
    Require(arc.src >= 0 && arc.src < num_states_ && arc.dst >= 0 &&
                arc.dst < num_states_,
            "arc state index out of range");
    out_arcs_[arc.src].push_back(a);
    in_arcs_[arc.dst].push_back(a);
  }
}

void DenominatorGraph::AttachPhoneInfo(int states_per_phone) {
  Require(states_per_phone >= 1 && num_states_ % states_per_phone == 0,
          "states_per_phone ", states_per_phone, " does not divide state count ",
          num_states_);
  states_per_phone_ = states_per_phone;
}

void DenominatorGraph::Validate() const {
  Require(num_states_ >= 1, "graph has no states");
  Require(num_pdfs_ >= 1, "graph has no pdfs");
  Require(leaky_coeff_ >= 0.0, "leaky coefficient must be >= 0");
  Require(initial_.size() == num_states_ && final_probs_.size() == num_states_,
          "initial/final vector size mismatch");
  Require((initial_.array() >= 0.0).all(), "negative initial probability");
  Require(std::abs(initial_.sum() - 1.0) <= 1e-9,
          "initial probabilities unnormalized: sum to ", initial_.sum());
  Require((final_probs_.array() >= 0.0).all() &&
              (final_probs_.array() <= 1.0 + 1e-12).all(),
          "final probability outside [0, 1]");
  for (const Arc &arc : arcs_) {
    Require(arc.pdf >= 0 && arc.pdf < num_pdfs_, "arc pdf ", arc.pdf,
            " out of range [0, ", num_pdfs_, ")");
    Require(std::isfinite(arc.log_prob), "non-finite arc log-probability");
  }

  // Forward reachability from initial mass.
  std::vector<bool> reached(num_states_, false);
  std::deque<int> queue;
  for (int s = 0; s < num_states_; s++) {
    if (initial_(s) > 0.0) {
      reached[s] = true;
      queue.push_back(s);
    }
  }
  Require(!queue.empty(), "no state with positive initial probability");
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (int a : out_arcs_[s]) {
      int d = arcs_[a].dst;
      if (!reached[d]) {
        reached[d] = true;
        queue.push_back(d);
      }
    }
  }
  for (int s = 0; s < num_states_; s++)
    Require(reached[s], "state ", s, " unreachable from initial states");

  // Co-reachability: every state must reach some final-probability state.
  std::vector<bool> coreached(num_states_, false);
  for (int s = 0; s < num_states_; s++) {
    if (final_probs_(s) > 0.0) {
      coreached[s] = true;
      queue.push_back(s);
    }
  }
  Require(!queue.empty(), "no path to final: graph has no final probability mass");
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (int a : in_arcs_[s]) {
      int p = arcs_[a].src;
      if (!coreached[p]) {
        coreached[p] = true;
        queue.push_back(p);
      }
    }
  }
  for (int s = 0; s < num_states_; s++)
    Require(coreached[s], "state ", s, " has no path to a final state");
}

DenominatorGraph BuildDenominatorGraph(const PhoneLm &lm, const HmmTopology &topo,
                                       double leaky_coeff) {
  Require(lm.VocabSize() == topo.NumPhones(), "vocabulary mismatch: LM has ",
          lm.VocabSize(), " phones, topology has ", topo.NumPhones());
  lm.Validate();
  topo.Validate();
  Require(leaky_coeff >= 0.0, "leaky coefficient must be >= 0");

  const int num_phones = lm.VocabSize();
  const int n = topo.StatesPerPhone();
  const int num_states = num_phones * n;
  auto state_of = [&](int phone, int k) { return phone * n + k; };

  std::vector<Arc> arcs;
  Vector initial = Vector::Zero(num_states);
  Vector final_probs = Vector::Zero(num_states);

  for (int p = 0; p < num_phones; p++) {
    for (int k = 0; k < n; k++) {
      int s = state_of(p, k);
      double self = topo.SelfLoopProb(k);
      double fwd = topo.ForwardProb(k);
      if (self > 0.0)
        arcs.push_back({s, s, topo.PdfOf(p, k), std::log(self)});
      if (k + 1 < n) {
        arcs.push_back({s, state_of(p, k + 1), topo.PdfOf(p, k + 1), std::log(fwd)});
      } else {
        // Phone exit: re-enter the LM.
        for (int q = 0; q < num_phones; q++) {
          double w = fwd * lm.Prob(p, q);
          if (w > 0.0)
            arcs.push_back({s, state_of(q, 0), topo.PdfOf(q, 0), std::log(w)});
        }
        final_probs(s) = fwd * lm.EndProb(p);
      }
    }
  }

  // P_0 from P(. | start), renormalized over phones (the start row's
  // end-of-sequence mass corresponds to the empty utterance).
  double start_mass = 0.0;
  for (int p = 0; p < num_phones; p++) start_mass += lm.StartProb(p);
  Require(start_mass > 0.0, "phone LM assigns no probability to any first phone");
  for (int p = 0; p < num_phones; p++)
    initial(state_of(p, 0)) = lm.StartProb(p) / start_mass;

  DenominatorGraph graph(num_states, topo.NumPdfs(), std::move(arcs),
                         std::move(initial), std::move(final_probs), leaky_coeff);
  graph.AttachPhoneInfo(n);
  return graph;
}

void DenominatorGraph::Write(std::ostream &os) const {
  os << "DEN " << num_states_ << ' ' << num_pdfs_ << ' '
     << FormatDouble(leaky_coeff_) << '\n';
  for (int s = 0; s < num_states_; s++)
    if (initial_(s) > 0.0)
      os << "I " << s << ' ' << FormatDouble(initial_(s)) << '\n';
  for (const Arc &arc : arcs_)
    os << "A " << arc.src << ' ' << arc.dst << ' ' << arc.pdf << ' '
       << FormatDouble(arc.log_prob) << '\n';
  for (int s = 0; s < num_states_; s++)
    if (final_probs_(s) > 0.0)
      os << "F " << s << ' ' << FormatDouble(final_probs_(s)) << '\n';
}

DenominatorGraph DenominatorGraph::Read(LineReader *reader) {
  std::vector<std::string> tokens;
  if (!reader->Next(&tokens)) reader->FailHere("expected DEN header");
  if (tokens.size() != 4 || tokens[0] != "DEN")
    reader->FailHere("expected 'DEN <S> <J> <lambda>' header");
  int num_states = reader->ParseInt(tokens[1]);
  int num_pdfs = reader->ParseInt(tokens[2]);
  double lambda = reader->ParseDouble(tokens[3]);
  if (num_states < 1 || num_pdfs < 1)
    reader->FailHere("state and pdf counts must be positive");

  std::vector<Arc> arcs;
  Vector initial = Vector::Zero(num_states);
  Vector final_probs = Vector::Zero(num_states);
  auto check_state = [&](int s) {
    if (s < 0 || s >= num_states) reader->FailHere("state index ", s, " out of range");
    return s;
  };
  while (reader->Next(&tokens)) {
    if (tokens[0] == "I" && tokens.size() == 3) {
      initial(check_state(reader->ParseInt(tokens[1]))) =
          reader->ParseDouble(tokens[2]);
    } else if (tokens[0] == "A" && tokens.size() == 5) {
      Arc arc;
      arc.src = check_state(reader->ParseInt(tokens[1]));
      arc.dst = check_state(reader->ParseInt(tokens[2]));
      arc.pdf = reader->ParseInt(tokens[3]);
      arc.log_prob = reader->ParseDouble(tokens[4]);
      if (arc.pdf < 0 || arc.pdf >= num_pdfs)
        reader->FailHere("arc pdf ", arc.pdf, " out of range");
      if (!std::isfinite(arc.log_prob))
        reader->FailHere("non-finite arc log-probability");
      arcs.push_back(arc);
    } else if (tokens[0] == "F" && tokens.size() == 3) {
      final_probs(check_state(reader->ParseInt(tokens[1]))) =
          reader->ParseDouble(tokens[2]);
    } else {
      reader->FailHere("unrecognized record '", tokens[0], "'");
    }
  }
  try {
    return DenominatorGraph(num_states, num_pdfs, std::move(arcs),
                            std::move(initial), std::move(final_probs), lambda);
  } catch (const Error &e) {
    reader->FailHere(e.what());
  }
}

void WriteDenominatorGraphFile(const std::string &path, const DenominatorGraph &g) {
  auto os = OpenOutput(path);
  g.Write(os);
  Require(os.good(), "write failed for '", path, "'");
}

DenominatorGraph ReadDenominatorGraphFile(const std::string &path) {
  auto is = OpenInput(path);
  LineReader reader(is, path);
  return DenominatorGraph::Read(&reader);
}

}  // namespace lfseq
