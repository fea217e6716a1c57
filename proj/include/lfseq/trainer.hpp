// lfseq/trainer.hpp
// Minibatch sequence training of the toy net on a synthetic corpus.

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

#ifndef LFSEQ_TRAINER_HPP
#define LFSEQ_TRAINER_HPP

#include "lfseq/criteria.hpp"
#include "lfseq/decoder.hpp"
#include "lfseq/graph.hpp"
#include "lfseq/net.hpp"
#include "lfseq/synth_data.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lfseq {

// All hyperparameters of a training run. Fields set to -1 (or -1.0) pick a
// per-criterion default in Resolve(): mmi/bmmi train 4 epochs with label
// tolerance 5; smbr trains 12 epochs with tolerance 0 and silence scale
// 0.013; bmmi boosts with b = 0.2.
struct TrainConfig {
  std::string criterion = "mmi";
  double boost = -1.0;
  double silence_scale = -1.0;
  double leaky_coeff = 0.1;
  double xent_smooth = 0.025;
  int tolerance = -1;
  int epochs = -1;
  double lr_initial = 1e-3;
  double lr_final = 1e-4;
  double momentum = 0.9;
  double clip_norm = 5.0;
  int batch_size = 8;
  uint64_t seed = 1;
  double lm_interp = 0.9;
  std::vector<int> hidden_dims = {64, 64};
  int jobs = 1;
  std::string corpus_dir;
  std::string out_dir;  // empty: keep everything in memory

  // key=value assignment; unknown keys throw.
  void Set(const std::string &key, const std::string &value);
  // key=value lines, '#' starts a comment.
  static TrainConfig Load(const std::string &path);

  // Fills per-criterion defaults and validates ranges.
  void Resolve();
  CriterionConfig MakeCriterionConfig(const HmmTopology &topo) const;
};

// Model of the corpus derived from the training alignments: topology shape
// from the state ids, self-loop probability from the mean state-run length,
// phone LM from the transcripts.
struct TrainingSetup {
  HmmTopology topo;
  PhoneLm lm;
  DenominatorGraph den;
  std::vector<Supervision> sups;  // parallel to the corpus
};
TrainingSetup PrepareTraining(const TrainConfig &cfg,
                              const std::vector<Utterance> &corpus);

struct TrainResult {
  ToyNet net;
  std::vector<double> epoch_objectives;  // mean per-frame objective per epoch
  std::string log_csv;                   // full minibatch log
};

// Deterministic given cfg.seed: fixed shuffle order, ordered gradient
// reduction. Aborts (with the utterance id) if any utterance produces a
// non-finite objective. If cfg.out_dir is set, writes train_log.csv,
// per-epoch checkpoints and final.net there.
TrainResult Train(const TrainConfig &cfg, const std::vector<Utterance> &corpus);

// Viterbi-decodes every utterance and accumulates phone edit counts against
// the alignments' phone sequences.
EditCounts Evaluate(const ToyNet &net, const DenominatorGraph &graph,
                    const std::vector<Utterance> &corpus, int jobs);

std::string FormatScoreReport(const EditCounts &counts);

}  // namespace lfseq

#endif  // LFSEQ_TRAINER_HPP
