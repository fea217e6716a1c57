// trainer.cpp

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

#include "lfseq/trainer.hpp"

#include "lfseq/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace lfseq {

void TrainConfig::Set(const std::string &key, const std::string &value) {
  auto as_double = [&]() {
    try {
      size_t pos = 0;
      double v = std::stod(value, &pos);
      Require(pos == value.size(), "");
      return v;
    } catch (...) {
      Fail("bad numeric value '", value, "' for config key '", key, "'");
    }
  };
  auto as_int = [&]() {
    try {
      size_t pos = 0;
      long v = std::stol(value, &pos);
      Require(pos == value.size(), "");
      return static_cast<int>(v);
    } catch (...) {
      Fail("bad integer value '", value, "' for config key '", key, "'");
    }
  };
  if (key == "criterion") criterion = value;
  else if (key == "boost") boost = as_double();
  else if (key == "silence_scale") silence_scale = as_double();
  else if (key == "leaky_coeff") leaky_coeff = as_double();
  else if (key == "xent_smooth") xent_smooth = as_double();
  else if (key == "tolerance") tolerance = as_int();
  else if (key == "epochs") epochs = as_int();
  else if (key == "lr_initial") lr_initial = as_double();
  else if (key == "lr_final") lr_final = as_double();
  else if (key == "momentum") momentum = as_double();
  else if (key == "clip_norm") clip_norm = as_double();
  else if (key == "batch_size") batch_size = as_int();
  else if (key == "seed") seed = static_cast<uint64_t>(as_int());
  else if (key == "lm_interp") lm_interp = as_double();
  else if (key == "jobs") jobs = as_int();
  else if (key == "corpus_dir") corpus_dir = value;
  else if (key == "out_dir") out_dir = value;
  else if (key == "hidden_dims") {
    hidden_dims.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
      hidden_dims.push_back(std::stoi(item));
    Require(!hidden_dims.empty(), "hidden_dims must not be empty");
  } else {
    Fail("unknown config key '", key, "'");
  }
}

TrainConfig TrainConfig::Load(const std::string &path) {
  auto is = OpenInput(path);
  TrainConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto eq = line.find('=');
    Require(eq != std::string::npos, path, ":", line_no,
            ": expected key=value");
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    cfg.Set(strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
  }
  return cfg;
}

void TrainConfig::Resolve() {
  CriterionKind kind = ParseCriterionKind(criterion);
  if (boost < 0.0) boost = kind == CriterionKind::kBmmi ? 0.2 : 0.0;
  if (silence_scale < 0.0)
    silence_scale = kind == CriterionKind::kSmbr ? 0.013 : 1.0;
  if (tolerance < 0) tolerance = kind == CriterionKind::kSmbr ? 0 : 5;
  if (epochs < 0) epochs = kind == CriterionKind::kSmbr ? 12 : 4;
  Require(epochs >= 1, "epochs must be positive");
  Require(batch_size >= 1, "batch_size must be positive");
  Require(leaky_coeff >= 0.0 && leaky_coeff < 1.0, "bad leaky_coeff");
  Require(lm_interp > 0.0 && lm_interp <= 1.0, "bad lm_interp");
  Require(momentum >= 0.0 && momentum < 1.0, "bad momentum");
}

CriterionConfig TrainConfig::MakeCriterionConfig(const HmmTopology &topo) const {
  CriterionConfig cc;
  cc.kind = ParseCriterionKind(criterion);
  cc.boost = boost;
  cc.silence_scale = silence_scale;
  cc.xent_smooth = xent_smooth;
  cc.silence_pdfs = topo.PhonePdfs(0);
  cc.Validate();
  return cc;
}

TrainingSetup PrepareTraining(const TrainConfig &cfg,
                              const std::vector<Utterance> &corpus) {
  Require(!corpus.empty(), "empty training corpus");

  // Topology shape from the alignments; self-loop probability from the mean
  // state-run length (geometric: p = 1 - 1/mean).
  int num_phones = 0, states_per_phone = 0;
  long total_frames = 0, total_runs = 0;
  for (const Utterance &utt : corpus) {
    const auto &frames = utt.ali.frames;
    for (size_t t = 0; t < frames.size(); t++) {
      num_phones = std::max(num_phones, frames[t].phone + 1);
      states_per_phone = std::max(states_per_phone, frames[t].state + 1);
      if (t == 0 || frames[t].phone != frames[t - 1].phone ||
          frames[t].state != frames[t - 1].state)
        total_runs++;
    }
    total_frames += static_cast<long>(frames.size());
  }
  Require(total_runs > 0, "alignments are empty");
  double mean_run = static_cast<double>(total_frames) / total_runs;
  double self_loop = std::max(0.0, 1.0 - 1.0 / mean_run);

  TrainingSetup setup;
  setup.topo = HmmTopology(num_phones, states_per_phone, self_loop);
  for (const Utterance &utt : corpus) utt.ali.Validate(setup.topo);

  std::vector<std::vector<int>> phone_seqs;
  phone_seqs.reserve(corpus.size());
  for (const Utterance &utt : corpus)
    phone_seqs.push_back(utt.ali.PhoneSequence());
  setup.lm = EstimatePhoneLm(phone_seqs, num_phones, cfg.lm_interp);
  setup.den = BuildDenominatorGraph(setup.lm, setup.topo, cfg.leaky_coeff);

  setup.sups.reserve(corpus.size());
  for (const Utterance &utt : corpus)
    setup.sups.push_back(BuildNumeratorGraph(utt.ali, cfg.tolerance, setup.topo));
  return setup;
}

namespace {

struct UttWork {
  CriterionOutput out;
  ToyNet::Gradients grads;
  int frames = 0;
};

}  // namespace

TrainResult Train(const TrainConfig &config, const std::vector<Utterance> &corpus) {
  TrainConfig cfg = config;
  cfg.Resolve();
  TrainingSetup setup = PrepareTraining(cfg, corpus);
  CriterionConfig crit = cfg.MakeCriterionConfig(setup.topo);

  const int num_utts = static_cast<int>(corpus.size());
  const int feat_dim = static_cast<int>(corpus[0].features.cols());
  const int batches_per_epoch = (num_utts + cfg.batch_size - 1) / cfg.batch_size;

  TrainResult result;
  result.net = ToyNet::Create(feat_dim, cfg.hidden_dims, setup.topo.NumPdfs(),
                              cfg.seed);
  ToyNet::Gradients velocity = result.net.ZeroGradients();
  LrSchedule schedule{cfg.lr_initial, cfg.lr_final,
                      static_cast<long>(cfg.epochs) * batches_per_epoch};

  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
  std::ostringstream log;
  log << "iter,epoch,objective_per_frame,num_logprob_per_frame,"
         "den_logprob_per_frame,grad_norm,lr\n";

  std::vector<int> order(num_utts);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(cfg.seed + 0x9e3779b97f4a7c15ULL);

  long iter = 0;
  for (int epoch = 0; epoch < cfg.epochs; epoch++) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_obj = 0.0;
    long epoch_frames = 0;
    for (int b = 0; b < batches_per_epoch; b++) {
      int begin = b * cfg.batch_size;
      int end = std::min(num_utts, begin + cfg.batch_size);
      int batch = end - begin;
      std::vector<UttWork> work(batch);
      ParallelFor(batch, cfg.jobs, [&](int i) {
        int u = order[begin + i];
        Matrix ll = result.net.Forward(corpus[u].features);
        work[i].out = ComputeCriterion(setup.den, setup.sups[u], ll, crit);
        work[i].grads = result.net.Backward(corpus[u].features, work[i].out.grad);
        work[i].frames = static_cast<int>(ll.rows());
      });

      ToyNet::Gradients grads = result.net.ZeroGradients();
      double obj = 0.0, num_lp = 0.0, den_lp = 0.0;
      long frames = 0;
      for (int i = 0; i < batch; i++) {  // reduce in index order
        int u = order[begin + i];
        Require(std::isfinite(work[i].out.objective),
                "non-finite objective on utterance '", corpus[u].utt_id, "'");
        grads.Add(work[i].grads);
        obj += work[i].out.objective;
        num_lp += work[i].out.num_logprob;
        den_lp += work[i].out.den_logprob;
        frames += work[i].frames;
      }
      epoch_obj += obj;
      epoch_frames += frames;

      double lr = schedule.LrAt(iter);
      double grad_norm = grads.GlobalNorm();
      Require(result.net.SgdStep(grads, lr, cfg.momentum, cfg.clip_norm,
                                 &velocity),
              "non-finite gradient at iteration ", iter);
      log << iter << ',' << epoch << ',' << FormatDouble(obj / frames) << ','
          << FormatDouble(num_lp / frames) << ','
          << FormatDouble(den_lp / frames) << ',' << FormatDouble(grad_norm)
          << ',' << FormatDouble(lr) << '\n';
      iter++;
    }
    result.epoch_objectives.push_back(epoch_obj / epoch_frames);
    if (!cfg.out_dir.empty()) {
      std::ostringstream name;
      name << "epoch_" << epoch << ".net";
      WriteNetFile((std::filesystem::path(cfg.out_dir) / name.str()).string(),
                   result.net);
    }
  }

  result.log_csv = log.str();
  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    auto os = OpenOutput((fs::path(cfg.out_dir) / "train_log.csv").string());
    os << result.log_csv;
    Require(os.good(), "write failed for train log");
    WriteNetFile((fs::path(cfg.out_dir) / "final.net").string(), result.net);
  }
  return result;
}

EditCounts Evaluate(const ToyNet &net, const DenominatorGraph &graph,
                    const std::vector<Utterance> &corpus, int jobs) {
  const int n = static_cast<int>(corpus.size());
  std::vector<EditCounts> per_utt(n);
  ParallelFor(n, jobs, [&](int i) {
    Matrix ll = net.Forward(corpus[i].features);
    DecodeResult hyp = Decode(graph, ll);
    per_utt[i] = PhoneEditDistance(hyp.phones, corpus[i].ali.PhoneSequence());
  });
  EditCounts total;
  for (const EditCounts &c : per_utt) total.Add(c);
  return total;
}

std::string FormatScoreReport(const EditCounts &counts) {
  std::ostringstream os;
  os << "PER " << FormatDouble(counts.ErrorRate()) << " errors "
     << counts.TotalErrors() << " sub " << counts.substitutions << " ins "
     << counts.insertions << " del " << counts.deletions << " ref "
     << counts.ref_length;
  return os.str();
}

}  // namespace lfseq
