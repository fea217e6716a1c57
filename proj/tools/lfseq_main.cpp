// lfseq_main.cpp
// Command-line front end: data generation, LM estimation, graph building,
// training, gradient checking, decoding and scoring.

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

#include "lfseq/decoder.hpp"
#include "lfseq/grad_check.hpp"
#include "lfseq/oracle.hpp"
#include "lfseq/synth_data.hpp"
#include "lfseq/text_io.hpp"
#include "lfseq/trainer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>

namespace {

using namespace lfseq;

int RunGenData(const GenerativeSpec &spec, int num_utts,
               const std::string &prefix, const std::string &out_dir) {
  std::vector<Utterance> corpus = GenerateCorpus(spec, num_utts, prefix);
  WriteCorpus(out_dir, corpus);
  long frames = 0;
  for (const auto &utt : corpus) frames += utt.ali.NumFrames();
  std::cout << "wrote " << corpus.size() << " utterances (" << frames
            << " frames) to " << out_dir << "\n";
  return 0;
}

int RunEstimateLm(const std::string &ali_path, int vocab_size, double interp,
                  const std::string &out_path) {
  std::vector<Alignment> alis = ReadAlignmentsFile(ali_path);
  std::vector<std::vector<int>> seqs;
  seqs.reserve(alis.size());
  int max_phone = 0;
  for (const Alignment &ali : alis) {
    seqs.push_back(ali.PhoneSequence());
    for (int p : seqs.back()) max_phone = std::max(max_phone, p);
  }
  if (vocab_size <= 0) vocab_size = max_phone + 1;
  PhoneLm lm = EstimatePhoneLm(seqs, vocab_size, interp);
  WritePhoneLmFile(out_path, lm);
  std::cout << "estimated bigram over " << vocab_size << " phones from "
            << alis.size() << " sequences -> " << out_path << "\n";
  return 0;
}

int RunBuildGraphs(const std::string &lm_path, int states_per_phone,
                   double self_loop, double leaky, const std::string &den_out,
                   const std::string &ali_path, int tolerance,
                   const std::string &sup_dir) {
  PhoneLm lm = ReadPhoneLmFile(lm_path);
  HmmTopology topo(lm.VocabSize(), states_per_phone, self_loop);
  DenominatorGraph den = BuildDenominatorGraph(lm, topo, leaky);
  WriteDenominatorGraphFile(den_out, den);
  std::cout << "denominator graph: " << den.NumStates() << " states, "
            << den.Arcs().size() << " arcs, " << den.NumPdfs() << " pdfs -> "
            << den_out << "\n";
  if (!ali_path.empty()) {
    Require(!sup_dir.empty(), "--sup-dir is required with --alignments");
    std::filesystem::create_directories(sup_dir);
    std::vector<Alignment> alis = ReadAlignmentsFile(ali_path);
    for (const Alignment &ali : alis) {
      Supervision sup = BuildNumeratorGraph(ali, tolerance, topo);
      WriteSupervisionFile(
          (std::filesystem::path(sup_dir) / (ali.utt_id + ".sup")).string(),
          sup);
    }
    std::cout << "wrote " << alis.size() << " numerator graphs (tolerance "
              << tolerance << ") to " << sup_dir << "\n";
  }
  return 0;
}

int RunTrain(const std::string &config_path,
             const std::map<std::string, std::string> &overrides) {
  TrainConfig cfg;
  if (!config_path.empty()) cfg = TrainConfig::Load(config_path);
  for (const auto &[key, value] : overrides) cfg.Set(key, value);
  Require(!cfg.corpus_dir.empty(), "corpus_dir is required (config or flag)");
  std::vector<Utterance> corpus = ReadCorpus(cfg.corpus_dir);
  TrainResult result = Train(cfg, corpus);
  for (size_t e = 0; e < result.epoch_objectives.size(); e++)
    std::cout << "epoch " << e << " objective_per_frame "
              << FormatDouble(result.epoch_objectives[e]) << "\n";
  if (!cfg.out_dir.empty())
    std::cout << "model and log written to " << cfg.out_dir << "\n";
  return 0;
}

int RunGradCheck(uint64_t seed, int instances, double tol) {
  GradCheckOptions opts;
  bool ok = true;
  for (int i = 0; i < instances; i++) {
    auto results = RunNetGradCheck(seed + static_cast<uint64_t>(i), opts, tol);
    for (const auto &res : results) {
      std::cout << "grad-check instance " << i << " " << res.criterion
                << " max_rel_err " << FormatDouble(res.max_rel_err) << " "
                << (res.passed ? "PASS" : "FAIL") << "\n";
      ok = ok && res.passed;
    }
  }
  return ok ? 0 : 1;
}

int RunOracleCheckCmd(int instances, uint64_t seed, double obj_tol,
                      double grad_tol) {
  auto results = RunOracleCheck(instances, seed, obj_tol, grad_tol);
  bool ok = true;
  for (const auto &res : results) {
    std::cout << "oracle-check " << res.criterion << " obj_rel_err "
              << FormatDouble(res.max_objective_rel_err) << " grad_rel_err "
              << FormatDouble(res.max_grad_rel_err) << " "
              << (res.passed ? "PASS" : "FAIL") << "\n";
    ok = ok && res.passed;
  }
  return ok ? 0 : 1;
}

int RunDecode(const std::string &net_path, const std::string &graph_path,
              int states_per_phone, const std::string &corpus_dir,
              const std::string &out_path, int jobs) {
  ToyNet net = ReadNetFile(net_path);
  DenominatorGraph graph = ReadDenominatorGraphFile(graph_path);
  graph.AttachPhoneInfo(states_per_phone);
  std::vector<Utterance> corpus = ReadCorpus(corpus_dir);
  std::vector<std::vector<int>> hyps(corpus.size());
  ParallelFor(static_cast<int>(corpus.size()), jobs, [&](int i) {
    hyps[i] = Decode(graph, net.Forward(corpus[i].features)).phones;
  });
  auto os = OpenOutput(out_path);
  for (size_t i = 0; i < corpus.size(); i++) {
    os << corpus[i].utt_id;
    for (int p : hyps[i]) os << ' ' << p;
    os << '\n';
  }
  Require(os.good(), "write failed for '", out_path, "'");
  std::cout << "decoded " << corpus.size() << " utterances -> " << out_path
            << "\n";
  return 0;
}

std::map<std::string, std::vector<int>> ReadTranscripts(const std::string &path) {
  auto is = OpenInput(path);
  LineReader reader(is, path);
  std::map<std::string, std::vector<int>> result;
  std::vector<std::string> tokens;
  while (reader.Next(&tokens)) {
    std::vector<int> phones;
    for (size_t i = 1; i < tokens.size(); i++)
      phones.push_back(reader.ParseInt(tokens[i]));
    Require(result.emplace(tokens[0], std::move(phones)).second,
            "duplicate utterance '", tokens[0], "' in ", path);
  }
  return result;
}

int RunScore(const std::string &hyp_path, const std::string &ref_path) {
  auto hyps = ReadTranscripts(hyp_path);
  auto refs = ReadTranscripts(ref_path);
  EditCounts total;
  for (const auto &[utt_id, ref] : refs) {
    auto it = hyps.find(utt_id);
    Require(it != hyps.end(), "missing hypothesis for '", utt_id, "'");
    total.Add(PhoneEditDistance(it->second, ref));
  }
  std::cout << FormatScoreReport(total) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Lattice-free sequence-discriminative training toolkit"};
  app.require_subcommand(1);

  // gen-data
  auto *gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
  GenerativeSpec spec;
  int num_utts = 600;
  std::string prefix = "utt", gen_out;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--num-utts", num_utts, "number of utterances");
  gen->add_option("--prefix", prefix, "utterance id prefix");
  gen->add_option("--seed", spec.seed, "generation seed");
  gen->add_option("--num-phones", spec.num_phones, "phones incl. silence");
  gen->add_option("--states-per-phone", spec.states_per_phone);
  gen->add_option("--self-loop", spec.self_loop_prob);
  gen->add_option("--feature-dim", spec.feature_dim);
  gen->add_option("--sigma", spec.sigma);
  gen->add_option("--mean-sep", spec.mean_separation_sigmas);
  gen->add_option("--min-frames", spec.min_frames);
  gen->add_option("--max-frames", spec.max_frames);
  gen->add_option("--silence-prob", spec.silence_prob);

  // estimate-lm
  auto *elm = app.add_subcommand("estimate-lm", "estimate the phone bigram");
  std::string elm_ali, elm_out;
  int elm_vocab = 0;
  double elm_interp = 0.9;
  elm->add_option("--alignments", elm_ali, "alignments file")->required();
  elm->add_option("--out", elm_out, "output LM file")->required();
  elm->add_option("--vocab-size", elm_vocab, "phone count (0: derive)");
  elm->add_option("--interp", elm_interp, "interpolation weight");

  // build-graphs
  auto *bg = app.add_subcommand("build-graphs",
                                "build denominator / numerator graphs");
  std::string bg_lm, bg_den, bg_ali, bg_sup;
  int bg_states = 2, bg_tol = 5;
  double bg_self = 0.75, bg_leaky = 0.1;
  bg->add_option("--lm", bg_lm, "phone LM file")->required();
  bg->add_option("--den-out", bg_den, "denominator graph output")->required();
  bg->add_option("--states-per-phone", bg_states);
  bg->add_option("--self-loop", bg_self);
  bg->add_option("--leaky", bg_leaky, "leaky HMM coefficient");
  bg->add_option("--alignments", bg_ali, "also build numerator graphs");
  bg->add_option("--tolerance", bg_tol, "label tolerance in frames");
  bg->add_option("--sup-dir", bg_sup, "numerator graph output directory");

  // train
  auto *tr = app.add_subcommand("train", "train the model");
  std::string tr_config;
  tr->add_option("--config", tr_config, "key=value config file");
  std::map<std::string, std::string> tr_values;
  std::map<std::string, std::string> tr_overrides;
  // Flags mirror the config keys; a flag beats the file.
  for (const char *key :
       {"criterion", "boost", "silence_scale", "leaky_coeff", "xent_smooth",
        "tolerance", "epochs", "lr_initial", "lr_final", "momentum",
        "clip_norm", "batch_size", "seed", "lm_interp", "hidden_dims", "jobs",
        "corpus_dir", "out_dir"}) {
    std::string flag = "--" + std::string(key);
    std::replace(flag.begin(), flag.end(), '_', '-');
    tr->add_option(flag, tr_values[key], std::string("config key ") + key);
  }

  // grad-check
  auto *gc = app.add_subcommand("grad-check",
                                "finite-difference parameter gradient check");
  uint64_t gc_seed = 1;
  int gc_instances = 1;
  double gc_tol = 1e-5;
  gc->add_option("--seed", gc_seed);
  gc->add_option("--instances", gc_instances);
  gc->add_option("--tol", gc_tol);

  // oracle-check
  auto *oc = app.add_subcommand("oracle-check",
                                "compare against brute-force references");
  uint64_t oc_seed = 1;
  int oc_instances = 100;
  double oc_obj_tol = 1e-9, oc_grad_tol = 1e-5;
  oc->add_option("--seed", oc_seed);
  oc->add_option("--instances", oc_instances);
  oc->add_option("--obj-tol", oc_obj_tol);
  oc->add_option("--grad-tol", oc_grad_tol);

  // decode
  auto *dec = app.add_subcommand("decode", "Viterbi phone decoding");
  std::string dec_net, dec_graph, dec_corpus, dec_out;
  int dec_states = 2, dec_jobs = 1;
  dec->add_option("--net", dec_net, "model file")->required();
  dec->add_option("--graph", dec_graph, "denominator graph file")->required();
  dec->add_option("--states-per-phone", dec_states);
  dec->add_option("--corpus", dec_corpus, "corpus directory")->required();
  dec->add_option("--out", dec_out, "hypothesis transcript output")->required();
  dec->add_option("--jobs", dec_jobs);

  // score
  auto *sc = app.add_subcommand("score", "phone error rate");
  std::string sc_hyp, sc_ref;
  sc->add_option("--hyp", sc_hyp, "hypothesis transcripts")->required();
  sc->add_option("--ref", sc_ref, "reference transcripts")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return RunGenData(spec, num_utts, prefix, gen_out);
    if (elm->parsed())
      return RunEstimateLm(elm_ali, elm_vocab, elm_interp, elm_out);
    if (bg->parsed())
      return RunBuildGraphs(bg_lm, bg_states, bg_self, bg_leaky, bg_den,
                            bg_ali, bg_tol, bg_sup);
    if (tr->parsed()) {
      for (const auto &[key, value] : tr_values)
        if (!value.empty()) tr_overrides[key] = value;
      return RunTrain(tr_config, tr_overrides);
    }
    if (gc->parsed()) return RunGradCheck(gc_seed, gc_instances, gc_tol);
    if (oc->parsed())
      return RunOracleCheckCmd(oc_instances, oc_seed, oc_obj_tol, oc_grad_tol);
    if (dec->parsed())
      return RunDecode(dec_net, dec_graph, dec_states, dec_corpus, dec_out,
                       dec_jobs);
    if (sc->parsed()) return RunScore(sc_hyp, sc_ref);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
