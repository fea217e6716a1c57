// test_criteria.cpp

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

#include "lfseq/criteria.hpp"
#include "lfseq/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lfseq;

namespace {

Matrix FiniteDifferenceGrad(const RandomInstance &inst,
                            const CriterionConfig &cfg, const Matrix &frozen,
                            double step) {
  Matrix grad(inst.loglikes.rows(), inst.loglikes.cols());
  LogLikes ll = inst.loglikes;
  for (int t = 0; t < ll.rows(); t++) {
    for (int j = 0; j < ll.cols(); j++) {
      double saved = ll(t, j);
      ll(t, j) = saved + step;
      double up =
          ComputeCriterionFrozen(inst.den, inst.sup, ll, cfg, frozen).objective;
      ll(t, j) = saved - step;
      double down =
          ComputeCriterionFrozen(inst.den, inst.sup, ll, cfg, frozen).objective;
      ll(t, j) = saved;
      grad(t, j) = (up - down) / (2.0 * step);
    }
  }
  return grad;
}

}  // namespace

TEST_CASE("bMMI with b=0 equals MMI bit-for-bit") {
  for (uint64_t seed = 1; seed <= 20; seed++) {
    RandomInstanceOptions opts;
    opts.leaky_coeff = (seed % 2 == 0) ? 0.0 : 0.1;
    RandomInstance inst = MakeRandomInstance(seed, opts);
    CriterionConfig mmi_cfg;
    mmi_cfg.kind = CriterionKind::kMmi;
    CriterionConfig bmmi_cfg;
    bmmi_cfg.kind = CriterionKind::kBmmi;
    bmmi_cfg.boost = 0.0;
    CriterionOutput a = ComputeCriterion(inst.den, inst.sup, inst.loglikes, mmi_cfg);
    CriterionOutput b = ComputeCriterion(inst.den, inst.sup, inst.loglikes, bmmi_cfg);
    CHECK(a.objective == b.objective);
    CHECK(a.num_logprob == b.num_logprob);
    CHECK(a.den_logprob == b.den_logprob);
    CHECK((a.grad - b.grad).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("increasing b decreases the boosted denominator log-probability") {
  RandomInstanceOptions opts;
  RandomInstance inst = MakeRandomInstance(5, opts);
  double prev = std::numeric_limits<double>::infinity();
  for (double b : {0.0, 0.1, 0.2, 0.5}) {
    CriterionConfig cfg;
    cfg.kind = CriterionKind::kBmmi;
    cfg.boost = b;
    CriterionOutput out = ComputeCriterion(inst.den, inst.sup, inst.loglikes, cfg);
    CHECK(out.den_logprob < prev);
    prev = out.den_logprob;
  }
}

TEST_CASE("gradient rows sum to zero") {
  for (uint64_t seed = 50; seed <= 80; seed++) {
    RandomInstanceOptions opts;
    opts.leaky_coeff = (seed % 2 == 0) ? 0.0 : 0.1;
    RandomInstance inst = MakeRandomInstance(seed, opts);
    for (CriterionKind kind :
         {CriterionKind::kMmi, CriterionKind::kBmmi, CriterionKind::kSmbr}) {
      CriterionConfig cfg;
      cfg.kind = kind;
      if (kind == CriterionKind::kBmmi) cfg.boost = 0.2;
      if (kind == CriterionKind::kSmbr) {
        cfg.silence_scale = 0.013;
        cfg.silence_pdfs = inst.topo.PhonePdfs(0);
      }
      CriterionOutput out =
          ComputeCriterion(inst.den, inst.sup, inst.loglikes, cfg);
      double tol = kind == CriterionKind::kSmbr ? 1e-8 : 1e-10;
      for (int t = 0; t < out.grad.rows(); t++)
        CHECK(std::abs(out.grad.row(t).sum()) <= tol);
    }
  }
}

TEST_CASE("analytic gradients match finite differences") {
  for (uint64_t seed = 100; seed <= 112; seed++) {
    RandomInstanceOptions opts;
    opts.leaky_coeff = (seed % 2 == 0) ? 0.0 : 0.1;
    RandomInstance inst = MakeRandomInstance(seed, opts);
    Matrix frozen =
        ComputeNumeratorStats(inst.sup, inst.loglikes, inst.den.NumPdfs()).gamma;
    for (CriterionKind kind :
         {CriterionKind::kMmi, CriterionKind::kBmmi, CriterionKind::kSmbr}) {
      CriterionConfig cfg;
      cfg.kind = kind;
      cfg.xent_smooth = 0.025;
      if (kind == CriterionKind::kBmmi) cfg.boost = 0.1;
      if (kind == CriterionKind::kSmbr) {
        cfg.silence_scale = 0.013;
        cfg.silence_pdfs = inst.topo.PhonePdfs(0);
      }
      CriterionOutput out = ComputeCriterionFrozen(inst.den, inst.sup,
                                                   inst.loglikes, cfg, frozen);
      Matrix fd = FiniteDifferenceGrad(inst, cfg, frozen, 1e-4);
      double scale = std::max(
          {out.grad.cwiseAbs().maxCoeff(), fd.cwiseAbs().maxCoeff(), 1.0});
      CHECK((out.grad - fd).cwiseAbs().maxCoeff() / scale <= 1e-6);
    }
  }
}

TEST_CASE("shift invariance at lambda zero") {
  RandomInstanceOptions opts;
  opts.leaky_coeff = 0.0;
  for (uint64_t seed = 200; seed <= 210; seed++) {
    RandomInstance inst = MakeRandomInstance(seed, opts);
    for (CriterionKind kind :
         {CriterionKind::kMmi, CriterionKind::kBmmi, CriterionKind::kSmbr}) {
      CriterionConfig cfg;
      cfg.kind = kind;
      if (kind == CriterionKind::kBmmi) cfg.boost = 0.2;
      if (kind == CriterionKind::kSmbr)
        cfg.silence_pdfs = inst.topo.PhonePdfs(0);
      CriterionOutput base =
          ComputeCriterion(inst.den, inst.sup, inst.loglikes, cfg);
      LogLikes shifted = inst.loglikes;
      const double c = 0.37;
      shifted.row(1).array() += c;  // whole-frame shift
      CriterionOutput out = ComputeCriterion(inst.den, inst.sup, shifted, cfg);
      CHECK(out.objective == doctest::Approx(base.objective).epsilon(1e-9));
      if (kind != CriterionKind::kSmbr) {
        CHECK(out.num_logprob ==
              doctest::Approx(base.num_logprob + c).epsilon(1e-9));
        CHECK(out.den_logprob ==
              doctest::Approx(base.den_logprob + c).epsilon(1e-9));
      }
      CHECK((out.grad - base.grad).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("degenerate denominator makes the criteria exact") {
  // Denominator whose language is the single reference path: MMI objective 0
  // with zero gradient; sMBR objective T with zero gradient.
  Vector start(2);
  start << 1.0, 0.0;
  Matrix bigram(1, 2);
  bigram << 0.0, 1.0;  // phone repeats never happen; exit forced
  PhoneLm lm(std::move(start), std::move(bigram), 1.0);
  HmmTopology topo(1, 1, 0.5);
  DenominatorGraph den = BuildDenominatorGraph(lm, topo, 0.0);

  const int T = 4;
  Alignment ali;
  ali.utt_id = "t";
  for (int t = 0; t < T; t++) ali.frames.push_back({0, 0, 0});
  Supervision sup = BuildNumeratorGraph(ali, 0, topo);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  LogLikes ll(T, 1);
  for (int t = 0; t < T; t++) ll(t, 0) = dist(rng);

  CriterionConfig mmi_cfg;
  mmi_cfg.kind = CriterionKind::kMmi;
  CriterionOutput mmi = ComputeCriterion(den, sup, ll, mmi_cfg);
  // Supervision arcs are unweighted while the denominator carries transition
  // probabilities, so the objective is the (constant) path transition mass.
  CHECK(mmi.grad.cwiseAbs().maxCoeff() <= 1e-12);

  CriterionConfig smbr_cfg;
  smbr_cfg.kind = CriterionKind::kSmbr;
  CriterionOutput smbr = ComputeCriterion(den, sup, ll, smbr_cfg);
  CHECK(smbr.objective == doctest::Approx(T).epsilon(1e-10));
  CHECK(smbr.grad.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("cross-entropy regularizer") {
  SUBCASE("disabled at smooth zero") {
    Matrix gamma = Matrix::Constant(3, 4, 0.25);
    XentResult res = XentRegularizer(gamma, Matrix::Random(3, 4), 0.0);
    CHECK(res.value == 0.0);
    CHECK(res.grad.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("uniform logits with one-hot targets") {
    const int T = 5, J = 4;
    Matrix gamma = Matrix::Zero(T, J);
    for (int t = 0; t < T; t++) gamma(t, t % J) = 1.0;
    XentResult res = XentRegularizer(gamma, Matrix::Zero(T, J), 0.025);
    CHECK(res.value ==
          doctest::Approx(0.025 * T * std::log(1.0 / J)).epsilon(1e-12));
  }
  SUBCASE("gradient matches finite differences") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> dist;
    const int T = 4, J = 3;
    Matrix gamma(T, J), ll(T, J);
    for (int t = 0; t < T; t++) {
      double sum = 0.0;
      for (int j = 0; j < J; j++) {
        gamma(t, j) = std::abs(dist(rng));
        sum += gamma(t, j);
        ll(t, j) = dist(rng);
      }
      gamma.row(t) /= sum;
    }
    XentResult res = XentRegularizer(gamma, ll, 0.025);
    const double h = 1e-6;
    for (int t = 0; t < T; t++) {
      for (int j = 0; j < J; j++) {
        Matrix p = ll;
        p(t, j) += h;
        double up = XentRegularizer(gamma, p, 0.025).value;
        p(t, j) -= 2 * h;
        double down = XentRegularizer(gamma, p, 0.025).value;
        double fd = (up - down) / (2 * h);
        CHECK(res.grad(t, j) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("config validation") {
  CriterionConfig cfg;
  cfg.kind = CriterionKind::kMmi;
  cfg.boost = 0.1;  // boost requires bmmi
  CHECK_THROWS_AS(cfg.Validate(), Error);
  cfg = CriterionConfig{};
  cfg.kind = CriterionKind::kSmbr;
  cfg.silence_scale = 0.0;  // mu must be positive
  CHECK_THROWS_AS(cfg.Validate(), Error);
  CHECK_THROWS_AS(ParseCriterionKind("mpe"), Error);
  CHECK(ParseCriterionKind("smbr") == CriterionKind::kSmbr);
}
