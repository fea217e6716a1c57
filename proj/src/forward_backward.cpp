// forward_backward.cpp

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

#include "lfseq/forward_backward.hpp"

#include <cmath>

namespace lfseq {

namespace {

// Emission probabilities for the whole utterance; boost(t, j) is subtracted
// in the log domain (boosted likelihood p' = p * exp(-boost)).
Matrix EmissionProbs(const LogLikes &loglikes, const Matrix *boost) {
  Require(loglikes.allFinite(), "log-likelihood matrix has non-finite entries");
  if (boost == nullptr) return loglikes.array().exp();
  Require(boost->rows() == loglikes.rows() && boost->cols() == loglikes.cols(),
          "boost table dimensions do not match the log-likelihoods");
  return (loglikes - *boost).array().exp();
}

void CheckDims(const FbProblem &problem, const LogLikes &loglikes) {
  Require(loglikes.rows() >= 1, "empty log-likelihood matrix");
  for (int t = 0; t < loglikes.rows(); t++)
    for (const Arc &a : problem.ArcsAt(t))
      Require(a.pdf < loglikes.cols(), "arc pdf ", a.pdf,
              " out of range for J = ", loglikes.cols());
}

}  // namespace

FbProblem::FbProblem(const DenominatorGraph &graph)
    : den_arcs_(&graph.Arcs()),
      num_states_(graph.NumStates()),
      leaky_coeff_(graph.LeakyCoeff()),
      initial_(graph.Initial()),
      final_probs_(graph.FinalProbs()) {
  den_arc_probs_.reserve(den_arcs_->size());
  for (const Arc &a : *den_arcs_) den_arc_probs_.push_back(std::exp(a.log_prob));
}

FbProblem::FbProblem(const Supervision &sup)
    : sup_(&sup), num_states_(sup.NumStates()), leaky_coeff_(0.0) {
  initial_ = Vector::Zero(num_states_);
  final_probs_ = Vector::Zero(num_states_);
  for (int s : sup.InitialStates()) initial_(s) = 1.0;
  for (int s : sup.FinalStates()) final_probs_(s) = 1.0;
  sup_arc_probs_.resize(sup.NumFrames());
  for (int t = 0; t < sup.NumFrames(); t++)
    sup_arc_probs_[t].assign(sup.ArcsAt(t).size(), 1.0);
}

AlphaBeta Forward(const FbProblem &problem, const LogLikes &loglikes,
                  const Matrix *boost) {
  CheckDims(problem, loglikes);
  const int num_frames = static_cast<int>(loglikes.rows());
  const int num_states = problem.NumStates();
  const double lambda = problem.LeakyCoeff();
  const Vector &leak_dist = problem.Initial();
  const Matrix em = EmissionProbs(loglikes, boost);

  AlphaBeta ab;
  ab.alpha.setZero(num_frames + 1, num_states);
  ab.beta.setZero(num_frames + 1, num_states);
  ab.log_scales.setZero(num_frames + 1);

  Vector row = problem.Initial();
  if (lambda != 0.0) row += lambda * row.sum() * leak_dist;
  double scale = row.sum();
  Require(scale > 0.0, "no initial probability mass");
  ab.alpha.row(0) = row.transpose() / scale;
  ab.log_scales(0) = std::log(scale);

  Vector next(num_states);
  for (int t = 0; t < num_frames; t++) {
    next.setZero();
    const auto &arcs = problem.ArcsAt(t);
    const auto &probs = problem.ArcProbsAt(t);
    for (size_t a = 0; a < arcs.size(); a++) {
      const Arc &arc = arcs[a];
      next(arc.dst) += ab.alpha(t, arc.src) * probs[a] * em(t, arc.pdf);
    }
    if (lambda != 0.0) next += lambda * next.sum() * leak_dist;
    scale = next.sum();
    Require(scale > 0.0 && std::isfinite(scale),
            "forward mass vanished or overflowed at frame ", t);
    ab.alpha.row(t + 1) = next.transpose() / scale;
    ab.log_scales(t + 1) = std::log(scale);
  }

  double final_mass = ab.alpha.row(num_frames).dot(problem.FinalProbs());
  Require(final_mass > 0.0, "no path reaches a final state");
  ab.total_logprob = ab.log_scales.sum() + std::log(final_mass);
  return ab;
}

void Backward(const FbProblem &problem, const LogLikes &loglikes,
              const Matrix *boost, AlphaBeta *ab) {
  const int num_frames = static_cast<int>(loglikes.rows());
  const int num_states = problem.NumStates();
  const double lambda = problem.LeakyCoeff();
  const Vector &leak_dist = problem.Initial();
  const Matrix em = EmissionProbs(loglikes, boost);

  ab->beta.row(num_frames) = problem.FinalProbs().transpose();
  Vector btilde(num_states), prev(num_states);
  for (int t = num_frames; t >= 1; t--) {
    btilde = ab->beta.row(t).transpose();
    if (lambda != 0.0)
      btilde.array() += lambda * leak_dist.dot(ab->beta.row(t).transpose());
    prev.setZero();
    const auto &arcs = problem.ArcsAt(t - 1);
    const auto &probs = problem.ArcProbsAt(t - 1);
    for (size_t a = 0; a < arcs.size(); a++) {
      const Arc &arc = arcs[a];
      prev(arc.src) += probs[a] * em(t - 1, arc.pdf) * btilde(arc.dst);
    }
    ab->beta.row(t - 1) = prev.transpose() / std::exp(ab->log_scales(t));
  }
}

Matrix Occupancies(const FbProblem &problem, const LogLikes &loglikes,
                   const Matrix *boost, const AlphaBeta &ab) {
  const int num_frames = static_cast<int>(loglikes.rows());
  const int num_pdfs = static_cast<int>(loglikes.cols());
  const double lambda = problem.LeakyCoeff();
  const Vector &leak_dist = problem.Initial();
  const Matrix em = EmissionProbs(loglikes, boost);

  Matrix gamma = Matrix::Zero(num_frames, num_pdfs);
  Vector btilde(problem.NumStates());
  for (int t = 1; t <= num_frames; t++) {
    btilde = ab.beta.row(t).transpose();
    if (lambda != 0.0)
      btilde.array() += lambda * leak_dist.dot(ab.beta.row(t).transpose());
    const auto &arcs = problem.ArcsAt(t - 1);
    const auto &probs = problem.ArcProbsAt(t - 1);
    for (size_t a = 0; a < arcs.size(); a++) {
      const Arc &arc = arcs[a];
      gamma(t - 1, arc.pdf) +=
          ab.alpha(t - 1, arc.src) * probs[a] * em(t - 1, arc.pdf) * btilde(arc.dst);
    }
    double row_sum = gamma.row(t - 1).sum();
    Require(row_sum > 0.0, "zero posterior mass at frame ", t - 1);
    gamma.row(t - 1) /= row_sum;
  }
  return gamma;
}

SmbrQuantities SmbrForward(const FbProblem &problem, const LogLikes &loglikes,
                           const Matrix &acc, const AlphaBeta &ab) {
  const int num_frames = static_cast<int>(loglikes.rows());
  const int num_states = problem.NumStates();
  const double lambda = problem.LeakyCoeff();
  const Vector &leak_dist = problem.Initial();
  Require(acc.rows() == num_frames && acc.cols() == loglikes.cols(),
          "accuracy table dimensions do not match the log-likelihoods");
  const Matrix em = EmissionProbs(loglikes, nullptr);

  SmbrQuantities smbr;
  smbr.alpha_mbr.setZero(num_frames + 1, num_states);
  smbr.beta_mbr.setZero(num_frames + 1, num_states);

  Vector mass(num_states), acc_mass(num_states);
  for (int t = 1; t <= num_frames; t++) {
    mass.setZero();
    acc_mass.setZero();
    const auto &arcs = problem.ArcsAt(t - 1);
    const auto &probs = problem.ArcProbsAt(t - 1);
    for (size_t a = 0; a < arcs.size(); a++) {
      const Arc &arc = arcs[a];
      double delta = ab.alpha(t - 1, arc.src) * probs[a] * em(t - 1, arc.pdf);
      mass(arc.dst) += delta;
      acc_mass(arc.dst) +=
          (smbr.alpha_mbr(t - 1, arc.src) + acc(t - 1, arc.pdf)) * delta;
    }
    if (lambda != 0.0) {
      // Leak transitions redistribute mass and accuracy mass alike; their
      // own per-frame accuracy is zero.
      mass += lambda * mass.sum() * leak_dist;
      acc_mass += lambda * acc_mass.sum() * leak_dist;
    }
    for (int s = 0; s < num_states; s++)
      smbr.alpha_mbr(t, s) = mass(s) > 0.0 ? acc_mass(s) / mass(s) : 0.0;
  }

  double final_mass = ab.alpha.row(num_frames).dot(problem.FinalProbs());
  Require(final_mass > 0.0, "no path reaches a final state");
  double weighted = 0.0;
  for (int s = 0; s < num_states; s++)
    weighted += ab.alpha(num_frames, s) * problem.FinalProbs()(s) *
                smbr.alpha_mbr(num_frames, s);
  smbr.total_avg_accuracy = weighted / final_mass;
  return smbr;
}

SmbrGradientTerms SmbrBackward(const FbProblem &problem, const LogLikes &loglikes,
                               const Matrix &acc, const AlphaBeta &ab,
                               SmbrQuantities *smbr) {
  const int num_frames = static_cast<int>(loglikes.rows());
  const int num_states = problem.NumStates();
  const int num_pdfs = static_cast<int>(loglikes.cols());
  const double lambda = problem.LeakyCoeff();
  const Vector &leak_dist = problem.Initial();
  const Matrix em = EmissionProbs(loglikes, nullptr);

  SmbrGradientTerms terms;
  terms.gamma.setZero(num_frames, num_pdfs);
  terms.abar.setZero(num_frames, num_pdfs);

  smbr->beta_mbr.row(num_frames).setZero();
  Vector btilde(num_states), bmtilde(num_states);
  Vector prev_bm(num_states);
  for (int t = num_frames; t >= 1; t--) {
    Vector beta_row = ab.beta.row(t).transpose();
    Vector bm_row =
        beta_row.cwiseProduct(smbr->beta_mbr.row(t).transpose());
    btilde = beta_row;
    bmtilde = bm_row;
    if (lambda != 0.0) {
      btilde.array() += lambda * leak_dist.dot(beta_row);
      bmtilde.array() += lambda * leak_dist.dot(bm_row);
    }
    prev_bm.setZero();
    const auto &arcs = problem.ArcsAt(t - 1);
    const auto &probs = problem.ArcProbsAt(t - 1);
    for (size_t a = 0; a < arcs.size(); a++) {
      const Arc &arc = arcs[a];
      double w = probs[a] * em(t - 1, arc.pdf);
      double frame_acc = acc(t - 1, arc.pdf);
      double occ = ab.alpha(t - 1, arc.src) * w * btilde(arc.dst);
      terms.gamma(t - 1, arc.pdf) += occ;
      terms.abar(t - 1, arc.pdf) +=
          ab.alpha(t - 1, arc.src) * w *
          (btilde(arc.dst) * (smbr->alpha_mbr(t - 1, arc.src) + frame_acc) +
           bmtilde(arc.dst));
      prev_bm(arc.src) += w * (bmtilde(arc.dst) + frame_acc * btilde(arc.dst));
    }
    prev_bm /= std::exp(ab.log_scales(t));
    for (int s = 0; s < num_states; s++) {
      double b = ab.beta(t - 1, s);
      smbr->beta_mbr(t - 1, s) = b > 0.0 ? prev_bm(s) / b : 0.0;
    }
    double row_sum = terms.gamma.row(t - 1).sum();
    Require(row_sum > 0.0, "zero posterior mass at frame ", t - 1);
    for (int j = 0; j < num_pdfs; j++) {
      double g = terms.gamma(t - 1, j);
      terms.abar(t - 1, j) = g > 0.0 ? terms.abar(t - 1, j) / g : 0.0;
      terms.gamma(t - 1, j) = g / row_sum;
    }
  }
  return terms;
}

}  // namespace lfseq
