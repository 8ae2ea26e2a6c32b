/* Copyright 2026 The SST Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sst/dataset.hpp"
#include "sst/model.hpp"
#include "sst/optim.hpp"

namespace sst {

// An unlabeled slice paired with the labels the current model assigned.
struct PseudoLabeledDataset {
  Matrix features;
  Labels pseudo_labels;
  int num_classes = 0;
  int source_slice_index = 0;
  std::uint64_t labeler_fingerprint = 0;

  std::size_t size() const noexcept { return pseudo_labels.size(); }
};

// Hard argmax labels for every row; nothing is filtered or reweighted.
// `threads` > 1 splits rows into contiguous blocks; output order is
// always input order.
PseudoLabeledDataset pseudo_label(const Model& labeler, const UnlabeledSlice& slice,
                                  int threads = 1);

struct IterationRecord {
  int t = 0;
  std::size_t slice_size = 0;
  HypothesisSpec hypothesis;
  double pretrain_loss = 0.0;  // final loss of F' on its pseudo-labels; 0 at t = 0
  double top1 = 0.0;           // post-finetune test accuracy, in [0, 1]
  double wall_seconds = 0.0;
  std::uint64_t model_fingerprint = 0;    // F after this iteration
  std::uint64_t labeler_fingerprint = 0;  // model that labeled slice t; 0 at t = 0
};

struct RunReport {
  std::string run_name = "stream";
  std::vector<IterationRecord> records;
  std::uint64_t manifest_fingerprint = 0;
  std::uint64_t seed = 0;

  // Throws unless record indices are exactly 0, 1, 2, ...
  void validate() const;
};

struct StreamConfigs {
  TrainConfig init;
  std::vector<TrainConfig> pretrain;  // one per slice
  TrainConfig finetune;
};

// Everything fed to observers and needed to resume after iteration t.
struct IterationState {
  int t = 0;
  const Model* model = nullptr;                   // F after iteration t
  const PseudoLabeledDataset* pseudo = nullptr;   // null at t = 0
  const RunReport* report = nullptr;              // records 0..t
};

struct ResumePoint {
  Model model;       // F after iteration `completed`
  int completed = 0;
  std::vector<IterationRecord> records;  // 0..completed
};

struct StreamOptions {
  std::uint64_t seed = 0;
  std::uint64_t manifest_fingerprint = 0;
  int threads = 1;
  // Seconds since an arbitrary epoch; defaults to a steady clock.
  std::function<double()> clock;
  std::function<void(const IterationState&)> on_iteration;
  std::optional<ResumePoint> resume;
  // Stop once this iteration has completed (simulates an interruption).
  std::optional<int> stop_after;
};

struct StreamResult {
  Model model;
  RunReport report;
};

// StreamLearning:
//   F <- Learn(specs[0], S)
//   for t = 1..T:  U <- pseudo_label(F, U_t);  F' <- Learn(specs[t], U);
//                  F <- Finetune(F', S)
// Each slice is labeled exactly once, by the model from iteration t - 1.
StreamResult stream_learning(const LabeledDataset& s, std::span<const UnlabeledSlice> slices,
                             const CapacitySchedule& schedule, const StreamConfigs& configs,
                             const LabeledDataset& eval_set, const StreamOptions& options = {});

// Single-iteration baseline: every slice concatenated, labeled once by the
// init model, pretrained with the final spec of `schedule`, fine-tuned on S.
// Uses configs.pretrain.back() for the pretraining stage.
StreamResult no_streaming_run(const LabeledDataset& s, std::span<const UnlabeledSlice> slices,
                              const CapacitySchedule& schedule, const StreamConfigs& configs,
                              const LabeledDataset& eval_set, const StreamOptions& options = {});

// sum_{S} loss(y, F(x)) + sum_{U} loss(z, F(x)) with summed cross-entropy.
double joint_objective(const Model& model, const LabeledDataset& s,
                       const PseudoLabeledDataset& u);

struct CoordinateDescentTrace {
  // Objective after every half-step: z-step, F-step, z-step, ...
  std::vector<double> objective;
  // Labels changed by each z-step relative to the previous assignment.
  // The first z-step is counted against nothing and reports the slice size.
  std::vector<std::size_t> label_changes;
  // First iteration (1-based) whose z-step changed no labels, or -1.
  int fixed_point_iteration = -1;
  Model model;
};

struct ExactCdOptions {
  int max_inner_steps = 200;    // full-batch steps per F-step
  double initial_step = 1.0;    // backtracking line search start
  double tolerance = 1e-10;     // stop an F-step when the gradient norm falls below
};

// Exact coordinate descent on the joint objective for a linear (convex)
// hypothesis: F starts from Learn(spec, S, cfg), then alternates
// z <- argmin_z (pseudo-labeling) and F <- a monotone full-batch descent on
// the joint objective over S and the pseudo-labeled slice.
CoordinateDescentTrace exact_cd_run(const LabeledDataset& s, const UnlabeledSlice& u,
                                    const HypothesisSpec& spec, int iterations,
                                    const TrainConfig& cfg, std::uint64_t seed = 0,
                                    const ExactCdOptions& options = {});

}  // namespace sst
