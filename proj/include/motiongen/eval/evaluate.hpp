#pragma once

#include <string>
#include <vector>

#include "motiongen/eval/classifier.hpp"
#include "motiongen/eval/metrics.hpp"
#include "motiongen/vae/model.hpp"

namespace motiongen::eval {

struct EvalConfig {
  int n_samples = 300;        // motions per repetition (generated and real)
  int s_diversity = 50;       // paper-scale value: 200
  int s_multimodality = 10;   // paper-scale value: 20
  int repetitions = 20;
  int generation_length = 0;  // 0: use the mean test-split length
};

struct MetricRow {
  std::string name;
  double value = 0.0;
  double ci_half = 0.0;  // 95% confidence half-width over repetitions
  int n = 0;
};

struct EvalReport {
  uint64_t seed = 0;
  std::string config_hash;
  int n_samples = 0;
  int repetitions = 0;
  std::vector<MetricRow> rows;

  const MetricRow& row(const std::string& name) const;
};

// Full protocol: per repetition, generates `n_samples` motions with
// uniformly drawn labels, resamples the real pool with replacement from
// the test split, and computes FID, recognition accuracy, diversity, and
// multimodality for the generated set alongside the real-motion
// reference values. Reports mean and 95% CI half-width per metric.
EvalReport evaluate_model(const vae::VaeModel& model, const data::PreparedDataset& dataset,
                          const MotionClassifier& classifier, const EvalConfig& config,
                          nn::RandomStream& rng);

// Label-conditional FID: mean over classes of FID between the per-class
// feature subsets. Used to verify that conditioning carries signal
// (shuffling the generated labels must increase it).
double per_class_fid(const Eigen::MatrixXd& gen_features, const std::vector<int>& gen_labels,
                     const Eigen::MatrixXd& real_features,
                     const std::vector<int>& real_labels, int class_count);

std::string report_to_text(const EvalReport& report);
void save_report(const std::string& path, const EvalReport& report);

}  // namespace motiongen::eval
