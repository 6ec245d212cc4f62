#include "motiongen/eval/evaluate.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "motiongen/common.hpp"
#include "motiongen/vae/generate.hpp"

namespace motiongen::eval {

const MetricRow& EvalReport::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw ValidationError("report has no metric '" + name + "'");
}

namespace {

struct Samples {
  std::vector<double> values;

  void add(double v) { values.push_back(v); }

  MetricRow summarize(const std::string& name) const {
    MetricRow row;
    row.name = name;
    row.n = static_cast<int>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= row.n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = row.n > 1 ? var / (row.n - 1) : 0.0;
    row.value = mean;
    row.ci_half = 1.96 * std::sqrt(var / row.n);
    return row;
  }
};

}  // namespace

double per_class_fid(const Eigen::MatrixXd& gen_features, const std::vector<int>& gen_labels,
                     const Eigen::MatrixXd& real_features,
                     const std::vector<int>& real_labels, int class_count) {
  double total = 0.0;
  for (int c = 0; c < class_count; ++c) {
    std::vector<int> g, r;
    for (size_t i = 0; i < gen_labels.size(); ++i) {
      if (gen_labels[i] == c) g.push_back(static_cast<int>(i));
    }
    for (size_t i = 0; i < real_labels.size(); ++i) {
      if (real_labels[i] == c) r.push_back(static_cast<int>(i));
    }
    if (g.size() < 2 || r.size() < 2) {
      throw ValidationError("per_class_fid: class " + std::to_string(c) +
                            " has too few samples");
    }
    Eigen::MatrixXd gm(g.size(), gen_features.cols());
    for (size_t i = 0; i < g.size(); ++i) gm.row(i) = gen_features.row(g[i]);
    Eigen::MatrixXd rm(r.size(), real_features.cols());
    for (size_t i = 0; i < r.size(); ++i) rm.row(i) = real_features.row(r[i]);
    total += fid(fit_gaussian(gm), fit_gaussian(rm));
  }
  return total / class_count;
}

EvalReport evaluate_model(const vae::VaeModel& model, const data::PreparedDataset& dataset,
                          const MotionClassifier& classifier, const EvalConfig& config,
                          nn::RandomStream& rng) {
  if (dataset.test.empty()) throw ValidationError("evaluation needs a non-empty test split");
  if (config.repetitions < 1) throw ValidationError("need at least one repetition");
  const int classes = dataset.action_count();
  if (config.n_samples < std::max(2, 2 * classes)) {
    throw ValidationError("need at least " + std::to_string(std::max(2, 2 * classes)) +
                          " samples per repetition");
  }

  int gen_length = config.generation_length;
  if (gen_length <= 0) {
    long total = 0;
    for (const auto& pm : dataset.test) total += pm.net_frames.rows();
    gen_length = static_cast<int>(total / static_cast<long>(dataset.test.size()));
  }

  // Test-split features are deterministic; compute them once.
  const int feat_dim = classifier.config.hidden_dim;
  Eigen::MatrixXd test_features(dataset.test.size(), feat_dim);
  std::vector<int> test_labels(dataset.test.size());
  for (size_t i = 0; i < dataset.test.size(); ++i) {
    test_features.row(i) = extract_features(classifier, dataset.test[i].net_frames).transpose();
    test_labels[i] = dataset.test[i].action_id;
  }

  Samples s_fid, s_acc, s_div, s_mm;
  Samples s_real_fid, s_real_acc, s_real_div, s_real_mm;

  for (int rep = 0; rep < config.repetitions; ++rep) {
    // Generated pool. Labels are balanced across actions and shuffled,
    // so the marginal stays uniform while every class is represented.
    Eigen::MatrixXd gen_features(config.n_samples, feat_dim);
    std::vector<int> gen_labels(config.n_samples);
    for (int i = 0; i < config.n_samples; ++i) gen_labels[i] = i % classes;
    rng.shuffle(gen_labels);
    int hits = 0;
    for (int i = 0; i < config.n_samples; ++i) {
      const nn::Matrix frames = vae::generate_net_frames(
          model, gen_labels[i], gen_length, dataset.skeleton, rng);
      gen_features.row(i) = extract_features(classifier, frames).transpose();
      if (classify(classifier, frames) == gen_labels[i]) ++hits;
    }

    // Real pools, sampled with replacement from the test split.
    auto draw_real = [&](Eigen::MatrixXd& feats, std::vector<int>& labels) {
      feats.resize(config.n_samples, feat_dim);
      labels.resize(config.n_samples);
      for (int i = 0; i < config.n_samples; ++i) {
        const int idx = rng.uniform_int(static_cast<int>(dataset.test.size()));
        feats.row(i) = test_features.row(idx);
        labels[i] = test_labels[idx];
      }
    };
    Eigen::MatrixXd real_features, real_features_2;
    std::vector<int> real_labels, real_labels_2;
    draw_real(real_features, real_labels);
    draw_real(real_features_2, real_labels_2);

    const GaussianStats real_stats = fit_gaussian(real_features);
    s_fid.add(fid(fit_gaussian(gen_features), real_stats));
    s_acc.add(static_cast<double>(hits) / config.n_samples);
    s_div.add(diversity(gen_features, config.s_diversity, rng));
    s_mm.add(multimodality(gen_features, gen_labels, classes, config.s_multimodality, rng));

    s_real_fid.add(fid(fit_gaussian(real_features_2), real_stats));
    int real_hits = 0;
    for (int i = 0; i < config.n_samples; ++i) {
      Eigen::VectorXd logits =
          classifier.head.weight.value() * real_features_2.row(i).transpose() +
          classifier.head.bias.value().row(0).transpose();
      int best = 0;
      logits.maxCoeff(&best);
      if (best == real_labels_2[i]) ++real_hits;
    }
    s_real_acc.add(static_cast<double>(real_hits) / config.n_samples);
    s_real_div.add(diversity(real_features_2, config.s_diversity, rng));
    // Replacement sampling can drop a class from a small real pool;
    // score the classes that made it in.
    {
      std::vector<int> remap(classes, -1);
      int present = 0;
      for (int label : real_labels_2) {
        if (remap[label] < 0) remap[label] = present++;
      }
      std::vector<int> dense(real_labels_2.size());
      for (size_t i = 0; i < real_labels_2.size(); ++i) dense[i] = remap[real_labels_2[i]];
      s_real_mm.add(multimodality(real_features_2, dense, present,
                                  config.s_multimodality, rng));
    }
  }

  EvalReport report;
  report.n_samples = config.n_samples;
  report.repetitions = config.repetitions;
  report.rows.push_back(s_fid.summarize("fid"));
  report.rows.push_back(s_acc.summarize("accuracy"));
  report.rows.push_back(s_div.summarize("diversity"));
  report.rows.push_back(s_mm.summarize("multimodality"));
  report.rows.push_back(s_real_fid.summarize("real_fid"));
  report.rows.push_back(s_real_acc.summarize("real_accuracy"));
  report.rows.push_back(s_real_div.summarize("real_diversity"));
  report.rows.push_back(s_real_mm.summarize("real_multimodality"));
  return report;
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream os;
  os << "report 1\n";
  os << "seed " << report.seed << "\n";
  os << "config_hash " << report.config_hash << "\n";
  os << "samples " << report.n_samples << "\n";
  os << "repetitions " << report.repetitions << "\n";
  for (const auto& row : report.rows) {
    os << "metric " << row.name << " " << format_double(row.value) << " "
       << format_double(row.ci_half) << " " << row.n << "\n";
  }
  return os.str();
}

void save_report(const std::string& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << report_to_text(report);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace motiongen::eval
