#include "motiongen/eval/classifier.hpp"

#include <map>

#include "motiongen/common.hpp"
#include "motiongen/nn/checkpoint.hpp"
#include "motiongen/nn/ops.hpp"

namespace motiongen::eval {

using nn::Tensor;

std::vector<nn::NamedTensor> MotionClassifier::named_parameters() const {
  std::vector<nn::NamedTensor> out;
  gru.collect("gru", out);
  head.collect("head", out);
  return out;
}

std::vector<Tensor> MotionClassifier::parameters() const {
  std::vector<Tensor> out;
  for (auto& nt : named_parameters()) out.push_back(nt.tensor);
  return out;
}

namespace {

Tensor encode_sequence(const MotionClassifier& classifier, const Matrix& net_frames) {
  Tensor h(1, classifier.config.hidden_dim);
  for (int t = 0; t < net_frames.rows(); ++t) {
    Tensor x = Tensor::from_matrix(net_frames.row(t));
    h = nn::gru_step(classifier.gru, x, h);
  }
  return h;
}

}  // namespace

Eigen::VectorXd extract_features(const MotionClassifier& classifier,
                                 const Matrix& net_frames) {
  if (net_frames.rows() < 1) throw ValidationError("cannot featurize an empty motion");
  return encode_sequence(classifier, net_frames).value().row(0).transpose();
}

Eigen::VectorXd classify_logits(const MotionClassifier& classifier,
                                const Matrix& net_frames) {
  Tensor h = encode_sequence(classifier, net_frames);
  return classifier.head.forward(h).value().row(0).transpose();
}

int classify(const MotionClassifier& classifier, const Matrix& net_frames) {
  const Eigen::VectorXd logits = classify_logits(classifier, net_frames);
  int best = 0;
  logits.maxCoeff(&best);
  return best;
}

double recognition_accuracy(const MotionClassifier& classifier,
                            const std::vector<Matrix>& motions,
                            const std::vector<int>& claimed_labels) {
  if (motions.empty() || motions.size() != claimed_labels.size()) {
    throw ValidationError("recognition_accuracy: empty or mismatched inputs");
  }
  int hits = 0;
  for (size_t i = 0; i < motions.size(); ++i) {
    if (classify(classifier, motions[i]) == claimed_labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(motions.size());
}

ClassifierReport train_classifier(const data::PreparedDataset& dataset,
                                  const ClassifierConfig& config_in,
                                  nn::RandomStream& rng) {
  ClassifierConfig config = config_in;
  if (config.input_dim == 0) config.input_dim = dataset.pose_dim();
  if (config.action_count == 0) config.action_count = dataset.action_count();
  if (config.action_count < 2) throw ValidationError("need at least two action classes");
  std::map<int, int> per_class;
  for (const auto& pm : dataset.train) per_class[pm.action_id] += 1;
  if (static_cast<int>(per_class.size()) < 2) {
    throw ValidationError("training split covers fewer than two classes");
  }
  for (const auto& [cls, count] : per_class) {
    if (count < 2) {
      throw ValidationError("class " + std::to_string(cls) +
                            " has fewer than two training motions");
    }
  }

  ClassifierReport report;
  report.classifier.config = config;
  report.classifier.gru = nn::GruCell::init(config.input_dim, config.hidden_dim, rng);
  report.classifier.head = nn::LinearLayer::init(config.hidden_dim, config.action_count, rng);
  MotionClassifier& clf = report.classifier;

  auto params = clf.parameters();
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.learning_rate;
  adam_cfg.weight_decay = config.weight_decay;
  nn::AdamState adam = nn::AdamState::init(params, adam_cfg);

  std::vector<int> order(dataset.train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (int idx : order) {
      const data::PreprocessedMotion& pm = dataset.train[idx];
      for (auto& p : params) p.zero_grad();
      nn::Tape tape;
      {
        nn::TapeScope scope(tape);
        Tensor h = encode_sequence(clf, pm.net_frames);
        Tensor logits = clf.head.forward(h);
        Tensor loss = nn::softmax_cross_entropy(logits, {pm.action_id});
        tape.backward(loss);
      }
      nn::adam_step(params, adam);
    }
  }

  int hits = 0;
  for (const auto& pm : dataset.train) {
    if (classify(clf, pm.net_frames) == pm.action_id) ++hits;
  }
  report.train_accuracy =
      dataset.train.empty() ? 0.0 : static_cast<double>(hits) / dataset.train.size();
  hits = 0;
  for (const auto& pm : dataset.test) {
    if (classify(clf, pm.net_frames) == pm.action_id) ++hits;
  }
  report.heldout_accuracy =
      dataset.test.empty() ? 0.0 : static_cast<double>(hits) / dataset.test.size();
  return report;
}

void save_classifier(const std::string& path, const MotionClassifier& classifier,
                     const data::PoseNormalizer& normalizer, uint64_t seed) {
  nn::CheckpointData data;
  data.meta["kind"] = "classifier";
  data.meta["input_dim"] = std::to_string(classifier.config.input_dim);
  data.meta["action_count"] = std::to_string(classifier.config.action_count);
  data.meta["hidden_dim"] = std::to_string(classifier.config.hidden_dim);
  data.meta["seed"] = std::to_string(seed);
  {
    std::string norm = std::to_string(normalizer.root_index) + " " +
                       std::to_string(normalizer.joint_count);
    for (int i = 0; i < 3; ++i) norm += " " + format_double(normalizer.traj_mean[i]);
    for (int i = 0; i < 3; ++i) norm += " " + format_double(normalizer.traj_std[i]);
    data.meta["normalizer"] = norm;
  }
  for (const auto& nt : classifier.named_parameters()) {
    data.tensors.emplace_back(nt.name, nt.tensor.value());
  }
  nn::write_checkpoint(path, data);
}

LoadedClassifier load_classifier(const std::string& path) {
  const nn::CheckpointData data = nn::read_checkpoint(path);
  if (data.meta_value("kind") != "classifier") {
    throw ValidationError("'" + path + "' is not a classifier checkpoint");
  }
  LoadedClassifier out;
  out.classifier.config.input_dim =
      static_cast<int>(parse_int(data.meta_value("input_dim"), path));
  out.classifier.config.action_count =
      static_cast<int>(parse_int(data.meta_value("action_count"), path));
  out.classifier.config.hidden_dim =
      static_cast<int>(parse_int(data.meta_value("hidden_dim"), path));
  {
    const auto toks = split_ws(data.meta_value("normalizer"));
    if (toks.size() != 8) throw ValidationError(path + ": malformed normalizer metadata");
    out.normalizer.root_index = static_cast<int>(parse_int(toks[0], path));
    out.normalizer.joint_count = static_cast<int>(parse_int(toks[1], path));
    for (int i = 0; i < 3; ++i) out.normalizer.traj_mean[i] = parse_double(toks[2 + i], path);
    for (int i = 0; i < 3; ++i) out.normalizer.traj_std[i] = parse_double(toks[5 + i], path);
  }
  nn::RandomStream init_rng(0);
  out.classifier.gru = nn::GruCell::init(out.classifier.config.input_dim,
                                         out.classifier.config.hidden_dim, init_rng);
  out.classifier.head = nn::LinearLayer::init(out.classifier.config.hidden_dim,
                                              out.classifier.config.action_count, init_rng);
  auto named = out.classifier.named_parameters();
  if (named.size() != data.tensors.size()) {
    throw ValidationError(path + ": parameter list does not match the classifier layout");
  }
  for (size_t i = 0; i < named.size(); ++i) {
    if (named[i].name != data.tensors[i].first) {
      throw ValidationError(path + ": unexpected tensor '" + data.tensors[i].first + "'");
    }
    named[i].tensor.value() = data.tensors[i].second;
  }
  return out;
}

}  // namespace motiongen::eval
