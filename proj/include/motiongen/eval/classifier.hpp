#pragma once

#include <string>
#include <vector>

#include "motiongen/data/preprocess.hpp"
#include "motiongen/nn/adam.hpp"
#include "motiongen/nn/layers.hpp"
#include "motiongen/nn/random.hpp"

namespace motiongen::eval {

using nn::Matrix;

struct ClassifierConfig {
  int input_dim = 0;     // network pose width, 3J
  int action_count = 0;
  int hidden_dim = 48;
  int epochs = 40;
  double learning_rate = 5e-3;
  double weight_decay = 1e-5;
};

/// GRU sequence encoder with a linear classification head. The final
/// hidden state doubles as the motion feature vector for the metrics.
struct MotionClassifier {
  ClassifierConfig config;
  nn::GruCell gru;
  nn::LinearLayer head;

  std::vector<nn::NamedTensor> named_parameters() const;
  std::vector<nn::Tensor> parameters() const;
};

struct ClassifierReport {
  MotionClassifier classifier;
  double heldout_accuracy = 0.0;
  double train_accuracy = 0.0;
};

// Cross-entropy training over the prepared training split; held-out
// accuracy measured on the test split. Requires at least two classes and
// two motions per class. Deterministic given the RNG seed.
ClassifierReport train_classifier(const data::PreparedDataset& dataset,
                                  const ClassifierConfig& config, nn::RandomStream& rng);

// Final GRU hidden state over the motion's network frames.
Eigen::VectorXd extract_features(const MotionClassifier& classifier,
                                 const Matrix& net_frames);

// Class logits / argmax prediction for one motion.
Eigen::VectorXd classify_logits(const MotionClassifier& classifier,
                                const Matrix& net_frames);
int classify(const MotionClassifier& classifier, const Matrix& net_frames);

// Fraction of motions whose predicted class matches the claimed label.
double recognition_accuracy(const MotionClassifier& classifier,
                            const std::vector<Matrix>& motions,
                            const std::vector<int>& claimed_labels);

void save_classifier(const std::string& path, const MotionClassifier& classifier,
                     const data::PoseNormalizer& normalizer, uint64_t seed);
struct LoadedClassifier {
  MotionClassifier classifier;
  data::PoseNormalizer normalizer;
};
LoadedClassifier load_classifier(const std::string& path);

}  // namespace motiongen::eval
