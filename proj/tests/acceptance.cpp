// Acceptance suite: one check per release criterion, each printing a
// PASS/FAIL line with its runtime. The process exits non-zero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "motiongen/common.hpp"
#include "motiongen/data/preprocess.hpp"
#include "motiongen/data/skeleton_file.hpp"
#include "motiongen/data/synthesize.hpp"
#include "motiongen/eval/classifier.hpp"
#include "motiongen/eval/evaluate.hpp"
#include "motiongen/eval/metrics.hpp"
#include "motiongen/lie/kinematics.hpp"
#include "motiongen/nn/grad_check.hpp"
#include "motiongen/nn/ops.hpp"
#include "motiongen/vae/generate.hpp"
#include "motiongen/vae/training.hpp"

namespace fs = std::filesystem;
using namespace motiongen;
using Clock = std::chrono::steady_clock;

namespace {

struct Harness {
  int failures = 0;

  void run(int id, const std::string& name, double time_budget_s,
           const std::function<bool(std::string&)>& body) {
    const auto start = Clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (elapsed > time_budget_s) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("%s  %d  %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                elapsed, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

Eigen::Vector3d random_axis(nn::RandomStream& rng) {
  Eigen::Vector3d axis(rng.normal(), rng.normal(), rng.normal());
  while (axis.norm() < 1e-6) axis = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
  return axis.normalized();
}

std::shared_ptr<const lie::Skeleton> tiny_skeleton() {
  return std::make_shared<const lie::Skeleton>(
      "tiny", std::vector<std::string>{"root", "a", "b", "c", "d"},
      std::vector<std::vector<int>>{{0, 1, 2}, {1, 3, 4}},
      std::vector<double>{0.5, 0.4, 0.3, 0.2}, 0);
}

// Criterion 1: exp/log round trips at full accuracy, including near pi.
bool lie_round_trip(std::string& detail) {
  nn::RandomStream rng(101);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::Vector3d w = random_axis(rng) * rng.uniform(1e-12, M_PI - 1e-3);
    const Eigen::Vector3d back = lie::log_so3(lie::exp_so3(w));
    worst = std::max(worst, (back - w).cwiseAbs().maxCoeff());
  }
  double worst_near_pi = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d w = random_axis(rng) * rng.uniform(M_PI - 1e-3, M_PI - 1e-9);
    const Eigen::Vector3d back = lie::log_so3(lie::exp_so3(w));
    worst_near_pi = std::max(worst_near_pi, (back - w).cwiseAbs().maxCoeff());
  }
  std::ostringstream os;
  os << "bulk max err " << worst << ", near-pi max err " << worst_near_pi;
  detail = os.str();
  return worst < 1e-8 && worst_near_pi < 1e-5;
}

// Criterion 2: FK structural guarantees on the default skeleton.
bool fk_structure(std::string& detail) {
  const lie::Skeleton skeleton = data::default_skeleton();
  const lie::Skeleton scaled = lie::scale_skeleton(skeleton, {2.5});
  nn::RandomStream rng(102);
  double worst_len = 0.0, worst_trans = 0.0, worst_scale = 0.0;
  for (int i = 0; i < 1000; ++i) {
    lie::LiePose pose;
    pose.omega.resize(skeleton.bone_count());
    for (auto& w : pose.omega) w = random_axis(rng) * rng.uniform(0.0, M_PI);
    pose.root_translation =
        Eigen::Vector3d(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));

    const lie::JointPose joints = lie::forward_kinematics(pose, skeleton);
    const auto& bones = skeleton.bones();
    for (size_t b = 0; b < bones.size(); ++b) {
      const double len = (joints.joints[bones[b].child] - joints.joints[bones[b].parent]).norm();
      worst_len = std::max(worst_len, std::abs(len - skeleton.bone_lengths()[b]));
    }

    const Eigen::Vector3d t(rng.normal(), rng.normal(), rng.normal());
    lie::LiePose moved = pose;
    moved.root_translation += t;
    const lie::JointPose shifted = lie::forward_kinematics(moved, skeleton);
    for (size_t j = 0; j < joints.joints.size(); ++j) {
      worst_trans =
          std::max(worst_trans, (shifted.joints[j] - joints.joints[j] - t).norm());
    }

    lie::LiePose scaled_pose = pose;
    scaled_pose.root_translation *= 2.5;
    const lie::JointPose big = lie::forward_kinematics(scaled_pose, scaled);
    for (size_t j = 0; j < joints.joints.size(); ++j) {
      worst_scale = std::max(worst_scale, (big.joints[j] - 2.5 * joints.joints[j]).norm());
    }
  }
  std::ostringstream os;
  os << "len err " << worst_len << ", translation err " << worst_trans << ", scale err "
     << worst_scale;
  detail = os.str();
  return worst_len < 1e-9 && worst_trans < 1e-9 && worst_scale < 1e-9;
}

// Criterion 3: joints -> Lie -> joints on synthesized motions.
bool ik_fk_round_trip(std::string& detail) {
  const lie::Skeleton skeleton = data::default_skeleton();
  nn::RandomStream rng(103);
  const data::LoadedDataset ds =
      data::synthesize_dataset(data::default_action_specs(skeleton), 50, skeleton, rng);
  double worst = 0.0;
  for (const auto& rec : ds.records) {
    for (int f = 0; f < rec.frame_count(); ++f) {
      const lie::JointPose pose = lie::JointPose::from_flat(rec.frames.row(f).transpose());
      const lie::LiePose lp = lie::inverse_kinematics(pose, skeleton);
      const lie::Skeleton measured = lie::measured_skeleton(pose, skeleton);
      const lie::JointPose back = lie::forward_kinematics(lp, measured);
      worst = std::max(worst, (back.flat() - pose.flat()).cwiseAbs().maxCoeff());
    }
  }
  std::ostringstream os;
  os << ds.records.size() << " motions, max joint err " << worst << " m";
  detail = os.str();
  return worst < 1e-5;
}

// Criterion 4: finite differences over the full training objective.
bool gradient_correctness(std::string& detail) {
  auto skeleton = tiny_skeleton();
  vae::VaeConfig cfg;
  cfg.pose_dim = 15;
  cfg.action_count = 2;
  cfg.latent_dim = 4;
  cfg.hidden_dim = 8;
  cfg.encoder_out = 8;
  cfg.lambda_kl = 0.05;
  cfg.sequence_length = 4;

  nn::RandomStream data_rng(104);
  data::PreprocessedMotion pm;
  pm.action_id = 1;
  pm.net_frames.resize(4, 15);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 15; ++c) pm.net_frames(r, c) = 0.4 * data_rng.normal();
  }
  pm.lie_frames = nn::Matrix::Zero(4, 12);
  pm.trajectory = nn::Matrix::Zero(4, 3);

  double worst = 0.0;
  for (double p_tf : {1.0, 0.0}) {
    cfg.teacher_forcing_rate = p_tf;
    nn::RandomStream init_rng(105);
    vae::VaeModel model = vae::VaeModel::init(cfg, init_rng);
    auto f = [&]() {
      nn::RandomStream seq_rng(106);
      const vae::SequenceLoss seq = vae::train_sequence(model, pm, skeleton, seq_rng);
      return nn::Tensor::scalar(seq.loss);
    };
    nn::RandomStream pick(107);
    const auto report = nn::grad_check(f, model.parameters(), 1e-5, 6, pick);
    worst = std::max(worst, report.max_rel_error);
  }
  std::ostringstream os;
  os << "max rel err " << worst << " over both feeding branches";
  detail = os.str();
  return worst < 1e-4;
}

// Criterion 5: overfit one 8-frame sequence with teacher forcing, no KL.
bool overfit_capability(std::string& detail) {
  auto skeleton = tiny_skeleton();
  vae::VaeConfig cfg;
  cfg.pose_dim = 15;
  cfg.action_count = 2;
  cfg.latent_dim = 4;
  cfg.hidden_dim = 16;
  cfg.encoder_out = 16;
  cfg.lambda_kl = 0.0;
  cfg.teacher_forcing_rate = 1.0;
  cfg.sequence_length = 8;
  nn::RandomStream init_rng(108);
  vae::VaeModel model = vae::VaeModel::init(cfg, init_rng);

  data::PreprocessedMotion pm;
  pm.action_id = 0;
  pm.net_frames.resize(8, 15);
  nn::RandomStream data_rng(109);
  for (int t = 0; t < 8; ++t) {
    Eigen::VectorXd omega(12);
    for (int i = 0; i < 12; ++i) omega[i] = 0.6 * data_rng.normal();
    Eigen::VectorXd pos;
    lie::forward_kinematics_flat(omega, Eigen::Vector3d::Zero(), *skeleton, pos);
    pm.net_frames.row(t) = pos.transpose();
    pm.net_frames.row(t).segment(0, 3) = Eigen::RowVector3d(0.04 * t, 0.0, 0.0);
  }
  pm.lie_frames = nn::Matrix::Zero(8, 12);
  pm.trajectory = nn::Matrix::Zero(8, 3);

  auto params = model.parameters();
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = 2e-3;
  adam_cfg.weight_decay = 0.0;
  nn::AdamState adam = nn::AdamState::init(params, adam_cfg);
  nn::RandomStream train_rng(110);
  double per_frame = 1e300;
  int steps = 0;
  for (; steps < 2000 && per_frame > 1e-3; ++steps) {
    model.zero_grads();
    const vae::SequenceLoss seq = vae::train_sequence(model, pm, skeleton, train_rng);
    nn::adam_step(params, adam);
    per_frame = seq.recon_per_frame();
  }
  std::ostringstream os;
  os << "per-frame l2 " << per_frame << " after " << steps << " steps";
  detail = os.str();
  return per_frame < 1e-3;
}

// Criterion 6: the full desk-scale pipeline.
bool desk_run(std::string& detail) {
  const auto t0 = Clock::now();
  const lie::Skeleton skeleton = data::default_skeleton();
  nn::RandomStream synth_rng(7);
  const data::LoadedDataset raw =
      data::synthesize_dataset(data::default_action_specs(skeleton), 50, skeleton, synth_rng);
  const data::PreparedDataset ds = data::preprocess(raw);

  vae::TrainConfig tc;
  tc.model.hidden_dim = 64;
  tc.model.latent_dim = 16;
  tc.model.encoder_out = 64;
  tc.model.lambda_kl = 0.1;
  tc.model.teacher_forcing_rate = 0.6;
  tc.learning_rate = 1e-3;
  tc.batch_size = 16;
  tc.steps = 2000;
  tc.seed = 7;
  vae::Trainer trainer(tc, ds);
  for (int i = 0; i < tc.steps; ++i) trainer.step();
  const double train_time = std::chrono::duration<double>(Clock::now() - t0).count();
  if (train_time > 600.0) {
    detail = "training exceeded 10 minutes";
    return false;
  }

  // (a) classifier quality and recognition accuracy of generated motions.
  eval::ClassifierConfig ccfg;
  ccfg.hidden_dim = 32;
  ccfg.epochs = 30;
  nn::RandomStream crng(8);
  const eval::ClassifierReport crep = eval::train_classifier(ds, ccfg, crng);
  if (crep.heldout_accuracy < 0.95) {
    detail = "classifier held-out accuracy " + std::to_string(crep.heldout_accuracy);
    return false;
  }

  const int n_gen = 200;
  const int gen_length = 24;
  nn::RandomStream grng(9);
  Eigen::MatrixXd gen_features(n_gen, ccfg.hidden_dim);
  std::vector<int> gen_labels(n_gen);
  int hits = 0;
  for (int i = 0; i < n_gen; ++i) {
    gen_labels[i] = grng.uniform_int(ds.action_count());
    const nn::Matrix frames = vae::generate_net_frames(trainer.model(), gen_labels[i],
                                                       gen_length, ds.skeleton, grng);
    gen_features.row(i) = eval::extract_features(crep.classifier, frames).transpose();
    if (eval::classify(crep.classifier, frames) == gen_labels[i]) ++hits;
  }
  const double gen_accuracy = static_cast<double>(hits) / n_gen;

  // (b) conditioning signal: shuffling generated labels must hurt the
  // label-conditional FID against the real test split.
  Eigen::MatrixXd test_features(ds.test.size(), ccfg.hidden_dim);
  std::vector<int> test_labels(ds.test.size());
  for (size_t i = 0; i < ds.test.size(); ++i) {
    test_features.row(i) =
        eval::extract_features(crep.classifier, ds.test[i].net_frames).transpose();
    test_labels[i] = ds.test[i].action_id;
  }
  const double fid_matched = eval::per_class_fid(gen_features, gen_labels, test_features,
                                                 test_labels, ds.action_count());
  std::vector<int> shuffled = gen_labels;
  nn::RandomStream shuffle_rng(10);
  shuffle_rng.shuffle(shuffled);
  const double fid_shuffled = eval::per_class_fid(gen_features, shuffled, test_features,
                                                  test_labels, ds.action_count());

  // (c) multimodality of generated motions over the 20-repetition protocol.
  eval::EvalConfig ecfg;
  ecfg.n_samples = 300;
  ecfg.s_diversity = 50;
  ecfg.s_multimodality = 10;
  ecfg.repetitions = 20;
  ecfg.generation_length = gen_length;
  nn::RandomStream erng(11);
  const eval::EvalReport report =
      eval::evaluate_model(trainer.model(), ds, crep.classifier, ecfg, erng);
  const eval::MetricRow& mm = report.row("multimodality");
  const bool mm_ok = mm.value - mm.ci_half > 0.0;

  std::ostringstream os;
  os << "train " << static_cast<int>(train_time) << "s, classifier "
     << crep.heldout_accuracy << ", gen accuracy " << gen_accuracy << ", class FID "
     << fid_matched << " vs shuffled " << fid_shuffled << ", multimodality " << mm.value
     << " +- " << mm.ci_half;
  detail = os.str();
  return gen_accuracy >= 0.80 && fid_matched < fid_shuffled && mm_ok;
}

// Criterion 7: metric implementations against independent oracles.
bool metric_oracles(std::string& detail) {
  // Closed-form 1-D cases.
  eval::GaussianStats a, b;
  a.mean = Eigen::VectorXd::Zero(1);
  a.cov = Eigen::MatrixXd::Ones(1, 1);
  b.mean = Eigen::VectorXd::Ones(1);
  b.cov = Eigen::MatrixXd::Ones(1, 1);
  if (std::abs(eval::fid(a, b) - 1.0) > 1e-10) {
    detail = "1-D mean-shift case failed";
    return false;
  }
  b.mean = Eigen::VectorXd::Zero(1);
  b.cov = 4.0 * Eigen::MatrixXd::Ones(1, 1);
  if (std::abs(eval::fid(a, b) - 1.0) > 1e-10) {
    detail = "1-D variance case failed";
    return false;
  }

  // Matrix square root against a Denman-Beavers iteration.
  nn::RandomStream rng(111);
  auto random_spd = [&](int dim) {
    Eigen::MatrixXd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) m(r, c) = rng.normal();
    }
    return Eigen::MatrixXd(m * m.transpose() + 0.1 * Eigen::MatrixXd::Identity(dim, dim));
  };
  double worst_fid = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    eval::GaussianStats sa,
        sb;
    sa.mean = Eigen::VectorXd::Random(4);
    sb.mean = Eigen::VectorXd::Random(4);
    sa.cov = random_spd(4);
    sb.cov = random_spd(4);
    Eigen::MatrixXd y = sa.cov * sb.cov;
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(4, 4);
    for (int i = 0; i < 60; ++i) {
      const Eigen::MatrixXd yn = 0.5 * (y + z.inverse());
      const Eigen::MatrixXd zn = 0.5 * (z + y.inverse());
      y = yn;
      z = zn;
    }
    const double oracle = (sa.mean - sb.mean).squaredNorm() + sa.cov.trace() +
                          sb.cov.trace() - 2.0 * y.trace();
    worst_fid = std::max(worst_fid, std::abs(eval::fid(sa, sb) - oracle));
  }
  if (worst_fid > 1e-8) {
    detail = "matrix sqrt disagrees with the iterative oracle by " + std::to_string(worst_fid);
    return false;
  }

  // Diversity: exhaustive expectation on a two-point set is d/2.
  Eigen::MatrixXd two(2, 2);
  two << 0, 0, 3, 4;
  nn::RandomStream drng(112);
  const int runs = 4000;
  double mean = 0.0;
  std::vector<double> vals(runs);
  for (int i = 0; i < runs; ++i) {
    vals[i] = eval::diversity(two, 2, drng);
    mean += vals[i];
  }
  mean /= runs;
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= runs - 1;
  if (std::abs(mean - 2.5) > 3.0 * std::sqrt(var / runs) + 1e-9) {
    detail = "diversity expectation off: " + std::to_string(mean);
    return false;
  }

  // Multimodality: exhaustive expectation on a three-point class.
  Eigen::MatrixXd three(3, 2);
  three << 0, 0, 1, 0, 0, 2;
  const double expected =
      2.0 * (1.0 + 2.0 + std::sqrt(5.0)) / 9.0;
  std::vector<int> labels{0, 0, 0};
  mean = 0.0;
  for (int i = 0; i < runs; ++i) {
    vals[i] = eval::multimodality(three, labels, 1, 2, drng);
    mean += vals[i];
  }
  mean /= runs;
  var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= runs - 1;
  if (std::abs(mean - expected) > 3.0 * std::sqrt(var / runs) + 1e-9) {
    detail = "multimodality expectation off: " + std::to_string(mean);
    return false;
  }
  detail = "fid sqrt max err " + std::to_string(worst_fid);
  return true;
}

// Criterion 8: byte-identical CLI reruns for every command.
bool cli_determinism(std::string& detail) {
  const std::string bin = MOTIONGEN_BIN;
  const fs::path root = fs::temp_directory_path() / "motiongen_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);

  auto sh = [&](const std::string& args) {
    const std::string cmd = bin + " " + args + " > /dev/null 2>&1";
    return (std::system(cmd.c_str()) >> 8) & 0xff;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  auto tree = [&](const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    }
    return out;
  };

  {
    std::ofstream cfg(root / "cfg.txt");
    cfg << "trainconfig 1\nseed 5\nhidden_dim 12\nlatent_dim 4\nencoder_out 12\n"
        << "lambda_kl 0.1\nteacher_forcing 0.6\nsequence_length 16\nlearning_rate 0.001\n"
        << "batch_size 2\nsteps 8\ncheckpoint_every 4\nlog_every 4\n";
  }

  std::vector<std::pair<std::string, std::string>> checks;
  for (const char* tag : {"a", "b"}) {
    const fs::path d = root / tag;
    if (sh("synth --out " + (d / "ds").string() + " --seed 3 --n-per-action 4") != 0) {
      detail = "synth failed";
      return false;
    }
    if (sh("train --config " + (root / "cfg.txt").string() + " --manifest " +
           (d / "ds" / "manifest.txt").string() + " --out " + (d / "run").string()) != 0) {
      detail = "train failed";
      return false;
    }
    if (sh("generate --checkpoint " + (d / "run" / "model.ckpt").string() +
           " --action reach --count 2 --length 8 --seed 5 --out " +
           (d / "gen").string()) != 0) {
      detail = "generate failed";
      return false;
    }
    if (sh("evaluate --checkpoint " + (d / "run" / "model.ckpt").string() +
           " --manifest " + (d / "ds" / "manifest.txt").string() +
           " --seed 5 --repetitions 2 --samples 8 --sd 3 --sl 2 --out " +
           (d / "eval" / "report.txt").string()) != 0) {
      detail = "evaluate failed";
      return false;
    }
    if (sh("convert --input " + (d / "gen" / "reach_000.txt").string() +
           " --direction joints2lie --out " + (d / "conv" / "r.lie.txt").string()) != 0) {
      detail = "convert failed";
      return false;
    }
    if (sh("render --input " + (d / "gen" / "reach_000.txt").string() +
           " --every 3 --out " + (d / "render" / "r.svg").string()) != 0) {
      detail = "render failed";
      return false;
    }
  }
  for (const char* sub : {"ds", "run", "gen", "eval", "conv", "render"}) {
    if (tree(root / "a" / sub) != tree(root / "b" / sub)) {
      detail = std::string("outputs differ under ") + sub;
      return false;
    }
  }
  detail = "six commands, two runs each, byte-identical";
  return true;
}

}  // namespace

int main() {
  Harness h;
  h.run(1, "lie exp/log round trip", 5.0, lie_round_trip);
  h.run(2, "fk structural guarantees", 5.0, fk_structure);
  h.run(3, "ik/fk round trip on synthetic motions", 30.0, ik_fk_round_trip);
  h.run(4, "gradient correctness of the full objective", 60.0, gradient_correctness);
  h.run(5, "overfit capability", 120.0, overfit_capability);
  h.run(6, "end-to-end desk run", 780.0, desk_run);
  h.run(7, "metric oracles", 30.0, metric_oracles);
  h.run(8, "cli determinism", 120.0, cli_determinism);
  if (h.failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", h.failures);
  return 1;
}
