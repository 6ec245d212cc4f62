#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "motiongen/common.hpp"
#include "motiongen/data/manifest.hpp"
#include "motiongen/data/preprocess.hpp"
#include "motiongen/data/resample.hpp"
#include "motiongen/data/skeleton_file.hpp"
#include "motiongen/data/synthesize.hpp"
#include "motiongen/eval/evaluate.hpp"
#include "motiongen/render/svg_strip.hpp"
#include "motiongen/vae/checkpoint.hpp"
#include "motiongen/vae/generate.hpp"
#include "motiongen/vae/training.hpp"

namespace fs = std::filesystem;
using namespace motiongen;

namespace {

// Exit codes: 0 success, 1 validation, 2 runtime/divergence, 3 I/O.
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitIo = 3;

std::string resolve_out(std::string value, const std::string& command) {
  if (!value.empty()) return value;
  if (const char* root = std::getenv("MOTIONGEN_OUT")) {
    return (fs::path(root) / command).string();
  }
  throw ValidationError("--out is required (or set MOTIONGEN_OUT)");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "'");
}

std::vector<double> parse_scale_list(const std::string& text) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(parse_double(item, "--bone-scale"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ValidationError("--bone-scale needs at least one factor");
  return out;
}

lie::Skeleton skeleton_for(const std::string& path) {
  return path.empty() ? data::default_skeleton() : data::load_skeleton(path);
}

int cmd_synth(const std::string& out_opt, uint64_t seed, int n_per_action,
              const std::string& spec_file, const std::string& skeleton_file) {
  if (n_per_action < 1) throw ValidationError("--n-per-action must be at least 1");
  const std::string out_dir = resolve_out(out_opt, "synth");
  const lie::Skeleton skeleton = skeleton_for(skeleton_file);
  const std::vector<data::SyntheticActionSpec> specs =
      spec_file.empty() ? data::default_action_specs(skeleton)
                        : data::load_action_specs(spec_file, skeleton);

  const std::string config_text = "synth\nseed " + std::to_string(seed) +
                                  "\nn_per_action " + std::to_string(n_per_action) +
                                  "\n" + data::skeleton_to_text(skeleton) +
                                  data::action_specs_text(specs);
  const std::string config_hash = hex64(fnv1a(config_text));

  nn::RandomStream rng(seed);
  data::LoadedDataset ds = data::synthesize_dataset(specs, n_per_action, skeleton, rng);
  ds.manifest.extra.emplace_back("seed", std::to_string(seed));
  ds.manifest.extra.emplace_back("config_hash", config_hash);
  for (auto& rec : ds.records) {
    rec.extra.emplace_back("seed", std::to_string(seed));
    rec.extra.emplace_back("config_hash", config_hash);
  }
  ensure_dir(out_dir);
  const std::string manifest_path = data::save_dataset(out_dir, ds);

  std::cout << "wrote " << ds.records.size() << " motions to " << out_dir << "\n";
  for (size_t a = 0; a < ds.manifest.action_names.size(); ++a) {
    int count = 0, frames_min = 1 << 30, frames_max = 0;
    for (size_t i = 0; i < ds.records.size(); ++i) {
      if (ds.manifest.entries[i].action_id != static_cast<int>(a)) continue;
      ++count;
      frames_min = std::min(frames_min, ds.records[i].frame_count());
      frames_max = std::max(frames_max, ds.records[i].frame_count());
    }
    std::cout << "  " << ds.manifest.action_names[a] << ": " << count << " motions, "
              << frames_min << "-" << frames_max << " frames\n";
  }
  std::cout << "manifest: " << manifest_path << "\n";
  std::cout << "seed " << seed << " config_hash " << config_hash << "\n";
  return 0;
}

std::string checkpoint_name(long step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "checkpoint_%06ld.ckpt", step);
  return buf;
}

int cmd_train(const std::string& config_file, const std::string& manifest,
              const std::string& out_opt, const std::string& resume) {
  const std::string out_dir = resolve_out(out_opt, "train");
  vae::TrainConfig tc = vae::load_train_config(config_file);
  tc.validate();
  const std::string config_hash = hex64(fnv1a(vae::train_config_text(tc)));

  const data::LoadedDataset raw = data::load_dataset(manifest);
  const data::PreparedDataset prepared = data::preprocess(raw);

  vae::Trainer trainer(tc, prepared);
  if (!resume.empty()) {
    vae::VaeCheckpoint ckpt = vae::load_vae_checkpoint(resume);
    if (ckpt.config_hash != config_hash) {
      throw ValidationError("--resume checkpoint was trained with a different config");
    }
    if (!ckpt.optimizer.has_value()) {
      throw ValidationError("--resume checkpoint carries no optimizer state");
    }
    trainer.restore(ckpt.model, *ckpt.optimizer, ckpt.step, ckpt.rng_state);
  }

  ensure_dir(out_dir);
  std::ofstream log(fs::path(out_dir) / "train_log.txt", std::ios::binary);
  if (!log) throw IoError("cannot open the training log for writing");
  log << "trainlog 1\n";
  log << "seed " << tc.seed << "\n";
  log << "config_hash " << config_hash << "\n";
  log << "lambda_kl " << format_double(tc.model.lambda_kl) << "\n";
  log << "teacher_forcing " << format_double(tc.model.teacher_forcing_rate) << "\n";
  log << "learning_rate " << format_double(tc.learning_rate) << "\n";
  log << "start_step " << trainer.current_step() << "\n";
  log << "# step loss recon_per_frame kl_per_frame\n";

  auto save = [&](const std::string& name) {
    vae::save_vae_checkpoint((fs::path(out_dir) / name).string(), trainer.model(),
                             prepared.action_names, *prepared.skeleton, tc,
                             trainer.current_step(), trainer.rng().save_state(),
                             &trainer.optimizer(), config_hash);
  };

  while (trainer.current_step() < tc.steps) {
    const vae::TrainStats stats = trainer.step();
    if (stats.step % tc.log_every == 0 || stats.step == tc.steps || stats.step == 1) {
      log << stats.step << " " << format_double(stats.loss) << " "
          << format_double(stats.recon_per_frame) << " "
          << format_double(stats.kl_per_frame) << "\n";
      std::cout << "step " << stats.step << " loss " << stats.loss << " recon/frame "
                << stats.recon_per_frame << " kl/frame " << stats.kl_per_frame << "\n";
    }
    if (stats.step % tc.checkpoint_every == 0 && stats.step < tc.steps) {
      save(checkpoint_name(stats.step));
    }
  }
  save("model.ckpt");
  log << "final_step " << trainer.current_step() << "\n";
  std::cout << "final checkpoint: " << (fs::path(out_dir) / "model.ckpt").string() << "\n";
  return 0;
}

int cmd_generate(const std::string& checkpoint, const std::string& action, int count,
                 int length, uint64_t seed, const std::string& out_opt,
                 const std::string& bone_scale) {
  if (count < 1) throw ValidationError("--count must be at least 1");
  const std::string out_dir = resolve_out(out_opt, "generate");
  vae::VaeCheckpoint ckpt = vae::load_vae_checkpoint(checkpoint);

  int action_id = -1;
  for (size_t i = 0; i < ckpt.action_names.size(); ++i) {
    if (ckpt.action_names[i] == action) action_id = static_cast<int>(i);
  }
  if (action_id < 0) {
    std::string vocab;
    for (const auto& name : ckpt.action_names) vocab += " " + name;
    throw ValidationError("unknown action '" + action + "'; known actions:" + vocab);
  }
  if (length <= 0) length = ckpt.train_config.model.sequence_length;

  // Generation always runs on the training skeleton so the sampled Lie
  // parameters do not depend on the export scaling; modified bone
  // lengths enter only through the final forward kinematics.
  lie::Skeleton export_skeleton = ckpt.skeleton;
  if (!bone_scale.empty()) {
    export_skeleton = lie::scale_skeleton(ckpt.skeleton, parse_scale_list(bone_scale));
  }

  const std::string config_text = "generate\naction " + action + "\ncount " +
                                  std::to_string(count) + "\nlength " +
                                  std::to_string(length) + "\nseed " +
                                  std::to_string(seed) + "\nbone_scale " + bone_scale +
                                  "\ncheckpoint_hash " + ckpt.config_hash + "\n";
  const std::string config_hash = hex64(fnv1a(config_text));

  ensure_dir(out_dir);
  nn::RandomStream rng(seed);
  for (int i = 0; i < count; ++i) {
    vae::GeneratedMotion motion =
        vae::generate(ckpt.model, action_id, action, length, ckpt.skeleton, rng);
    if (!bone_scale.empty()) {
      // Re-run FK on the scaled skeleton from the same Lie parameters.
      Eigen::VectorXd positions;
      for (int t = 0; t < length; ++t) {
        lie::forward_kinematics_flat(
            motion.lie.frames.row(t).segment(3, motion.lie.frames.cols() - 3).transpose(),
            motion.lie.frames.row(t).segment(0, 3).transpose(), export_skeleton,
            positions);
        motion.joints.frames.row(t) = positions.transpose();
      }
      motion.joints.skeleton_name = export_skeleton.name();
    }
    char idx[16];
    std::snprintf(idx, sizeof(idx), "%03d", i);
    const std::string base = action + "_" + idx;
    motion.joints.extra.emplace_back("seed", std::to_string(seed));
    motion.joints.extra.emplace_back("config_hash", config_hash);
    motion.joints.extra.emplace_back("sample", std::to_string(i));
    motion.lie.extra = motion.joints.extra;
    data::save_motion((fs::path(out_dir) / (base + ".txt")).string(), motion.joints);
    data::save_lie_motion((fs::path(out_dir) / (base + ".lie.txt")).string(), motion.lie);
  }
  std::cout << "wrote " << count << " motions of " << length << " frames to " << out_dir
            << "\n";
  std::cout << "seed " << seed << " config_hash " << config_hash << "\n";
  return 0;
}

int cmd_evaluate(const std::string& checkpoint, const std::string& manifest,
                 const std::string& classifier_path, uint64_t seed,
                 const std::string& out_opt, int repetitions, int samples, int s_d,
                 int s_l, int length, const std::string& classifier_out) {
  const std::string out_path = resolve_out(out_opt, "evaluate/report.txt");
  vae::VaeCheckpoint ckpt = vae::load_vae_checkpoint(checkpoint);
  const data::LoadedDataset raw = data::load_dataset(manifest);
  const data::PreparedDataset prepared = data::preprocess(raw);
  if (prepared.action_names != ckpt.action_names) {
    throw ValidationError("manifest action vocabulary does not match the checkpoint");
  }

  nn::RandomStream rng(seed);
  eval::MotionClassifier classifier;
  if (!classifier_path.empty()) {
    classifier = eval::load_classifier(classifier_path).classifier;
  } else {
    eval::ClassifierConfig ccfg;
    eval::ClassifierReport report = eval::train_classifier(prepared, ccfg, rng);
    classifier = report.classifier;
    std::cout << "trained classifier, held-out accuracy " << report.heldout_accuracy
              << "\n";
    const std::string save_to =
        classifier_out.empty() ? out_path + ".classifier.ckpt" : classifier_out;
    if (fs::path(save_to).has_parent_path()) ensure_dir(fs::path(save_to).parent_path().string());
    eval::save_classifier(save_to, classifier, prepared.normalizer, seed);
  }

  eval::EvalConfig ecfg;
  ecfg.repetitions = repetitions;
  ecfg.n_samples = samples;
  ecfg.s_diversity = s_d;
  ecfg.s_multimodality = s_l;
  ecfg.generation_length = length;

  const std::string config_text =
      "evaluate\nseed " + std::to_string(seed) + "\nrepetitions " +
      std::to_string(repetitions) + "\nsamples " + std::to_string(samples) + "\nsd " +
      std::to_string(s_d) + "\nsl " + std::to_string(s_l) + "\nlength " +
      std::to_string(length) + "\ncheckpoint_hash " + ckpt.config_hash + "\n";

  eval::EvalReport report = eval::evaluate_model(ckpt.model, prepared, classifier, ecfg, rng);
  report.seed = seed;
  report.config_hash = hex64(fnv1a(config_text));
  if (fs::path(out_path).has_parent_path()) ensure_dir(fs::path(out_path).parent_path().string());
  eval::save_report(out_path, report);
  std::cout << eval::report_to_text(report);
  std::cout << "report: " << out_path << "\n";
  return 0;
}

int cmd_convert(const std::string& input, const std::string& direction,
                const std::string& skeleton_file, const std::string& out_opt) {
  const std::string out_path = resolve_out(out_opt, "convert/out.txt");
  const lie::Skeleton skeleton = skeleton_for(skeleton_file);
  if (fs::path(out_path).has_parent_path()) ensure_dir(fs::path(out_path).parent_path().string());

  if (direction == "joints2lie") {
    const data::MotionRecord motion = data::load_motion(input);
    if (motion.joint_count != skeleton.joint_count()) {
      throw ValidationError("motion has " + std::to_string(motion.joint_count) +
                            " joints but the skeleton has " +
                            std::to_string(skeleton.joint_count()));
    }
    data::LieMotionRecord lie_rec;
    lie_rec.action_label = motion.action_label;
    lie_rec.skeleton_name = motion.skeleton_name;
    lie_rec.fps = motion.fps;
    lie_rec.bone_count = skeleton.bone_count();
    lie_rec.frames.resize(motion.frame_count(), 3 + 3 * skeleton.bone_count());
    lie_rec.extra = motion.extra;
    for (int t = 0; t < motion.frame_count(); ++t) {
      const lie::JointPose pose =
          lie::JointPose::from_flat(motion.frames.row(t).transpose());
      const lie::LiePose lp = lie::inverse_kinematics(pose, skeleton);
      lie_rec.frames.row(t).segment(0, 3) = lp.root_translation.transpose();
      lie_rec.frames.row(t).segment(3, 3 * skeleton.bone_count()) =
          lp.omega_flat().transpose();
    }
    data::save_lie_motion(out_path, lie_rec);
  } else if (direction == "lie2joints") {
    const data::LieMotionRecord lie_rec = data::load_lie_motion(input);
    if (lie_rec.bone_count != skeleton.bone_count()) {
      throw ValidationError("motion has " + std::to_string(lie_rec.bone_count) +
                            " bones but the skeleton has " +
                            std::to_string(skeleton.bone_count()));
    }
    data::MotionRecord motion;
    motion.action_label = lie_rec.action_label;
    motion.skeleton_name = lie_rec.skeleton_name;
    motion.fps = lie_rec.fps;
    motion.joint_count = skeleton.joint_count();
    motion.frames.resize(lie_rec.frame_count(), 3 * skeleton.joint_count());
    motion.extra = lie_rec.extra;
    Eigen::VectorXd positions;
    for (int t = 0; t < lie_rec.frame_count(); ++t) {
      lie::forward_kinematics_flat(
          lie_rec.frames.row(t).segment(3, 3 * skeleton.bone_count()).transpose(),
          lie_rec.frames.row(t).segment(0, 3).transpose(), skeleton, positions);
      motion.frames.row(t) = positions.transpose();
    }
    data::save_motion(out_path, motion);
  } else {
    throw ValidationError("--direction must be joints2lie or lie2joints");
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_render(const std::string& input, const std::string& skeleton_file,
               const std::string& out_opt, int every) {
  const std::string out_path = resolve_out(out_opt, "render/strip.svg");
  const data::MotionRecord motion = data::load_motion(input);
  const lie::Skeleton skeleton = skeleton_for(skeleton_file);
  if (fs::path(out_path).has_parent_path()) ensure_dir(fs::path(out_path).parent_path().string());
  render::save_svg_strip(out_path, motion, skeleton, every);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Action-conditioned 3D human motion generation"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Synthesize a labeled motion dataset");
  std::string synth_out, synth_specs, synth_skeleton;
  uint64_t synth_seed = 7;
  int synth_n = 50;
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_option("--seed", synth_seed, "Master seed");
  synth->add_option("--n-per-action", synth_n, "Motions per action");
  synth->add_option("--spec-file", synth_specs, "Action spec file (default: built-in catalog)");
  synth->add_option("--skeleton", synth_skeleton, "Skeleton file (default: built-in)");

  // train
  auto* train = app.add_subcommand("train", "Train the motion model");
  std::string train_config, train_manifest, train_out, train_resume;
  train->add_option("--config", train_config, "Training config file")->required();
  train->add_option("--manifest", train_manifest, "Dataset manifest")->required();
  train->add_option("--out", train_out, "Output directory");
  train->add_option("--resume", train_resume, "Checkpoint to resume from");

  // generate
  auto* generate = app.add_subcommand("generate", "Sample motions from a checkpoint");
  std::string gen_ckpt, gen_action, gen_out, gen_scale;
  int gen_count = 5, gen_length = 0;
  uint64_t gen_seed = 7;
  generate->add_option("--checkpoint", gen_ckpt, "Model checkpoint")->required();
  generate->add_option("--action", gen_action, "Action name")->required();
  generate->add_option("--count", gen_count, "Number of motions");
  generate->add_option("--length", gen_length, "Frames per motion (default: model setting)");
  generate->add_option("--seed", gen_seed, "Master seed");
  generate->add_option("--out", gen_out, "Output directory");
  generate->add_option("--bone-scale", gen_scale,
                       "Uniform factor or comma-separated per-bone factors");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Compute the metric suite");
  std::string eval_ckpt, eval_manifest, eval_classifier, eval_out, eval_classifier_out;
  uint64_t eval_seed = 7;
  int eval_reps = 20, eval_samples = 300, eval_sd = 50, eval_sl = 10, eval_length = 0;
  evaluate->add_option("--checkpoint", eval_ckpt, "Model checkpoint")->required();
  evaluate->add_option("--manifest", eval_manifest, "Dataset manifest")->required();
  evaluate->add_option("--classifier", eval_classifier,
                       "Classifier checkpoint (default: train one)");
  evaluate->add_option("--classifier-out", eval_classifier_out,
                       "Where to save a freshly trained classifier");
  evaluate->add_option("--seed", eval_seed, "Master seed");
  evaluate->add_option("--out", eval_out, "Report file");
  evaluate->add_option("--repetitions", eval_reps, "Evaluation repetitions");
  evaluate->add_option("--samples", eval_samples, "Motions per repetition");
  evaluate->add_option("--sd", eval_sd, "Diversity subset size");
  evaluate->add_option("--sl", eval_sl, "Multimodality subset size");
  evaluate->add_option("--length", eval_length, "Generated length (default: test mean)");

  // convert
  auto* convert = app.add_subcommand("convert", "Convert between joint and Lie files");
  std::string conv_in, conv_dir, conv_skeleton, conv_out;
  convert->add_option("--input", conv_in, "Input motion file")->required();
  convert->add_option("--direction", conv_dir, "joints2lie or lie2joints")->required();
  convert->add_option("--skeleton", conv_skeleton, "Skeleton file (default: built-in)");
  convert->add_option("--out", conv_out, "Output file");

  // render
  auto* render_cmd = app.add_subcommand("render", "Render a motion to an SVG strip");
  std::string render_in, render_skeleton, render_out;
  int render_every = 10;
  render_cmd->add_option("--input", render_in, "Input motion file")->required();
  render_cmd->add_option("--skeleton", render_skeleton, "Skeleton file (default: built-in)");
  render_cmd->add_option("--out", render_out, "Output SVG file");
  render_cmd->add_option("--every", render_every, "Render every n-th frame");

  try {
    app.parse(argc, argv);
    if (synth->parsed()) {
      return cmd_synth(synth_out, synth_seed, synth_n, synth_specs, synth_skeleton);
    }
    if (train->parsed()) {
      return cmd_train(train_config, train_manifest, train_out, train_resume);
    }
    if (generate->parsed()) {
      return cmd_generate(gen_ckpt, gen_action, gen_count, gen_length, gen_seed, gen_out,
                          gen_scale);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_ckpt, eval_manifest, eval_classifier, eval_seed, eval_out,
                          eval_reps, eval_samples, eval_sd, eval_sl, eval_length,
                          eval_classifier_out);
    }
    if (convert->parsed()) {
      return cmd_convert(conv_in, conv_dir, conv_skeleton, conv_out);
    }
    if (render_cmd->parsed()) {
      return cmd_render(render_in, render_skeleton, render_out, render_every);
    }
    return kExitValidation;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const TrainingDiverged& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
