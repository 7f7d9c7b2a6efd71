// sublm: sub-word speech language model pipeline.
// synth-corpus -> preprocess -> train-textlm / train -> babble / eval / probe

#include <CLI11.hpp>
#include <iostream>

#include "sublm/cli/commands.hpp"
#include "sublm/cli/config.hpp"
#include "sublm/error.hpp"

namespace {

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> overrides;
};

sublm::cli::Config make_config(const CommonArgs& args) {
  auto cfg = args.config_file.empty() ? sublm::cli::Config::defaults()
                                      : sublm::cli::Config::from_file(args.config_file);
  for (const auto& kv : args.overrides) cfg.apply_override(kv);
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_file, "key=value config file");
  cmd->add_option("--set", args.overrides, "override a config key (key=value, repeatable)");
}

// convenience flags map onto config keys
void add_key_flag(CLI::App* cmd, CommonArgs& args, const std::string& flag,
                  const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&args, key](const std::string& v) { args.overrides.push_back(key + "=" + v); }, help);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-word generative speech language model pipeline"};
  app.require_subcommand(1);

  CommonArgs synth_args, pre_args, train_args, textlm_args, babble_args, eval_args, probe_args,
      grad_args;
  bool force = false;

  auto* synth = app.add_subcommand("synth-corpus", "generate the synthetic formant corpus");
  add_common(synth, synth_args);
  add_key_flag(synth, synth_args, "--seed", "seed", "corpus seed");
  add_key_flag(synth, synth_args, "--n-utts", "corpus.n_utts", "number of utterances");
  add_key_flag(synth, synth_args, "--out", "paths.corpus_dir", "corpus output directory");
  add_key_flag(synth, synth_args, "--jobs", "jobs", "worker threads");
  synth->add_flag("--force", force, "overwrite an existing corpus directory");

  auto* pre = app.add_subcommand("preprocess", "slice melspectrograms into filtered units");
  add_common(pre, pre_args);
  add_key_flag(pre, pre_args, "--corpus", "paths.corpus_dir", "corpus directory");
  add_key_flag(pre, pre_args, "--cache", "paths.cache_dir", "unit cache output directory");
  add_key_flag(pre, pre_args, "--kind", "corpus.kind", "unit kind: syllable or phoneme");
  add_key_flag(pre, pre_args, "--stop-words", "paths.stop_words", "stop-word lexicon file");
  add_key_flag(pre, pre_args, "--jobs", "jobs", "worker threads");

  auto* train = app.add_subcommand("train", "train a speech LM variant");
  add_common(train, train_args);
  add_key_flag(train, train_args, "--cache", "paths.cache_dir", "unit cache directory");
  add_key_flag(train, train_args, "--out", "paths.out_dir", "run output directory");
  add_key_flag(train, train_args, "--variant", "model.variant",
               "synthesis_only | mtl_panphon | aux_textlm | top_line");
  add_key_flag(train, train_args, "--steps", "train.steps", "total optimizer steps");
  add_key_flag(train, train_args, "--epochs", "train.epochs", "training epochs");
  add_key_flag(train, train_args, "--batch", "train.batch", "batch size");
  add_key_flag(train, train_args, "--lr", "train.lr", "learning rate");
  add_key_flag(train, train_args, "--seed", "seed", "training seed");
  add_key_flag(train, train_args, "--textlm", "paths.textlm", "frozen text LM checkpoint");
  add_key_flag(train, train_args, "--vocab", "paths.vocab", "text LM vocab file");

  auto* textlm = app.add_subcommand("train-textlm", "train the sub-word text LM");
  add_common(textlm, textlm_args);
  add_key_flag(textlm, textlm_args, "--cache", "paths.cache_dir", "unit cache directory");
  add_key_flag(textlm, textlm_args, "--tokens", "paths.tokens", "token stream file");
  add_key_flag(textlm, textlm_args, "--out", "paths.out_dir", "run output directory");
  add_key_flag(textlm, textlm_args, "--epochs", "textlm.epochs", "training epochs");
  add_key_flag(textlm, textlm_args, "--init", "textlm.init", "embedding init: cbow or random");
  add_key_flag(textlm, textlm_args, "--embed-dim", "textlm.embed_dim", "embedding size");
  add_key_flag(textlm, textlm_args, "--seed", "seed", "training seed");

  auto* babble = app.add_subcommand("babble", "generate babbling speech from a checkpoint");
  add_common(babble, babble_args);
  add_key_flag(babble, babble_args, "--checkpoint", "paths.checkpoint", "trained model");
  add_key_flag(babble, babble_args, "--cache", "paths.cache_dir", "unit cache directory");
  add_key_flag(babble, babble_args, "--out", "paths.out_dir", "output directory");
  add_key_flag(babble, babble_args, "--n-units", "babble.n_units", "units to generate");
  add_key_flag(babble, babble_args, "--seed", "seed", "generation seed");
  add_key_flag(babble, babble_args, "--textlm", "paths.textlm", "frozen text LM checkpoint");
  add_key_flag(babble, babble_args, "--vocab", "paths.vocab", "text LM vocab file");

  auto* eval = app.add_subcommand("eval", "metric report over trained checkpoints");
  add_common(eval, eval_args);
  add_key_flag(eval, eval_args, "--checkpoints", "paths.checkpoints",
               "comma-separated checkpoint list");
  add_key_flag(eval, eval_args, "--cache", "paths.cache_dir", "unit cache directory");
  add_key_flag(eval, eval_args, "--out", "paths.out_dir", "output directory");
  add_key_flag(eval, eval_args, "--seed", "seed", "evaluation seed");
  add_key_flag(eval, eval_args, "--textlm", "paths.textlm", "frozen text LM checkpoint");
  add_key_flag(eval, eval_args, "--vocab", "paths.vocab", "text LM vocab file");

  auto* probe = app.add_subcommand("probe", "post-hoc vowel classifier on a feature source");
  add_common(probe, probe_args);
  add_key_flag(probe, probe_args, "--cache", "paths.cache_dir", "unit cache directory");
  add_key_flag(probe, probe_args, "--out", "paths.out_dir", "output directory");
  add_key_flag(probe, probe_args, "--source", "probe.source", "latents or panphon");
  add_key_flag(probe, probe_args, "--checkpoint", "paths.checkpoint",
               "trained model (latents source; omit for an untrained model)");
  add_key_flag(probe, probe_args, "--seed", "seed", "probe seed");

  auto* grad = app.add_subcommand("gradcheck", "finite-difference gradient check of a variant");
  add_common(grad, grad_args);
  add_key_flag(grad, grad_args, "--variant", "model.variant", "model variant to check");
  add_key_flag(grad, grad_args, "--seed", "seed", "check seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      sublm::cli::cmd_synth_corpus(make_config(synth_args), force);
    } else if (pre->parsed()) {
      sublm::cli::cmd_preprocess(make_config(pre_args));
    } else if (train->parsed()) {
      sublm::cli::cmd_train(make_config(train_args));
    } else if (textlm->parsed()) {
      sublm::cli::cmd_train_textlm(make_config(textlm_args));
    } else if (babble->parsed()) {
      sublm::cli::cmd_babble(make_config(babble_args));
    } else if (eval->parsed()) {
      sublm::cli::cmd_eval(make_config(eval_args));
    } else if (probe->parsed()) {
      sublm::cli::cmd_probe(make_config(probe_args));
    } else if (grad->parsed()) {
      const auto result = sublm::cli::cmd_gradcheck(make_config(grad_args));
      if (!result.passed(1e-4)) {
        std::cerr << "gradcheck failed: max rel err " << result.max_rel_err << "\n";
        return 2;
      }
    }
  } catch (const sublm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
