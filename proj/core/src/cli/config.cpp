#include "sublm/cli/config.hpp"

#include <sstream>

#include "sublm/error.hpp"
#include "sublm/util/io.hpp"

namespace sublm::cli {

namespace {

const std::map<std::string, std::string>& registry() {
  static const std::map<std::string, std::string> defaults = {
      {"seed", "1"},
      {"jobs", "1"},
      {"dsp.sample_rate", "22050"},
      {"dsp.fft", "1024"},
      {"dsp.hop", "128"},
      {"dsp.mel_bins", "80"},
      {"dsp.fmin", "0"},
      {"dsp.fmax", "8000"},
      {"dsp.log_floor", "1e-05"},
      {"dsp.griffin_lim_iters", "60"},
      {"corpus.kind", "syllable"},
      {"corpus.n_ctx", "4"},
      {"corpus.n_utts", "40"},
      {"corpus.min_syllables", "2"},
      {"corpus.max_syllables", "6"},
      {"corpus.stop_words", ""},
      {"train.lr", "0.001"},
      {"train.batch", "32"},
      {"train.epochs", "50"},
      {"train.steps", "0"},
      {"train.val_fraction", "0.1"},
      {"train.clip_norm", "5"},
      {"model.variant", "synthesis_only"},
      {"model.lambda_mtl", "1.0"},
      {"model.lambda_len", "0.1"},
      {"textlm.embed_dim", "768"},
      {"textlm.epochs", "30"},
      {"textlm.bptt", "32"},
      {"textlm.batch", "16"},
      {"textlm.lr", "0.001"},
      {"textlm.min_count", "2"},
      {"textlm.init", "cbow"},
      {"cbow.window", "4"},
      {"cbow.negatives", "5"},
      {"cbow.epochs", "5"},
      {"cbow.lr", "0.025"},
      {"probe.steps", "2000"},
      {"probe.lr", "0.1"},
      {"probe.l2", "0.0001"},
      {"probe.source", "latents"},
      {"babble.n_units", "20"},
      {"eval.n_samples", "10"},
      {"eval.babble_units", "10"},
      {"paths.corpus_dir", ""},
      {"paths.cache_dir", ""},
      {"paths.out_dir", ""},
      {"paths.textlm", ""},
      {"paths.vocab", ""},
      {"paths.checkpoint", ""},
      {"paths.checkpoints", ""},
      {"paths.artic_table", ""},
      {"paths.tokens", ""},
      {"paths.stop_words", ""},
  };
  return defaults;
}

} // namespace

Config Config::defaults() {
  Config cfg;
  cfg.values_ = registry();
  return cfg;
}

Config Config::from_file(const std::filesystem::path& path) {
  Config cfg = defaults();
  size_t line_no = 0;
  for (const auto& line : util::read_lines(path)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                            ": expected key=value");
    cfg.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  if (registry().count(key) == 0) throw ValidationError("unknown config key '" + key + "'");
  values_[key] = value;
}

void Config::apply_override(const std::string& key_eq_value) {
  const auto eq = key_eq_value.find('=');
  if (eq == std::string::npos)
    throw ValidationError("override must be key=value, got '" + key_eq_value + "'");
  set(key_eq_value.substr(0, eq), key_eq_value.substr(eq + 1));
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError("unknown config key '" + key + "'");
  return it->second;
}

int Config::get_int(const std::string& key) const {
  try {
    return std::stoi(get(key));
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "' is not an integer: '" + get(key) + "'");
  }
}

size_t Config::get_size(const std::string& key) const {
  const int v = get_int(key);
  if (v < 0) throw ValidationError("config key '" + key + "' must be nonnegative");
  return static_cast<size_t>(v);
}

double Config::get_double(const std::string& key) const {
  try {
    return std::stod(get(key));
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "' is not a number: '" + get(key) + "'");
  }
}

uint64_t Config::get_u64(const std::string& key) const {
  try {
    return std::stoull(get(key));
  } catch (const std::exception&) {
    throw ValidationError("config key '" + key + "' is not an unsigned integer");
  }
}

bool Config::has_value(const std::string& key) const { return !get(key).empty(); }

std::filesystem::path Config::get_path(const std::string& key) const {
  if (!has_value(key)) throw ValidationError("config key '" + key + "' is required");
  return get(key);
}

std::string Config::render() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << '=' << v << '\n';
  return os.str();
}

dsp::DspConfig dsp_config_from(const Config& cfg) {
  dsp::DspConfig d;
  d.sample_rate = cfg.get_int("dsp.sample_rate");
  d.fft_size = cfg.get_size("dsp.fft");
  d.hop = cfg.get_size("dsp.hop");
  d.mel_bins = cfg.get_size("dsp.mel_bins");
  d.fmin = cfg.get_double("dsp.fmin");
  d.fmax = cfg.get_double("dsp.fmax");
  d.log_floor = cfg.get_double("dsp.log_floor");
  d.griffin_lim_iters = cfg.get_size("dsp.griffin_lim_iters");
  d.validate();
  return d;
}

void write_run_stamp(const std::filesystem::path& out_dir, const Config& cfg,
                     const std::vector<std::filesystem::path>& inputs) {
  std::filesystem::create_directories(out_dir);
  util::write_text_file(out_dir / "config.effective", cfg.render());
  std::ostringstream os;
  for (const auto& input : inputs)
    os << util::git_blob_hash(input) << "  " << input.string() << '\n';
  util::write_text_file(out_dir / "inputs.hash", os.str());
}

} // namespace sublm::cli
