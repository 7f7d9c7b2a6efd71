#include "sublm/speechlm/model.hpp"

#include "sublm/error.hpp"

namespace sublm::speechlm {

Variant parse_variant(const std::string& name) {
  if (name == "synthesis_only") return Variant::synthesis_only;
  if (name == "mtl_panphon") return Variant::mtl_panphon;
  if (name == "aux_textlm") return Variant::aux_textlm;
  if (name == "top_line") return Variant::top_line;
  throw ValidationError("unknown variant '" + name +
                        "' (expected synthesis_only, mtl_panphon, aux_textlm or top_line)");
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::synthesis_only: return "synthesis_only";
    case Variant::mtl_panphon: return "mtl_panphon";
    case Variant::aux_textlm: return "aux_textlm";
    case Variant::top_line: return "top_line";
  }
  return "?";
}

void SpeechLmConfig::validate() const {
  if (mel_bins == 0 || hidden == 0 || n_ctx == 0)
    throw ValidationError("speechlm config: mel_bins, hidden and n_ctx must be positive");
  if (artic_dim == 0 || text_dim == 0)
    throw ValidationError("speechlm config: artic_dim and text_dim must be positive");
  if (max_len_frames == 0) throw ValidationError("speechlm config: max_len_frames must be positive");
  if (lambda_mtl < 0.0 || lambda_len < 0.0)
    throw ValidationError("speechlm config: loss weights must be nonnegative");
}

} // namespace sublm::speechlm
