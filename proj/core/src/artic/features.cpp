#include "sublm/artic/features.hpp"

#include <sstream>

#include "sublm/error.hpp"
#include "sublm/util/io.hpp"

namespace sublm::artic {

namespace {

// Same content as data/artic_features.csv. ARPAbet phones mapped through IPA
// onto ternary articulatory features; diphthongs carry their first element's
// vowel features plus long=+1, and er is treated as a syllabic rhotic.
constexpr const char* kBuiltinTable = R"(phone,syl,son,cons,cont,delrel,lat,nas,strid,voi,sg,cg,ant,cor,distr,lab,hi,lo,back,round,velaric,tense,long
iy,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,-1,1,-1,-1,-1,-1,1,-1
ih,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,-1,1,-1,-1,-1,-1,-1,-1
ey,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,-1,-1,-1,-1,-1,-1,1,1
eh,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,-1,-1,-1,-1,-1,-1,-1,-1
ae,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,-1,-1,1,-1,-1,-1,-1,-1
aa,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,-1,-1,1,1,-1,-1,1,-1
ah,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,-1,-1,1,1,-1,-1,-1,-1
ax,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,-1,-1,-1,1,-1,-1,-1,-1
ao,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,1,-1,-1,1,1,-1,-1,-1
ow,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,1,-1,-1,1,1,-1,1,1
oy,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,1,-1,-1,1,1,-1,-1,1
uh,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,1,1,-1,1,1,-1,-1,-1
uw,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,1,1,-1,1,1,-1,1,-1
aw,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,-1,-1,1,-1,-1,-1,-1,1
ay,1,1,-1,1,-1,-1,-1,-1,1,-1,-1,0,-1,0,-1,-1,1,1,-1,-1,-1,1
er,1,1,1,1,-1,-1,-1,-1,1,-1,-1,1,1,-1,-1,-1,-1,-1,-1,-1,0,-1
p,-1,-1,1,-1,-1,-1,-1,-1,-1,-1,-1,1,-1,-1,1,-1,-1,-1,-1,-1,0,-1
b,-1,-1,1,-1,-1,-1,-1,-1,1,-1,-1,1,-1,-1,1,-1,-1,-1,-1,-1,0,-1
t,-1,-1,1,-1,-1,-1,-1,-1,-1,-1,-1,1,1,-1,-1,-1,-1,-1,-1,-1,0,-1
d,-1,-1,1,-1,-1,-1,-1,-1,1,-1,-1,1,1,-1,-1,-1,-1,-1,-1,-1,0,-1
k,-1,-1,1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,1,-1,1,-1,-1,0,-1
g,-1,-1,1,-1,-1,-1,-1,-1,1,-1,-1,-1,-1,-1,-1,1,-1,1,-1,-1,0,-1
ch,-1,-1,1,-1,1,-1,-1,1,-1,-1,-1,-1,1,1,-1,1,-1,-1,-1,-1,0,-1
jh,-1,-1,1,-1,1,-1,-1,1,1,-1,-1,-1,1,1,-1,1,-1,-1,-1,-1,0,-1
f,-1,-1,1,1,-1,-1,-1,1,-1,-1,-1,1,-1,-1,1,-1,-1,-1,-1,-1,0,-1
v,-1,-1,1,1,-1,-1,-1,1,1,-1,-1,1,-1,-1,1,-1,-1,-1,-1,-1,0,-1
th,-1,-1,1,1,-1,-1,-1,-1,-1,-1,-1,1,1,1,-1,-1,-1,-1,-1,-1,0,-1
dh,-1,-1,1,1,-1,-1,-1,-1,1,-1,-1,1,1,1,-1,-1,-1,-1,-1,-1,0,-1
s,-1,-1,1,1,-1,-1,-1,1,-1,-1,-1,1,1,-1,-1,-1,-1,-1,-1,-1,0,-1
z,-1,-1,1,1,-1,-1,-1,1,1,-1,-1,1,1,-1,-1,-1,-1,-1,-1,-1,0,-1
sh,-1,-1,1,1,-1,-1,-1,1,-1,-1,-1,-1,1,1,-1,1,-1,-1,-1,-1,0,-1
zh,-1,-1,1,1,-1,-1,-1,1,1,-1,-1,-1,1,1,-1,1,-1,-1,-1,-1,0,-1
hh,-1,-1,-1,1,-1,-1,-1,-1,-1,1,-1,-1,-1,-1,-1,-1,-1,-1,-1,-1,0,-1
m,-1,1,1,-1,-1,-1,1,-1,1,-1,-1,1,-1,-1,1,-1,-1,-1,-1,-1,0,-1
n,-1,1,1,-1,-1,-1,1,-1,1,-1,-1,1,1,-1,-1,-1,-1,-1,-1,-1,0,-1
ng,-1,1,1,-1,-1,-1,1,-1,1,-1,-1,-1,-1,-1,-1,1,-1,1,-1,-1,0,-1
l,-1,1,1,1,-1,1,-1,-1,1,-1,-1,1,1,-1,-1,-1,-1,-1,-1,-1,0,-1
r,-1,1,1,1,-1,-1,-1,-1,1,-1,-1,1,1,-1,-1,-1,-1,-1,-1,-1,0,-1
w,-1,1,-1,1,-1,-1,-1,-1,1,-1,-1,-1,-1,-1,1,1,-1,1,1,-1,0,-1
y,-1,1,-1,1,-1,-1,-1,-1,1,-1,-1,-1,-1,-1,-1,1,-1,-1,-1,-1,0,-1
)";

const std::array<std::string, kNumFeatures> kFeatureNames = {
    "syl",  "son", "cons",  "cont", "delrel", "lat",  "nas",  "strid", "voi",   "sg",    "cg",
    "ant",  "cor", "distr", "lab",  "hi",     "lo",   "back", "round", "velaric", "tense", "long"};

} // namespace

const std::array<std::string, kNumFeatures>& feature_names() { return kFeatureNames; }

ArticTable ArticTable::parse_csv(const std::string& text, const std::string& origin) {
  ArticTable out;
  std::istringstream is(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = util::split(line, ',');
    if (fields[0] == "phone") {
      if (fields.size() != kNumFeatures + 1)
        throw ValidationError(origin + ": header must name 22 features");
      continue;
    }
    if (fields.size() != kNumFeatures + 1)
      throw ValidationError(origin + " line " + std::to_string(line_no) +
                            ": expected phone + 22 values");
    FeatureVector features{};
    for (size_t i = 0; i < kNumFeatures; ++i) {
      const std::string& f = fields[i + 1];
      if (f == "1" || f == "+1")
        features[i] = 1;
      else if (f == "0")
        features[i] = 0;
      else if (f == "-1")
        features[i] = -1;
      else
        throw ValidationError(origin + " line " + std::to_string(line_no) +
                              ": feature value must be -1, 0 or 1, got '" + f + "'");
    }
    if (!out.table_.emplace(fields[0], features).second)
      throw ValidationError(origin + ": duplicate phone '" + fields[0] + "'");
  }
  if (out.table_.empty()) throw ValidationError(origin + ": empty feature table");
  return out;
}

const ArticTable& ArticTable::builtin() {
  static const ArticTable table = parse_csv(kBuiltinTable, "builtin artic table");
  return table;
}

ArticTable ArticTable::load(const std::filesystem::path& csv_path) {
  return parse_csv(util::read_text_file(csv_path), csv_path.string());
}

const FeatureVector& ArticTable::features(const std::string& phone) const {
  auto it = table_.find(phone);
  if (it == table_.end())
    throw ValidationError("phone '" + phone + "' not in the articulatory feature inventory");
  return it->second;
}

bool ArticTable::is_vowel(const std::string& phone) const { return features(phone)[0] == 1; }

size_t ArticTable::feature_index(const std::string& name) const {
  for (size_t i = 0; i < kNumFeatures; ++i)
    if (kFeatureNames[i] == name) return i;
  throw ValidationError("unknown articulatory feature '" + name + "'");
}

const FeatureVector& phone_features(const std::string& phone, const ArticTable& table) {
  return table.features(phone);
}

FeatureVector pool_cluster(const std::vector<std::string>& phones, const ArticTable& table) {
  FeatureVector pooled{};
  if (phones.empty()) return pooled; // all-zero identity
  bool first = true;
  for (const auto& phone : phones) {
    const FeatureVector& f = table.features(phone);
    if (f[0] == 1)
      throw ValidationError("pool_cluster: vowel '" + phone + "' in consonant cluster");
    for (size_t i = 0; i < kNumFeatures; ++i)
      pooled[i] = first ? f[i] : std::max(pooled[i], f[i]);
    first = false;
  }
  return pooled;
}

BinaryVector syllable_vector(const std::vector<std::string>& onset, const std::string& nucleus,
                             const std::vector<std::string>& coda, const ArticTable& table) {
  if (!table.is_vowel(nucleus))
    throw ValidationError("syllable_vector: nucleus '" + nucleus + "' is not a vowel");
  const FeatureVector on = pool_cluster(onset, table);
  const FeatureVector nu = table.features(nucleus);
  const FeatureVector co = pool_cluster(coda, table);

  BinaryVector out(kSyllableDim, 0.0f);
  for (size_t i = 0; i < kNumFeatures; ++i) {
    out[i] = on[i] == 1 ? 1.0f : 0.0f;
    out[kNumFeatures + i] = nu[i] == 1 ? 1.0f : 0.0f;
    out[2 * kNumFeatures + i] = co[i] == 1 ? 1.0f : 0.0f;
  }
  return out;
}

BinaryVector phone_vector_binary(const std::string& phone, const ArticTable& table) {
  const FeatureVector& f = table.features(phone);
  BinaryVector out(kNumFeatures, 0.0f);
  for (size_t i = 0; i < kNumFeatures; ++i) out[i] = f[i] == 1 ? 1.0f : 0.0f;
  return out;
}

} // namespace sublm::artic
