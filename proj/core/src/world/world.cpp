#include "refgame/world/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "refgame/errors.hpp"
#include "refgame/nnkit/rng.hpp"
#include "refgame/world/grammar.hpp"

namespace rg::world {

namespace {

// Stream tags for derived seeds.
constexpr std::uint64_t kSceneStream = 0x5c3;
constexpr std::uint64_t kNoiseStream = 0x401;
constexpr std::uint64_t kGrammarStream = 0x96a;
constexpr std::uint64_t kProjStream = 0x780;
constexpr std::uint64_t kSplitStream = 0x159;

void require_unique_nonempty(const std::vector<std::string>& words, const char* what) {
  if (words.empty()) throw ConfigError(std::string("schema: empty ") + what + " list");
  std::set<std::string> seen(words.begin(), words.end());
  if (seen.size() != words.size()) {
    throw ConfigError(std::string("schema: duplicate entries in ") + what + " list");
  }
}

}  // namespace

std::string_view to_string(PosTag tag) {
  switch (tag) {
    case PosTag::kDet: return "DET";
    case PosTag::kAdj: return "ADJ";
    case PosTag::kNoun: return "NOUN";
    case PosTag::kAdp: return "ADP";
    case PosTag::kVerb: return "VERB";
  }
  return "?";
}

std::optional<PosTag> pos_tag_from_string(std::string_view s) {
  if (s == "DET") return PosTag::kDet;
  if (s == "ADJ") return PosTag::kAdj;
  if (s == "NOUN") return PosTag::kNoun;
  if (s == "ADP") return PosTag::kAdp;
  if (s == "VERB") return PosTag::kVerb;
  return std::nullopt;
}

void AttributeSchema::validate() const {
  require_unique_nonempty(shapes, "shape");
  require_unique_nonempty(colors, "color");
  require_unique_nonempty(sizes, "size");
  require_unique_nonempty(relations, "relation");
  if (max_objects < 1) throw ConfigError("schema: max_objects must be >= 1");
  if (max_caption_length(*this) > 20) {
    throw ConfigError("schema: captions would exceed the 20-token budget; lower max_objects");
  }
}

AttributeSchema AttributeSchema::defaults() {
  AttributeSchema s;
  s.shapes = {"circle", "square", "triangle", "star", "hexagon"};
  s.colors = {"red", "blue", "green", "yellow", "purple", "orange"};
  s.sizes = {"small", "big"};
  s.relations = {"left-of", "right-of", "above", "below"};
  s.max_objects = 2;
  return s;
}

std::uint64_t Scene::attribute_hash() const {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (const auto& o : objects) h = derive_seed(h, o.shape, o.color, o.size);
  for (const auto& r : relations) h = derive_seed(h, r.relation, r.a, r.b);
  return h;
}

Vocabulary::Vocabulary() {
  add("<pad>", std::nullopt);
  add("<bos>", std::nullopt);
  add("<eos>", std::nullopt);
}

std::uint32_t Vocabulary::add(const std::string& token, std::optional<PosTag> tag) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(tokens_.size());
  tokens_.push_back(token);
  tags_.push_back(tag);
  ids_.emplace(token, id);
  return id;
}

std::optional<std::uint32_t> Vocabulary::id_of(std::string_view token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(std::uint32_t id) const { return tokens_.at(id); }

std::optional<PosTag> Vocabulary::tag(std::uint32_t id) const { return tags_.at(id); }

Scene generate_scene(const AttributeSchema& schema, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  Scene s;
  const std::uint32_t count = 1 + rng.below(schema.max_objects);
  s.objects.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    SceneObject o;
    o.shape = rng.below(static_cast<std::uint32_t>(schema.shapes.size()));
    o.color = rng.below(static_cast<std::uint32_t>(schema.colors.size()));
    o.size = rng.below(static_cast<std::uint32_t>(schema.sizes.size()));
    s.objects.push_back(o);
    if (k > 0) {
      s.relations.push_back(
          {rng.below(static_cast<std::uint32_t>(schema.relations.size())), k - 1, k});
    }
  }
  return s;
}

Renderer::Renderer(const AttributeSchema& schema, std::uint32_t d_img, std::uint64_t proj_seed)
    : d_img_(d_img),
      max_objects_(schema.max_objects),
      shapes_(static_cast<std::uint32_t>(schema.shapes.size())),
      colors_(static_cast<std::uint32_t>(schema.colors.size())),
      sizes_(static_cast<std::uint32_t>(schema.sizes.size())),
      relations_(static_cast<std::uint32_t>(schema.relations.size())) {
  const std::uint32_t per_object = shapes_ + colors_ + sizes_;
  onehot_dim_ = max_objects_ * per_object +
                (max_objects_ > 0 ? (max_objects_ - 1) * relations_ : 0);
  Rng rng(derive_seed(proj_seed, kProjStream));
  proj_.resize(static_cast<std::size_t>(d_img_) * onehot_dim_);
  for (double& x : proj_) x = rng.gaussian();
}

std::vector<double> Renderer::encode_onehot(const Scene& scene) const {
  std::vector<double> x(onehot_dim_, 0.0);
  const std::uint32_t per_object = shapes_ + colors_ + sizes_;
  for (std::size_t k = 0; k < scene.objects.size() && k < max_objects_; ++k) {
    const SceneObject& o = scene.objects[k];
    const std::size_t base = k * per_object;
    x[base + o.shape] = 1.0;
    x[base + shapes_ + o.color] = 1.0;
    x[base + shapes_ + colors_ + o.size] = 1.0;
  }
  const std::size_t rel_base = static_cast<std::size_t>(max_objects_) * per_object;
  const std::size_t rel_slots = max_objects_ > 0 ? max_objects_ - 1 : 0;
  for (std::size_t k = 0; k < scene.relations.size() && k < rel_slots; ++k) {
    x[rel_base + k * relations_ + scene.relations[k].relation] = 1.0;
  }
  return x;
}

RenderedImage Renderer::render(const Scene& scene, double noise_std,
                               std::uint64_t noise_seed) const {
  if (noise_std < 0.0) throw std::invalid_argument("render: negative noise_std");
  const std::vector<double> x = encode_onehot(scene);
  RenderedImage img;
  img.features.assign(d_img_, 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(onehot_dim_));
  for (std::uint32_t i = 0; i < d_img_; ++i) {
    const double* row = proj_.data() + static_cast<std::size_t>(i) * onehot_dim_;
    double acc = 0.0;
    for (std::uint32_t j = 0; j < onehot_dim_; ++j) acc += row[j] * x[j];
    img.features[i] = acc * scale;
  }
  if (noise_std > 0.0) {
    Rng rng(derive_seed(noise_seed, kNoiseStream));
    for (double& f : img.features) f += noise_std * rng.gaussian();
  }
  return img;
}

Caption caption_scene(const AttributeSchema& schema, const Scene& scene,
                      std::uint64_t grammar_seed, const Vocabulary& vocab) {
  Caption c;
  for (const TaggedWord& tw : realize(schema, scene, grammar_seed)) {
    const auto id = vocab.id_of(tw.word);
    if (!id) throw std::invalid_argument("caption_scene: word not in vocabulary: " + tw.word);
    c.tokens.push_back(*id);
    c.tags.push_back(tw.tag);
  }
  return c;
}

Dataset build_dataset(const WorldConfig& cfg) {
  cfg.schema.validate();
  if (cfg.n_items < 10) throw std::invalid_argument("build_dataset: need at least 10 items");

  const Renderer renderer(cfg.schema, cfg.d_img, cfg.seed);
  const std::uint64_t grammar_seed = derive_seed(cfg.seed, kGrammarStream);

  std::vector<Scene> scenes;
  scenes.reserve(cfg.n_items);
  for (std::uint32_t i = 0; i < cfg.n_items; ++i) {
    Scene s = generate_scene(cfg.schema, derive_seed(cfg.seed, kSceneStream, i));
    s.id = i;
    scenes.push_back(std::move(s));
  }

  // Vocabulary from all caption tokens, in first-appearance order, plus the
  // reserved ids.
  Dataset ds;
  std::vector<std::vector<TaggedWord>> words(cfg.n_items);
  for (std::uint32_t i = 0; i < cfg.n_items; ++i) {
    words[i] = realize(cfg.schema, scenes[i], grammar_seed);
    for (const TaggedWord& tw : words[i]) ds.vocab.add(tw.word, tw.tag);
  }
  if (ds.vocab.size() > cfg.vocab_cap) {
    throw ConfigError("build_dataset: vocabulary exceeds cap");
  }

  std::vector<std::uint32_t> perm(cfg.n_items);
  std::iota(perm.begin(), perm.end(), 0u);
  const std::uint64_t split_seed = derive_seed(cfg.seed, kSplitStream);
  Rng split_rng(split_seed);
  split_rng.shuffle(perm);

  const std::uint32_t n_train = cfg.n_items * 8 / 10;
  const std::uint32_t n_val = cfg.n_items / 10;

  ds.split.split_seed = split_seed;
  for (std::uint32_t rank = 0; rank < cfg.n_items; ++rank) {
    const std::uint32_t i = perm[rank];
    DatasetItem item;
    item.scene = scenes[i];
    item.image = renderer.render(scenes[i], cfg.noise_std, derive_seed(cfg.seed, kNoiseStream, i));
    for (const TaggedWord& tw : words[i]) {
      item.caption.tokens.push_back(*ds.vocab.id_of(tw.word));
      item.caption.tags.push_back(tw.tag);
    }
    if (rank < n_train) {
      ds.split.train.push_back(std::move(item));
    } else if (rank < n_train + n_val) {
      ds.split.val.push_back(std::move(item));
    } else {
      ds.split.test.push_back(std::move(item));
    }
  }
  return ds;
}

std::vector<const DatasetItem*> items_by_id(const DatasetSplit& split,
                                            std::vector<const char*>* labels) {
  struct Entry {
    const DatasetItem* item;
    const char* label;
  };
  std::vector<Entry> entries;
  entries.reserve(split.total());
  for (const auto& it : split.train) entries.push_back({&it, "train"});
  for (const auto& it : split.val) entries.push_back({&it, "val"});
  for (const auto& it : split.test) entries.push_back({&it, "test"});
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.item->scene.id < b.item->scene.id; });
  std::vector<const DatasetItem*> out;
  out.reserve(entries.size());
  if (labels) labels->clear();
  for (const Entry& e : entries) {
    out.push_back(e.item);
    if (labels) labels->push_back(e.label);
  }
  return out;
}

}  // namespace rg::world
