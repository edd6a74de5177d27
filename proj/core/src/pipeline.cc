#include "pds/pipeline.h"

namespace pds {

Resources Resources::load(const std::filesystem::path &data_dir) {
  return Resources{Preprocessor::load(data_dir / "text"), PosTagger::load(data_dir / "lexicon" / "tagger.tsv")};
}

std::unique_ptr<Pipeline> Pipeline::open(const std::filesystem::path &data_dir,
                                         const std::filesystem::path &stores_dir, CbaOptions options) {
  std::unique_ptr<Pipeline> p(new Pipeline());
  p->resources_ = std::make_unique<Resources>(Resources::load(data_dir));
  Stores::seed(stores_dir, data_dir);
  p->stores_ = Stores::open(stores_dir);

  const Preprocessor &pre = p->resources_->pre;
  Canonicalizer canon = [&pre](std::string_view k) { return pre.canonical(k); };
  auto records = p->stores_->training_records(canon);
  auto classifier = train_classifier(records, p->stores_->seeded_rules(canon), options);
  p->monitor_ = std::make_unique<Monitor>(pre, p->resources_->tagger, *p->stores_, std::move(classifier));
  return p;
}

}  // namespace pds
