#ifndef PDS_PIPELINE_H_
#define PDS_PIPELINE_H_

#include <filesystem>
#include <memory>

#include "pds/cba.h"
#include "pds/chunker.h"
#include "pds/monitor.h"
#include "pds/preprocess.h"
#include "pds/store.h"

namespace pds {

// Read-only language resources shipped under a data directory:
//   text/stopwords.txt  text/slang.tsv  text/phrases.txt  lexicon/tagger.tsv
struct Resources {
  Preprocessor pre;
  PosTagger tagger;

  static Resources load(const std::filesystem::path &data_dir);
};

// Resources + stores + trained classifier + monitor, wired together.
class Pipeline {
 public:
  // Seeds `stores_dir` from `data_dir` (ODB, PRDB) when needed, opens the
  // stores and trains the classifier from the PRDB contents.
  static std::unique_ptr<Pipeline> open(const std::filesystem::path &data_dir,
                                        const std::filesystem::path &stores_dir, CbaOptions options = {});

  const Resources &resources() const { return *resources_; }
  Stores &stores() { return *stores_; }
  Monitor &monitor() { return *monitor_; }
  const CbaClassifier &classifier() const { return monitor_->classifier(); }

 private:
  Pipeline() = default;

  std::unique_ptr<Resources> resources_;
  std::unique_ptr<Stores> stores_;
  std::unique_ptr<Monitor> monitor_;
};

}  // namespace pds

#endif  // PDS_PIPELINE_H_
