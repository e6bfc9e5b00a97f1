#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kpcloud/errors.h"
#include "kpcloud/synthetic.h"

using namespace kpcloud;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic corpora and language models for testing the kpcloud pipeline"};
  app.require_subcommand(1);

  SyntheticCorpusOptions co;
  std::string out_dir;
  std::string language = "pt";
  auto* corpus = app.add_subcommand("corpus", "Planted-keyphrase train/test corpus (train.json, test.json)");
  corpus->add_option("-o,--out-dir", out_dir, "Output directory")->required();
  corpus->add_option("--language", language, "Language profile: pt or en")->capture_default_str();
  corpus->add_option("--train-docs", co.train_docs)->capture_default_str();
  corpus->add_option("--test-docs", co.test_docs)->capture_default_str();
  corpus->add_option("--words", co.words_per_doc, "Mean words per document")->capture_default_str();
  corpus->add_option("--gold-per-doc", co.gold_per_doc)->capture_default_str();
  corpus->add_option("--seed", co.seed)->capture_default_str();
  corpus->add_option("--start-time", co.start_time, "Broadcast time of the first document")->capture_default_str();

  SyntheticLmOptions lo;
  std::string lm_out;
  bool no_unk = false;
  auto* lm = app.add_subcommand("lm", "Random normalized 4-gram back-off model in ARPA format");
  lm->add_option("-o,--out", lm_out, "ARPA file to write")->required();
  lm->add_option("--vocabulary", lo.vocabulary)->capture_default_str();
  lm->add_option("--bigrams", lo.higher[0])->capture_default_str();
  lm->add_option("--trigrams", lo.higher[1])->capture_default_str();
  lm->add_option("--fourgrams", lo.higher[2])->capture_default_str();
  lm->add_option("--seed", lo.seed)->capture_default_str();
  lm->add_flag("--no-unk", no_unk, "Leave <unk> out of the vocabulary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (corpus->parsed()) {
      const auto res = LanguageResources::builtin(parse_language(language));
      const auto sc = make_synthetic_corpus(co, res);
      std::filesystem::create_directories(out_dir);
      save_corpus(sc.train, (std::filesystem::path(out_dir) / "train.json").string());
      save_corpus(sc.test, (std::filesystem::path(out_dir) / "test.json").string());
      std::cout << "train\t" << sc.train.size() << " docs\t" << sc.train_words << " words\n"
                << "test\t" << sc.test.size() << " docs\t" << sc.test_words << " words\n";
    } else {
      lo.with_unk = !no_unk;
      const auto model = make_synthetic_lm(lo);
      std::ofstream out(lm_out, std::ios::binary);
      model.write(out);
      if (!out) throw IoError("cannot write " + lm_out);
      for (int k = 1; k <= model.max_order(); ++k) std::cout << k << "-grams\t" << model.count(k) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "kpcloud-synth: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
