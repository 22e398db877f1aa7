/*
 * Copyright 2026 The stylevec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end. Kept in a header so tests can drive it in-process.
//
// Machine-readable lines start with "RESULT\t" and carry tab-separated
// key=value fields; everything else is for people.

#pragma once

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stylevec/stylevec.hpp"

namespace stylevec::cli {

namespace detail {

inline std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

struct TrainFlags {
  std::string corpus;
  std::string mwe;
  std::string out;
  std::string config_file;
  std::string resume;
  bool no_split = false;
  bool checkpoint = false;
  bool quiet = false;
  std::uint64_t report_every = 1'000'000;
  // Option handles for the TrainConfig fields, by config key.
  std::vector<std::pair<std::string, CLI::Option*>> config_options;
};

inline TrainConfig resolve_train_config(const TrainFlags& flags) {
  KeyValues merged;
  if (!flags.config_file.empty()) merged = read_key_values(flags.config_file);
  for (const auto& [key, opt] : flags.config_options) {
    if (opt->count() > 0) merged[key] = opt->results().front();
  }
  TrainConfig config;
  apply_key_values(merged, config, flags.config_file.empty() ? "flags" : flags.config_file);
  bool synsem_given = merged.count("d-synsem") > 0;
  if (config.variant == Variant::Sep) {
    if (!synsem_given) config.d_synsem = 300;
  } else if (synsem_given && config.d_synsem != 0) {
    throw Error("--d-synsem only applies to the sep variant");
  }
  config.validate();
  return config;
}

inline int run_train(const TrainFlags& flags, std::ostream& out, std::ostream& err) {
  TrainConfig config = resolve_train_config(flags);

  MweLexicon lexicon;
  if (!flags.mwe.empty()) lexicon = read_mwe_lexicon(flags.mwe);
  std::vector<TokenList> lines = read_corpus_lines(flags.corpus, &lexicon);
  Vocabulary vocab = build_vocab(lines, config.min_count);
  UtteranceCorpus corpus = UtteranceCorpus::encode(lines, vocab);
  lines.clear();
  lines.shrink_to_fit();
  if (corpus.empty()) throw Error("corpus has no in-vocabulary tokens");

  SplitEmbeddingModel initial;
  if (!flags.resume.empty()) {
    Checkpoint ck = load_checkpoint(flags.resume);
    if (ck.words.words() != vocab.index().words()) {
      throw Error("checkpoint vocabulary does not match the corpus vocabulary");
    }
    if (ck.config.d_style != config.d_style || ck.config.d_synsem != config.d_synsem) {
      throw Error("checkpoint dimensions do not match the requested dimensions");
    }
    initial = std::move(ck.model);
  } else {
    initial = SplitEmbeddingModel::init(vocab.size(), config.d_style, config.d_synsem, config.seed);
  }

  Trainer trainer(config, corpus, vocab, std::move(initial));
  if (!flags.quiet) {
    err << "variant " << to_string(config.variant) << ", |V| = " << vocab.size() << ", "
        << corpus.size() << " utterances, " << corpus.token_count() << " tokens\n"
        << "e_near = " << trainer.expectations().e_near << ", e_dist = " << trainer.expectations().e_dist
        << ", lr x/y = " << trainer.rates().x << "/" << trainer.rates().y << "\n";
  }
  Trainer::ProgressCallback progress;
  if (!flags.quiet) {
    progress = [&](const ProgressReport& p) {
      err << "tokens " << p.tokens_done << "  lr " << p.current_lr << "  loss " << fixed(p.running_loss, 4)
          << "\n";
    };
  }
  trainer.run(progress, flags.report_every);

  const SplitEmbeddingModel& model = trainer.model();
  ExportedFiles files = export_vectors(model, vocab.index(), flags.out, !flags.no_split);
  out << "wrote " << files.full << "\n";
  if (!files.style.empty()) out << "wrote " << files.style << "\nwrote " << files.synsem << "\n";
  if (flags.checkpoint) {
    save_checkpoint(model, vocab.index(), config, flags.out);
    out << "wrote " << flags.out << ".out\nwrote " << flags.out << ".config\n";
  }
  ProgressReport p = trainer.progress();
  out << "RESULT\tmetric=train\tvariant=" << to_string(config.variant) << "\ttokens=" << p.tokens_done
      << "\tfull_updates=" << p.updates.full_updates << "\tstyle_updates=" << p.updates.style_updates
      << "\tvocab=" << vocab.size() << "\n";
  return 0;
}

inline void print_report(const EvalReport& r, const std::string& label, double scale, std::ostream& out) {
  out << std::left << std::setw(10) << label << fixed(r.value * scale, 1) << "\n"
      << std::setw(10) << "coverage" << fixed(r.coverage, 3) << " (" << r.n_used << "/" << r.n_items << ")\n"
      << format_record(r) << "\n";
}

}  // namespace detail

/// Runs one subcommand; returns the process exit status.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Style-sensitive CBOW word embeddings: training and evaluation", "stylevec"};
  app.require_subcommand(1);

  // train
  detail::TrainFlags tf;
  auto* train = app.add_subcommand("train", "Train word vectors and write <out>.full (+ .style/.synsem for sep)");
  train->add_option("--corpus", tf.corpus, "Corpus file: one utterance per line, space-separated tokens")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--mwe", tf.mwe, "Multi-word expression lexicon, one expression per line")
      ->check(CLI::ExistingFile);
  train->add_option("--out", tf.out, "Output prefix")->required();
  train->add_option("--config", tf.config_file, "key=value file with training settings; flags override it")
      ->check(CLI::ExistingFile);
  {
    // Bound as strings; parsed and validated together with the config file.
    static const std::vector<std::tuple<std::string, std::string, std::string>> specs = {
        {"variant", "--variant", "near | all | dist | sep (default near)"},
        {"delta", "--delta", "Nearby window half-width (default 5)"},
        {"epochs", "--epochs", "Training epochs (default 10)"},
        {"negatives", "--negatives", "Negative samples per update (default 5)"},
        {"alpha", "--alpha", "Base learning rate (default 0.05)"},
        {"sample", "--sample", "Subsampling threshold, 0 disables (default 1e-3)"},
        {"min-count", "--min-count", "Drop words seen fewer times (default 5)"},
        {"d-style", "--d-style", "Style-half width; the whole width for undivided variants (default 300)"},
        {"d-synsem", "--d-synsem", "Syntactic/semantic-half width, sep only (default 300)"},
        {"seed", "--seed", "Random seed (default 1)"},
        {"workers", "--workers", "Training threads; 1 is deterministic (default 1)"},
    };
    for (const auto& [key, flag, help] : specs) {
      auto* opt = train->add_option(flag, help);
      opt->type_size(1)->expected(1);
      tf.config_options.emplace_back(key, opt);
    }
  }
  train->add_flag("--no-split", tf.no_split, "Do not write .style/.synsem files for sep models");
  train->add_flag("--checkpoint", tf.checkpoint, "Also write <out>.out (output vectors) and <out>.config");
  train->add_option("--resume", tf.resume, "Continue from a checkpoint prefix");
  train->add_flag("--quiet", tf.quiet, "No progress output");
  train->add_option("--report-every", tf.report_every, "Progress line every N tokens (default 1000000)");

  // eval-style
  std::string vectors_path, pairs_path, metric = "rho_style";
  auto* eval_style = app.add_subcommand("eval-style", "Spearman rho (x100) between cosine and gold pair scores");
  eval_style->add_option("--vectors", vectors_path, "Vector file")->required()->check(CLI::ExistingFile);
  eval_style->add_option("--pairs", pairs_path, "word1<TAB>word2<TAB>score file")->required()->check(CLI::ExistingFile);
  eval_style->add_option("--metric", metric, "Metric name in the RESULT line (default rho_style)");

  // eval-syntax
  std::string pos_path;
  std::size_t n = 5;
  auto* eval_syntax = app.add_subcommand("eval-syntax", "SyntaxAcc@N: POS agreement of nearest neighbors");
  eval_syntax->add_option("--vectors", vectors_path, "Vector file")->required()->check(CLI::ExistingFile);
  eval_syntax->add_option("--pos", pos_path, "word<TAB>tag file")->required()->check(CLI::ExistingFile);
  eval_syntax->add_option("--n", n, "Neighbors per word (default 5)");

  // neighbors
  std::string word;
  std::size_t n_neighbors = 10;
  auto* nbrs = app.add_subcommand("neighbors", "Most similar words by cosine");
  nbrs->add_option("--vectors", vectors_path, "Vector file")->required()->check(CLI::ExistingFile);
  nbrs->add_option("--word", word, "Query word")->required();
  nbrs->add_option("--n", n_neighbors, "Number of neighbors (default 10)");

  // synth
  std::string synth_config, synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic style world (corpus, gold pairs, POS lexicon)");
  synth->add_option("--config", synth_config, "key=value world config")->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Output directory")->required();

  // export-vocab
  std::string vocab_corpus, vocab_mwe, vocab_out;
  std::uint64_t vocab_min_count = 5;
  auto* export_vocab = app.add_subcommand("export-vocab", "Write the vocabulary as word<TAB>count");
  export_vocab->add_option("--corpus", vocab_corpus, "Corpus file")->required()->check(CLI::ExistingFile);
  export_vocab->add_option("--mwe", vocab_mwe, "Multi-word expression lexicon")->check(CLI::ExistingFile);
  export_vocab->add_option("--min-count", vocab_min_count, "Minimum count (default 5)");
  export_vocab->add_option("--out", vocab_out, "Output TSV (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    err << "error: " << msg << "\n";
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  try {
    if (*train) return detail::run_train(tf, out, err);

    if (*eval_style) {
      VectorTable table = load_vectors(vectors_path);
      SimilarityDataset pairs = SimilarityDataset::load(pairs_path);
      EvalReport r = similarity_correlation(table.view(), pairs, metric);
      detail::print_report(r, "rho", 1.0, out);
      return 0;
    }

    if (*eval_syntax) {
      VectorTable table = load_vectors(vectors_path);
      PosLexicon pos = PosLexicon::load(pos_path);
      EvalReport r = syntax_acc(table.view(), pos, n);
      detail::print_report(r, "acc(x100)", 100.0, out);
      return 0;
    }

    if (*nbrs) {
      VectorTable table = load_vectors(vectors_path);
      auto list = neighbors(table.view(), word, n_neighbors);
      out << "top " << list.size() << " words similar to '" << word << "'\n";
      for (std::size_t i = 0; i < list.size(); ++i) {
        out << std::right << std::setw(4) << i + 1 << "  " << std::left << std::setw(24) << list[i].word
            << detail::fixed(list[i].score, 4) << "\n";
      }
      for (std::size_t i = 0; i < list.size(); ++i) {
        out << "RESULT\tmetric=neighbor\tquery=" << word << "\trank=" << i + 1 << "\tword=" << list[i].word
            << "\tcosine=" << format_double(list[i].score) << "\n";
      }
      return 0;
    }

    if (*synth) {
      StyleWorldConfig config;
      if (!synth_config.empty()) {
        config = StyleWorldConfig::from_key_values(read_key_values(synth_config), synth_config);
      }
      SyntheticWorld world = generate(config);
      WorldFiles files = write_world(world, synth_out);
      out << "wrote " << files.corpus << "\nwrote " << files.style_pairs << "\nwrote " << files.pos
          << "\nwrote " << files.manifest << "\n";
      out << "RESULT\tmetric=synth\tutterances=" << world.utterances.size()
          << "\tgold_pairs=" << world.style_pairs.size() << "\tpos_words=" << world.pos.size() << "\n";
      return 0;
    }

    if (*export_vocab) {
      MweLexicon lexicon;
      if (!vocab_mwe.empty()) lexicon = read_mwe_lexicon(vocab_mwe);
      std::vector<TokenList> lines = read_corpus_lines(vocab_corpus, &lexicon);
      Vocabulary vocab = build_vocab(lines, vocab_min_count, 1);
      if (vocab_out.empty()) {
        write_vocab_tsv(vocab, out);
      } else {
        auto file = open_output(vocab_out);
        write_vocab_tsv(vocab, file);
        out << "wrote " << vocab_out << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace stylevec::cli
