/*
 * Copyright 2026 The CBOS Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "cbos/config.h"
#include "cbos/corpus.h"
#include "cbos/error.h"
#include "cbos/eval.h"
#include "cbos/persist.h"
#include "cbos/trainer.h"

namespace cbos::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::string_view kUsage =
    "usage: cbos <command> <args>\n"
    "\n"
    "commands:\n"
    "  normalize     lowercase and strip punctuation\n"
    "                  -input FILE (default -) -output FILE (default -)\n"
    "  train         train word vectors, writing OUTPUT.cbos and OUTPUT.vec\n"
    "                  -input FILE -output PREFIX -model {cbow|skipgram|cbos}\n"
    "                  [-variant {baseline|next-word|central-word|non-random|\n"
    "                             variable-window|non-repeated}]\n"
    "                  [-dim 100] [-ws 5] [-epoch 5] [-lr 0.05] [-neg 5]\n"
    "                  [-minCount 5] [-minn 3] [-maxn 6] [-bucket 2000000]\n"
    "                  [-t 1e-4] [-thread 12] [-seed 0 | $CBOS_SEED]\n"
    "                  [-precision 4] [-verbose 1] [--no-subwords] [--trace FILE]\n"
    "  eval-analogy  word analogy accuracy (top-1, OOV questions skipped)\n"
    "                  -model M -questions FILE [-split TSV] [-thread 1] [--json]\n"
    "  nn            nearest neighbours of a word\n"
    "                  -model M -word W [-k 10]\n"
    "  dump-vocab    print word<TAB>count<TAB>id\n"
    "                  -model M | -input FILE [-minCount 5]  [-output FILE]\n"
    "\n"
    "exit codes: 0 success, 1 usage error, 2 runtime error\n";

struct Args {
  std::map<std::string, std::string, std::less<>> values;
  std::set<std::string, std::less<>> switches;

  bool has(std::string_view key) const { return values.contains(key); }

  std::optional<std::string> get(std::string_view key) const {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  }

  std::string require(std::string_view key) const {
    auto v = get(key);
    if (!v) throw UsageError("missing required flag -" + std::string(key));
    return *v;
  }

  template <typename T>
  T number(std::string_view key, T fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      T parsed{};
      if constexpr (std::is_floating_point_v<T>) {
        parsed = static_cast<T>(std::stod(*v, &used));
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!v->empty() && (*v)[0] == '-') throw std::invalid_argument("negative");
        parsed = static_cast<T>(std::stoull(*v, &used));
      } else {
        parsed = static_cast<T>(std::stoll(*v, &used));
      }
      if (used != v->size()) throw std::invalid_argument("trailing characters");
      return parsed;
    } catch (const std::exception&) {
      throw UsageError("invalid value '" + *v + "' for -" + std::string(key));
    }
  }
};

// Accepts `-name value` and `--name value`; `switch_names` take no value.
Args parse_flags(std::span<const std::string> args,
                 const std::set<std::string_view>& value_names,
                 const std::set<std::string_view>& switch_names) {
  Args parsed;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string_view arg = args[i];
    if (!arg.starts_with('-') || arg.size() < 2) {
      throw UsageError("unexpected argument '" + std::string(arg) + "'");
    }
    std::string_view name = arg.substr(arg.starts_with("--") ? 2 : 1);
    if (switch_names.contains(name)) {
      parsed.switches.emplace(name);
      continue;
    }
    if (!value_names.contains(name)) {
      throw UsageError("unknown flag '" + std::string(arg) + "'");
    }
    if (i + 1 >= args.size()) {
      throw UsageError("flag '" + std::string(arg) + "' needs a value");
    }
    parsed.values[std::string(name)] = args[++i];
  }
  return parsed;
}

// ---------------------------------------------------------------------------

int cmd_normalize(std::span<const std::string> rest, std::ostream& out) {
  const auto args = parse_flags(rest, {"input", "output"}, {});
  const auto input = args.get("input").value_or("-");
  const auto output = args.get("output").value_or("-");

  std::ifstream in_file;
  std::istream* in = &std::cin;
  if (input != "-") {
    in_file.open(input, std::ios::binary);
    if (!in_file) throw Error("cannot open " + input);
    in = &in_file;
  }
  std::ofstream out_file;
  std::ostream* dst = &out;
  if (output != "-") {
    out_file.open(output, std::ios::binary | std::ios::trunc);
    if (!out_file) throw Error("cannot open " + output + " for writing");
    dst = &out_file;
  }

  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(*in, line)) {
    *dst << normalize_text(line, offset) << '\n';
    offset += line.size() + 1;
  }
  if (in->bad()) throw Error("error reading " + input);
  dst->flush();
  if (!*dst) throw Error("error writing " + output);
  return kExitOk;
}

TrainConfig config_from(const Args& args) {
  TrainConfig cfg;
  const auto kind_name = args.require("model");
  const auto kind = parse_model_kind(kind_name);
  if (!kind) throw UsageError("unknown model '" + kind_name + "'");
  cfg.model = *kind;
  if (auto v = args.get("variant")) {
    const auto variant = parse_variant(*v);
    if (!variant) throw UsageError("unknown variant '" + *v + "'");
    if (cfg.model != ModelKind::kCbos) {
      throw UsageError("-variant is only valid with -model cbos");
    }
    cfg.variant = *variant;
  }
  cfg.dim = args.number("dim", cfg.dim);
  cfg.ws = args.number("ws", cfg.ws);
  cfg.epochs = args.number("epoch", cfg.epochs);
  cfg.lr0 = args.number("lr", cfg.lr0);
  cfg.negatives = args.number("neg", cfg.negatives);
  cfg.min_count = args.number("minCount", cfg.min_count);
  cfg.minn = args.number("minn", cfg.minn);
  cfg.maxn = args.number("maxn", cfg.maxn);
  cfg.bucket = args.number("bucket", cfg.bucket);
  cfg.t = args.number("t", cfg.t);
  cfg.workers = args.number("thread", cfg.workers);

  if (args.has("seed")) {
    cfg.seed = args.number<std::uint64_t>("seed", 0);
  } else if (const char* env = std::getenv("CBOS_SEED"); env && *env) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("invalid CBOS_SEED '") + env + "'");
    }
  }
  if (args.switches.contains("no-subwords")) {
    cfg.minn = 0;
    cfg.maxn = 0;
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::string format_duration(double seconds) {
  const auto minutes = static_cast<long>(seconds / 60);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%ldm %.3fs", minutes,
                seconds - 60.0 * static_cast<double>(minutes));
  return buf;
}

int cmd_train(std::span<const std::string> rest, std::ostream& out,
              std::ostream& err) {
  const auto args = parse_flags(
      rest,
      {"input", "output", "model", "variant", "dim", "ws", "epoch", "lr", "neg",
       "minCount", "minn", "maxn", "bucket", "t", "thread", "seed", "trace",
       "precision", "verbose"},
      {"no-subwords"});
  const auto input = args.require("input");
  const auto output = args.require("output");
  const auto cfg = config_from(args);
  const int precision = args.number("precision", 4);
  const int verbose = args.number("verbose", 1);
  if (precision < 0 || precision > 12) throw UsageError("-precision must be in [0, 12]");

  auto vocab = build_vocab_from_file(input, cfg.vocab_options());
  if (verbose > 0) {
    err << "Number of words: " << vocab.size() << '\n'
        << "Number of tokens: " << vocab.total_tokens() << '\n';
  }

  std::unique_ptr<JsonLinesTraceSink> trace;
  if (auto path = args.get("trace")) trace = std::make_unique<JsonLinesTraceSink>(*path);

  TrainOptions options;
  options.trace = trace.get();
  options.progress = verbose > 0 ? &err : nullptr;
  auto result = train(cfg, std::move(vocab), input, options);

  save_bin(result.trained, output + ".cbos");
  save_vec(result.trained, output + ".vec", precision);

  out << "model: " << to_string(cfg.model);
  if (cfg.model == ModelKind::kCbos) out << " (" << to_string(cfg.effective_variant()) << ")";
  out << '\n'
      << "training time: " << format_duration(result.stats.seconds) << '\n'
      << "tokens/sec: " << static_cast<long long>(result.stats.tokens_per_second) << '\n'
      << "average loss: " << result.stats.average_loss << '\n';
  return kExitOk;
}

// Keeps the trained model alive for as long as the space refers to it.
struct LoadedModel {
  std::unique_ptr<TrainedModel> trained;
  std::unique_ptr<VectorSpace> space;
};

LoadedModel load_model(const std::string& path) {
  LoadedModel loaded;
  if (path.ends_with(".vec")) {
    loaded.space = std::make_unique<VectorSpace>(load_vec(path));
    return loaded;
  }
  std::filesystem::path file = path;
  if (!std::filesystem::exists(file) && std::filesystem::exists(path + ".cbos")) {
    file = path + ".cbos";
  }
  loaded.trained = std::make_unique<TrainedModel>(load_bin(file));
  loaded.space = std::make_unique<VectorSpace>(loaded.trained->model,
                                               loaded.trained->vocab,
                                               loaded.trained->config.subwords());
  return loaded;
}

int cmd_eval(std::span<const std::string> rest, std::ostream& out) {
  const auto args =
      parse_flags(rest, {"model", "questions", "split", "thread"}, {"json"});
  const auto model_path = args.require("model");
  const auto questions_path = args.require("questions");
  const int workers = args.number("thread", 1);
  if (workers < 1) throw UsageError("-thread must be >= 1");

  const auto loaded = load_model(model_path);
  const auto dataset = load_analogy_file(questions_path);
  CategorySplit split;
  if (auto s = args.get("split")) split = CategorySplit::from_tsv(*s);

  const auto report = evaluate(*loaded.space, dataset, split, workers);
  if (args.switches.contains("json")) {
    out << report_json(report) << '\n';
  } else {
    print_report(out, report);
  }
  return kExitOk;
}

int cmd_nn(std::span<const std::string> rest, std::ostream& out) {
  const auto args = parse_flags(rest, {"model", "word", "k"}, {});
  const auto model_path = args.require("model");
  const auto word = args.require("word");
  const int k = args.number("k", 10);
  if (k < 1) throw UsageError("-k must be >= 1");

  const auto loaded = load_model(model_path);
  for (const auto& n : nearest_neighbors(*loaded.space, word, k)) {
    out << n.word << ' ' << n.cosine << '\n';
  }
  return kExitOk;
}

int cmd_dump_vocab(std::span<const std::string> rest, std::ostream& out) {
  const auto args = parse_flags(rest, {"model", "input", "minCount", "output"}, {});
  if (args.has("model") == args.has("input")) {
    throw UsageError("dump-vocab needs exactly one of -model or -input");
  }
  Vocab vocab;
  if (auto m = args.get("model")) {
    std::filesystem::path file = *m;
    if (!std::filesystem::exists(file) && std::filesystem::exists(*m + ".cbos")) {
      file = *m + ".cbos";
    }
    vocab = load_bin(file).vocab;
  } else {
    VocabOptions opts;
    opts.min_count = args.number<std::int64_t>("minCount", 5);
    if (opts.min_count < 1) throw UsageError("-minCount must be >= 1");
    opts.negative_table_size = 0;
    vocab = build_vocab_from_file(args.require("input"), opts);
  }
  if (auto path = args.get("output")) {
    std::ofstream file(*path, std::ios::trunc);
    if (!file) throw Error("cannot open " + *path + " for writing");
    vocab.dump_tsv(file);
  } else {
    vocab.dump_tsv(out);
  }
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << kUsage;
    return kExitUsage;
  }
  const std::string_view command = args[0];
  const auto rest = args.subspan(1);
  try {
    if (command == "normalize") return cmd_normalize(rest, out);
    if (command == "train") return cmd_train(rest, out, err);
    if (command == "eval-analogy") return cmd_eval(rest, out);
    if (command == "nn") return cmd_nn(rest, out);
    if (command == "dump-vocab") return cmd_dump_vocab(rest, out);
    if (command == "help" || command == "-h" || command == "--help") {
      out << kUsage;
      return kExitOk;
    }
    err << "unknown command '" << command << "'\n\n" << kUsage;
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << kUsage;
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace cbos::cli
