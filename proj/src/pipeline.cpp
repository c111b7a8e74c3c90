#include "igs/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "igs/error.hpp"
#include "igs/hashing.hpp"
#include "igs/matrix_csv.hpp"
#include "igs/reference.hpp"
#include "igs/transcript.hpp"

namespace igs {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

fs::path RunPaths::means(const std::string& backend_id, AttributeKind a, QuestionTypeSetting s) const {
  return matrices_dir() / (backend_id + "__" + std::string(to_string(a)) + "__" + std::string(to_string(s)) + ".csv");
}

fs::path RunPaths::counts(const std::string& backend_id, AttributeKind a, QuestionTypeSetting s) const {
  return matrices_dir() /
         (backend_id + "__" + std::string(to_string(a)) + "__" + std::string(to_string(s)) + ".counts.csv");
}

namespace {

class Log {
 public:
  explicit Log(std::ostream* out) : out_(out) {}
  template <typename... Args>
  void operator()(const Args&... args) const {
    if (!out_) return;
    ((*out_) << ... << args) << '\n';
  }

 private:
  std::ostream* out_;
};

// Exclusive advisory lock on <outdir>/.lock, released when the process exits.
class DirLock {
 public:
  explicit DirLock(const fs::path& outdir) {
    fs::create_directories(outdir);
    const fs::path path = outdir / ".lock";
    fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot open lock file " + path.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw Error("output directory " + outdir.string() + " is in use by another run");
    }
  }
  ~DirLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingTranscriptError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string combo_name(AttributeKind a, QuestionTypeSetting s) {
  return std::string(to_string(a)) + "/" + std::string(to_string(s));
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  std::string s = buf;
  // "-0.0000" reads as a sign claim
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string lexicon_checksum(const RunConfig& config) {
  const auto& vader = config.analyzer_descriptor("vader");
  try {
    return sha256_file_hex(vader.lexicon_path);
  } catch (const std::exception&) {
    return "unavailable";
  }
}

std::vector<std::regex> compile_refusals(const RunConfig& config) {
  std::vector<std::regex> out;
  if (!config.drop_refusals) return out;
  for (const auto& p : config.refusal_patterns) out.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
  return out;
}

// Prompts of every (attribute, setting) combination for one backend, with
// their request keys.
struct Combination {
  AttributeKind attribute;
  QuestionTypeSetting setting;
  std::vector<Prompt> plan;
  std::vector<std::string> keys;
};

std::vector<Combination> combinations(const RunConfig& config, const BackendDescriptor& backend) {
  const TemplateCatalog catalog = config.catalog();
  std::vector<Combination> out;
  for (const auto& attr : config.attributes) {
    for (auto setting : config.settings) {
      Combination c{attr.kind, setting, build_plan(attr.kind, attr.roster, setting, config.repeats, catalog), {}};
      c.keys.reserve(c.plan.size());
      for (const auto& p : c.plan) c.keys.push_back(request_key_for(backend, p));
      out.push_back(std::move(c));
    }
  }
  return out;
}

// Scores `texts` with up to `parallelism` workers; result order follows input.
std::vector<double> score_texts(const SentimentAnalyzer& analyzer, const std::vector<const TranscriptRecord*>& recs,
                                std::size_t parallelism) {
  std::vector<double> out(recs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex mu;
  const auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= recs.size()) return;
      try {
        out[i] = analyzer.analyze(recs[i]->response_text).compound;
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        if (!failed.exchange(true)) {
          first_error = "scoring " + recs[i]->backend_id + " record " + recs[i]->request_key + ": " + e.what();
        }
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, recs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failed) throw ExternalAnalyzerError(first_error);
  return out;
}

struct ScoreSummary {
  std::string analyzer_id;
  std::string fingerprint;
};

// Writes every matrices/*.csv for the run. Throws MissingTranscriptError if a
// backend transcript is absent.
ScoreSummary score_run(const RunConfig& config, const RunPaths& paths, const std::string& analyzer_id,
                       std::size_t parallelism, const Log& log) {
  const auto analyzer = make_analyzer(config.analyzer_descriptor(analyzer_id));
  const std::string fingerprint = analyzer->fingerprint();
  const std::string lex = lexicon_checksum(config);
  const auto refusals = compile_refusals(config);

  for (const auto& backend : config.backends) {
    const fs::path tpath = paths.transcript(backend.backend_id);
    if (!fs::exists(tpath)) throw MissingTranscriptError("transcript not found: " + tpath.string());
    const auto store = TranscriptStore::load(tpath);
    const auto combos = combinations(config, backend);

    // Score each stored record once, even when several settings share it.
    std::vector<std::string> needed;
    std::set<std::string> seen;
    for (const auto& c : combos) {
      for (const auto& k : c.keys) {
        if (seen.insert(k).second) needed.push_back(k);
      }
    }
    std::vector<TranscriptRecord> found;
    for (const auto& k : needed) {
      if (auto r = store->find(k)) found.push_back(std::move(*r));
    }
    std::vector<const TranscriptRecord*> ptrs;
    for (const auto& r : found) ptrs.push_back(&r);
    const auto scores = score_texts(*analyzer, ptrs, parallelism);
    std::map<std::string, std::optional<double>> by_key;
    for (std::size_t i = 0; i < found.size(); ++i) {
      const bool refusal = std::any_of(refusals.begin(), refusals.end(), [&](const std::regex& re) {
        return std::regex_search(found[i].response_text, re);
      });
      by_key.emplace(found[i].request_key, refusal ? std::nullopt : std::optional<double>(scores[i]));
    }

    for (const auto& c : combos) {
      std::vector<ScoredResponse> responses;
      std::size_t missing = 0, dropped = 0;
      for (std::size_t i = 0; i < c.plan.size(); ++i) {
        const auto it = by_key.find(c.keys[i]);
        if (it == by_key.end()) {
          ++missing;
        } else if (!it->second) {
          ++dropped;
        } else {
          responses.push_back({c.plan[i].from.code, c.plan[i].to.code, *it->second});
        }
      }
      const auto* attr = config.attribute(c.attribute);
      const PairScoreMatrix m = aggregate(c.attribute, attr->roster, responses);
      std::vector<std::string> comments = {
          "run_id: " + config.run_id,
          "backend: " + backend.backend_id,
          "attribute: " + std::string(to_string(c.attribute)),
          "setting: " + std::string(to_string(c.setting)),
          "analyzer: " + analyzer_id,
          "analyzer_fingerprint: " + fingerprint,
          "lexicon_checksum: " + lex,
          "prompts: " + std::to_string(c.plan.size()),
          "missing_responses: " + std::to_string(missing),
          "dropped_refusals: " + std::to_string(dropped),
      };
      auto mean_comments = comments;
      mean_comments.push_back("values: mean compound score");
      auto count_comments = comments;
      count_comments.push_back("values: scored responses");
      write_file(paths.means(backend.backend_id, c.attribute, c.setting), score_means_to_csv(m, mean_comments));
      write_file(paths.counts(backend.backend_id, c.attribute, c.setting), score_counts_to_csv(m, count_comments));
      if (missing > 0 || dropped > 0) {
        log("note: ", backend.backend_id, " ", combo_name(c.attribute, c.setting), ": ", missing,
            " responses missing, ", dropped, " refusals dropped");
      }
    }
  }
  return {analyzer_id, fingerprint};
}

std::string comment_value(const std::vector<std::string>& comments, std::string_view key) {
  for (const auto& c : comments) {
    if (c.size() > key.size() + 1 && c.compare(0, key.size(), key) == 0 && c[key.size()] == ':') {
      std::string v = c.substr(key.size() + 1);
      v.erase(0, v.find_first_not_of(' '));
      return v;
    }
  }
  return {};
}

std::string md_matrix(const std::vector<std::string>& rows, const std::vector<std::string>& cols,
                      const std::function<std::optional<double>(const std::string&, const std::string&)>& cell,
                      const char* spec) {
  std::string out = "| from\\to |";
  for (const auto& c : cols) out += " " + c + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < cols.size(); ++i) out += "---:|";
  out += "\n";
  for (const auto& r : rows) {
    out += "| " + r + " |";
    for (const auto& c : cols) {
      const auto v = cell(r, c);
      out += " " + (v ? (spec ? fmt(spec, *v) : format_decimal(*v)) : std::string()) + " |";
    }
    out += "\n";
  }
  return out;
}

// Builds grid.csv and report.md. Throws if a reference cannot be loaded;
// in that case neither artifact is left behind.
void write_report(const RunConfig& config, const RunPaths& paths, const Log& log) {
  fs::remove(paths.grid());
  fs::remove(paths.report());

  std::map<AttributeKind, ReferenceMatrix> references;
  for (const auto& attr : config.attributes) {
    try {
      references.emplace(attr.kind, load_reference(attr.kind, attr.reference, attr.roster));
    } catch (const Error& e) {
      throw Error("reference for " + std::string(to_string(attr.kind)) + " (" + attr.reference.string() +
                  "): " + e.what());
    }
  }

  struct Cell {
    std::string backend;
    AttributeKind attribute;
    QuestionTypeSetting setting;
    std::optional<PairScoreMatrix> scores;
    std::vector<std::string> comments;
    CorrelationReport report;
  };
  std::vector<Cell> cells;
  std::vector<ScoreRun> runs;
  for (const auto& backend : config.backends) {
    for (const auto& attr : config.attributes) {
      for (auto setting : config.settings) {
        Cell cell{backend.backend_id, attr.kind, setting, std::nullopt, {}, {}};
        const fs::path mp = paths.means(backend.backend_id, attr.kind, setting);
        const fs::path cp = paths.counts(backend.backend_id, attr.kind, setting);
        if (fs::exists(mp) && fs::exists(cp)) {
          const std::string means = read_file(mp);
          cell.scores = score_matrix_from_csv(attr.kind, means, read_file(cp));
          cell.comments = parse_matrix_csv(means).comments;
          runs.push_back({backend.backend_id, setting, *cell.scores});
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  const auto grid = correlation_grid(runs, references);
  {
    std::size_t gi = 0;
    for (auto& cell : cells) {
      if (cell.scores) {
        cell.report = grid[gi++];
      } else {
        cell.report.backend_id = cell.backend;
        cell.report.attribute = cell.attribute;
        cell.report.setting = cell.setting;
        cell.report.error = "MissingScoresError";
        cell.report.error_detail = "no score matrix for this combination";
      }
    }
  }

  std::string analyzer = config.analyzer, fingerprint, lex = lexicon_checksum(config);
  for (const auto& cell : cells) {
    if (!cell.comments.empty()) {
      analyzer = comment_value(cell.comments, "analyzer");
      fingerprint = comment_value(cell.comments, "analyzer_fingerprint");
      lex = comment_value(cell.comments, "lexicon_checksum");
      break;
    }
  }

  // Footnotes for undefined cells, numbered in grid order.
  std::map<std::size_t, std::size_t> note_of;
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& r = cells[i].report;
    if (r.ok()) continue;
    note_of[i] = notes.size() + 1;
    notes.push_back(cells[i].backend + " " + combo_name(cells[i].attribute, cells[i].setting) + ": " + r.error +
                    ": " + r.error_detail);
  }

  std::vector<std::string> columns;
  for (const auto& attr : config.attributes) {
    for (auto s : config.settings) columns.push_back(combo_name(attr.kind, s));
  }
  const std::size_t per_backend = columns.size();

  std::string csv = "# run_id: " + config.run_id + "\n# analyzer: " + analyzer + "\n# analyzer_fingerprint: " +
                    fingerprint + "\n# lexicon_checksum: " + lex + "\n# cell: rho;p;n\n";
  for (std::size_t i = 0; i < notes.size(); ++i) csv += "# NA[" + std::to_string(i + 1) + "] " + notes[i] + "\n";
  csv += "backend";
  for (const auto& c : columns) csv += "," + c;
  csv += "\n";
  for (std::size_t b = 0; b < config.backends.size(); ++b) {
    csv += config.backends[b].backend_id;
    for (std::size_t k = 0; k < per_backend; ++k) csv += "," + format_grid_cell(cells[b * per_backend + k].report);
    csv += "\n";
  }

  std::string md;
  md += "# Inter-group sentiment report: " + config.run_id + "\n\n";
  md += "- run_id: `" + config.run_id + "`\n";
  md += "- analyzer: `" + analyzer + "` (fingerprint `" + fingerprint + "`)\n";
  md += "- lexicon checksum: `" + lex + "`\n";
  md += "- template set: `" + template_set_hash(config) + "`\n";
  md += "- repeats: " + std::to_string(config.repeats) + "\n";
  md += "- drop refusals: " + std::string(config.drop_refusals ? "yes" : "no") + "\n\n";
  md += "Scores are mean compound sentiment per (from, to) pair. Each grid cell reads `rho;p;n`: Pearson "
        "correlation with the reference poll matrix, two-sided p-value of the non-correlation test, and the "
        "number of paired cells.\n\n";

  md += "## Correlation grid\n\n| backend |";
  for (const auto& c : columns) md += " " + c + " |";
  md += "\n|---|";
  for (std::size_t i = 0; i < per_backend; ++i) md += "---|";
  md += "\n";
  for (std::size_t b = 0; b < config.backends.size(); ++b) {
    md += "| " + config.backends[b].backend_id + " |";
    for (std::size_t k = 0; k < per_backend; ++k) {
      const std::size_t i = b * per_backend + k;
      md += " " + format_grid_cell(cells[i].report);
      if (note_of.contains(i)) md += " [" + std::to_string(note_of[i]) + "]";
      md += " |";
    }
    md += "\n";
  }
  if (!notes.empty()) {
    md += "\n";
    for (std::size_t i = 0; i < notes.size(); ++i) md += "[" + std::to_string(i + 1) + "] " + notes[i] + "\n\n";
  } else {
    md += "\n";
  }

  for (const auto& attr : config.attributes) {
    const auto& ref = references.at(attr.kind);
    md += "## " + std::string(to_string(attr.kind)) + "\n\n";
    md += "### Reference (" + std::string(to_string(ref.unit)) + ")\n\n";
    if (!ref.source.empty()) md += "Source: " + ref.source + "\n\n";
    if (ref.cells.empty()) {
      md += "No data: the reference matrix has no cells.\n\n";
    } else {
      md += md_matrix(ref.rows, ref.cols, [&](const auto& r, const auto& c) { return ref.cell(r, c); }, nullptr) +
            "\n";
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& cell = cells[i];
      if (cell.attribute != attr.kind) continue;
      md += "### " + cell.backend + ", " + std::string(to_string(cell.setting)) + "\n\n";
      const auto& r = cell.report;
      if (!cell.scores || cell.scores->cells.empty()) {
        md += "No data: no scored responses for this combination.\n\n";
        continue;
      }
      if (r.ok()) {
        md += "rho = " + fmt("%.4f", *r.rho) + ", p = " + fmt("%.4g", *r.p_value) + ", n = " + std::to_string(r.n) +
              "\n\n";
      } else {
        md += "rho = NA, p = NA, n = " + std::to_string(r.n) + " [" + std::to_string(note_of[i]) + "]\n\n";
      }
      const auto& m = *cell.scores;
      md += md_matrix(
                m.rows, m.cols,
                [&](const auto& f, const auto& t) -> std::optional<double> {
                  const PairCell* pc = m.cell(f, t);
                  return pc ? std::optional<double>(pc->mean) : std::nullopt;
                },
                "%.4f") +
            "\n";
      std::size_t lo = SIZE_MAX, hi = 0;
      for (const auto& [_, pc] : m.cells) {
        lo = std::min(lo, pc.count);
        hi = std::max(hi, pc.count);
      }
      md += lo == hi ? "Responses per cell: " + std::to_string(lo) + "\n\n"
                     : "Responses per cell: " + std::to_string(lo) + " to " + std::to_string(hi) + "\n\n";
    }
  }

  write_file(paths.grid(), csv);
  write_file(paths.report(), md);
  log("wrote ", paths.grid().string(), " and ", paths.report().string());
}

nlohmann::json strip_volatile(nlohmann::json snapshot) {
  snapshot.erase("parallelism");
  return snapshot;
}

std::size_t effective_parallelism(const RunConfig& config, const RunOptions& options) {
  return options.parallelism.value_or(config.parallelism);
}

}  // namespace

std::string format_grid_cell(const CorrelationReport& r) {
  const std::string n = std::to_string(r.n);
  if (!r.ok() || !r.rho || !r.p_value) return "NA;NA;" + n;
  return fmt("%.4f", *r.rho) + ";" + fmt("%.4g", *r.p_value) + ";" + n;
}

std::string template_set_hash(const RunConfig& config) {
  const TemplateCatalog catalog = config.catalog();
  ojson j = ojson::array();
  for (const auto& t : catalog.all()) {
    j.push_back({{"id", t.id}, {"qtype", std::string(to_string(t.qtype))}, {"row_index", t.row_index},
                 {"pattern", t.pattern}});
  }
  ojson all = {{"templates", j}, {"mixed_rows", config.mixed_rows}, {"system_text", std::string(kSystemText)}};
  return sha256_hex(all.dump());
}

RunConfig load_run_config(const fs::path& outdir, const std::string& run_id) {
  const RunPaths paths(outdir, run_id);
  if (!fs::exists(paths.manifest())) {
    throw ConfigError("no run '" + run_id + "' under " + outdir.string() + " (missing " +
                      paths.manifest().string() + ")");
  }
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(paths.manifest()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(paths.manifest().string() + ": " + e.what());
  }
  if (!manifest.contains("config")) throw ConfigError(paths.manifest().string() + ": no config snapshot");
  RunConfig config = parse_config(manifest["config"], paths.root);
  config.output_dir = outdir;
  return config;
}

int cmd_run(const RunConfig& config, const RunOptions& options) {
  const Log log(options.log);
  const fs::path outdir = options.outdir.value_or(config.output_dir);
  const RunPaths paths(outdir, config.run_id);
  const std::size_t parallelism = effective_parallelism(config, options);
  const ojson snapshot = config_snapshot(config);
  DirLock lock(outdir);

  if (fs::exists(paths.manifest())) {
    const auto previous = nlohmann::json::parse(read_file(paths.manifest()), nullptr, false);
    if (previous.is_discarded() || !previous.contains("config") ||
        strip_volatile(previous["config"]) != strip_volatile(nlohmann::json(snapshot))) {
      throw ConfigError("run_id '" + config.run_id + "' already exists in " + outdir.string() +
                        " with a different configuration");
    }
    log("resuming run ", config.run_id);
  }
  fs::remove(paths.partial_marker());
  fs::create_directories(paths.transcripts_dir());
  const std::string started = utc_timestamp_now();

  // Fail before any exchange if the analyzer cannot be built.
  (void)make_analyzer(config.analyzer_descriptor(config.analyzer));

  std::vector<std::string> problems;
  ojson backends_json = ojson::object();
  ojson combos_json = ojson::array();
  for (const auto& backend : config.backends) {
    const auto combos = combinations(config, backend);
    std::vector<Prompt> plan;
    std::set<std::string> seen;
    for (const auto& c : combos) {
      for (std::size_t i = 0; i < c.plan.size(); ++i) {
        if (seen.insert(c.keys[i]).second) plan.push_back(c.plan[i]);
      }
    }
    ojson bj;
    bj["kind"] = backend.kind == BackendKind::replay ? "replay" : "http_chat";
    bj["unique_prompts"] = plan.size();
    std::shared_ptr<TranscriptStore> store = TranscriptStore::open(paths.transcript(backend.backend_id));
    std::vector<std::string> errors;
    try {
      Gateway gateway(std::shared_ptr<ChatBackend>(make_backend(backend)), store, config.run_id);
      log("backend ", backend.backend_id, ": ", plan.size(), " prompts, parallelism ", parallelism);
      const PlanResult result = gateway.run_plan(plan, parallelism, config.max_failure_fraction);
      log("backend ", backend.backend_id, ": ", result.records.size(), " records (", result.cache_hits,
          " from cache), ", result.failures.size(), " failures");
      for (const auto& f : result.failures) errors.push_back(f.error + ": " + f.message);
    } catch (const RunAbortedError& e) {
      errors.push_back(std::string("RunAbortedError: ") + e.what());
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
    if (!errors.empty()) {
      problems.push_back("backend " + backend.backend_id + ": " + std::to_string(errors.size()) +
                         " failed prompt(s); first: " + errors.front());
    }
    bj["failures"] = errors.size();
    ojson first = ojson::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(errors.size(), 10); ++i) first.push_back(errors[i]);
    bj["first_errors"] = first;
    backends_json[backend.backend_id] = bj;

    for (const auto& c : combos) {
      std::size_t present = 0;
      for (const auto& k : c.keys) present += store->find(k) ? 1 : 0;
      combos_json.push_back({{"backend", backend.backend_id},
                             {"attribute", std::string(to_string(c.attribute))},
                             {"setting", std::string(to_string(c.setting))},
                             {"prompts", c.plan.size()},
                             {"records", present}});
    }
  }

  ScoreSummary summary{config.analyzer, {}};
  try {
    summary = score_run(config, paths, config.analyzer, parallelism, log);
  } catch (const Error& e) {
    problems.push_back(std::string("scoring: ") + e.what());
  }
  if (problems.empty() || fs::exists(paths.matrices_dir())) {
    try {
      write_report(config, paths, log);
    } catch (const Error& e) {
      problems.push_back(std::string("report: ") + e.what());
    }
  }

  ojson manifest;
  manifest["run_id"] = config.run_id;
  manifest["tool_version"] = std::string(kToolVersion);
  manifest["status"] = problems.empty() ? "complete" : "partial";
  manifest["started_at"] = started;
  manifest["finished_at"] = utc_timestamp_now();
  manifest["lexicon_checksum"] = lexicon_checksum(config);
  manifest["analyzer"] = {{"id", summary.analyzer_id}, {"fingerprint", summary.fingerprint}};
  manifest["template_set_hash"] = template_set_hash(config);
  manifest["backends"] = backends_json;
  manifest["combinations"] = combos_json;
  manifest["problems"] = problems;
  manifest["config"] = snapshot;
  write_file(paths.manifest(), manifest.dump(2) + "\n");

  if (!problems.empty()) {
    std::string marker = "Run " + config.run_id + " is incomplete.\n";
    for (const auto& p : problems) marker += p + "\n";
    write_file(paths.partial_marker(), marker);
    for (const auto& p : problems) log("error: ", p);
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_score(const fs::path& outdir, const std::string& run_id, const std::optional<std::string>& analyzer_id,
              const RunOptions& options) {
  const Log log(options.log);
  const RunConfig config = load_run_config(outdir, run_id);
  const RunPaths paths(outdir, run_id);
  DirLock lock(outdir);
  const std::string id = analyzer_id.value_or(config.analyzer);
  config.analyzer_descriptor(id);
  score_run(config, paths, id, effective_parallelism(config, options), log);
  try {
    write_report(config, paths, log);
  } catch (const Error& e) {
    log("error: report: ", e.what());
    write_file(paths.partial_marker(), "Report for run " + run_id + " could not be built.\n" + e.what() + "\n");
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_report(const fs::path& outdir, const std::string& run_id, const RunOptions& options) {
  const Log log(options.log);
  const RunConfig config = load_run_config(outdir, run_id);
  const RunPaths paths(outdir, run_id);
  DirLock lock(outdir);
  try {
    write_report(config, paths, log);
  } catch (const Error& e) {
    log("error: report: ", e.what());
    write_file(paths.partial_marker(), "Report for run " + run_id + " could not be built.\n" + e.what() + "\n");
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace igs
