// chartlink: batch entry points over a corpus of cases.
//
//   chartlink run <corpus> [--out DIR] [--jobs N]
//   chartlink eval <corpus> [--gold DIR] [--format table|json] [--report FILE]
//   chartlink overlays <case> [--group ID] [--emit specs|png|both] [--out DIR]
//   chartlink annotate-video <case> <transcript.json> <frames> [--out DIR]
//   chartlink serve [--port N] [--data-dir DIR]
//
// Exit status: 0 success, 1 pipeline error, 2 usage error.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <regex>
#include <thread>

#include "CLI11.hpp"
#include "chartlink/config.h"
#include "chartlink/corpus.h"
#include "chartlink/errors.h"
#include "chartlink/metrics.h"
#include "chartlink/overlay.h"
#include "chartlink/pipeline.h"
#include "chartlink/raster.h"
#include "chartlink/service.h"
#include "chartlink/transcript.h"

namespace fs = std::filesystem;
using namespace chartlink;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config_path;
  std::string backend;
  std::string fixtures;
  std::optional<double> threshold;
};

void AddCommon(CLI::App *command, CommonFlags &flags) {
  command->add_option("--config", flags.config_path, "configuration file (JSON)");
  command->add_option("--backend", flags.backend, "NLP backend: fixture or external")
      ->check(CLI::IsMember({"fixture", "external"}));
  command->add_option("--fixtures", flags.fixtures,
                      "fixture file or directory (default: the corpus itself)");
  command->add_option("--threshold", flags.threshold, "semantic similarity threshold")
      ->check(CLI::Range(0.0, 1.0));
}

Config BuildConfig(const CommonFlags &flags, const fs::path &default_fixtures) {
  std::optional<fs::path> path;
  if (!flags.config_path.empty()) {
    if (!fs::is_regular_file(flags.config_path)) {
      throw UsageError("config file not found: " + flags.config_path);
    }
    path = flags.config_path;
  }
  Config config = LoadConfig(path);
  if (!flags.backend.empty()) config.nlp_backend = flags.backend;
  if (flags.threshold) config.semantic_threshold = *flags.threshold;
  if (!flags.fixtures.empty()) {
    config.fixture_path = flags.fixtures;
  } else if (config.fixture_path.empty()) {
    config.fixture_path = default_fixtures;
  }
  ValidateConfig(config);
  return config;
}

MatchOptions MatchOptionsOf(const Config &config) {
  MatchOptions options;
  options.semantic_threshold = config.semantic_threshold;
  return options;
}

// A single case directory or every case directory under a corpus.
std::vector<fs::path> CaseDirs(const fs::path &root) {
  if (!fs::is_directory(root)) throw UsageError("directory not found: " + root.string());
  if (fs::is_regular_file(root / "encoding.json")) return {root};
  return ListCases(root);
}

void Report(const std::string &message) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cerr << "error: " << message << "\n";
}

// Runs `work` for every index on up to `jobs` threads; returns the number
// of failures (each already reported).
int ParallelFor(size_t count, int jobs, const std::function<void(size_t)> &work) {
  std::atomic<size_t> next{0};
  std::atomic<int> failures{0};
  auto worker = [&] {
    for (size_t i = next++; i < count; i = next++) {
      try {
        work(i);
      } catch (const std::exception &e) {
        Report(e.what());
        ++failures;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int t = 1; t < std::max(1, jobs); ++t) threads.emplace_back(worker);
  worker();
  for (std::thread &t : threads) t.join();
  return failures;
}

int RunCommand(const fs::path &corpus, const std::string &out_dir, int jobs,
               const CommonFlags &flags) {
  std::vector<fs::path> cases = CaseDirs(corpus);
  Config config = BuildConfig(flags, corpus);
  std::unique_ptr<NlpBackend> backend = MakeBackend(config);
  EmbeddingCache embeddings(*backend);
  MatchOptions options = MatchOptionsOf(config);
  std::vector<std::string> lines(cases.size());

  int failures = ParallelFor(cases.size(), jobs, [&](size_t i) {
    Case c = LoadCase(cases[i]);
    fs::path target = out_dir.empty() ? c.dir : fs::path(out_dir) / c.case_id;
    fs::create_directories(target);
    LinksRecord previous = LoadLinks(target);
    PipelineOutput out =
        RunPipeline(c.paragraph, c.encoding, *backend, &embeddings, options, previous.links);
    if (!previous.exists || !SameStoredLinks(previous, {true, 0, out.links, out.groups})) {
      SaveLinks(target, out.links, out.groups);
    }
    for (const std::string &warning : out.warnings) {
      std::cerr << "warning: " << c.case_id << ": " << warning << "\n";
    }
    lines[i] = c.case_id + ": " + std::to_string(out.links.size()) + " links, " +
               std::to_string(out.groups.size()) + " groups";
  });
  for (const std::string &line : lines) {
    if (!line.empty()) std::cout << line << "\n";
  }
  return failures ? 1 : 0;
}

int EvalCommand(const fs::path &corpus, const std::string &gold_dir, const std::string &format,
                const std::string &report_path, int jobs, const CommonFlags &flags) {
  std::vector<fs::path> cases = CaseDirs(corpus);
  if (!gold_dir.empty() && !fs::is_directory(gold_dir)) {
    throw UsageError("gold directory not found: " + gold_dir);
  }
  Config config = BuildConfig(flags, corpus);
  std::unique_ptr<NlpBackend> backend;
  std::once_flag backend_once;
  std::unique_ptr<EmbeddingCache> embeddings;
  MatchOptions options = MatchOptionsOf(config);
  std::vector<CaseInput> inputs(cases.size());
  std::vector<std::string> warnings(cases.size());

  int failures = ParallelFor(cases.size(), jobs, [&](size_t i) {
    Case c = LoadCase(cases[i]);
    CaseInput &input = inputs[i];
    input.case_id = c.case_id;
    input.chart_type = std::string(ToString(c.encoding.chart_type()));

    fs::path gold_path = c.dir / "gold.json";
    if (!gold_dir.empty()) {
      gold_path = fs::path(gold_dir) / c.case_id / "gold.json";
      if (!fs::exists(gold_path)) gold_path = fs::path(gold_dir) / (c.case_id + ".json");
    }
    if (fs::exists(gold_path)) {
      GoldAnnotation gold = ImportGold(gold_path, c);
      input.gold = gold.groups;
      for (const std::string &w : gold.warnings) warnings[i] += c.case_id + ": " + w + "\n";
    }

    LinksRecord stored = LoadLinks(c.dir);
    if (stored.exists) {
      input.pred = ToScoredGroups(stored.groups, stored.links);
    } else {
      std::call_once(backend_once, [&] {
        backend = MakeBackend(config);
        embeddings = std::make_unique<EmbeddingCache>(*backend);
      });
      PipelineOutput out = RunPipeline(c.paragraph, c.encoding, *backend, embeddings.get(), options);
      input.pred = ToScoredGroups(out.groups, out.links);
    }
  });
  if (failures) return 1;
  for (const std::string &w : warnings) std::cerr << (w.empty() ? "" : "warning: " + w);

  EvalReport report = EvaluateCorpus(inputs);
  for (const std::string &w : report.warnings) std::cerr << "warning: " << w << "\n";
  if (report.cases.empty()) {
    Report("no case has a gold annotation");
    return 1;
  }
  if (format == "json") {
    std::cout << CanonicalJson(ReportToJson(report));
  } else {
    std::cout << ReportToTable(report);
  }
  if (!report_path.empty()) WriteFileAtomically(report_path, CanonicalJson(ReportToJson(report)));
  return 0;
}

// Stored links of the case, or a fresh in-memory run when none exist.
LinksRecord LinksFor(const Case &c, const Config &config) {
  LinksRecord record = LoadLinks(c.dir);
  if (record.exists) return record;
  std::unique_ptr<NlpBackend> backend = MakeBackend(config);
  EmbeddingCache embeddings(*backend);
  PipelineOutput out = RunPipeline(c.paragraph, c.encoding, *backend, &embeddings,
                                   MatchOptionsOf(config));
  return {true, 0, out.links, out.groups};
}

int OverlaysCommand(const fs::path &case_dir, const std::string &group_id,
                    const std::string &emit, const std::string &out_dir,
                    const CommonFlags &flags) {
  if (!fs::is_directory(case_dir)) throw UsageError("case directory not found: " + case_dir.string());
  Case c = LoadCase(case_dir);
  Config config = BuildConfig(flags, case_dir);
  LinksRecord record = LinksFor(c, config);

  std::vector<const GroupedLink *> groups;
  for (const GroupedLink &g : record.groups) {
    if (group_id.empty() || g.id == group_id) groups.push_back(&g);
  }
  if (!group_id.empty() && groups.empty()) throw UsageError("unknown group " + group_id);

  fs::path target = out_dir.empty() ? c.dir / "overlays" : fs::path(out_dir);
  fs::create_directories(target);
  Image chart = ReadPng(c.chart_path);
  json doc = json::array();
  for (const GroupedLink *g : groups) {
    std::vector<OverlaySpec> specs = BuildOverlays(*g, record.links, c.encoding, config.overlay);
    json list = json::array();
    for (const OverlaySpec &spec : specs) list.push_back(OverlayToJson(spec));
    doc.push_back({{"groupId", g->id}, {"specs", list}});
    if (emit != "specs" && !specs.empty()) {
      fs::path png = target / (g->id + ".png");
      WritePng(Composite(chart, specs, c.encoding.image_size()), png);
      std::cout << png.string() << "\n";
    }
  }
  if (emit != "png") {
    fs::path specs_path = target / "overlays.json";
    WriteFileAtomically(specs_path, CanonicalJson(doc));
    std::cout << specs_path.string() << "\n";
  }
  return 0;
}

// Pastes `patch` into `frame` at (x, y), clipping at the frame border.
void Paste(Image &frame, const Image &patch, int x, int y) {
  for (int r = 0; r < patch.height; ++r) {
    for (int col = 0; col < patch.width; ++col) {
      int fx = x + col, fy = y + r;
      if (fx < 0 || fy < 0 || fx >= frame.width || fy >= frame.height) continue;
      std::copy_n(patch.at(col, r), 4, frame.at(fx, fy));
    }
  }
}

Image Crop(const Image &frame, int x, int y, int w, int h) {
  Image out(w, h);
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) {
      int fx = x + col, fy = y + r;
      if (fx < 0 || fy < 0 || fx >= frame.width || fy >= frame.height) continue;
      std::copy_n(frame.at(fx, fy), 4, out.at(col, r));
    }
  }
  return out;
}

int AnnotateVideoCommand(const fs::path &case_dir, const fs::path &transcript_path,
                         const fs::path &frames_dir, const std::string &out_dir,
                         const std::vector<int> &origin, const CommonFlags &flags) {
  if (!fs::is_directory(case_dir)) throw UsageError("case directory not found: " + case_dir.string());
  if (!fs::is_regular_file(transcript_path)) {
    throw UsageError("transcript not found: " + transcript_path.string());
  }
  if (!fs::is_directory(frames_dir)) throw UsageError("frames directory not found: " + frames_dir.string());
  Case c = LoadCase(case_dir);
  Config config = BuildConfig(flags, case_dir);
  std::unique_ptr<NlpBackend> backend = MakeBackend(config);
  EmbeddingCache embeddings(*backend);

  json transcript_doc;
  try {
    transcript_doc = json::parse(ReadFile(transcript_path));
  } catch (const json::parse_error &e) {
    throw ParseError("", transcript_path.string() + ": " + e.what());
  }
  TranscriptOptions options;
  options.match = MatchOptionsOf(config);
  options.style = config.overlay;
  options.final_hold = config.transcript_final_hold;
  std::vector<OverlayEvent> events = BuildOverlayEvents(ParseTranscript(transcript_doc),
                                                        c.encoding, *backend, &embeddings,
                                                        options);

  fs::path target = out_dir.empty() ? fs::path(frames_dir.string() + "_annotated") : fs::path(out_dir);
  fs::create_directories(target);
  static const std::regex frame_name(R"(frame_(\d+)\.png)");
  int ox = origin.size() == 2 ? origin[0] : 0;
  int oy = origin.size() == 2 ? origin[1] : 0;
  ImageSize chart = c.encoding.image_size();
  int written = 0, annotated = 0;
  std::vector<fs::path> frames;
  for (const auto &entry : fs::directory_iterator(frames_dir)) frames.push_back(entry.path());
  std::sort(frames.begin(), frames.end());
  for (const fs::path &path : frames) {
    std::smatch match;
    std::string name = path.filename().string();
    if (!std::regex_match(name, match, frame_name)) continue;
    double t = std::stod(match[1]) / 1000.0;
    const OverlayEvent *active = nullptr;
    for (const OverlayEvent &event : events) {
      if (event.t_show <= t && t < event.t_hide) active = &event;
    }
    if (!active) {
      fs::copy_file(path, target / name, fs::copy_options::overwrite_existing);
    } else {
      Image frame = ReadPng(path);
      Image region = Crop(frame, ox, oy, chart.width, chart.height);
      Paste(frame, Composite(region, active->specs), ox, oy);
      WritePng(frame, target / name);
      ++annotated;
    }
    ++written;
  }
  std::cout << written << " frames written to " << target.string() << ", " << annotated
            << " annotated across " << events.size() << " events\n";
  return 0;
}

int ServeCommand(std::optional<int> port, const std::string &data_dir, const CommonFlags &flags) {
  Config config = BuildConfig(flags, "");
  if (port) config.port = *port;
  if (!data_dir.empty()) config.data_dir = data_dir;
  if (config.fixture_path.empty()) config.fixture_path = config.data_dir;
  fs::create_directories(config.data_dir);
  std::shared_ptr<NlpBackend> backend = MakeBackend(config);
  Service service(config, backend);
  std::cout << "listening on " << config.host << ":" << config.port << std::endl;
  if (!service.Listen()) {
    Report("cannot listen on " + config.host + ":" + std::to_string(config.port));
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Links paragraph phrases to chart elements and renders overlays."};
  app.require_subcommand(1);
  CommonFlags flags;
  int jobs = 1;

  std::string corpus, out_dir, gold_dir, format = "table", report_path;
  CLI::App *run = app.add_subcommand("run", "match and group every case, writing links.json");
  run->add_option("corpus", corpus, "corpus or case directory")->required();
  run->add_option("--out", out_dir, "write links under DIR/<case>/ instead of the case");
  run->add_option("--jobs", jobs, "cases processed in parallel")->check(CLI::PositiveNumber);
  AddCommon(run, flags);

  CLI::App *eval = app.add_subcommand("eval", "score links against gold annotations");
  eval->add_option("corpus", corpus, "corpus or case directory")->required();
  eval->add_option("--gold", gold_dir, "gold files as DIR/<case>/gold.json or DIR/<case>.json");
  eval->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
  eval->add_option("--report", report_path, "also write the JSON report to FILE");
  eval->add_option("--jobs", jobs, "cases processed in parallel")->check(CLI::PositiveNumber);
  AddCommon(eval, flags);

  std::string case_dir, group_id, emit = "both";
  CLI::App *overlays = app.add_subcommand("overlays", "export overlay specs and renderings");
  overlays->add_option("case", case_dir, "case directory")->required();
  overlays->add_option("--group", group_id, "only this grouped link");
  overlays->add_option("--emit", emit, "specs, png or both")
      ->check(CLI::IsMember({"specs", "png", "both"}));
  overlays->add_option("--out", out_dir, "output directory (default: <case>/overlays)");
  AddCommon(overlays, flags);

  std::string transcript, frames;
  std::vector<int> origin;
  CLI::App *video = app.add_subcommand("annotate-video",
                                       "composite transcript overlays onto frame_<ms>.png files");
  video->add_option("case", case_dir, "case directory")->required();
  video->add_option("transcript", transcript, "transcript JSON")->required();
  video->add_option("frames", frames, "directory of frame_<ms>.png files")->required();
  video->add_option("--out", out_dir, "output directory (default: <frames>_annotated)");
  video->add_option("--origin", origin, "chart position inside the frame: X Y")->expected(2);
  AddCommon(video, flags);

  std::optional<int> port;
  std::string data_dir;
  CLI::App *serve = app.add_subcommand("serve", "start the HTTP service");
  serve->add_option("--port", port, "listening port");
  serve->add_option("--data-dir", data_dir, "case storage directory");
  AddCommon(serve, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*run) return RunCommand(corpus, out_dir, jobs, flags);
    if (*eval) return EvalCommand(corpus, gold_dir, format, report_path, jobs, flags);
    if (*overlays) return OverlaysCommand(case_dir, group_id, emit, out_dir, flags);
    if (*video) return AnnotateVideoCommand(case_dir, transcript, frames, out_dir, origin, flags);
    if (*serve) return ServeCommand(port, data_dir, flags);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
