// Runs every acceptance criterion and prints one PASS/FAIL line for each.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "chartlink/corpus.h"
#include "chartlink/grouping.h"
#include "chartlink/matching.h"
#include "chartlink/metrics.h"
#include "chartlink/overlay.h"
#include "chartlink/pipeline.h"
#include "chartlink/service.h"
#include "chartlink/transcript.h"
#include "httplib.h"
#include "oracles/grouping_oracle.h"
#include "oracles/metrics_oracle.h"
#include "test_util.h"

namespace chartlink {
namespace {

using nlohmann::json;
using namespace chartlink::testing;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(double v, int digits = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, v != 0 && std::abs(v) < 1e-3 ? "%.*e" : "%.*f", digits, v);
  return buffer;
}

bool Within(double value, double target, double tolerance) {
  return std::abs(value - target) <= tolerance + 1e-12;
}

struct Loaded {
  Case c;
  std::shared_ptr<FixtureBackend> backend;
  SyntaxAnnotation annotation;
  std::unique_ptr<EmbeddingCache> cache;

  MatchContext Context() const { return MatchContext{annotation, c.encoding, cache.get(), {}, {}}; }
};

Loaded Load(const fs::path &dir, const fs::path &fixture = {}) {
  Loaded l{LoadCase(dir), fixture.empty() ? BackendFor(dir) : BackendForFile(fixture), {}, {}};
  l.annotation = l.backend->Annotate(l.c.paragraph);
  l.cache = std::make_unique<EmbeddingCache>(*l.backend);
  return l;
}

Outcome F1Arithmetic() {
  double a = F1(0.65, 0.47);
  double b = F1(1, 0.5);
  bool agree = Within(a, oracle::Harmonic(0.65, 0.47), 1e-12) &&
               Within(b, oracle::Harmonic(1, 0.5), 1e-12);
  bool ok_a = Within(a, 0.55, 0.005);
  bool ok_b = Within(b, 0.66, 0.005);
  return {agree && ok_a && ok_b, "f1(0.65,0.47)=" + Fmt(a) + (ok_a ? " ok" : " outside 0.55+-0.005") +
                                     ", f1(1,0.5)=" + Fmt(b) +
                                     (ok_b ? " ok" : " outside 0.66+-0.005")};
}

Outcome MetricOracle() {
  std::mt19937 rng(20240611);
  const int kCases = 1500;
  double worst = 0;
  for (int i = 0; i < kCases; ++i) {
    auto pred = RandomGroups(rng);
    auto gold = RandomGroups(rng);
    Score got = CaseScore(ToScored(pred), ToScored(gold));
    Score want = oracle::CaseScore(pred, gold);
    worst = std::max({worst, std::abs(got.precision - want.precision),
                      std::abs(got.recall - want.recall), std::abs(got.f1 - want.f1)});
  }
  return {worst <= 1e-9, std::to_string(kCases) + " cases, max deviation " + Fmt(worst, 1)};
}

Outcome Angular() {
  auto v = [](std::vector<double> c) { return EmbeddingVector{std::move(c)}; };
  bool refs = Within(AngularSimilarity(v({1, 2, 3}), v({1, 2, 3})), 1.0, 1e-12) &&
              Within(AngularSimilarity(v({1, 0, 0}), v({0, 4, 0})), 0.5, 1e-12) &&
              Within(AngularSimilarity(v({1, -2, 0.5}), v({-1, 2, -0.5})), 0.0, 1e-12);
  std::mt19937 rng(11);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> k(0.001, 1000);
  bool scaled = true;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(6), b(6);
    for (double &x : a) x = n(rng);
    for (double &x : b) x = n(rng);
    double base = AngularSimilarity(v(a), v(b));
    double s1 = k(rng), s2 = k(rng);
    std::vector<double> ka = a, kb = b;
    for (double &x : ka) x *= s1;
    for (double &x : kb) x *= s2;
    scaled = scaled && Within(AngularSimilarity(v(ka), v(b)), base, 1e-9) &&
             Within(AngularSimilarity(v(a), v(kb)), base, 1e-9);
  }
  Loaded l = Load(FixturesDir() / "semantic");
  double close = AngularSimilarity(l.cache->Get("religious wear"),
                                   l.cache->Get("religious items or clothing"));
  double far = AngularSimilarity(l.cache->Get("accuracy"), l.cache->Get("zebra"));
  bool gate = kDefaultSemanticThreshold == 0.78 && close >= 0.78 && far < 0.78;
  std::vector<IndividualLink> links = MatchSemantic(l.Context());
  bool admitted = std::any_of(links.begin(), links.end(), [](const IndividualLink &x) {
    return x.phrase.text == "religious wear" && x.element_id == "x-label-religious-items-or-clothing";
  });
  return {refs && scaled && gate && admitted,
          std::string("reference points ") + (refs ? "ok" : "off") + ", scaling " +
              (scaled ? "ok" : "off") + ", admitted pair " + Fmt(close) + ", rejected pair " +
              Fmt(far)};
}

Outcome DepType() {
  auto start = std::chrono::steady_clock::now();
  Loaded l = Load(CorpusDir() / "deptype");
  MatchResult result = RunMatching(l.Context());
  std::vector<IndividualLink> links = TransferChannels(result.links, l.c.encoding).links;
  std::vector<GroupedLink> groups = FindGroups(l.annotation, links);
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream got;
  for (const auto &x : links) got << "\"" << x.phrase.text << "\"->" << x.element_id << " ";
  bool ok = links.size() == 3 && links[0].phrase.text == "100 million" &&
            links[0].channel == ChannelName::kX &&
            l.c.encoding.element(links[0].element_id)->role == TextRole::kXAxisLabel &&
            links[1].phrase.text == "DepType" && links[1].element_id == "legend-deptype" &&
            links[2].phrase.text == "27.0%" && links[2].channel == ChannelName::kY &&
            links[2].provenance.op == MatchOperator::kNumerical && groups.size() == 1 &&
            groups[0].channels ==
                std::set<ChannelName>{ChannelName::kX, ChannelName::kY, ChannelName::kColor} &&
            seconds < 1.0;
  return {ok, got.str() + "| " + std::to_string(groups.size()) + " group(s), " + Fmt(seconds, 3) +
                  " s"};
}

Outcome TypeTwo() {
  std::set<ChannelName> both = {ChannelName::kX, ChannelName::kY};
  Loaded l = Load(FixturesDir() / "badnumeric_b");
  const EntityMention &entity = l.annotation.entities.at(0);
  ChannelName first = ResolveAxisAmbiguity(l.Context(), entity, both);
  Loaded flipped = Load(FixturesDir() / "badnumeric_b",
                        FixturesDir() / "badnumeric_b" / "flipped-tree.json");
  ChannelName second = ResolveAxisAmbiguity(flipped.Context(), flipped.annotation.entities.at(0), both);
  std::vector<IndividualLink> links = MatchNumeric(l.Context()).links;
  bool linked = links.size() == 1 && links[0].phrase.text == "30%" &&
                links[0].channel == ChannelName::kX;
  return {first == ChannelName::kX && second == ChannelName::kY && linked,
          "\"30%\" -> " + std::string(ToString(first)) + ", flipped tree -> " +
              std::string(ToString(second))};
}

Outcome TypeOne() {
  Loaded l = Load(FixturesDir() / "badnumeric_a");
  std::vector<IndividualLink> links = MatchNumeric(l.Context()).links;
  bool has_entity = l.annotation.entities.size() == 1 &&
                    l.annotation.Slice(l.annotation.entities[0].span) == "72%";
  return {has_entity && links.empty(),
          std::to_string(links.size()) + " numeric link(s) for \"72%\""};
}

Outcome GroupingOracle() {
  int mismatches = CountOracleMismatches(7777, 100);
  return {mismatches == 0, "100 trees, " + std::to_string(mismatches) + " mismatch(es)"};
}

Outcome OverlayGeometry() {
  Loaded l = Load(CorpusDir() / "oracle");
  PipelineOutput out = RunPipeline(l.c.paragraph, l.c.encoding, *l.backend, l.cache.get(), {});
  std::optional<Point> point;
  for (const GroupedLink &g : out.groups) {
    for (const OverlaySpec &spec : BuildOverlays(g, out.links, l.c.encoding)) {
      if (spec.kind == OverlayKind::kTargetPoint) point = spec.point;
    }
  }
  Scale x = Scale::Linear(0, 10, 40, 440);
  Scale y = Scale::Linear(0, 100, 400, 20);
  bool endpoints = ScaleToPixel(x, 0.0) == 40 && ScaleToPixel(x, 10.0) == 440 &&
                   ScaleToPixel(y, 0.0) == 400 && ScaleToPixel(y, 100.0) == 20;
  if (!point) return {false, "no target point built"};
  bool ok = endpoints && Within(point->x, 440, 0.01) && Within(point->y, 34.31, 0.01);
  return {ok, "target point (" + Fmt(point->x, 3) + ", " + Fmt(point->y, 3) +
                  "), expected (440, 34.31+-0.01); endpoints " + (endpoints ? "exact" : "off")};
}

Outcome Compositing() {
  const int w = 60, h = 30;
  Image card(w, h);
  const Rgb colors[3] = {{200, 30, 30}, {30, 160, 60}, {40, 70, 210}};
  int target_count = 0;
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      int which = (px * 7 + py * 3) % 3;
      const Rgb &c = colors[which];
      std::uint8_t *p = card.at(px, py);
      p[0] = c.r;
      p[1] = c.g;
      p[2] = c.b;
      p[3] = 255;
      if (which == 1) ++target_count;
    }
  }
  OverlaySpec spec;
  spec.kind = OverlayKind::kColorFilter;
  spec.color = colors[1];
  spec.style.dim_alpha = 0.3;
  Image out = Composite(card, std::span<const OverlaySpec>(&spec, 1));
  int full = 0;
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) full += out.at(px, py)[3] == 255 ? 1 : 0;
  }
  spec.style.dim_alpha = 1.0;
  bool noop = Composite(card, std::span<const OverlaySpec>(&spec, 1)).rgba == card.rgba;
  return {full == target_count && noop,
          std::to_string(full) + " full-alpha pixels for " + std::to_string(target_count) +
              " target pixels; dim 1.0 " + (noop ? "identical" : "changed bytes")};
}

Outcome ServiceLoop() {
  TempDir tmp;
  CopyCase(FixturesDir() / "erroneous_a", tmp.path());
  Config config;
  config.data_dir = tmp.path();
  auto backend = std::make_shared<FixtureBackend>();
  backend->AddDirectory(tmp.path());
  Service service(config, backend);
  int port = service.BindToAnyPort();
  std::thread server([&] { service.ListenAfterBind(); });
  httplib::Client client("127.0.0.1", port);
  Outcome outcome;
  try {
    auto run = client.Post("/cases/erroneous_a/links:run", "", "application/json");
    json before = json::parse(run->body);
    const std::string link = "l-37-40-x-label-80";
    json patch = {{"action", "reassign"}, {"elementId", "y-label-80"}, {"revision", before["revision"]}};
    auto edited = client.Patch("/cases/erroneous_a/links/" + link, patch.dump(), "application/json");
    json after_edit = json::parse(edited->body);
    json regroup_body = {{"revision", after_edit["revision"]}};
    auto regrouped =
        client.Post("/cases/erroneous_a/links:regroup", regroup_body.dump(), "application/json");
    json groups = json::parse(regrouped->body)["groupedLinks"];
    auto rerun = client.Post("/cases/erroneous_a/links:run", "", "application/json");
    json final_record = json::parse(rerun->body);
    std::string status;
    for (const json &l : final_record["individualLinks"]) {
      if (l["id"] == link) status = l["status"];
    }
    bool corrected = groups.size() == 1 &&
                     groups[0]["channels"] == json({"x-position", "y-position"}) &&
                     std::find(groups[0]["memberIds"].begin(), groups[0]["memberIds"].end(),
                               link) != groups[0]["memberIds"].end();
    outcome.pass = before["groupedLinks"].size() == 2 && edited->status == 200 &&
                   regrouped->status == 200 && corrected && status == "edited" &&
                   final_record["groupedLinks"].size() == 1;
    outcome.detail = std::to_string(before["groupedLinks"].size()) + " groups before, " +
                     std::to_string(groups.size()) + " after regroup; rerun status '" + status + "'";
  } catch (const std::exception &e) {
    outcome = {false, e.what()};
  }
  service.Stop();
  server.join();
  return outcome;
}

fs::path CopyCorpus(const TempDir &tmp) {
  fs::path root = tmp / "corpus";
  for (const fs::path &dir : ListCases(CorpusDir())) CopyCase(dir, root);
  return root;
}

std::string Quote(const fs::path &p) { return "'" + p.string() + "'"; }

Outcome Determinism() {
  TempDir tmp;
  fs::path corpus = CopyCorpus(tmp);
  std::string cli = Quote(CliPath());
  if (RunCommand(cli + " run " + Quote(corpus)) != 0) return {false, "first run failed"};
  std::map<std::string, std::string> first;
  for (const fs::path &dir : ListCases(corpus)) first[dir.filename()] = ReadFile(dir / "links.json");
  for (const fs::path &dir : ListCases(corpus)) fs::remove(dir / "links.json");
  if (RunCommand(cli + " run " + Quote(corpus)) != 0) return {false, "second run failed"};
  int differing = 0;
  for (const fs::path &dir : ListCases(corpus)) {
    if (ReadFile(dir / "links.json") != first[dir.filename()]) ++differing;
  }
  return {differing == 0 && !first.empty(),
          std::to_string(first.size()) + " links files, " + std::to_string(differing) + " differ"};
}

Outcome Evaluation() {
  TempDir tmp;
  fs::path corpus = CopyCorpus(tmp);
  fs::path report = tmp / "report.json";
  auto start = std::chrono::steady_clock::now();
  int code = RunCommand(Quote(CliPath()) + " eval " + Quote(corpus) + " --format json --report " +
                        Quote(report));
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (code != 0) return {false, "eval exited with " + std::to_string(code)};
  json doc = json::parse(ReadFile(report));
  double mean = doc["meanF1"];
  size_t cases = doc["cases"].size();
  return {cases >= 5 && mean >= 0.9 && seconds < 10,
          std::to_string(cases) + " cases, mean F1 " + Fmt(mean, 3) + ", " + Fmt(seconds, 2) + " s"};
}

Outcome Transcript() {
  Loaded l = Load(CorpusDir() / "numeracy");
  auto segments = ParseTranscript(json::parse(ReadFile(CorpusDir() / "numeracy" / "transcript.json")));
  std::vector<TranscriptSegment> first_two(segments.begin(), segments.begin() + 2);
  auto events = BuildOverlayEvents(first_two, l.c.encoding, *l.backend, l.cache.get(), {});
  if (events.empty()) return {false, "no events"};
  const OverlayEvent &e = events[0];
  bool ok = e.segment_index == 0 && !e.specs.empty() && e.t_hide == segments[1].t_start;
  return {ok, std::to_string(events.size()) + " event(s); first shows " + Fmt(e.t_show, 2) +
                  "-" + Fmt(e.t_hide, 2) + " s, next segment starts " +
                  Fmt(segments[1].t_start, 2) + " s"};
}

}  // namespace
}  // namespace chartlink

int main() {
  using chartlink::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"f1 worked values", chartlink::F1Arithmetic},
      {"metric oracle equivalence", chartlink::MetricOracle},
      {"angular similarity", chartlink::Angular},
      {"deptype end to end", chartlink::DepType},
      {"ambiguous axis by dependency path", chartlink::TypeTwo},
      {"numeric phrase without title noun", chartlink::TypeOne},
      {"grouping oracle", chartlink::GroupingOracle},
      {"overlay geometry", chartlink::OverlayGeometry},
      {"compositing", chartlink::Compositing},
      {"service correction loop", chartlink::ServiceLoop},
      {"cli determinism", chartlink::Determinism},
      {"corpus evaluation", chartlink::Evaluation},
      {"transcript timing", chartlink::Transcript},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception &e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first
              << ": " << outcome.detail << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
