#ifndef CHARTLINK_TESTS_ORACLES_METRICS_ORACLE_H_
#define CHARTLINK_TESTS_ORACLES_METRICS_ORACLE_H_

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "chartlink/metrics.h"

namespace chartlink::testing {

// Naive reference: character sets instead of interval arithmetic, explicit
// double loops, no shared helpers with the library.
namespace oracle {

struct Group {
  std::vector<std::string> elements;
  std::vector<std::pair<int, int>> phrases;
};

inline double Harmonic(double p, double r) { return p + r == 0 ? 0 : 2 * p * r / (p + r); }

inline double Iou(std::pair<int, int> a, std::pair<int, int> b) {
  std::set<int> ca, cb, all;
  for (int i = a.first; i < a.second; ++i) ca.insert(i);
  for (int i = b.first; i < b.second; ++i) cb.insert(i);
  int inter = 0;
  for (int i : ca) inter += cb.count(i) ? 1 : 0;
  all.insert(ca.begin(), ca.end());
  all.insert(cb.begin(), cb.end());
  return all.empty() ? 0 : static_cast<double>(inter) / static_cast<double>(all.size());
}

inline double ElementScore(const Group &p, const Group &g) {
  std::set<std::string> ps(p.elements.begin(), p.elements.end());
  std::set<std::string> gs(g.elements.begin(), g.elements.end());
  if (ps.empty() && gs.empty()) return 1;
  if (ps.empty() || gs.empty()) return 0;
  int common = 0;
  for (const auto &e : ps) common += gs.count(e) ? 1 : 0;
  return Harmonic(static_cast<double>(common) / ps.size(), static_cast<double>(common) / gs.size());
}

inline double PhraseScore(const Group &p, const Group &g) {
  std::set<std::pair<int, int>> ps(p.phrases.begin(), p.phrases.end());
  std::set<std::pair<int, int>> gs(g.phrases.begin(), g.phrases.end());
  if (ps.empty() && gs.empty()) return 1;
  if (ps.empty() || gs.empty()) return 0;
  double precision = 0, recall = 0;
  for (const auto &a : ps) {
    double best = 0;
    for (const auto &b : gs) best = std::max(best, Iou(a, b));
    precision += best;
  }
  for (const auto &b : gs) {
    double best = 0;
    for (const auto &a : ps) best = std::max(best, Iou(a, b));
    recall += best;
  }
  return Harmonic(precision / ps.size(), recall / gs.size());
}

inline double Similarity(const Group &p, const Group &g) {
  return (ElementScore(p, g) + PhraseScore(p, g)) / 2;
}

inline Score CaseScore(const std::vector<Group> &pred, const std::vector<Group> &gold) {
  if (pred.empty() && gold.empty()) return {1, 1, 1};
  if (pred.empty() || gold.empty()) return {0, 0, 0};
  std::vector<std::vector<double>> sim(pred.size(), std::vector<double>(gold.size()));
  for (size_t i = 0; i < pred.size(); ++i) {
    for (size_t j = 0; j < gold.size(); ++j) sim[i][j] = Similarity(pred[i], gold[j]);
  }
  double p = 0, r = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    p += *std::max_element(sim[i].begin(), sim[i].end());
  }
  for (size_t j = 0; j < gold.size(); ++j) {
    double best = 0;
    for (size_t i = 0; i < pred.size(); ++i) best = std::max(best, sim[i][j]);
    r += best;
  }
  p /= static_cast<double>(pred.size());
  r /= static_cast<double>(gold.size());
  return {p, r, Harmonic(p, r)};
}

}  // namespace oracle

inline ScoredGroup ToScored(const oracle::Group &g) {
  ScoredGroup out;
  out.element_ids.insert(g.elements.begin(), g.elements.end());
  for (auto [s, e] : g.phrases) out.phrases.insert({s, e});
  return out;
}

inline std::vector<ScoredGroup> ToScored(const std::vector<oracle::Group> &groups) {
  std::vector<ScoredGroup> out;
  for (const auto &g : groups) out.push_back(ToScored(g));
  return out;
}

inline oracle::Group RandomGroup(std::mt19937 &rng) {
  std::uniform_int_distribution<int> links(1, 5), element(0, 5), start(0, 30), length(1, 8);
  oracle::Group g;
  int n = links(rng);
  for (int i = 0; i < n; ++i) {
    g.elements.push_back("e" + std::to_string(element(rng)));
    int s = start(rng);
    g.phrases.push_back({s, s + length(rng)});
  }
  return g;
}

inline std::vector<oracle::Group> RandomGroups(std::mt19937 &rng, int min = 0) {
  std::uniform_int_distribution<int> count(min, 4);
  std::vector<oracle::Group> out;
  for (int n = count(rng); n > 0; --n) out.push_back(RandomGroup(rng));
  return out;
}

}  // namespace chartlink::testing

#endif  // CHARTLINK_TESTS_ORACLES_METRICS_ORACLE_H_
