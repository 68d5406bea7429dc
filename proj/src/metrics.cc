#include "chartlink/metrics.h"

#include <algorithm>
#include <cstdio>
#include <map>

namespace chartlink {

namespace {

std::string Fixed(double value, int digits) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

}  // namespace

double F1(double precision, double recall) {
  if (precision + recall == 0) return 0;
  return 2 * precision * recall / (precision + recall);
}

double PhraseSimilarity(const CharSpan &a, const CharSpan &b) {
  int overlap = std::max(0, std::min(a.end, b.end) - std::max(a.start, b.start));
  int united = a.length() + b.length() - overlap;
  if (united <= 0) return a == b ? 1 : 0;
  return static_cast<double>(overlap) / united;
}

double ElementSetF1(const std::set<std::string> &pred, const std::set<std::string> &gold) {
  if (pred.empty() && gold.empty()) return 1;
  if (pred.empty() || gold.empty()) return 0;
  size_t common = 0;
  for (const std::string &id : pred) common += gold.count(id);
  return F1(static_cast<double>(common) / pred.size(), static_cast<double>(common) / gold.size());
}

double PhraseSetF1(const std::set<CharSpan> &pred, const std::set<CharSpan> &gold) {
  if (pred.empty() && gold.empty()) return 1;
  if (pred.empty() || gold.empty()) return 0;
  auto mean_best = [](const std::set<CharSpan> &from, const std::set<CharSpan> &to) {
    double total = 0;
    for (const CharSpan &a : from) {
      double best = 0;
      for (const CharSpan &b : to) best = std::max(best, PhraseSimilarity(a, b));
      total += best;
    }
    return total / from.size();
  };
  return F1(mean_best(pred, gold), mean_best(gold, pred));
}

double GroupSimilarity(const ScoredGroup &pred, const ScoredGroup &gold) {
  return (ElementSetF1(pred.element_ids, gold.element_ids) +
          PhraseSetF1(pred.phrases, gold.phrases)) /
         2;
}

Score CaseScore(const std::vector<ScoredGroup> &pred, const std::vector<ScoredGroup> &gold) {
  if (pred.empty() && gold.empty()) return {1, 1, 1};
  if (pred.empty() || gold.empty()) return {0, 0, 0};
  auto mean_best = [](const std::vector<ScoredGroup> &from, const std::vector<ScoredGroup> &to,
                      bool from_is_pred) {
    double total = 0;
    for (const ScoredGroup &a : from) {
      double best = 0;
      for (const ScoredGroup &b : to) {
        best = std::max(best, from_is_pred ? GroupSimilarity(a, b) : GroupSimilarity(b, a));
      }
      total += best;
    }
    return total / from.size();
  };
  Score score;
  score.precision = mean_best(pred, gold, true);
  score.recall = mean_best(gold, pred, false);
  score.f1 = F1(score.precision, score.recall);
  return score;
}

std::vector<ScoredGroup> ToScoredGroups(const std::vector<GroupedLink> &groups,
                                        const std::vector<IndividualLink> &links) {
  std::map<std::string, const IndividualLink *> by_id;
  for (const IndividualLink &link : links) by_id[link.id] = &link;
  std::vector<ScoredGroup> out;
  for (const GroupedLink &group : groups) {
    ScoredGroup scored;
    for (const std::string &id : group.member_link_ids) {
      auto it = by_id.find(id);
      if (it == by_id.end() || it->second->status == LinkStatus::kRemoved) continue;
      scored.element_ids.insert(it->second->element_id);
      scored.phrases.insert(it->second->phrase.span);
    }
    if (!scored.element_ids.empty()) out.push_back(std::move(scored));
  }
  return out;
}

EvalReport EvaluateCorpus(const std::vector<CaseInput> &cases) {
  EvalReport report;
  std::map<std::string, double> sums;
  double total = 0;
  for (const CaseInput &input : cases) {
    if (!input.gold) {
      report.skipped.push_back(input.case_id);
      report.warnings.push_back("case " + input.case_id + " has no gold annotation; skipped");
      continue;
    }
    CaseReport row{input.case_id, input.chart_type, CaseScore(input.pred, *input.gold)};
    total += row.score.f1;
    sums[row.chart_type] += row.score.f1;
    ++report.cases_by_chart_type[row.chart_type];
    report.cases.push_back(std::move(row));
  }
  if (!report.cases.empty()) report.mean_f1 = total / report.cases.size();
  for (const auto &[type, sum] : sums) {
    report.mean_f1_by_chart_type[type] = sum / report.cases_by_chart_type[type];
  }
  return report;
}

nlohmann::json ReportToJson(const EvalReport &report) {
  nlohmann::json cases = nlohmann::json::array();
  for (const CaseReport &row : report.cases) {
    cases.push_back({{"caseId", row.case_id},
                     {"chartType", row.chart_type},
                     {"precision", row.score.precision},
                     {"recall", row.score.recall},
                     {"f1", row.score.f1}});
  }
  nlohmann::json by_type = nlohmann::json::object();
  for (const auto &[type, mean] : report.mean_f1_by_chart_type) {
    by_type[type] = {{"meanF1", mean}, {"cases", report.cases_by_chart_type.at(type)}};
  }
  return {{"cases", cases},
          {"meanF1", report.mean_f1},
          {"byChartType", by_type},
          {"skipped", report.skipped}};
}

std::string ReportToTable(const EvalReport &report) {
  size_t width = 7;
  for (const CaseReport &row : report.cases) width = std::max(width, row.case_id.size());
  auto pad = [](std::string s, size_t n) {
    s.resize(std::max(n, s.size()), ' ');
    return s;
  };
  std::string out = pad("case", width) + "  type     precision  recall  f1\n";
  for (const CaseReport &row : report.cases) {
    out += pad(row.case_id, width) + "  " + pad(row.chart_type, 7) + "  " +
           pad(Fixed(row.score.precision, 3), 9) + "  " + pad(Fixed(row.score.recall, 3), 6) +
           "  " + Fixed(row.score.f1, 3) + "\n";
  }
  for (const auto &[type, mean] : report.mean_f1_by_chart_type) {
    out += "mean f1 (" + type + ", " + std::to_string(report.cases_by_chart_type.at(type)) +
           " cases): " + Fixed(mean, 3) + "\n";
  }
  out += "mean f1: " + Fixed(report.mean_f1, 3) + " over " +
         std::to_string(report.cases.size()) + " cases";
  if (!report.skipped.empty()) {
    out += ", " + std::to_string(report.skipped.size()) + " skipped";
  }
  return out + "\n";
}

}  // namespace chartlink
