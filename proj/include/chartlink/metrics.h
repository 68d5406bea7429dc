#ifndef CHARTLINK_METRICS_H_
#define CHARTLINK_METRICS_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chartlink/grouping.h"
#include "chartlink/text.h"
#include "json.hpp"

namespace chartlink {

// A grouped link reduced to what the metric compares: the textual elements
// it references and the phrases it covers.
struct ScoredGroup {
  std::set<std::string> element_ids;
  std::set<CharSpan> phrases;

  bool operator==(const ScoredGroup &) const = default;
};

struct Score {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Harmonic mean; 0 when both inputs are 0.
double F1(double precision, double recall);

// Intersection over union of two character ranges.
double PhraseSimilarity(const CharSpan &a, const CharSpan &b);

// Both empty -> 1; exactly one empty -> 0.
double ElementSetF1(const std::set<std::string> &pred, const std::set<std::string> &gold);

// Precision: mean over predicted spans of the best IoU against gold;
// recall symmetric. Same empty conventions as ElementSetF1.
double PhraseSetF1(const std::set<CharSpan> &pred, const std::set<CharSpan> &gold);

// Mean of the element and phrase F1 of the two groups.
double GroupSimilarity(const ScoredGroup &pred, const ScoredGroup &gold);

// Each group is matched to its most similar counterpart (many-to-one).
// Both empty -> (1, 1, 1); exactly one empty -> (0, 0, 0).
Score CaseScore(const std::vector<ScoredGroup> &pred, const std::vector<ScoredGroup> &gold);

// Builds scored groups from grouped links; removed links are ignored.
std::vector<ScoredGroup> ToScoredGroups(const std::vector<GroupedLink> &groups,
                                        const std::vector<IndividualLink> &links);

struct CaseInput {
  std::string case_id;
  std::string chart_type;
  std::vector<ScoredGroup> pred;
  std::optional<std::vector<ScoredGroup>> gold;  // nullopt: no gold annotation
};

struct CaseReport {
  std::string case_id;
  std::string chart_type;
  Score score;
};

struct EvalReport {
  std::vector<CaseReport> cases;
  std::vector<std::string> skipped;
  std::vector<std::string> warnings;
  double mean_f1 = 0;
  std::map<std::string, double> mean_f1_by_chart_type;
  std::map<std::string, int> cases_by_chart_type;
};

// Scores every case with gold; cases without gold are skipped with a
// warning. Means are unweighted over scored cases.
EvalReport EvaluateCorpus(const std::vector<CaseInput> &cases);

nlohmann::json ReportToJson(const EvalReport &report);
std::string ReportToTable(const EvalReport &report);

}  // namespace chartlink

#endif  // CHARTLINK_METRICS_H_
