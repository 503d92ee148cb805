#include "fairrank/utility.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace fairrank {

namespace {

const std::map<std::string, int> kNoGrades;

const std::map<std::string, int>& grades_for(const Qrels& qrels, const std::string& qid) {
  const auto it = qrels.grades.find(qid);
  return it == qrels.grades.end() ? kNoGrades : it->second;
}

}  // namespace

double reciprocal_rank(const RankedList& list, const std::map<std::string, int>& query_grades,
                       int k) {
  const RankedList top = truncate(list, k);
  for (std::size_t i = 0; i < top.entries.size(); ++i) {
    const auto it = query_grades.find(top.entries[i].doc_id);
    if (it != query_grades.end() && it->second > 0)
      return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double ndcg_query(const RankedList& list, const std::map<std::string, int>& query_grades,
                  int k) {
  const RankedList top = truncate(list, k);
  double dcg = 0.0;
  for (std::size_t i = 0; i < top.entries.size(); ++i) {
    const auto it = query_grades.find(top.entries[i].doc_id);
    const int grade = it == query_grades.end() ? 0 : it->second;
    dcg += static_cast<double>(grade) / std::log2(static_cast<double>(i) + 2.0);
  }

  std::vector<int> relevant;
  for (const auto& [doc_id, grade] : query_grades) {
    if (grade > 0) relevant.push_back(grade);
  }
  std::sort(relevant.begin(), relevant.end(), std::greater<int>());
  double idcg = 0.0;
  const std::size_t n = std::min<std::size_t>(relevant.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i)
    idcg += static_cast<double>(relevant[i]) / std::log2(static_cast<double>(i) + 2.0);

  return idcg > 0.0 ? dcg / idcg : 0.0;
}

double mrr(const Run& run, const Qrels& qrels, int k) {
  return evaluate_utility(run, qrels, k).macro_mrr;
}

double ndcg(const Run& run, const Qrels& qrels, int k) {
  return evaluate_utility(run, qrels, k).macro_ndcg;
}

UtilityReport evaluate_utility(const Run& run, const Qrels& qrels, int k) {
  if (k < 1) throw std::invalid_argument("cutoff must be >= 1");
  UtilityReport report;
  report.cutoff = k;
  report.run_tag = run.tag;
  for (const auto& [qid, list] : run.queries) {
    if (list.entries.empty()) continue;
    if (qrels.grades.find(qid) == qrels.grades.end())
      report.queries_without_qrels.push_back(qid);
    const auto& grades = grades_for(qrels, qid);
    UtilityRow row;
    row.query_id = qid;
    row.reciprocal_rank = reciprocal_rank(list, grades, k);
    row.ndcg = ndcg_query(list, grades, k);
    report.rows.push_back(std::move(row));
  }
  if (!report.rows.empty()) {
    for (const auto& row : report.rows) {
      report.macro_mrr += row.reciprocal_rank;
      report.macro_ndcg += row.ndcg;
    }
    report.macro_mrr /= static_cast<double>(report.rows.size());
    report.macro_ndcg /= static_cast<double>(report.rows.size());
  }
  return report;
}

}  // namespace fairrank
