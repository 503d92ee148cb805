// Ranking utility metrics at a cutoff: MRR and nDCG.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "fairrank/corpus.hpp"

namespace fairrank {

/// Reciprocal rank of the first document with grade > 0 within the top-k
/// (positions re-indexed 1..n); 0 when none.
double reciprocal_rank(const RankedList& list, const std::map<std::string, int>& query_grades,
                       int k);

/// nDCG@k with gain = grade and discount 1/log2(i+1). The ideal DCG uses all
/// relevant documents in the qrels for the query; 0 when the query has none.
double ndcg_query(const RankedList& list, const std::map<std::string, int>& query_grades,
                  int k);

/// Macro-averaged over the run's queries. A query missing from the qrels
/// counts as having no relevant documents.
double mrr(const Run& run, const Qrels& qrels, int k);
double ndcg(const Run& run, const Qrels& qrels, int k);

struct UtilityRow {
  std::string query_id;
  double reciprocal_rank = 0.0;
  double ndcg = 0.0;
};

struct UtilityReport {
  int cutoff = 10;
  std::string run_tag;
  std::vector<UtilityRow> rows;  // sorted by query_id
  double macro_mrr = 0.0;
  double macro_ndcg = 0.0;
  std::vector<std::string> queries_without_qrels;
  std::map<std::string, std::string> extra;
};

UtilityReport evaluate_utility(const Run& run, const Qrels& qrels, int k);

}  // namespace fairrank
