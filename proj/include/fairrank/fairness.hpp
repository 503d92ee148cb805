// Exposure-based fairness metrics over ranked lists: position weights, group
// exposures, exposure disparity, CWEx (binary and multi-group) and the
// FaiRR/NFaiRR baseline.
//
// Positions are re-indexed 1..n after truncation, so metrics are invariant to
// rank-offset quirks in run files. All functions are pure; per-query
// evaluation may run concurrently.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "fairrank/corpus.hpp"

namespace fairrank {

struct CWExParams {
  double alpha = 0.5;  // in [0,1]: weight of neutral exposure vs disparity penalty
  int cutoff = 10;
};

/// Position weight p(i) = 1 / log2(1 + i); strictly decreasing, p(1) = 1.
double position_weight(int i);

struct ExposureVector {
  double male = 0.0;
  double female = 0.0;
  double neutral = 0.0;
};

/// Normalized exposure of each gender group over the truncated list: the
/// position-weight mass of the group's documents divided by the total mass of
/// positions 1..min(k, len). Components sum to 1 for fully labeled lists.
/// Throws std::invalid_argument on an empty truncated list or any document in
/// the prefix lacking a Male/Female/Neutral label (Unparseable is rejected,
/// never coerced).
ExposureVector exposure_vector(const RankedList& list, const LabelSet& labels, int k);

double exposure(const RankedList& list, const LabelSet& labels, GenderLabel group, int k);

/// |Exposure_male - Exposure_female|.
double delta_exposure(const RankedList& list, const LabelSet& labels, int k);

/// CWEx = alpha * Exposure_neutral - (1 - alpha) * |Exp_male - Exp_female|.
/// Bounded by [alpha - 1, alpha]; the upper bound is attained exactly on
/// all-neutral lists and the lower bound on single-gender lists.
double cwex(const RankedList& list, const LabelSet& labels, const CWExParams& params);

/// Generalization beyond binary gender: labels map doc_id to a group name,
/// with neutral documents carrying the reserved name "neutral". The disparity
/// term is max_G Exposure_G - min_G Exposure_G over the declared non-neutral
/// group set; a declared group absent from the prefix contributes exposure 0.
double cwex_multigroup(const RankedList& list,
                       const std::map<std::string, std::string>& labels,
                       const std::vector<std::string>& groups,
                       const CWExParams& params);

/// FaiRR: sum of tau_d * p(i) over the truncated list. Every document in the
/// prefix needs a neutrality score in [0,1].
double fairr(const RankedList& list, const std::map<std::string, double>& neutrality, int k);

/// FaiRR normalized by the ideal FaiRR of the candidate pool: the pool's
/// top-min(k, pool size) scores sorted by neutrality descending. By
/// convention NFaiRR = 1 when the ideal is 0 (an all-biased pool makes every
/// ordering equally ideal).
double nfairr(const RankedList& list, const std::map<std::string, double>& pool_neutrality,
              int k);

struct FairnessRow {
  std::string query_id;
  std::vector<double> cwex;  // one value per configured alpha
  double delta_exposure = 0.0;
  double nfairr = 0.0;
};

struct FairnessReport {
  std::vector<double> alphas;
  int cutoff = 10;
  std::string run_tag;
  std::string labels_provenance;
  std::vector<FairnessRow> rows;  // sorted by query_id
  std::vector<double> macro_cwex;
  double macro_delta_exposure = 0.0;
  double macro_nfairr = 0.0;
  std::vector<std::string> skipped_queries;  // empty after truncation
  std::map<std::string, std::string> extra;  // effective-config metadata
};

/// Per-query rows plus unweighted macro averages. The NFaiRR candidate pool
/// for each query is the full retrieved list from the run. Queries empty
/// after truncation are skipped and listed in the report. Labeling errors are
/// rethrown with query attribution.
FairnessReport evaluate_run(const Run& run, const LabelSet& labels,
                            const std::map<std::string, double>& neutrality,
                            const EvalConfig& config);

}  // namespace fairrank
