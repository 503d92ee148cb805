#include "fairrank/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fairrank {

namespace {

void check_params(const CWExParams& params) {
  if (params.alpha < 0.0 || params.alpha > 1.0)
    throw std::invalid_argument("alpha must lie in [0,1]");
  if (params.cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
}

double total_weight(std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) total += position_weight(static_cast<int>(i));
  return total;
}

}  // namespace

double position_weight(int i) {
  if (i < 1) throw std::invalid_argument("position must be >= 1");
  return 1.0 / std::log2(1.0 + static_cast<double>(i));
}

ExposureVector exposure_vector(const RankedList& list, const LabelSet& labels, int k) {
  const RankedList top = truncate(list, k);
  if (top.entries.empty())
    throw std::invalid_argument("exposure over an empty ranked list");
  double male = 0.0, female = 0.0, neutral = 0.0;
  for (std::size_t i = 0; i < top.entries.size(); ++i) {
    const auto& entry = top.entries[i];
    const auto it = labels.labels.find(entry.doc_id);
    if (it == labels.labels.end())
      throw std::invalid_argument("no label for document '" + entry.doc_id + "'");
    const double p = position_weight(static_cast<int>(i + 1));
    switch (it->second) {
      case GenderLabel::Male: male += p; break;
      case GenderLabel::Female: female += p; break;
      case GenderLabel::Neutral: neutral += p; break;
      case GenderLabel::Unparseable:
        throw std::invalid_argument("unparseable label for document '" + entry.doc_id + "'");
    }
  }
  const double max_exposure = total_weight(top.entries.size());
  return ExposureVector{male / max_exposure, female / max_exposure, neutral / max_exposure};
}

double exposure(const RankedList& list, const LabelSet& labels, GenderLabel group, int k) {
  const ExposureVector v = exposure_vector(list, labels, k);
  switch (group) {
    case GenderLabel::Male: return v.male;
    case GenderLabel::Female: return v.female;
    case GenderLabel::Neutral: return v.neutral;
    case GenderLabel::Unparseable: break;
  }
  throw std::invalid_argument("exposure is undefined for the Unparseable label");
}

double delta_exposure(const RankedList& list, const LabelSet& labels, int k) {
  const ExposureVector v = exposure_vector(list, labels, k);
  return std::fabs(v.male - v.female);
}

double cwex(const RankedList& list, const LabelSet& labels, const CWExParams& params) {
  check_params(params);
  const ExposureVector v = exposure_vector(list, labels, params.cutoff);
  return params.alpha * v.neutral - (1.0 - params.alpha) * std::fabs(v.male - v.female);
}

double cwex_multigroup(const RankedList& list,
                       const std::map<std::string, std::string>& labels,
                       const std::vector<std::string>& groups,
                       const CWExParams& params) {
  check_params(params);
  if (groups.empty()) throw std::invalid_argument("empty group set");
  std::map<std::string, double> mass;
  for (const auto& group : groups) {
    if (group == "neutral")
      throw std::invalid_argument("'neutral' is reserved and cannot be a declared group");
    mass[group] = 0.0;
  }

  const RankedList top = truncate(list, params.cutoff);
  if (top.entries.empty())
    throw std::invalid_argument("exposure over an empty ranked list");
  double neutral_mass = 0.0;
  for (std::size_t i = 0; i < top.entries.size(); ++i) {
    const auto& entry = top.entries[i];
    const auto it = labels.find(entry.doc_id);
    if (it == labels.end())
      throw std::invalid_argument("no group label for document '" + entry.doc_id + "'");
    const double p = position_weight(static_cast<int>(i + 1));
    if (it->second == "neutral") {
      neutral_mass += p;
      continue;
    }
    const auto group_it = mass.find(it->second);
    if (group_it == mass.end())
      throw std::invalid_argument("document '" + entry.doc_id + "' labeled with undeclared group '" +
                                  it->second + "'");
    group_it->second += p;
  }

  const double max_exposure = total_weight(top.entries.size());
  const double neutral_exposure = neutral_mass / max_exposure;
  double min_exposure = std::numeric_limits<double>::infinity();
  double max_group_exposure = -std::numeric_limits<double>::infinity();
  for (const auto& [group, group_mass] : mass) {
    const double e = group_mass / max_exposure;
    min_exposure = std::min(min_exposure, e);
    max_group_exposure = std::max(max_group_exposure, e);
  }
  return params.alpha * neutral_exposure -
         (1.0 - params.alpha) * (max_group_exposure - min_exposure);
}

double fairr(const RankedList& list, const std::map<std::string, double>& neutrality, int k) {
  const RankedList top = truncate(list, k);
  double sum = 0.0;
  for (std::size_t i = 0; i < top.entries.size(); ++i) {
    const auto& entry = top.entries[i];
    const auto it = neutrality.find(entry.doc_id);
    if (it == neutrality.end())
      throw std::invalid_argument("missing neutrality score for document '" + entry.doc_id + "'");
    if (it->second < 0.0 || it->second > 1.0)
      throw std::invalid_argument("neutrality score out of [0,1] for document '" +
                                  entry.doc_id + "'");
    sum += it->second * position_weight(static_cast<int>(i + 1));
  }
  return sum;
}

double nfairr(const RankedList& list, const std::map<std::string, double>& pool_neutrality,
              int k) {
  if (k < 1) throw std::invalid_argument("cutoff must be >= 1");
  if (pool_neutrality.empty()) throw std::invalid_argument("empty candidate pool");
  for (const auto& entry : list.entries) {
    if (pool_neutrality.find(entry.doc_id) == pool_neutrality.end())
      throw std::invalid_argument("ranked document '" + entry.doc_id +
                                  "' missing from the candidate pool");
  }
  const double actual = fairr(list, pool_neutrality, k);

  std::vector<double> scores;
  scores.reserve(pool_neutrality.size());
  for (const auto& [doc_id, tau] : pool_neutrality) {
    if (tau < 0.0 || tau > 1.0)
      throw std::invalid_argument("neutrality score out of [0,1] for document '" + doc_id + "'");
    scores.push_back(tau);
  }
  std::sort(scores.begin(), scores.end(), std::greater<double>());
  const std::size_t n = std::min<std::size_t>(scores.size(), static_cast<std::size_t>(k));
  double ideal = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    ideal += scores[i] * position_weight(static_cast<int>(i + 1));
  if (ideal == 0.0) return 1.0;
  return actual / ideal;
}

FairnessReport evaluate_run(const Run& run, const LabelSet& labels,
                            const std::map<std::string, double>& neutrality,
                            const EvalConfig& config) {
  if (config.cutoff < 1) throw std::invalid_argument("cutoff must be >= 1");
  if (config.alphas.empty()) throw std::invalid_argument("at least one alpha is required");
  for (double alpha : config.alphas) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0,1]");
  }

  FairnessReport report;
  report.alphas = config.alphas;
  report.cutoff = config.cutoff;
  report.run_tag = run.tag;
  report.labels_provenance = labels.provenance;
  report.macro_cwex.assign(config.alphas.size(), 0.0);

  for (const auto& [qid, list] : run.queries) {
    if (truncate(list, config.cutoff).entries.empty()) {
      report.skipped_queries.push_back(qid);
      continue;
    }
    try {
      FairnessRow row;
      row.query_id = qid;
      const ExposureVector v = exposure_vector(list, labels, config.cutoff);
      row.delta_exposure = std::fabs(v.male - v.female);
      for (double alpha : config.alphas)
        row.cwex.push_back(alpha * v.neutral - (1.0 - alpha) * row.delta_exposure);

      std::map<std::string, double> pool;
      for (const auto& entry : list.entries) {
        const auto it = neutrality.find(entry.doc_id);
        if (it == neutrality.end())
          throw std::invalid_argument("missing neutrality score for document '" +
                                      entry.doc_id + "'");
        pool.emplace(entry.doc_id, it->second);
      }
      row.nfairr = nfairr(list, pool, config.cutoff);
      report.rows.push_back(std::move(row));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("query '" + qid + "': " + e.what());
    }
  }

  if (!report.rows.empty()) {
    const double n = static_cast<double>(report.rows.size());
    for (const auto& row : report.rows) {
      for (std::size_t a = 0; a < report.macro_cwex.size(); ++a)
        report.macro_cwex[a] += row.cwex[a];
      report.macro_delta_exposure += row.delta_exposure;
      report.macro_nfairr += row.nfairr;
    }
    for (auto& value : report.macro_cwex) value /= n;
    report.macro_delta_exposure /= n;
    report.macro_nfairr /= n;
  }
  return report;
}

}  // namespace fairrank
