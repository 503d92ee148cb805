#include "fairrank/agreement.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fairrank {

namespace {

constexpr int kCategories = 4;  // Male, Female, Neutral, Unparseable

int category_index(GenderLabel label) {
  switch (label) {
    case GenderLabel::Male: return 0;
    case GenderLabel::Female: return 1;
    case GenderLabel::Neutral: return 2;
    case GenderLabel::Unparseable: return 3;
  }
  return 3;
}

}  // namespace

double accuracy(const LabelSet& pred, const LabelSet& gold) {
  if (gold.labels.empty()) throw std::invalid_argument("empty gold label set");
  int correct = 0;
  for (const auto& [doc_id, gold_label] : gold.labels) {
    const auto it = pred.labels.find(doc_id);
    if (it == pred.labels.end())
      throw std::invalid_argument("missing prediction for document '" + doc_id + "'");
    if (it->second != GenderLabel::Unparseable && it->second == gold_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.labels.size());
}

std::pair<double, double> stereotype_accuracy(const LabelSet& pred, const LabelSet& gold,
                                              const std::vector<StereotypeTag>& tags) {
  int female_total = 0, female_correct = 0;
  int male_total = 0, male_correct = 0;
  for (const auto& tag : tags) {
    const auto pred_it = pred.labels.find(tag.doc_id);
    const auto gold_it = gold.labels.find(tag.doc_id);
    if (pred_it == pred.labels.end() || gold_it == gold.labels.end())
      throw std::invalid_argument("stereotype tag references unknown document '" + tag.doc_id +
                                  "'");
    const bool correct = pred_it->second != GenderLabel::Unparseable &&
                         pred_it->second == gold_it->second;
    if (tag.target == StereotypeTarget::FemaleStereotype) {
      ++female_total;
      if (correct) ++female_correct;
    } else {
      ++male_total;
      if (correct) ++male_correct;
    }
  }
  if (female_total == 0) throw std::invalid_argument("empty female-stereotype subset");
  if (male_total == 0) throw std::invalid_argument("empty male-stereotype subset");
  return {static_cast<double>(female_correct) / female_total,
          static_cast<double>(male_correct) / male_total};
}

double cohens_kappa(const LabelSet& a, const LabelSet& b) {
  if (a.labels.empty() || b.labels.empty()) throw std::invalid_argument("empty label set");
  if (a.labels.size() != b.labels.size() ||
      !std::equal(a.labels.begin(), a.labels.end(), b.labels.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    std::ostringstream os;
    os << "doc-id sets differ;";
    int shown = 0;
    for (const auto& [doc_id, label] : a.labels) {
      if (b.labels.find(doc_id) == b.labels.end() && shown < 5) {
        os << " only in first: '" << doc_id << "'";
        ++shown;
      }
    }
    for (const auto& [doc_id, label] : b.labels) {
      if (a.labels.find(doc_id) == a.labels.end() && shown < 5) {
        os << " only in second: '" << doc_id << "'";
        ++shown;
      }
    }
    throw std::invalid_argument(os.str());
  }

  const double n = static_cast<double>(a.labels.size());
  double agree = 0.0;
  double marginal_a[kCategories] = {0, 0, 0, 0};
  double marginal_b[kCategories] = {0, 0, 0, 0};
  auto it_b = b.labels.begin();
  for (auto it_a = a.labels.begin(); it_a != a.labels.end(); ++it_a, ++it_b) {
    if (it_a->second == it_b->second) agree += 1.0;
    marginal_a[category_index(it_a->second)] += 1.0;
    marginal_b[category_index(it_b->second)] += 1.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (int c = 0; c < kCategories; ++c) p_e += (marginal_a[c] / n) * (marginal_b[c] / n);
  if (p_e >= 1.0) return 1.0;  // both raters constant on one category
  return (p_o - p_e) / (1.0 - p_e);
}

double fleiss_kappa(const AnnotationMatrix& matrix) {
  if (matrix.counts.empty()) throw std::invalid_argument("empty annotation matrix");
  int raters = -1;
  for (const auto& [doc_id, counts] : matrix.counts) {
    const int n = counts[0] + counts[1] + counts[2];
    if (raters == -1) raters = n;
    if (n != raters)
      throw std::invalid_argument("unequal rater counts (document '" + doc_id + "')");
  }
  if (raters < 2) throw std::invalid_argument("at least 2 raters per item are required");

  const double m = static_cast<double>(matrix.counts.size());
  const double n = static_cast<double>(raters);
  double p_bar = 0.0;
  double category_mass[3] = {0, 0, 0};
  for (const auto& [doc_id, counts] : matrix.counts) {
    double sum_sq = 0.0;
    for (int j = 0; j < 3; ++j) {
      sum_sq += static_cast<double>(counts[j]) * counts[j];
      category_mass[j] += counts[j];
    }
    p_bar += (sum_sq - n) / (n * (n - 1.0));
  }
  p_bar /= m;
  double p_e = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double p_j = category_mass[j] / (m * n);
    p_e += p_j * p_j;
  }
  if (p_e >= 1.0) return 1.0;  // every rating in a single category
  return (p_bar - p_e) / (1.0 - p_e);
}

VoteOutcome majority_vote(const std::vector<GenderLabel>& votes) {
  if (votes.empty()) throw std::invalid_argument("empty vote list");
  int counts[kCategories] = {0, 0, 0, 0};
  for (GenderLabel vote : votes) ++counts[category_index(vote)];
  int best = 0;
  for (int c = 1; c < kCategories; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  for (int c = 0; c < kCategories; ++c) {
    if (c != best && counts[c] == counts[best]) return std::nullopt;  // tie
  }
  static constexpr GenderLabel kByIndex[kCategories] = {
      GenderLabel::Male, GenderLabel::Female, GenderLabel::Neutral, GenderLabel::Unparseable};
  return kByIndex[best];
}

VoteTable parse_votes(const std::string& text) {
  VoteTable table;
  std::set<std::pair<std::string, std::string>> seen;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (trim(line).empty()) continue;
    const auto fields = split_tab(line);
    if (fields.size() != 3)
      throw ParseError("malformed votes line at line " + std::to_string(i + 1) + ": '" + line +
                       "'");
    const std::string doc_id = trim(fields[0]);
    const std::string annotator = trim(fields[1]);
    if (doc_id.empty() || annotator.empty())
      throw ParseError("empty doc_id or annotator_id at line " + std::to_string(i + 1));
    const auto label = gender_label_from_token(fields[2]);
    if (!label)
      throw ParseError("unknown label token at line " + std::to_string(i + 1) + ": '" + line +
                       "'");
    if (!seen.insert({doc_id, annotator}).second)
      throw ParseError("duplicate vote for document '" + doc_id + "' by annotator '" +
                       annotator + "'");
    table.votes[doc_id].push_back(*label);
  }
  return table;
}

AnnotationMatrix to_matrix(const VoteTable& table) {
  AnnotationMatrix matrix;
  for (const auto& [doc_id, votes] : table.votes) {
    std::array<int, 3> counts{0, 0, 0};
    for (GenderLabel vote : votes) {
      if (vote == GenderLabel::Unparseable)
        throw std::invalid_argument("unparseable vote for document '" + doc_id + "'");
      counts[static_cast<std::size_t>(category_index(vote))] += 1;
    }
    matrix.counts.emplace(doc_id, counts);
  }
  return matrix;
}

}  // namespace fairrank
