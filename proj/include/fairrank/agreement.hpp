// Annotation-quality statistics: accuracy, stereotype-split accuracy,
// Cohen's kappa, Fleiss's kappa, and majority-vote aggregation of crowd
// labels. All functions are pure.

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairrank/corpus.hpp"

namespace fairrank {

/// Per-item annotator counts over the fixed category set {Male, Female,
/// Neutral}, indexed in that order.
struct AnnotationMatrix {
  std::map<std::string, std::array<int, 3>> counts;
};

/// Decided(label) on a strict plurality, nullopt when the vote is tied and
/// needs escalation to an expert.
using VoteOutcome = std::optional<GenderLabel>;

/// Fraction of gold documents with a matching prediction. Unparseable
/// predictions never match. Throws when a gold document has no prediction.
double accuracy(const LabelSet& pred, const LabelSet& gold);

/// Accuracy computed separately over the female- and male-stereotype subsets;
/// returns (female_acc, male_acc). Either subset being empty is an error, as
/// is a tag referencing a document absent from pred or gold.
std::pair<double, double> stereotype_accuracy(const LabelSet& pred, const LabelSet& gold,
                                              const std::vector<StereotypeTag>& tags);

/// Cohen's kappa over identical doc-id sets. Unparseable participates as its
/// own category. Returns 1 when chance agreement is 1 (both raters constant
/// on the same category).
double cohens_kappa(const LabelSet& a, const LabelSet& b);

/// Fleiss's kappa; every item must be rated by the same number n >= 2 of
/// raters. Unanimous input across all items yields 1.
double fleiss_kappa(const AnnotationMatrix& matrix);

VoteOutcome majority_vote(const std::vector<GenderLabel>& votes);

/// Raw per-document votes parsed from a votes file, in file order.
struct VoteTable {
  std::map<std::string, std::vector<GenderLabel>> votes;
};

/// Parses a TSV votes file `doc_id<TAB>annotator_id<TAB>label`. Duplicate
/// (doc, annotator) pairs are an error; labels are Male/Female/Neutral only.
VoteTable parse_votes(const std::string& text);

AnnotationMatrix to_matrix(const VoteTable& table);

struct AgreementReport {
  std::optional<double> accuracy;
  std::optional<double> female_stereotype_accuracy;
  std::optional<double> male_stereotype_accuracy;
  std::optional<double> cohens_kappa;
  std::optional<double> fleiss_kappa;
  std::map<std::string, int> majority_decided;  // label token -> count
  std::vector<std::string> unresolved_docs;     // sorted doc ids
  std::map<std::string, std::string> extra;
};

}  // namespace fairrank
