// Word-list based gender classification and document neutrality scoring.
// This is the frequency heuristic that counts gender-representative terms;
// the neutrality score tau_d it produces feeds the FaiRR/NFaiRR baseline.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fairrank/corpus.hpp"

namespace fairrank {

struct WordLists {
  std::set<std::string> male_terms;
  std::set<std::string> female_terms;
};

enum class BinaryNeutrality { Neutral, NonNeutral };

/// Terms shipped in-repo under data/; see those files for the canonical list.
WordLists default_word_lists();

/// Parses two word-list files (one lowercase term per line, '#' comments
/// ignored) and validates: single alphanumeric tokens, disjoint sets.
WordLists parse_word_lists(const std::string& male_text, const std::string& female_text);

/// Throws std::invalid_argument on overlapping sets, empty terms, uppercase
/// letters, or multi-token entries.
void validate_word_lists(const WordLists& lists);

/// Lowercased tokens split on any non-alphanumeric byte; empty tokens dropped.
/// Apostrophes separate, so "men's" surfaces [men, s]. ASCII-only by design;
/// non-ASCII bytes act as separators.
std::vector<std::string> tokenize(const std::string& text);

struct GenderCounts {
  int male = 0;
  int female = 0;
};

/// Token occurrences from the male and female lists. Title tokens are
/// included when present (title and body joined with a single space).
GenderCounts gender_counts(const Document& doc, const WordLists& lists);

/// Male if m > f, Female if f > m, Neutral on ties (including 0/0).
GenderLabel lexical_label(const Document& doc, const WordLists& lists);

/// tau_d: exactly 1 when the document has zero gendered tokens, otherwise
/// max(0, 1 - (m + f) / |tokens|).
double neutrality_score(const Document& doc, const WordLists& lists);

/// Neutral iff neutrality_score == 1. A document with m == f > 0 is lexically
/// Neutral (tie) yet NonNeutral here; the two views intentionally diverge.
BinaryNeutrality binary_neutrality(const Document& doc, const WordLists& lists);

/// Labels every document in the collection; provenance "lexical".
LabelSet lexical_label_all(const std::map<std::string, Document>& collection,
                           const WordLists& lists);

/// Neutrality score per document, keyed by doc_id.
std::map<std::string, double> neutrality_scores(
    const std::map<std::string, Document>& collection, const WordLists& lists);

}  // namespace fairrank
