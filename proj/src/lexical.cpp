#include "fairrank/lexical.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace fairrank {

namespace {

bool is_single_lower_token(const std::string& term) {
  if (term.empty()) return false;
  for (unsigned char c : term) {
    if (!std::isalnum(c)) return false;
    if (std::isupper(c)) return false;
  }
  return true;
}

std::set<std::string> parse_term_file(const std::string& text) {
  std::set<std::string> terms;
  for (const auto& raw : split_lines(text)) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::string term = to_lower(line);
    if (!is_single_lower_token(term))
      throw std::invalid_argument("word list entry is not a single alphanumeric token: '" +
                                  line + "'");
    terms.insert(term);
  }
  return terms;
}

}  // namespace

WordLists default_word_lists() {
  // Mirrors data/male_terms.txt and data/female_terms.txt.
  WordLists lists;
  lists.male_terms = {
      "he",          "him",          "his",      "himself",  "male",     "males",
      "man",         "men",          "boy",      "boys",     "father",   "fathers",
      "dad",         "dads",         "son",      "sons",     "brother",  "brothers",
      "husband",     "husbands",     "uncle",    "uncles",   "grandfather",
      "grandfathers", "grandson",    "grandsons", "nephew",  "nephews",  "mr",
      "sir",         "king",         "kings",    "prince",   "princes",  "gentleman",
      "gentlemen",   "guy",          "guys",     "lad",      "lads",     "widower",
      "widowers",    "groom",        "grooms",
  };
  lists.female_terms = {
      "she",          "her",           "hers",     "herself",  "female",   "females",
      "woman",        "women",         "girl",     "girls",    "mother",   "mothers",
      "mom",          "moms",          "mum",      "mums",     "daughter", "daughters",
      "sister",       "sisters",       "wife",     "wives",    "aunt",     "aunts",
      "grandmother",  "grandmothers",  "granddaughter", "granddaughters",
      "niece",        "nieces",        "mrs",      "ms",       "miss",     "madam",
      "queen",        "queens",        "princess", "princesses", "lady",   "ladies",
      "gal",          "gals",          "lass",     "lasses",   "widow",    "widows",
      "bride",        "brides",
  };
  return lists;
}

WordLists parse_word_lists(const std::string& male_text, const std::string& female_text) {
  WordLists lists;
  lists.male_terms = parse_term_file(male_text);
  lists.female_terms = parse_term_file(female_text);
  validate_word_lists(lists);
  return lists;
}

void validate_word_lists(const WordLists& lists) {
  for (const auto& term : lists.male_terms) {
    if (!is_single_lower_token(term))
      throw std::invalid_argument("invalid male term: '" + term + "'");
    if (lists.female_terms.count(term) > 0)
      throw std::invalid_argument("term '" + term + "' appears in both word lists");
  }
  for (const auto& term : lists.female_terms) {
    if (!is_single_lower_token(term))
      throw std::invalid_argument("invalid female term: '" + term + "'");
  }
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

GenderCounts gender_counts(const Document& doc, const WordLists& lists) {
  GenderCounts counts;
  for (const auto& token : tokenize(doc.passage())) {
    if (lists.male_terms.count(token) > 0) ++counts.male;
    else if (lists.female_terms.count(token) > 0) ++counts.female;
  }
  return counts;
}

GenderLabel lexical_label(const Document& doc, const WordLists& lists) {
  const GenderCounts counts = gender_counts(doc, lists);
  if (counts.male > counts.female) return GenderLabel::Male;
  if (counts.female > counts.male) return GenderLabel::Female;
  return GenderLabel::Neutral;
}

double neutrality_score(const Document& doc, const WordLists& lists) {
  const auto tokens = tokenize(doc.passage());
  int gendered = 0;
  for (const auto& token : tokens) {
    if (lists.male_terms.count(token) > 0 || lists.female_terms.count(token) > 0) ++gendered;
  }
  if (gendered == 0) return 1.0;
  const double tau = 1.0 - static_cast<double>(gendered) / static_cast<double>(tokens.size());
  return std::max(0.0, tau);
}

BinaryNeutrality binary_neutrality(const Document& doc, const WordLists& lists) {
  return neutrality_score(doc, lists) == 1.0 ? BinaryNeutrality::Neutral
                                             : BinaryNeutrality::NonNeutral;
}

LabelSet lexical_label_all(const std::map<std::string, Document>& collection,
                           const WordLists& lists) {
  LabelSet set;
  set.provenance = "lexical";
  for (const auto& [doc_id, doc] : collection) set.labels[doc_id] = lexical_label(doc, lists);
  return set;
}

std::map<std::string, double> neutrality_scores(
    const std::map<std::string, Document>& collection, const WordLists& lists) {
  std::map<std::string, double> scores;
  for (const auto& [doc_id, doc] : collection) scores[doc_id] = neutrality_score(doc, lists);
  return scores;
}

}  // namespace fairrank
