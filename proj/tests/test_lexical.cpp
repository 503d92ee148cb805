#include <random>
#include <sstream>

#include "doctest.h"
#include "fairrank/lexical.hpp"
#include "fairrank/report.hpp"

using namespace fairrank;

namespace {

Document doc_of(const std::string& text) {
  Document doc;
  doc.doc_id = "d";
  doc.text = text;
  return doc;
}

}  // namespace

TEST_CASE("tokenize lowers case and splits on non-alphanumerics") {
  const auto tokens = tokenize("His mother's son");
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[0] == "his");
  CHECK(tokens[1] == "mother");
  CHECK(tokens[2] == "s");
  CHECK(tokens[3] == "son");

  CHECK(tokenize("").empty());
  CHECK(tokenize("...---...").empty());
  CHECK(tokenize("step10 plan") == std::vector<std::string>{"step10", "plan"});
}

TEST_CASE("tokenize count matches an independently constructed fixture") {
  // Build a >1000-char text from a known number of tokens joined with mixed
  // separators; the expected count is the construction count.
  std::ostringstream os;
  const char* separators[] = {" ", ", ", "; ", " -- ", "\n", "\t", "!? "};
  int expected = 0;
  while (os.str().size() < 1000) {
    os << "tok" << expected << separators[expected % 7];
    ++expected;
  }
  CHECK(tokenize(os.str()).size() == static_cast<std::size_t>(expected));
}

TEST_CASE("gender_counts counts token occurrences from both lists") {
  const WordLists lists = default_word_lists();
  const GenderCounts office = gender_counts(doc_of("he went to his office"), lists);
  CHECK(office.male == 2);
  CHECK(office.female == 0);

  const GenderCounts climate = gender_counts(doc_of("a report on climate"), lists);
  CHECK(climate.male == 0);
  CHECK(climate.female == 0);

  // Mixed-gender phrasing: balanced counts defeat the frequency heuristic.
  const GenderCounts mixed = gender_counts(doc_of("his mother praised her son"), lists);
  CHECK(mixed.male == mixed.female);
  CHECK(mixed.male > 0);
}

TEST_CASE("gender_counts includes the title when present") {
  const WordLists lists = default_word_lists();
  Document doc = doc_of("a plain body");
  doc.title = "he said";
  const GenderCounts counts = gender_counts(doc, lists);
  CHECK(counts.male == 1);
}

TEST_CASE("lexical_label applies the majority rule") {
  const WordLists lists = default_word_lists();
  CHECK(lexical_label(doc_of("he and his brother"), lists) == GenderLabel::Male);
  CHECK(lexical_label(doc_of("she told her sister"), lists) == GenderLabel::Female);
  CHECK(lexical_label(doc_of("a report on climate"), lists) == GenderLabel::Neutral);
  // Equal nonzero counts are lexically Neutral; this is the blind spot the
  // prompt-based classifier exists to fix.
  CHECK(lexical_label(doc_of("his mother praised her son"), lists) == GenderLabel::Neutral);
}

TEST_CASE("neutrality_score follows the token-fraction formula") {
  const WordLists lists = default_word_lists();
  CHECK(neutrality_score(doc_of("a report on climate"), lists) == 1.0);
  // 10 tokens, 2 gendered -> 0.8
  const Document ten = doc_of("he saw his team win the cup final last night");
  REQUIRE(tokenize(ten.text).size() == 10);
  CHECK(neutrality_score(ten, lists) == doctest::Approx(0.8));
  CHECK(neutrality_score(doc_of("he she him her"), lists) == doctest::Approx(0.0));
}

TEST_CASE("binary_neutrality diverges from lexical_label on balanced counts") {
  const WordLists lists = default_word_lists();
  const Document balanced = doc_of("his mother praised her son");
  CHECK(lexical_label(balanced, lists) == GenderLabel::Neutral);
  CHECK(binary_neutrality(balanced, lists) == BinaryNeutrality::NonNeutral);

  CHECK(binary_neutrality(doc_of("a report on climate"), lists) == BinaryNeutrality::Neutral);
  CHECK(binary_neutrality(doc_of("he arrived"), lists) == BinaryNeutrality::NonNeutral);
}

TEST_CASE("lexical_label is symmetric under swapping the word lists") {
  const WordLists lists = default_word_lists();
  WordLists swapped;
  swapped.male_terms = lists.female_terms;
  swapped.female_terms = lists.male_terms;

  const char* samples[] = {
      "he and his brother",          "she told her sister",
      "a report on climate",         "his mother praised her son",
      "the queen met the king",      "mr and mrs smith traveled",
  };
  for (const char* text : samples) {
    const GenderLabel original = lexical_label(doc_of(text), lists);
    const GenderLabel mirrored = lexical_label(doc_of(text), swapped);
    if (original == GenderLabel::Male) CHECK(mirrored == GenderLabel::Female);
    if (original == GenderLabel::Female) CHECK(mirrored == GenderLabel::Male);
    if (original == GenderLabel::Neutral) CHECK(mirrored == GenderLabel::Neutral);
  }
}

TEST_CASE("adding a non-gendered token never decreases the neutrality score") {
  const WordLists lists = default_word_lists();
  std::mt19937 rng(23);
  const char* vocabulary[] = {"he", "she", "report", "ranking", "his", "her", "test", "page"};
  std::uniform_int_distribution<int> word(0, 7);
  std::uniform_int_distribution<int> length(1, 20);
  for (int trial = 0; trial < 200; ++trial) {
    std::ostringstream os;
    const int n = length(rng);
    for (int i = 0; i < n; ++i) os << vocabulary[word(rng)] << ' ';
    const Document before = doc_of(os.str());
    const Document after = doc_of(os.str() + " ranking");
    CHECK(neutrality_score(after, lists) >= neutrality_score(before, lists));

    const double tau = neutrality_score(before, lists);
    CHECK(tau >= 0.0);
    CHECK(tau <= 1.0);
    const GenderCounts counts = gender_counts(before, lists);
    CHECK((tau == 1.0) == (counts.male == 0 && counts.female == 0));
  }
}

TEST_CASE("parse_word_lists handles comments, case and validation") {
  const WordLists lists = parse_word_lists("# comment\nhe\nHIM\n\n", "she\nher\n");
  CHECK(lists.male_terms == std::set<std::string>{"he", "him"});
  CHECK(lists.female_terms == std::set<std::string>{"she", "her"});

  CHECK_THROWS_AS(parse_word_lists("he\n", "he\n"), std::invalid_argument);  // overlap
  CHECK_THROWS_AS(parse_word_lists("two words\n", "she\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_word_lists("king's\n", "she\n"), std::invalid_argument);
}

TEST_CASE("default word lists validate and match the shipped data files") {
  const WordLists defaults = default_word_lists();
  validate_word_lists(defaults);
  CHECK(defaults.male_terms.count("he") == 1);
  CHECK(defaults.male_terms.count("male") == 1);
  CHECK(defaults.female_terms.count("she") == 1);
  CHECK(defaults.female_terms.count("female") == 1);

  const std::string root = FAIRRANK_SOURCE_DIR;
  const WordLists from_files = parse_word_lists(read_file(root + "/data/male_terms.txt"),
                                                read_file(root + "/data/female_terms.txt"));
  CHECK(from_files.male_terms == defaults.male_terms);
  CHECK(from_files.female_terms == defaults.female_terms);
}

TEST_CASE("lexical_label_all and neutrality_scores cover a collection") {
  const auto collection =
      load_collection("d1\the arrived\nd2\tshe spoke\nd3\ta report on climate");
  const WordLists lists = default_word_lists();
  const LabelSet labels = lexical_label_all(collection, lists);
  CHECK(labels.provenance == "lexical");
  CHECK(labels.labels.at("d1") == GenderLabel::Male);
  CHECK(labels.labels.at("d2") == GenderLabel::Female);
  CHECK(labels.labels.at("d3") == GenderLabel::Neutral);

  const auto scores = neutrality_scores(collection, lists);
  CHECK(scores.at("d3") == 1.0);
  CHECK(scores.at("d1") < 1.0);
}
