// Core data model and file-format parsers: documents, runs, qrels, label
// files, stereotype tags. Everything downstream consumes these types.
// All types are immutable after construction and safe to share across threads.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairrank {

/// Thrown by the file-format parsers with a line-attributed message.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GenderLabel { Male, Female, Neutral, Unparseable };

const char* to_string(GenderLabel label);

/// Case-insensitive, whitespace-trimmed match against the label vocabulary.
/// Returns nullopt for unknown tokens.
std::optional<GenderLabel> gender_label_from_token(const std::string& token,
                                                   bool allow_unparseable = false);

struct Document {
  std::string doc_id;
  std::optional<std::string> title;
  std::string text;

  /// "{title} {text}" when a title exists, otherwise the text alone.
  std::string passage() const;
};

struct RankEntry {
  std::string doc_id;
  int rank = 0;  // as given in the run file, 1-based
  double score = 0.0;
};

struct RankedList {
  std::string query_id;
  std::vector<RankEntry> entries;  // strictly ascending by rank
};

struct Run {
  std::map<std::string, RankedList> queries;
  std::string tag;
};

struct Qrels {
  // query_id -> doc_id -> relevance grade (>= 0)
  std::map<std::string, std::map<std::string, int>> grades;
};

struct LabelSet {
  std::map<std::string, GenderLabel> labels;
  std::string provenance;  // "human", "lexical", or "llm:<model>:<mode>"
};

enum class StereotypeTarget { FemaleStereotype, MaleStereotype };

struct StereotypeTag {
  std::string doc_id;
  StereotypeTarget target;
};

struct EvalConfig {
  int cutoff = 10;
  std::vector<double> alphas{0.2, 0.5, 0.7};
};

/// Parses a TREC run file: `qid Q0 docid rank score tag`, whitespace-separated.
/// Entries are grouped per query and sorted by rank ascending. The rank field
/// is the ordering authority; scores are carried but never reorder anything.
Run parse_run(const std::string& text);

/// Inverse of parse_run; scores are rendered with round-trip precision.
std::string serialize_run(const Run& run);

/// Parses qrels lines `qid 0 docid grade`. The second column is ignored.
Qrels parse_qrels(const std::string& text);

/// Parses a TSV label file `doc_id<TAB>label`. Label tokens are matched
/// case-insensitively. The token "unparseable" is accepted only for llm
/// provenance (provenance starting with "llm"); human and lexical label sets
/// never carry it.
LabelSet load_labels(const std::string& text, const std::string& provenance);

/// Parses a collection TSV `doc_id<TAB>text[<TAB>title]`.
std::map<std::string, Document> load_collection(const std::string& text);

/// Parses a stereotype-target TSV `doc_id<TAB>{female|male}`.
std::vector<StereotypeTag> load_stereotypes(const std::string& text);

/// First min(k, len) entries by rank, order preserved. k must be >= 1.
RankedList truncate(const RankedList& list, int k);

// Small shared text helpers used by the parsers.
std::string trim(const std::string& s);
std::string to_lower(const std::string& s);
std::vector<std::string> split_lines(const std::string& text);  // drops trailing \r
std::vector<std::string> split_tab(const std::string& line);

}  // namespace fairrank
