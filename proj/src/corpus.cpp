#include "fairrank/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>
#include <utility>

namespace fairrank {

namespace {

std::string line_err(const char* what, std::size_t line_no, const std::string& line) {
  std::ostringstream os;
  os << what << " at line " << line_no << ": '" << line << "'";
  return os.str();
}

bool parse_int(const std::string& s, int& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream is(line);
  std::string field;
  while (is >> field) fields.push_back(field);
  return fields;
}

// Shortest %g representation that parses back to the identical double.
std::string shortest_double(double value) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    double back = 0.0;
    if (parse_double(std::string(buf), back) && back == value) break;
  }
  return buf;
}

}  // namespace

const char* to_string(GenderLabel label) {
  switch (label) {
    case GenderLabel::Male: return "male";
    case GenderLabel::Female: return "female";
    case GenderLabel::Neutral: return "neutral";
    case GenderLabel::Unparseable: return "unparseable";
  }
  return "?";
}

std::optional<GenderLabel> gender_label_from_token(const std::string& token,
                                                   bool allow_unparseable) {
  const std::string t = to_lower(trim(token));
  if (t == "male") return GenderLabel::Male;
  if (t == "female") return GenderLabel::Female;
  if (t == "neutral") return GenderLabel::Neutral;
  if (allow_unparseable && t == "unparseable") return GenderLabel::Unparseable;
  return std::nullopt;
}

std::string Document::passage() const {
  if (title.has_value()) return *title + " " + text;
  return text;
}

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }
  return lines;
}

std::vector<std::string> split_tab(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return fields;
}

Run parse_run(const std::string& text) {
  Run run;
  std::set<std::pair<std::string, std::string>> seen_docs;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (trim(line).empty()) continue;
    const auto fields = split_whitespace(line);
    if (fields.size() != 6) throw ParseError(line_err("malformed run line", i + 1, line));
    const std::string& qid = fields[0];
    if (fields[1] != "Q0") throw ParseError(line_err("expected literal Q0", i + 1, line));
    const std::string& docid = fields[2];
    RankEntry entry;
    entry.doc_id = docid;
    if (!parse_int(fields[3], entry.rank) || entry.rank < 1)
      throw ParseError(line_err("bad rank field", i + 1, line));
    if (!parse_double(fields[4], entry.score))
      throw ParseError(line_err("bad score field", i + 1, line));
    if (!seen_docs.insert({qid, docid}).second)
      throw ParseError("duplicate document '" + docid + "' for query '" + qid + "'");
    if (run.tag.empty()) run.tag = fields[5];
    auto& list = run.queries[qid];
    list.query_id = qid;
    list.entries.push_back(std::move(entry));
  }
  for (auto& [qid, list] : run.queries) {
    std::stable_sort(list.entries.begin(), list.entries.end(),
                     [](const RankEntry& a, const RankEntry& b) { return a.rank < b.rank; });
    for (std::size_t i = 1; i < list.entries.size(); ++i) {
      if (list.entries[i].rank == list.entries[i - 1].rank)
        throw ParseError("duplicate rank " + std::to_string(list.entries[i].rank) +
                         " for query '" + qid + "'");
    }
  }
  return run;
}

std::string serialize_run(const Run& run) {
  std::ostringstream os;
  for (const auto& [qid, list] : run.queries) {
    for (const auto& entry : list.entries) {
      os << qid << " Q0 " << entry.doc_id << ' ' << entry.rank << ' '
         << shortest_double(entry.score) << ' ' << run.tag << '\n';
    }
  }
  return os.str();
}

Qrels parse_qrels(const std::string& text) {
  Qrels qrels;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (trim(line).empty()) continue;
    const auto fields = split_whitespace(line);
    if (fields.size() != 4) throw ParseError(line_err("malformed qrels line", i + 1, line));
    int grade = 0;
    if (!parse_int(fields[3], grade))
      throw ParseError(line_err("bad grade field", i + 1, line));
    if (grade < 0) throw ParseError(line_err("negative grade", i + 1, line));
    auto& per_query = qrels.grades[fields[0]];
    if (!per_query.emplace(fields[2], grade).second)
      throw ParseError("duplicate qrels pair (" + fields[0] + ", " + fields[2] + ")");
  }
  return qrels;
}

LabelSet load_labels(const std::string& text, const std::string& provenance) {
  LabelSet set;
  set.provenance = provenance;
  const bool allow_unparseable = provenance.rfind("llm", 0) == 0;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (trim(line).empty()) continue;
    const auto fields = split_tab(line);
    if (fields.size() != 2) throw ParseError(line_err("malformed label line", i + 1, line));
    const std::string doc_id = trim(fields[0]);
    if (doc_id.empty()) throw ParseError(line_err("empty doc_id", i + 1, line));
    const auto label = gender_label_from_token(fields[1], allow_unparseable);
    if (!label)
      throw ParseError(line_err("unknown label token", i + 1, line));
    if (!set.labels.emplace(doc_id, *label).second)
      throw ParseError("duplicate doc_id '" + doc_id + "' in label file");
  }
  return set;
}

std::map<std::string, Document> load_collection(const std::string& text) {
  std::map<std::string, Document> docs;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    const auto fields = split_tab(line);
    if (fields.size() != 2 && fields.size() != 3)
      throw ParseError(line_err("malformed collection line", i + 1, line));
    Document doc;
    doc.doc_id = trim(fields[0]);
    if (doc.doc_id.empty()) throw ParseError(line_err("empty doc_id", i + 1, line));
    doc.text = fields[1];
    if (fields.size() == 3) doc.title = fields[2];
    if (doc.text.empty() && (!doc.title || doc.title->empty()))
      throw ParseError(line_err("document with no text and no title", i + 1, line));
    const std::string key = doc.doc_id;
    if (!docs.emplace(key, std::move(doc)).second)
      throw ParseError("duplicate doc_id '" + key + "' in collection");
  }
  return docs;
}

std::vector<StereotypeTag> load_stereotypes(const std::string& text) {
  std::vector<StereotypeTag> tags;
  std::set<std::string> seen;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (trim(line).empty()) continue;
    const auto fields = split_tab(line);
    if (fields.size() != 2)
      throw ParseError(line_err("malformed stereotype line", i + 1, line));
    StereotypeTag tag;
    tag.doc_id = trim(fields[0]);
    if (tag.doc_id.empty()) throw ParseError(line_err("empty doc_id", i + 1, line));
    const std::string target = to_lower(trim(fields[1]));
    if (target == "female") {
      tag.target = StereotypeTarget::FemaleStereotype;
    } else if (target == "male") {
      tag.target = StereotypeTarget::MaleStereotype;
    } else {
      throw ParseError(line_err("unknown stereotype target", i + 1, line));
    }
    if (!seen.insert(tag.doc_id).second)
      throw ParseError("duplicate doc_id '" + tag.doc_id + "' in stereotype file");
    tags.push_back(std::move(tag));
  }
  return tags;
}

RankedList truncate(const RankedList& list, int k) {
  if (k < 1) throw std::invalid_argument("truncate: cutoff must be >= 1");
  RankedList out;
  out.query_id = list.query_id;
  const std::size_t n = std::min<std::size_t>(list.entries.size(), static_cast<std::size_t>(k));
  out.entries.assign(list.entries.begin(), list.entries.begin() + n);
  return out;
}

}  // namespace fairrank
