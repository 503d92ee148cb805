#include "fairrank/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fairrank {

namespace {

using nlohmann::json;

std::string alpha_column(double alpha) { return "cwex@" + format_double_roundtrip(alpha); }

void emit_meta(std::ostringstream& os, const std::map<std::string, std::string>& extra) {
  for (const auto& [key, value] : extra) os << "# " << key << " = " << value << '\n';
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) os << sep;
    os << items[i];
  }
  return os.str();
}

std::string alphas_string(const std::vector<double>& alphas) {
  std::vector<std::string> parts;
  parts.reserve(alphas.size());
  for (double alpha : alphas) parts.push_back(format_double_roundtrip(alpha));
  return join(parts, ",");
}

json fairness_row_json(const FairnessRow& row, const std::vector<double>& alphas) {
  json cwex = json::object();
  for (std::size_t a = 0; a < alphas.size(); ++a)
    cwex[format_double_roundtrip(alphas[a])] = row.cwex[a];
  return {{"query_id", row.query_id},
          {"cwex", cwex},
          {"delta_exposure", row.delta_exposure},
          {"nfairr", row.nfairr}};
}

json fairness_meta_json(const FairnessReport& report) {
  json meta = {{"cutoff", report.cutoff},
               {"alphas", report.alphas},
               {"aggregation", "macro"},
               {"run_tag", report.run_tag},
               {"labels_provenance", report.labels_provenance},
               {"skipped_queries", report.skipped_queries},
               {"evaluated_queries", report.rows.size()}};
  for (const auto& [key, value] : report.extra) meta[key] = value;
  return meta;
}

json utility_meta_json(const UtilityReport& report) {
  json meta = {{"cutoff", report.cutoff},
               {"aggregation", "macro"},
               {"run_tag", report.run_tag},
               {"queries_without_qrels", report.queries_without_qrels},
               {"evaluated_queries", report.rows.size()}};
  for (const auto& [key, value] : report.extra) meta[key] = value;
  return meta;
}

void emit_fairness_meta_csv(std::ostringstream& os, const FairnessReport& report) {
  os << "# cutoff = " << report.cutoff << '\n';
  os << "# alpha = " << alphas_string(report.alphas) << '\n';
  os << "# aggregation = macro\n";
  if (!report.run_tag.empty()) os << "# run_tag = " << report.run_tag << '\n';
  if (!report.labels_provenance.empty())
    os << "# labels_provenance = " << report.labels_provenance << '\n';
  if (!report.skipped_queries.empty())
    os << "# skipped_queries = " << join(report.skipped_queries, ";") << '\n';
  emit_meta(os, report.extra);
}

void emit_utility_meta_csv(std::ostringstream& os, const UtilityReport& report) {
  os << "# cutoff = " << report.cutoff << '\n';
  os << "# aggregation = macro\n";
  if (!report.run_tag.empty()) os << "# run_tag = " << report.run_tag << '\n';
  if (!report.queries_without_qrels.empty())
    os << "# queries_without_qrels = " << join(report.queries_without_qrels, ";") << '\n';
  emit_meta(os, report.extra);
}

const UtilityRow* find_utility_row(const UtilityReport& utility, const std::string& qid) {
  for (const auto& row : utility.rows) {
    if (row.query_id == qid) return &row;
  }
  return nullptr;
}

}  // namespace

std::optional<ReportFormat> report_format_from_token(const std::string& token) {
  const std::string t = to_lower(trim(token));
  if (t == "csv") return ReportFormat::Csv;
  if (t == "json") return ReportFormat::Json;
  if (t == "md" || t == "markdown") return ReportFormat::Markdown;
  return std::nullopt;
}

std::string format_metric(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

std::string format_double_roundtrip(double value) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::string csv_escape(const std::string& s) {
  bool needs_quotes = false;
  for (char c : s) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return s;
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string render_fairness(const FairnessReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    json doc = {{"metadata", fairness_meta_json(report)},
                {"per_query", json::array()},
                {"macro", json::object()}};
    for (const auto& row : report.rows)
      doc["per_query"].push_back(fairness_row_json(row, report.alphas));
    json macro_cwex = json::object();
    for (std::size_t a = 0; a < report.alphas.size(); ++a)
      macro_cwex[format_double_roundtrip(report.alphas[a])] = report.macro_cwex[a];
    doc["macro"] = {{"cwex", macro_cwex},
                    {"delta_exposure", report.macro_delta_exposure},
                    {"nfairr", report.macro_nfairr}};
    return doc.dump(2) + "\n";
  }

  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    emit_fairness_meta_csv(os, report);
    os << "query_id";
    for (double alpha : report.alphas) os << ',' << alpha_column(alpha);
    os << ",delta_exposure,nfairr\n";
    for (const auto& row : report.rows) {
      os << csv_escape(row.query_id);
      for (double value : row.cwex) os << ',' << format_metric(value);
      os << ',' << format_metric(row.delta_exposure) << ',' << format_metric(row.nfairr)
         << '\n';
    }
    os << "macro";
    for (double value : report.macro_cwex) os << ',' << format_metric(value);
    os << ',' << format_metric(report.macro_delta_exposure) << ','
       << format_metric(report.macro_nfairr) << '\n';
    return os.str();
  }

  // Markdown, mirroring the CWEx-per-alpha / delta-exposure / NFaiRR column order.
  os << "| Query |";
  for (double alpha : report.alphas) os << " CWEx (" << format_double_roundtrip(alpha) << ") |";
  os << " ΔExp. | NFaiRR |\n";
  os << "|---|";
  for (std::size_t a = 0; a < report.alphas.size(); ++a) os << "---|";
  os << "---|---|\n";
  for (const auto& row : report.rows) {
    os << "| " << row.query_id << " |";
    for (double value : row.cwex) os << ' ' << format_metric(value) << " |";
    os << ' ' << format_metric(row.delta_exposure) << " | " << format_metric(row.nfairr)
       << " |\n";
  }
  os << "| **macro** |";
  for (double value : report.macro_cwex) os << ' ' << format_metric(value) << " |";
  os << ' ' << format_metric(report.macro_delta_exposure) << " | "
     << format_metric(report.macro_nfairr) << " |\n";
  return os.str();
}

std::string render_utility(const UtilityReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    json doc = {{"metadata", utility_meta_json(report)},
                {"per_query", json::array()},
                {"macro", {{"mrr", report.macro_mrr}, {"ndcg", report.macro_ndcg}}}};
    for (const auto& row : report.rows) {
      doc["per_query"].push_back({{"query_id", row.query_id},
                                  {"reciprocal_rank", row.reciprocal_rank},
                                  {"ndcg", row.ndcg}});
    }
    return doc.dump(2) + "\n";
  }

  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    emit_utility_meta_csv(os, report);
    os << "query_id,reciprocal_rank,ndcg\n";
    for (const auto& row : report.rows) {
      os << csv_escape(row.query_id) << ',' << format_metric(row.reciprocal_rank) << ','
         << format_metric(row.ndcg) << '\n';
    }
    os << "macro," << format_metric(report.macro_mrr) << ','
       << format_metric(report.macro_ndcg) << '\n';
    return os.str();
  }

  os << "| Query | MRR | nDCG |\n|---|---|---|\n";
  for (const auto& row : report.rows) {
    os << "| " << row.query_id << " | " << format_metric(row.reciprocal_rank) << " | "
       << format_metric(row.ndcg) << " |\n";
  }
  os << "| **macro** | " << format_metric(report.macro_mrr) << " | "
     << format_metric(report.macro_ndcg) << " |\n";
  return os.str();
}

std::string render_agreement(const AgreementReport& report, ReportFormat format) {
  std::vector<std::pair<std::string, std::string>> rows;
  if (report.accuracy) rows.emplace_back("accuracy", format_metric(*report.accuracy));
  if (report.female_stereotype_accuracy)
    rows.emplace_back("accuracy_female_stereotype",
                      format_metric(*report.female_stereotype_accuracy));
  if (report.male_stereotype_accuracy)
    rows.emplace_back("accuracy_male_stereotype",
                      format_metric(*report.male_stereotype_accuracy));
  if (report.cohens_kappa) rows.emplace_back("cohens_kappa", format_metric(*report.cohens_kappa));
  if (report.fleiss_kappa) rows.emplace_back("fleiss_kappa", format_metric(*report.fleiss_kappa));
  for (const auto& [label, count] : report.majority_decided)
    rows.emplace_back("majority_decided_" + label, std::to_string(count));
  if (!report.unresolved_docs.empty() || !report.majority_decided.empty())
    rows.emplace_back("majority_unresolved", std::to_string(report.unresolved_docs.size()));

  if (format == ReportFormat::Json) {
    json doc = {{"metadata", json::object()}, {"metrics", json::object()}};
    for (const auto& [key, value] : report.extra) doc["metadata"][key] = value;
    if (report.accuracy) doc["metrics"]["accuracy"] = *report.accuracy;
    if (report.female_stereotype_accuracy)
      doc["metrics"]["accuracy_female_stereotype"] = *report.female_stereotype_accuracy;
    if (report.male_stereotype_accuracy)
      doc["metrics"]["accuracy_male_stereotype"] = *report.male_stereotype_accuracy;
    if (report.cohens_kappa) doc["metrics"]["cohens_kappa"] = *report.cohens_kappa;
    if (report.fleiss_kappa) doc["metrics"]["fleiss_kappa"] = *report.fleiss_kappa;
    if (!report.majority_decided.empty() || !report.unresolved_docs.empty()) {
      json decided = json::object();
      for (const auto& [label, count] : report.majority_decided) decided[label] = count;
      doc["metrics"]["majority_decided"] = decided;
      doc["metrics"]["majority_unresolved"] = report.unresolved_docs.size();
      doc["metrics"]["unresolved_docs"] = report.unresolved_docs;
    }
    return doc.dump(2) + "\n";
  }

  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    emit_meta(os, report.extra);
    os << "metric,value\n";
    for (const auto& [key, value] : rows) os << key << ',' << value << '\n';
    return os.str();
  }

  os << "| Metric | Value |\n|---|---|\n";
  for (const auto& [key, value] : rows) os << "| " << key << " | " << value << " |\n";
  return os.str();
}

std::string render_combined(const FairnessReport& fairness, const UtilityReport& utility,
                            ReportFormat format) {
  if (format == ReportFormat::Json) {
    json doc = {{"metadata",
                 {{"fairness", fairness_meta_json(fairness)},
                  {"utility", utility_meta_json(utility)}}},
                {"per_query", json::array()},
                {"macro", json::object()}};
    for (const auto& row : fairness.rows) {
      json entry = fairness_row_json(row, fairness.alphas);
      if (const UtilityRow* urow = find_utility_row(utility, row.query_id)) {
        entry["reciprocal_rank"] = urow->reciprocal_rank;
        entry["ndcg"] = urow->ndcg;
      }
      doc["per_query"].push_back(entry);
    }
    json macro_cwex = json::object();
    for (std::size_t a = 0; a < fairness.alphas.size(); ++a)
      macro_cwex[format_double_roundtrip(fairness.alphas[a])] = fairness.macro_cwex[a];
    doc["macro"] = {{"cwex", macro_cwex},
                    {"delta_exposure", fairness.macro_delta_exposure},
                    {"nfairr", fairness.macro_nfairr},
                    {"mrr", utility.macro_mrr},
                    {"ndcg", utility.macro_ndcg}};
    return doc.dump(2) + "\n";
  }

  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    emit_fairness_meta_csv(os, fairness);
    os << "query_id";
    for (double alpha : fairness.alphas) os << ',' << alpha_column(alpha);
    os << ",delta_exposure,nfairr,reciprocal_rank,ndcg\n";
    for (const auto& row : fairness.rows) {
      os << csv_escape(row.query_id);
      for (double value : row.cwex) os << ',' << format_metric(value);
      os << ',' << format_metric(row.delta_exposure) << ',' << format_metric(row.nfairr);
      if (const UtilityRow* urow = find_utility_row(utility, row.query_id)) {
        os << ',' << format_metric(urow->reciprocal_rank) << ',' << format_metric(urow->ndcg);
      } else {
        os << ",,";
      }
      os << '\n';
    }
    os << "macro";
    for (double value : fairness.macro_cwex) os << ',' << format_metric(value);
    os << ',' << format_metric(fairness.macro_delta_exposure) << ','
       << format_metric(fairness.macro_nfairr) << ',' << format_metric(utility.macro_mrr)
       << ',' << format_metric(utility.macro_ndcg) << '\n';
    return os.str();
  }

  os << "| Query |";
  for (double alpha : fairness.alphas) os << " CWEx (" << format_double_roundtrip(alpha) << ") |";
  os << " ΔExp. | NFaiRR | MRR | nDCG |\n";
  os << "|---|";
  for (std::size_t a = 0; a < fairness.alphas.size(); ++a) os << "---|";
  os << "---|---|---|---|\n";
  for (const auto& row : fairness.rows) {
    os << "| " << row.query_id << " |";
    for (double value : row.cwex) os << ' ' << format_metric(value) << " |";
    os << ' ' << format_metric(row.delta_exposure) << " | " << format_metric(row.nfairr) << " |";
    if (const UtilityRow* urow = find_utility_row(utility, row.query_id)) {
      os << ' ' << format_metric(urow->reciprocal_rank) << " | " << format_metric(urow->ndcg)
         << " |\n";
    } else {
      os << "  |  |\n";
    }
  }
  os << "| **macro** |";
  for (double value : fairness.macro_cwex) os << ' ' << format_metric(value) << " |";
  os << ' ' << format_metric(fairness.macro_delta_exposure) << " | "
     << format_metric(fairness.macro_nfairr) << " | " << format_metric(utility.macro_mrr)
     << " | " << format_metric(utility.macro_ndcg) << " |\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace fairrank
