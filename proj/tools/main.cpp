// Command-line front end: classify collections, evaluate runs, compute
// agreement statistics, and render the combined fairness/utility report.

#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairrank/agreement.hpp"
#include "fairrank/corpus.hpp"
#include "fairrank/digest.hpp"
#include "fairrank/fairness.hpp"
#include "fairrank/lexical.hpp"
#include "fairrank/llm_client.hpp"
#include "fairrank/report.hpp"
#include "fairrank/utility.hpp"

namespace {

using namespace fairrank;

struct Options {
  std::string config_path;

  std::string run_path;
  std::string qrels_path;
  std::string collection_path;
  std::string labels_path;
  std::string gold_path;
  std::string male_terms_path;
  std::string female_terms_path;
  std::string votes_path;
  std::string stereotypes_path;
  std::string adjudication_path;

  std::string engine = "lexical";
  std::string mode = "zero";
  std::string model;
  std::string endpoint;
  std::string api_key_env = "OPENAI_API_KEY";
  int parallelism = 4;
  std::string cache_path;

  int cutoff = 10;
  std::vector<double> alphas{0.2, 0.5, 0.7};

  std::string out_path;
  std::string format = "csv";
};

std::vector<double> parse_alpha_list(const std::string& value) {
  std::vector<double> alphas;
  std::istringstream is(value);
  std::string part;
  while (std::getline(is, part, ',')) {
    try {
      alphas.push_back(std::stod(trim(part)));
    } catch (const std::exception&) {
      throw std::runtime_error("bad alpha value '" + part + "'");
    }
  }
  if (alphas.empty()) throw std::runtime_error("empty alpha list");
  return alphas;
}

int parse_positive_int(const std::string& value, const std::string& key) {
  try {
    const int parsed = std::stoi(trim(value));
    if (parsed < 1) throw std::runtime_error("");
    return parsed;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "' needs a positive integer, got '" +
                             value + "'");
  }
}

// Config files are flat `key=value` lines using flag names as keys; '#' lines
// are comments. Values only apply to flags the user did not pass explicitly.
void apply_config(const CLI::App* cmd, Options& opt) {
  const std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"run", [&](const std::string& v) { opt.run_path = v; }},
      {"qrels", [&](const std::string& v) { opt.qrels_path = v; }},
      {"collection", [&](const std::string& v) { opt.collection_path = v; }},
      {"labels", [&](const std::string& v) { opt.labels_path = v; }},
      {"gold", [&](const std::string& v) { opt.gold_path = v; }},
      {"male-terms", [&](const std::string& v) { opt.male_terms_path = v; }},
      {"female-terms", [&](const std::string& v) { opt.female_terms_path = v; }},
      {"votes", [&](const std::string& v) { opt.votes_path = v; }},
      {"stereotypes", [&](const std::string& v) { opt.stereotypes_path = v; }},
      {"adjudication", [&](const std::string& v) { opt.adjudication_path = v; }},
      {"engine", [&](const std::string& v) { opt.engine = v; }},
      {"mode", [&](const std::string& v) { opt.mode = v; }},
      {"model", [&](const std::string& v) { opt.model = v; }},
      {"endpoint", [&](const std::string& v) { opt.endpoint = v; }},
      {"api-key-env", [&](const std::string& v) { opt.api_key_env = v; }},
      {"parallelism",
       [&](const std::string& v) { opt.parallelism = parse_positive_int(v, "parallelism"); }},
      {"cache", [&](const std::string& v) { opt.cache_path = v; }},
      {"k", [&](const std::string& v) { opt.cutoff = parse_positive_int(v, "k"); }},
      {"alpha", [&](const std::string& v) { opt.alphas = parse_alpha_list(v); }},
      {"out", [&](const std::string& v) { opt.out_path = v; }},
      {"format", [&](const std::string& v) { opt.format = v; }},
  };

  const auto lines = split_lines(read_file(opt.config_path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(i + 1) +
                               " is not key=value: '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto setter = setters.find(key);
    if (setter == setters.end() || cmd->get_option_no_throw("--" + key) == nullptr)
      throw std::runtime_error("config key '" + key + "' is not a flag of '" +
                               cmd->get_name() + "'");
    if (cmd->count("--" + key) > 0) continue;  // command line wins
    setter->second(value);
  }
}

void require_path(const std::string& path, const char* flag) {
  if (path.empty()) throw std::runtime_error(std::string(flag) + " is required");
}

WordLists load_word_lists(const Options& opt) {
  if (opt.male_terms_path.empty() != opt.female_terms_path.empty())
    throw std::runtime_error("provide both --male-terms and --female-terms, or neither");
  if (opt.male_terms_path.empty()) return default_word_lists();
  return parse_word_lists(read_file(opt.male_terms_path), read_file(opt.female_terms_path));
}

std::string terms_digest(const std::set<std::string>& terms) {
  std::string joined;
  for (const auto& term : terms) {
    joined += term;
    joined += '\n';
  }
  return sha256_hex(joined);
}

void write_or_print(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    atomic_write_file(out_path, content);
  }
}

ReportFormat parse_format(const std::string& token) {
  const auto format = report_format_from_token(token);
  if (!format) throw std::runtime_error("unknown report format '" + token + "'");
  return *format;
}

std::string label_file_content(const LabelSet& set) {
  std::ostringstream os;
  for (const auto& [doc_id, label] : set.labels) os << doc_id << '\t' << to_string(label) << '\n';
  return os.str();
}

void print_distribution(const LabelSet& set, bool show_unparseable) {
  int male = 0, female = 0, neutral = 0, unparseable = 0;
  for (const auto& [doc_id, label] : set.labels) {
    switch (label) {
      case GenderLabel::Male: ++male; break;
      case GenderLabel::Female: ++female; break;
      case GenderLabel::Neutral: ++neutral; break;
      case GenderLabel::Unparseable: ++unparseable; break;
    }
  }
  std::cout << "total " << set.labels.size() << '\n'
            << "male " << male << '\n'
            << "female " << female << '\n'
            << "neutral " << neutral << '\n';
  if (show_unparseable) std::cout << "unparseable " << unparseable << '\n';
}

void fill_word_list_meta(std::map<std::string, std::string>& extra, const WordLists& lists) {
  extra["male_terms_digest"] = terms_digest(lists.male_terms);
  extra["female_terms_digest"] = terms_digest(lists.female_terms);
  extra["prompt_template_version"] = kPromptTemplateVersion;
}

int cmd_classify(const Options& opt) {
  require_path(opt.collection_path, "--collection");
  if (opt.engine != "lexical" && opt.engine != "llm")
    throw std::runtime_error("unknown engine '" + opt.engine + "'");
  const auto collection = load_collection(read_file(opt.collection_path));

  if (opt.engine == "lexical") {
    const WordLists lists = load_word_lists(opt);
    const LabelSet labels = lexical_label_all(collection, lists);
    if (!opt.out_path.empty()) atomic_write_file(opt.out_path, label_file_content(labels));
    print_distribution(labels, false);
    return 0;
  }

  if (opt.endpoint.empty()) throw std::runtime_error("--endpoint is required for --engine llm");
  if (opt.model.empty()) throw std::runtime_error("--model is required for --engine llm");
  const auto mode = prompt_mode_from_token(opt.mode);
  if (!mode) throw std::runtime_error("unknown prompt mode '" + opt.mode + "'");

  EndpointConfig config;
  config.url = opt.endpoint;
  config.model = opt.model;
  config.api_key_env = opt.api_key_env;
  std::shared_ptr<ResponseCache> cache;
  if (!opt.cache_path.empty()) cache = std::make_shared<ResponseCache>(opt.cache_path);
  LlmClient client(config, cache);

  std::vector<Document> docs;
  docs.reserve(collection.size());
  for (const auto& [doc_id, doc] : collection) docs.push_back(doc);

  const BatchResult result = client.batch_classify(docs, *mode, opt.parallelism);
  const std::string content = label_file_content(result.labels);
  if (!result.failures.empty()) {
    for (const auto& failure : result.failures)
      std::cerr << "error: document '" << failure.doc_id << "': " << failure.message << '\n';
    std::cerr << result.failures.size() << " of " << docs.size() << " documents failed";
    if (!opt.out_path.empty()) {
      atomic_write_file(opt.out_path + ".partial", content);
      std::cerr << "; partial labels written to '" << opt.out_path << ".partial'";
    }
    std::cerr << '\n';
    print_distribution(result.labels, true);
    return 1;
  }
  if (!opt.out_path.empty()) atomic_write_file(opt.out_path, content);
  print_distribution(result.labels, true);
  return 0;
}

int cmd_fairness(const Options& opt) {
  require_path(opt.run_path, "--run");
  require_path(opt.labels_path, "--labels");
  require_path(opt.collection_path, "--collection");
  const Run run = parse_run(read_file(opt.run_path));
  // LLM-produced label files may carry "unparseable" rows; the fairness
  // metrics reject such documents only if they appear in a truncated prefix.
  const LabelSet labels = load_labels(read_file(opt.labels_path), "llm:file");
  const auto collection = load_collection(read_file(opt.collection_path));
  const WordLists lists = load_word_lists(opt);
  const auto neutrality = neutrality_scores(collection, lists);

  EvalConfig config;
  config.cutoff = opt.cutoff;
  config.alphas = opt.alphas;
  FairnessReport report = evaluate_run(run, labels, neutrality, config);
  fill_word_list_meta(report.extra, lists);
  report.extra["run_file"] = opt.run_path;
  report.extra["labels_file"] = opt.labels_path;
  report.extra["collection_file"] = opt.collection_path;

  write_or_print(opt.out_path, render_fairness(report, parse_format(opt.format)));
  return 0;
}

int cmd_utility(const Options& opt) {
  require_path(opt.run_path, "--run");
  require_path(opt.qrels_path, "--qrels");
  const Run run = parse_run(read_file(opt.run_path));
  const Qrels qrels = parse_qrels(read_file(opt.qrels_path));
  UtilityReport report = evaluate_utility(run, qrels, opt.cutoff);
  report.extra["run_file"] = opt.run_path;
  report.extra["qrels_file"] = opt.qrels_path;
  if (!report.queries_without_qrels.empty())
    std::cerr << "warning: " << report.queries_without_qrels.size()
              << " queries have no qrels entries\n";
  write_or_print(opt.out_path, render_utility(report, parse_format(opt.format)));
  return 0;
}

int cmd_agreement(const Options& opt) {
  const bool have_pair = !opt.labels_path.empty() || !opt.gold_path.empty();
  const bool have_votes = !opt.votes_path.empty();
  if (!have_pair && !have_votes)
    throw std::runtime_error("provide --labels and --gold, or --votes");

  AgreementReport report;
  if (have_pair) {
    if (opt.labels_path.empty() || opt.gold_path.empty())
      throw std::runtime_error("--labels and --gold must be given together");
    const LabelSet pred = load_labels(read_file(opt.labels_path), "llm:pred");
    const LabelSet gold = load_labels(read_file(opt.gold_path), "human");
    report.accuracy = accuracy(pred, gold);
    report.cohens_kappa = cohens_kappa(pred, gold);
    if (!opt.stereotypes_path.empty()) {
      const auto tags = load_stereotypes(read_file(opt.stereotypes_path));
      const auto [female_acc, male_acc] = stereotype_accuracy(pred, gold, tags);
      report.female_stereotype_accuracy = female_acc;
      report.male_stereotype_accuracy = male_acc;
      report.extra["stereotypes_file"] = opt.stereotypes_path;
    }
    report.extra["labels_file"] = opt.labels_path;
    report.extra["gold_file"] = opt.gold_path;
  }

  if (have_votes) {
    const VoteTable table = parse_votes(read_file(opt.votes_path));
    report.fleiss_kappa = fleiss_kappa(to_matrix(table));
    std::ostringstream adjudication;
    adjudication << "doc_id\tmale\tfemale\tneutral\n";
    for (const auto& [doc_id, votes] : table.votes) {
      const VoteOutcome outcome = majority_vote(votes);
      if (outcome) {
        report.majority_decided[to_string(*outcome)] += 1;
        continue;
      }
      report.unresolved_docs.push_back(doc_id);
      int counts[3] = {0, 0, 0};
      for (GenderLabel vote : votes) {
        if (vote == GenderLabel::Male) ++counts[0];
        else if (vote == GenderLabel::Female) ++counts[1];
        else ++counts[2];
      }
      adjudication << doc_id << '\t' << counts[0] << '\t' << counts[1] << '\t' << counts[2]
                   << '\n';
    }
    std::string adjudication_path = opt.adjudication_path;
    if (adjudication_path.empty())
      adjudication_path = opt.out_path.empty() ? "adjudication.tsv"
                                               : opt.out_path + ".adjudication.tsv";
    atomic_write_file(adjudication_path, adjudication.str());
    report.extra["votes_file"] = opt.votes_path;
    report.extra["adjudication_file"] = adjudication_path;
  }

  write_or_print(opt.out_path, render_agreement(report, parse_format(opt.format)));
  return 0;
}

int cmd_report(const Options& opt) {
  require_path(opt.run_path, "--run");
  require_path(opt.labels_path, "--labels");
  require_path(opt.collection_path, "--collection");
  require_path(opt.qrels_path, "--qrels");
  const Run run = parse_run(read_file(opt.run_path));
  const LabelSet labels = load_labels(read_file(opt.labels_path), "llm:file");
  const auto collection = load_collection(read_file(opt.collection_path));
  const Qrels qrels = parse_qrels(read_file(opt.qrels_path));
  const WordLists lists = load_word_lists(opt);
  const auto neutrality = neutrality_scores(collection, lists);

  EvalConfig config;
  config.cutoff = opt.cutoff;
  config.alphas = opt.alphas;
  FairnessReport fairness = evaluate_run(run, labels, neutrality, config);
  fill_word_list_meta(fairness.extra, lists);
  fairness.extra["run_file"] = opt.run_path;
  fairness.extra["labels_file"] = opt.labels_path;
  fairness.extra["collection_file"] = opt.collection_path;
  fairness.extra["qrels_file"] = opt.qrels_path;
  const UtilityReport utility = evaluate_utility(run, qrels, opt.cutoff);

  write_or_print(opt.out_path, render_combined(fairness, utility, parse_format(opt.format)));
  return 0;
}

void add_config_option(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path,
                  "key=value config file; explicit flags take precedence")
      ->check(CLI::ExistingFile);
}

void add_eval_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--k", opt.cutoff, "ranking cutoff")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", opt.alphas, "comma-separated CWEx alpha values")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
}

void add_output_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--out", opt.out_path, "output path (stdout when omitted)");
  cmd->add_option("--format", opt.format, "report format")
      ->check(CLI::IsMember({"csv", "json", "md", "markdown"}));
}

void add_word_list_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--male-terms", opt.male_terms_path, "male word-list file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--female-terms", opt.female_terms_path, "female word-list file")
      ->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gender-fairness evaluation for ranked retrieval outputs"};
  app.require_subcommand(1);

  Options opt;

  CLI::App* classify = app.add_subcommand("classify", "label a document collection");
  add_config_option(classify, opt);
  classify->add_option("--collection", opt.collection_path, "collection TSV")
      ->check(CLI::ExistingFile);
  classify->add_option("--engine", opt.engine, "classifier engine")
      ->check(CLI::IsMember({"lexical", "llm"}));
  classify->add_option("--mode", opt.mode, "prompt mode")
      ->check(CLI::IsMember({"zero", "one", "three", "cot"}));
  classify->add_option("--model", opt.model, "model name");
  classify->add_option("--endpoint", opt.endpoint, "chat-completions endpoint URL");
  classify->add_option("--api-key-env", opt.api_key_env, "env var holding the API key");
  classify->add_option("--parallelism", opt.parallelism, "max in-flight requests")
      ->check(CLI::PositiveNumber);
  classify->add_option("--cache", opt.cache_path, "response cache file");
  add_word_list_options(classify, opt);
  classify->add_option("--out", opt.out_path, "label file to write");

  CLI::App* fairness = app.add_subcommand("fairness", "fairness metrics for a run");
  add_config_option(fairness, opt);
  fairness->add_option("--run", opt.run_path, "TREC run file")->check(CLI::ExistingFile);
  fairness->add_option("--labels", opt.labels_path, "gender label TSV")
      ->check(CLI::ExistingFile);
  fairness->add_option("--collection", opt.collection_path, "collection TSV")
      ->check(CLI::ExistingFile);
  add_word_list_options(fairness, opt);
  add_eval_options(fairness, opt);
  add_output_options(fairness, opt);

  CLI::App* utility = app.add_subcommand("utility", "MRR and nDCG for a run");
  add_config_option(utility, opt);
  utility->add_option("--run", opt.run_path, "TREC run file")->check(CLI::ExistingFile);
  utility->add_option("--qrels", opt.qrels_path, "qrels file")->check(CLI::ExistingFile);
  utility->add_option("--k", opt.cutoff, "ranking cutoff")->check(CLI::PositiveNumber);
  add_output_options(utility, opt);

  CLI::App* agreement = app.add_subcommand("agreement", "annotation agreement statistics");
  add_config_option(agreement, opt);
  agreement->add_option("--labels", opt.labels_path, "prediction label TSV")
      ->check(CLI::ExistingFile);
  agreement->add_option("--gold", opt.gold_path, "gold label TSV")->check(CLI::ExistingFile);
  agreement->add_option("--stereotypes", opt.stereotypes_path, "stereotype-target TSV")
      ->check(CLI::ExistingFile);
  agreement->add_option("--votes", opt.votes_path, "crowd votes TSV")
      ->check(CLI::ExistingFile);
  agreement->add_option("--adjudication", opt.adjudication_path,
                        "unresolved-vote output TSV path");
  add_output_options(agreement, opt);

  CLI::App* report = app.add_subcommand("report", "joined fairness + utility report");
  add_config_option(report, opt);
  report->add_option("--run", opt.run_path, "TREC run file")->check(CLI::ExistingFile);
  report->add_option("--labels", opt.labels_path, "gender label TSV")
      ->check(CLI::ExistingFile);
  report->add_option("--collection", opt.collection_path, "collection TSV")
      ->check(CLI::ExistingFile);
  report->add_option("--qrels", opt.qrels_path, "qrels file")->check(CLI::ExistingFile);
  add_word_list_options(report, opt);
  add_eval_options(report, opt);
  add_output_options(report, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* parsed = app.get_subcommands().front();
    if (!opt.config_path.empty()) apply_config(parsed, opt);
    if (parsed == classify) return cmd_classify(opt);
    if (parsed == fairness) return cmd_fairness(opt);
    if (parsed == utility) return cmd_utility(opt);
    if (parsed == agreement) return cmd_agreement(opt);
    if (parsed == report) return cmd_report(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
