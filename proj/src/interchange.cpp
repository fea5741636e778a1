#include "hypermult/interchange.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "hypermult/error.hpp"

namespace hypermult {
namespace {

std::string join_labels(const Labels& labels) {
  std::string out;
  out.reserve(labels.size() * 2);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out.push_back(',');
    out.push_back(labels[i] ? '1' : '0');
  }
  return out;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void schema_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::SchemaError, "line " + std::to_string(line) + ": " + what);
}

Labels parse_labels(std::string_view text, std::size_t line) {
  Labels out;
  if (text.empty()) return out;
  for (std::string_view token : split_on(text, ',')) {
    if (token == "0" || token == "1") {
      out.push_back(token == "1" ? 1 : 0);
      continue;
    }
    long long v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec == std::errc() && ptr == token.data() + token.size()) {
      throw Error(ErrorCode::LabelDomainError,
                  "line " + std::to_string(line) + ": label " + std::string(token) + " is not 0 or 1");
    }
    schema_error(line, "malformed label '" + std::string(token) + "'");
  }
  return out;
}

std::size_t parse_count(std::string_view text, std::size_t line, const char* field) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    schema_error(line, std::string(field) + " must be a non-negative integer");
  }
  return v;
}

}  // namespace

std::string export_predictions(const PredictionSet& ps) {
  std::ostringstream out;
  out << kInterchangeMagic << '\n';
  out << "dataset_id\t" << sanitize(ps.dataset_id) << '\n';
  out << "model\t" << model_name(ps.model) << '\n';
  out << "positive_label\t" << static_cast<int>(ps.positive_label) << '\n';
  out << "eval_labels\t" << join_labels(ps.eval_labels) << '\n';
  if (ps.n_train) out << "n_train\t" << ps.n_train << '\n';
  if (ps.n_features) out << "n_features\t" << ps.n_features << '\n';
  out << "config_id\tvalues\tdefault\tstatus\tlabels\tmessage\n";
  for (const auto& e : ps.entries) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [name, v] : e.config.values()) values[name] = v;
    out << e.config.id() << '\t' << values.dump() << '\t' << (e.config.is_default() ? 1 : 0) << '\t'
        << (e.failed ? "failed" : e.warning ? "warning" : "ok") << '\t' << join_labels(e.labels) << '\t'
        << sanitize(e.message) << '\n';
  }
  return out.str();
}

void export_predictions(const PredictionSet& ps, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << export_predictions(ps);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

PredictionSet import_predictions(std::string_view text,
                                 const std::optional<HyperparamSpace>& expected_space) {
  std::vector<std::string_view> lines = split_on(text, '\n');
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != kInterchangeMagic) {
    schema_error(1, "expected '" + std::string(kInterchangeMagic) + "'");
  }

  PredictionSet ps;
  std::map<std::string, std::string> header;
  std::size_t i = 1;
  for (; i < lines.size(); ++i) {
    auto fields = split_on(lines[i], '\t');
    if (fields.size() >= 1 && fields[0] == "config_id") break;
    if (fields.size() != 2) schema_error(i + 1, "header lines are 'key<TAB>value'");
    if (!header.emplace(std::string(fields[0]), std::string(fields[1])).second) {
      schema_error(i + 1, "duplicate header key '" + std::string(fields[0]) + "'");
    }
  }
  if (i == lines.size()) schema_error(i, "missing config_id column header");
  {
    const auto cols = split_on(lines[i], '\t');
    static const char* expected[] = {"config_id", "values", "default", "status", "labels", "message"};
    if (cols.size() != 6) schema_error(i + 1, "column header must list 6 columns");
    for (std::size_t c = 0; c < 6; ++c) {
      if (cols[c] != expected[c]) schema_error(i + 1, "unexpected column '" + std::string(cols[c]) + "'");
    }
  }
  for (const char* key : {"dataset_id", "model", "positive_label", "eval_labels"}) {
    if (!header.contains(key)) schema_error(i + 1, std::string("missing header key '") + key + "'");
  }

  ps.dataset_id = header["dataset_id"];
  try {
    ps.model = parse_model(header["model"]);
  } catch (const Error&) {
    schema_error(3, "unknown model '" + header["model"] + "'");
  }
  if (header["positive_label"] == "0" || header["positive_label"] == "1") {
    ps.positive_label = header["positive_label"] == "1" ? 1 : 0;
  } else {
    throw Error(ErrorCode::LabelDomainError, "positive_label must be 0 or 1");
  }
  ps.eval_labels = parse_labels(header["eval_labels"], 5);
  if (header.contains("n_train")) ps.n_train = parse_count(header["n_train"], 0, "n_train");
  if (header.contains("n_features")) ps.n_features = parse_count(header["n_features"], 0, "n_features");

  std::size_t defaults = 0;
  for (++i; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto fields = split_on(lines[i], '\t');
    if (fields.size() != 6) schema_error(line_no, "expected 6 tab-separated fields");

    nlohmann::json values;
    try {
      values = nlohmann::json::parse(fields[1]);
    } catch (const nlohmann::json::exception&) {
      schema_error(line_no, "values is not valid JSON");
    }
    if (!values.is_object()) schema_error(line_no, "values must be a JSON object");
    std::map<std::string, double> map;
    for (auto it = values.begin(); it != values.end(); ++it) {
      if (!it.value().is_number()) schema_error(line_no, "value of '" + it.key() + "' is not a number");
      map[it.key()] = it.value().get<double>();
    }

    if (fields[2] != "0" && fields[2] != "1") schema_error(line_no, "default flag must be 0 or 1");
    const bool is_default = fields[2] == "1";
    if (is_default && ++defaults > 1) {
      throw Error(ErrorCode::DuplicateDefault, "line " + std::to_string(line_no) + ": second default row");
    }

    PredictionEntry entry;
    entry.config = Config(std::move(map), is_default);
    if (fields[0] != "-" && fields[0] != entry.config.id()) {
      schema_error(line_no, "config_id " + std::string(fields[0]) + " does not match its values (" +
                                entry.config.id() + ")");
    }
    if (fields[3] == "failed") {
      entry.failed = true;
    } else if (fields[3] == "warning") {
      entry.warning = true;
    } else if (fields[3] != "ok") {
      schema_error(line_no, "status must be ok, warning or failed");
    }
    entry.labels = parse_labels(fields[4], line_no);
    entry.message = std::string(fields[5]);
    if (entry.failed && !entry.labels.empty()) schema_error(line_no, "failed rows carry no labels");
    if (!entry.failed && entry.labels.size() != ps.eval_labels.size()) {
      schema_error(line_no, "expected " + std::to_string(ps.eval_labels.size()) + " labels, found " +
                                std::to_string(entry.labels.size()));
    }
    // A failed row may carry the very config that was rejected.
    if (expected_space && !entry.failed) {
      try {
        expected_space->validate(entry.config);
      } catch (const Error& e) {
        schema_error(line_no, e.what());
      }
    }
    ps.entries.push_back(std::move(entry));
  }
  if (defaults == 0) throw Error(ErrorCode::NoDefaultRow, "no row is flagged default");
  ps.validate();
  return ps;
}

PredictionSet import_predictions_file(const std::filesystem::path& path,
                                      const std::optional<HyperparamSpace>& expected_space) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return import_predictions(buffer.str(), expected_space);
}

}  // namespace hypermult
