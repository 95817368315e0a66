#include "stepfit/io.hpp"

#include <charconv>
#include <istream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace stepfit::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return v;
}

// Re-runs validation so the message can point at the input line.
WeightedSeries validate_with_lines(const std::vector<std::pair<double, std::optional<double>>>& raw,
                                   const std::vector<std::size_t>& lines) {
  try {
    return validate_series(raw);
  } catch (const ValidationError& e) {
    if (!e.index()) throw;
    const std::size_t line = lines[*e.index() - 1];
    throw ValidationError("line " + std::to_string(line) + ": " + e.what(), e.index());
  }
}

}  // namespace

WeightedSeries read_csv(std::istream& in) {
  std::vector<std::pair<double, std::optional<double>>> raw;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    const std::string_view y_field = text.substr(0, comma);
    const auto y = parse_number(y_field);
    std::optional<double> w;
    bool ok = y.has_value();
    if (comma != std::string_view::npos) {
      const std::string_view rest = text.substr(comma + 1);
      if (rest.find(',') != std::string_view::npos) {
        throw ValidationError("line " + std::to_string(line_no) + ": expected `y` or `y,w`");
      }
      w = parse_number(rest);
      ok = ok && w.has_value();
    }
    if (!ok) {
      if (!seen_content) {  // header
        seen_content = true;
        continue;
      }
      const char* field = y ? "w" : "y";
      throw ValidationError("line " + std::to_string(line_no) + ": field " + field + " is not a number");
    }
    seen_content = true;
    raw.emplace_back(*y, w);
    lines.push_back(line_no);
  }
  return validate_with_lines(raw, lines);
}

WeightedSeries read_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("y") || !doc["y"].is_array()) {
    throw ValidationError("JSON input needs an array field \"y\"");
  }
  const auto& ys = doc["y"];
  const nlohmann::json* ws = nullptr;
  if (doc.contains("w")) {
    if (!doc["w"].is_array()) throw ValidationError("field \"w\" must be an array");
    ws = &doc["w"];
    if (ws->size() != ys.size()) throw ValidationError("fields \"y\" and \"w\" differ in length");
  }
  std::vector<std::pair<double, std::optional<double>>> raw;
  raw.reserve(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (!ys[i].is_number()) throw ValidationError("field y[" + std::to_string(i) + "] is not a number", i + 1);
    std::optional<double> w;
    if (ws) {
      if (!(*ws)[i].is_number()) throw ValidationError("field w[" + std::to_string(i) + "] is not a number", i + 1);
      w = (*ws)[i].get<double>();
    }
    raw.emplace_back(ys[i].get<double>(), w);
  }
  return validate_series(raw);
}

WeightedSeries read_series(std::istream& in, std::optional<Format> format) {
  if (!format) {
    const std::string text(std::istreambuf_iterator<char>(in), {});
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool json = first != std::string::npos && text[first] == '{';
    std::istringstream buffer(text);
    return json ? read_json(buffer) : read_csv(buffer);
  }
  return *format == Format::json ? read_json(in) : read_csv(in);
}

}  // namespace stepfit::io
