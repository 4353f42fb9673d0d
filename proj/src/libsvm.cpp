#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <string_view>
#include <vector>

#include "ssqp/errors.hpp"
#include "ssqp/problems.hpp"

namespace ssqp {

namespace {

double parse_number(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const std::string& name, std::optional<Eigen::Index> expected_dim) {
  std::vector<Eigen::Triplet<double>> entries;
  std::vector<double> raw_labels;
  Eigen::Index max_index = 0;

  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    std::string_view line(text);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      if (end > pos) tokens.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    if (tokens.empty()) continue;

    const auto col = static_cast<Eigen::Index>(raw_labels.size());
    raw_labels.push_back(parse_number(tokens[0], line_no, "label"));
    long long prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "expected idx:val, got '" + std::string(tokens[t]) + "'");
      const std::string_view idx_tok = tokens[t].substr(0, colon);
      long long idx = 0;
      const auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
      if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx < 1) {
        throw ParseError(line_no, "bad feature index '" + std::string(idx_tok) + "'");
      }
      if (idx <= prev) throw ParseError(line_no, "feature indices must be strictly increasing");
      prev = idx;
      const double val = parse_number(tokens[t].substr(colon + 1), line_no, "feature value");
      entries.emplace_back(static_cast<Eigen::Index>(idx - 1), col, val);
      max_index = std::max<Eigen::Index>(max_index, static_cast<Eigen::Index>(idx));
    }
  }

  std::set<double> distinct(raw_labels.begin(), raw_labels.end());
  const bool signed_labels = std::all_of(distinct.begin(), distinct.end(), [](double v) { return v == 1.0 || v == -1.0; });
  const bool zero_one = std::all_of(distinct.begin(), distinct.end(), [](double v) { return v == 0.0 || v == 1.0; });
  if (!signed_labels && !zero_one) throw InputError(name + ": labels are not binary (expected +-1 or 0/1)");

  Eigen::Index dim = max_index;
  if (expected_dim) {
    if (*expected_dim < max_index) {
      throw InputError(name + ": feature index " + std::to_string(max_index) + " exceeds dimension " +
                       std::to_string(*expected_dim));
    }
    dim = *expected_dim;
  }

  Dataset data;
  data.name = name;
  data.features.resize(dim, static_cast<Eigen::Index>(raw_labels.size()));
  data.features.setFromTriplets(entries.begin(), entries.end());
  data.features.makeCompressed();
  data.labels.resize(static_cast<Eigen::Index>(raw_labels.size()));
  for (std::size_t i = 0; i < raw_labels.size(); ++i) {
    data.labels(static_cast<Eigen::Index>(i)) = raw_labels[i] > 0.0 ? 1.0 : -1.0;
  }
  return data;
}

Dataset parse_libsvm(const std::string& path, std::optional<Eigen::Index> expected_dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string name = path;
  if (const auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  return parse_libsvm(in, name, expected_dim);
}

}  // namespace ssqp
