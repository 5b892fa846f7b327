// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "defr/labelspace.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "defr/error.hpp"
#include "defr/gerund_table.hpp"

namespace defr {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

// Calls fn(line, 1-based line number) for each LF-terminated line. A missing
// final LF is tolerated.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    fn(line, line_no);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

std::string underscores_to_spaces(std::string_view token) {
  std::string out(token);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::size_t vowel_groups(std::string_view word) {
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : word) {
    bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  return groups;
}

bool ends_cvc(std::string_view w) {
  if (w.size() < 3) return false;
  char c1 = w[w.size() - 3], v = w[w.size() - 2], c2 = w.back();
  if (is_vowel(c1) || !is_vowel(v) || is_vowel(c2)) return false;
  return c2 != 'w' && c2 != 'x' && c2 != 'y';
}

std::string gerundize_word(std::string_view w, const GerundTable& exceptions) {
  if (auto it = exceptions.find(w); it != exceptions.end()) return it->second;
  std::string out(w);
  if (w.size() >= 2 && w.back() == 'e') {
    auto stem = w.substr(0, w.size() - 1);
    bool stem_has_vowel = std::any_of(stem.begin(), stem.end(),
                                      [](char c) { return is_vowel(c) || c == 'y'; });
    bool keep_e = stem.back() == 'e' || !stem_has_vowel;
    if (!keep_e) out.pop_back();
    return out + "ing";
  }
  if (ends_cvc(w) && vowel_groups(w) == 1) {
    out.push_back(w.back());
    return out + "ing";
  }
  return out + "ing";
}

}  // namespace

ClassList::ClassList(std::vector<HoiLabel> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ConfigError("class list is empty");
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    auto& l = labels_[i];
    if (l.verb.empty() || l.object.empty()) {
      throw ConfigError("class " + std::to_string(i) + " has an empty token");
    }
    l.index = i;
    if (!seen.emplace(l.verb, l.object).second) {
      throw DuplicateError("duplicate class '" + l.verb + " " + l.object + "'");
    }
  }
}

ClassList parse_class_list(std::string_view text) {
  if (text.empty()) throw ParseError("empty class list document", 0);
  std::vector<HoiLabel> labels;
  std::set<std::pair<std::string, std::string>> seen;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto tokens = split_tokens(line);
    if (tokens.size() != 2) {
      throw ParseError("expected 'verb object', got " + std::to_string(tokens.size()) +
                           " tokens",
                       line_no);
    }
    HoiLabel label{std::string(tokens[0]), std::string(tokens[1]), labels.size()};
    if (!seen.emplace(label.verb, label.object).second) {
      throw DuplicateError("line " + std::to_string(line_no) + ": duplicate class '" +
                           label.verb + " " + label.object + "'");
    }
    labels.push_back(std::move(label));
  });
  return ClassList(std::move(labels));
}

ClassList read_class_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open class list '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_class_list(buf.str());
}

GerundTable parse_gerund_table(std::string_view text) {
  GerundTable table;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    auto tokens = split_tokens(line);
    if (tokens.empty()) return;
    if (tokens.size() != 2) throw ParseError("expected 'verb gerund'", line_no);
    table.insert_or_assign(std::string(tokens[0]), std::string(tokens[1]));
  });
  return table;
}

const GerundTable& builtin_gerund_table() {
  static const GerundTable table = parse_gerund_table(detail::kGerundExceptions);
  return table;
}

std::string gerundize(std::string_view verb, const GerundTable& exceptions) {
  if (auto it = exceptions.find(verb); it != exceptions.end()) return it->second;
  auto us = verb.find('_');
  if (us == std::string_view::npos) return gerundize_word(verb, exceptions);
  return gerundize_word(verb.substr(0, us), exceptions) + " " +
         underscores_to_spaces(verb.substr(us + 1));
}

Prompt make_prompt(const HoiLabel& label, const GerundTable& exceptions) {
  std::string object = underscores_to_spaces(label.object);
  std::string article = is_vowel(static_cast<char>(std::tolower(static_cast<unsigned char>(object.front())))) ? "an " : "a ";
  std::string text;
  if (label.verb == "no_interaction") {
    text = "a person and " + article + object;
  } else {
    text = "a person " + gerundize(label.verb, exceptions) + " " + article + object;
  }
  return {std::move(text), label};
}

std::vector<Prompt> make_prompts(const ClassList& classes, const GerundTable& exceptions) {
  std::vector<Prompt> prompts;
  prompts.reserve(classes.size());
  for (const auto& label : classes) prompts.push_back(make_prompt(label, exceptions));
  return prompts;
}

}  // namespace defr
