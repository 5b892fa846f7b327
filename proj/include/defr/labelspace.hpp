// Copyright 2026 The DEFR Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// HOI class vocabularies and their natural-language prompts.

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace defr {

/// A `verb object` class. Tokens keep their underscores (`hop_on`,
/// `dining_table`).
struct HoiLabel {
  std::string verb;
  std::string object;
  std::size_t index = 0;

  bool operator==(const HoiLabel&) const = default;
};

/// Ordered class vocabulary. The order defines the column order of every
/// label matrix and the row order of embeddings and classifier weights.
class ClassList {
 public:
  ClassList() = default;
  explicit ClassList(std::vector<HoiLabel> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const HoiLabel& operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<HoiLabel>& labels() const noexcept { return labels_; }

  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }

 private:
  std::vector<HoiLabel> labels_;
};

struct Prompt {
  std::string text;
  HoiLabel source;
};

/// Parses one `verb object` pair per line. Blank lines are not allowed.
/// Throws ParseError (with line number) or DuplicateError.
ClassList parse_class_list(std::string_view text);

ClassList read_class_list(const std::string& path);

/// Maps a verb to its present participle, overriding the suffix rules.
using GerundTable = std::map<std::string, std::string, std::less<>>;

/// Parses `verb gerund` lines; `#` starts a comment.
GerundTable parse_gerund_table(std::string_view text);

/// The table shipped in data/gerund_exceptions.txt.
const GerundTable& builtin_gerund_table();

/// Present participle of `verb`. Multiword verbs (`hop_on`) inflect the first
/// word only and are rejoined with spaces.
std::string gerundize(std::string_view verb,
                      const GerundTable& exceptions = builtin_gerund_table());

/// "a person riding a bicycle"; `no_interaction` yields "a person and a bicycle".
Prompt make_prompt(const HoiLabel& label,
                   const GerundTable& exceptions = builtin_gerund_table());

std::vector<Prompt> make_prompts(const ClassList& classes,
                                 const GerundTable& exceptions = builtin_gerund_table());

}  // namespace defr
