// Copyright 2026 The ckdctx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ckdctx/qa/text.h"

#include <cctype>
#include <set>

namespace ckdctx::qa {

bool IsStopword(std::string_view word) {
  static const std::set<std::string, std::less<>> kStopwords = {
      "a",       "about",  "after",  "again", "all",     "also",   "am",
      "an",      "and",    "any",    "are",   "as",      "at",     "be",
      "because", "been",   "before", "being", "both",    "but",    "by",
      "can",     "could",  "did",    "do",    "does",    "doing",  "done",
      "during",  "each",   "for",    "from",  "further", "had",    "has",
      "have",    "having", "he",     "her",   "here",    "him",    "his",
      "how",     "i",      "if",     "in",    "into",    "is",     "it",
      "its",     "itself", "just",   "like",  "may",     "me",     "might",
      "more",    "most",   "must",   "my",    "no",      "nor",    "of",
      "on",      "once",   "only",   "or",    "other",   "our",    "out",
      "over",    "own",    "same",   "she",   "should",  "so",     "some",
      "such",    "than",   "that",   "the",   "their",   "them",   "then",
      "there",   "these",  "they",   "this",  "those",   "through", "to",
      "too",     "under",  "until",  "up",    "very",    "was",    "we",
      "were",    "what",   "when",   "where", "which",   "while",  "who",
      "whom",    "why",    "will",   "with",  "would",   "you",    "your",
      "w",       "r",      "t",      "e",     "g",       "s",      "vs"};
  return kStopwords.count(word) > 0;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !IsStopword(current)) tokens.push_back(current);
    current.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace ckdctx::qa
