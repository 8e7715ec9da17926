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

#include "ckdctx/guideline/document.h"

#include <cctype>
#include <map>
#include <set>

#include "ckdctx/common/error.h"

namespace ckdctx::guideline {
namespace {

bool IsSegment(std::string_view s, bool digits_only) {
  if (s.empty()) return false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (digits_only ? !std::isdigit(u) : !(std::isalnum(u) || c == '-' ||
                                             c == '_')) {
      return false;
    }
  }
  return true;
}

// "<chapter>.<group>.<n>" with a numeric ordinal.
bool IsRecIdFormat(std::string_view id) {
  const std::size_t a = id.find('.');
  if (a == std::string_view::npos) return false;
  const std::size_t b = id.find('.', a + 1);
  if (b == std::string_view::npos) return false;
  return IsSegment(id.substr(0, a), false) &&
         IsSegment(id.substr(a + 1, b - a - 1), false) &&
         IsSegment(id.substr(b + 1), true);
}

std::string Idx(std::size_t i) { return std::to_string(i); }

}  // namespace

std::string_view GradeName(Grade grade) {
  switch (grade) {
    case Grade::kA: return "A";
    case Grade::kB: return "B";
    case Grade::kC: return "C";
    case Grade::kE: return "E";
    case Grade::kUngraded: return "Ungraded";
  }
  return "Ungraded";
}

Grade ParseGrade(std::string_view name, const std::string& path) {
  for (Grade g : {Grade::kA, Grade::kB, Grade::kC, Grade::kE,
                  Grade::kUngraded}) {
    if (GradeName(g) == name) return g;
  }
  throw Error(ErrorCode::kValidation,
              "unknown grade '" + std::string(name) + "' at " + path, path);
}

std::size_t GuidelineDoc::RecommendationCount() const {
  std::size_t n = 0;
  for (const Chapter& ch : chapters) {
    for (const RecommendationGroup& g : ch.groups) {
      n += g.recommendations.size();
    }
  }
  return n;
}

const Recommendation* GuidelineDoc::FindRecommendation(
    std::string_view rec_id) const {
  for (const Chapter& ch : chapters) {
    for (const RecommendationGroup& g : ch.groups) {
      for (const Recommendation& r : g.recommendations) {
        if (r.rec_id == rec_id) return &r;
      }
    }
  }
  return nullptr;
}

std::vector<Violation> Validate(const GuidelineDoc& doc) {
  std::vector<Violation> out;
  if (doc.chapters.empty()) out.push_back({"/chapters", "no chapters"});
  std::map<std::string, std::string> chapter_titles;
  std::map<std::string, std::string> rec_paths;
  for (std::size_t c = 0; c < doc.chapters.size(); ++c) {
    const Chapter& ch = doc.chapters[c];
    const std::string cpath = "/chapters/" + Idx(c);
    if (ch.title.empty()) out.push_back({cpath + "/title", "empty title"});
    auto [it, fresh] = chapter_titles.emplace(ch.title, cpath);
    if (!fresh) {
      out.push_back({cpath + "/title", "chapter title '" + ch.title +
                                           "' duplicates " + it->second +
                                           "/title"});
    }
    for (std::size_t g = 0; g < ch.groups.size(); ++g) {
      const RecommendationGroup& group = ch.groups[g];
      const std::string gpath = cpath + "/groups/" + Idx(g);
      if (group.recommendations.empty()) {
        out.push_back({gpath + "/recommendations", "empty group"});
      }
      for (std::size_t r = 0; r < group.recommendations.size(); ++r) {
        const Recommendation& rec = group.recommendations[r];
        const std::string rpath = gpath + "/recommendations/" + Idx(r);
        if (rec.text.empty()) out.push_back({rpath + "/text", "empty text"});
        if (!IsRecIdFormat(rec.rec_id)) {
          out.push_back({rpath + "/rec_id",
                         "rec_id '" + rec.rec_id +
                             "' is not chapter.group.ordinal"});
        }
        auto [prev, unique] = rec_paths.emplace(rec.rec_id, rpath);
        if (!unique) {
          out.push_back({rpath + "/rec_id", "rec_id '" + rec.rec_id +
                                                "' appears at " +
                                                prev->second + " and " +
                                                rpath});
        }
        if (rec.numeric_constraints != qa::ParseNumericPhrases(rec.text)) {
          out.push_back({rpath + "/numeric_constraints",
                         "cached constraints differ from the text"});
        }
      }
    }
  }
  return out;
}

void RequireValid(const GuidelineDoc& doc) {
  const std::vector<Violation> violations = Validate(doc);
  if (!violations.empty()) {
    throw Error(ErrorCode::kValidation,
                "invalid guideline document: " + violations[0].message,
                violations[0].path);
  }
}

Json ToJson(const GuidelineDoc& doc) {
  Json chapters = Json::array();
  for (const Chapter& ch : doc.chapters) {
    Json groups = Json::array();
    for (const RecommendationGroup& g : ch.groups) {
      Json recs = Json::array();
      for (const Recommendation& r : g.recommendations) {
        Json constraints = Json::array();
        for (const auto& c : r.numeric_constraints) {
          constraints.push_back(qa::ToJson(c));
        }
        recs.push_back({{"rec_id", r.rec_id},
                        {"text", r.text},
                        {"grade", GradeName(r.grade)},
                        {"numeric_constraints", std::move(constraints)}});
      }
      groups.push_back({{"group_id", g.group_id},
                        {"topic", g.topic},
                        {"recommendations", std::move(recs)}});
    }
    Json sections = Json::array();
    for (const FreeTextSection& s : ch.free_text_sections) {
      sections.push_back({{"title", s.title}, {"text", s.text}});
    }
    chapters.push_back({{"chapter_id", ch.chapter_id},
                        {"title", ch.title},
                        {"groups", std::move(groups)},
                        {"free_text_sections", std::move(sections)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"doc_id", doc.doc_id},
          {"title", doc.title},
          {"year", doc.year},
          {"chapters", std::move(chapters)}};
}

GuidelineDoc GuidelineDocFromJson(const Json& json, bool strict) {
  const std::string root;
  const std::string version = RequireString(json, "schema_version", root);
  if (version != kSchemaVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "guideline schema_version '" + version +
                    "' is not supported (expected " +
                    std::string(kSchemaVersion) + ")",
                "/schema_version");
  }
  if (strict) {
    RejectUnknownFields(json,
                        {"schema_version", "doc_id", "title", "year",
                         "chapters"},
                        root);
  }
  GuidelineDoc doc;
  doc.doc_id = RequireString(json, "doc_id", root);
  doc.title = RequireString(json, "title", root);
  doc.year = static_cast<int>(RequireInt(json, "year", root));
  const Json& chapters = RequireArray(json, "chapters", root);
  for (std::size_t c = 0; c < chapters.size(); ++c) {
    const std::string cpath = "/chapters/" + Idx(c);
    const Json& jc = chapters[c];
    Chapter ch;
    ch.chapter_id = RequireString(jc, "chapter_id", cpath);
    if (strict) {
      RejectUnknownFields(
          jc, {"chapter_id", "title", "groups", "free_text_sections"}, cpath);
    }
    ch.title = RequireString(jc, "title", cpath);
    const Json& groups = RequireArray(jc, "groups", cpath);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::string gpath = cpath + "/groups/" + Idx(g);
      const Json& jg = groups[g];
      RecommendationGroup group;
      group.group_id = RequireString(jg, "group_id", gpath);
      if (strict) {
        RejectUnknownFields(jg, {"group_id", "topic", "recommendations"},
                            gpath);
      }
      group.topic = RequireString(jg, "topic", gpath);
      const Json& recs = RequireArray(jg, "recommendations", gpath);
      for (std::size_t r = 0; r < recs.size(); ++r) {
        const std::string rpath = gpath + "/recommendations/" + Idx(r);
        const Json& jr = recs[r];
        Recommendation rec;
        rec.rec_id = RequireString(jr, "rec_id", rpath);
        if (strict) {
          RejectUnknownFields(
              jr, {"rec_id", "text", "grade", "numeric_constraints"}, rpath);
        }
        rec.text = RequireString(jr, "text", rpath);
        rec.grade = ParseGrade(RequireString(jr, "grade", rpath),
                               rpath + "/grade");
        const Json& cs = RequireArray(jr, "numeric_constraints", rpath);
        for (std::size_t k = 0; k < cs.size(); ++k) {
          rec.numeric_constraints.push_back(qa::NumericConstraintFromJson(
              cs[k], rpath + "/numeric_constraints/" + Idx(k)));
        }
        group.recommendations.push_back(std::move(rec));
      }
      ch.groups.push_back(std::move(group));
    }
    const Json& sections = RequireArray(jc, "free_text_sections", cpath);
    for (std::size_t s = 0; s < sections.size(); ++s) {
      const std::string spath = cpath + "/free_text_sections/" + Idx(s);
      if (strict) RejectUnknownFields(sections[s], {"title", "text"}, spath);
      ch.free_text_sections.push_back(
          {RequireString(sections[s], "title", spath),
           RequireString(sections[s], "text", spath)});
    }
    doc.chapters.push_back(std::move(ch));
  }
  return doc;
}

std::vector<qa::Passage> ToPassages(const GuidelineDoc& doc) {
  std::vector<qa::Passage> out;
  for (const Chapter& ch : doc.chapters) {
    for (const RecommendationGroup& g : ch.groups) {
      for (const Recommendation& r : g.recommendations) {
        out.push_back({r.rec_id, r.text, r.numeric_constraints});
      }
    }
  }
  return out;
}

}  // namespace ckdctx::guideline
