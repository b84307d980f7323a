#pragma once

// Normalized CWE / CAPEC / CVE records, an inverted token index with
// inverse-document-frequency weights, and keyword mapping of S-graph
// components onto those records.
//
// Fixture schema (see docs/corpus-format.md):
//   {"weaknesses": [{"id": "CWE-N", "name", "description", "parents": [...]}],
//    "patterns":   [{"id": "CAPEC-N", "name", "description", "related_weaknesses": [...]}],
//    "vulns":      [{"id": "CVE-YYYY-NNNN", "description", "weakness_refs": [...]}]}

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "missionware/error.hpp"
#include "missionware/model_io.hpp"
#include "missionware/sgraph.hpp"

namespace missionware {

struct WeaknessRecord {
  std::string id;
  std::string name;
  std::string description;
  std::vector<std::string> parents;  // ChildOf links

  bool operator==(const WeaknessRecord&) const = default;
};

struct AttackPatternRecord {
  std::string id;
  std::string name;
  std::string description;
  std::vector<std::string> related_weaknesses;

  bool operator==(const AttackPatternRecord&) const = default;
};

struct VulnRecord {
  std::string id;
  std::string description;
  std::vector<std::string> weakness_refs;

  bool operator==(const VulnRecord&) const = default;
};

enum class RecordKind { Weakness, AttackPattern, Vulnerability };

inline std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::Weakness: return "weakness";
    case RecordKind::AttackPattern: return "pattern";
    case RecordKind::Vulnerability: return "vuln";
  }
  return "?";
}

/// Case-folded maximal runs of ASCII letters and digits, deduplicated and
/// sorted.
inline std::set<std::string> tokenize(std::string_view text) {
  std::set<std::string> out;
  std::string current;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) && u < 128) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else if (!current.empty()) {
      out.insert(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.insert(std::move(current));
  return out;
}

class ThreatCorpus {
 public:
  ThreatCorpus() = default;

  /// Throws SchemaError, HierarchyCycle or DanglingReference.
  static ThreatCorpus ingest(const Json& doc);
  static ThreatCorpus load(const std::string& path) { return ingest(io::parse_file(path)); }
  static ThreatCorpus from_records(std::vector<WeaknessRecord> weaknesses, std::vector<AttackPatternRecord> patterns,
                                   std::vector<VulnRecord> vulns);

  const std::vector<WeaknessRecord>& weaknesses() const { return weaknesses_; }
  const std::vector<AttackPatternRecord>& patterns() const { return patterns_; }
  const std::vector<VulnRecord>& vulns() const { return vulns_; }
  std::size_t record_count() const { return kinds_.size(); }

  bool contains(std::string_view id) const { return kinds_.count(std::string(id)) != 0; }
  RecordKind kind_of(std::string_view id) const {
    auto it = kinds_.find(std::string(id));
    if (it == kinds_.end()) throw Error(ErrorCode::UnknownRecord, std::string(id), "no such record");
    return it->second;
  }
  const WeaknessRecord& weakness(std::string_view id) const {
    auto it = weakness_index_.find(std::string(id));
    if (it == weakness_index_.end()) throw Error(ErrorCode::UnknownRecord, std::string(id), "no such weakness");
    return weaknesses_[it->second];
  }
  const VulnRecord* vuln(std::string_view id) const {
    auto it = std::lower_bound(vulns_.begin(), vulns_.end(), id,
                               [](const VulnRecord& v, std::string_view key) { return v.id < key; });
    return it != vulns_.end() && it->id == id ? &*it : nullptr;
  }

  /// Indexed text of a record: name plus description.
  std::string text_of(std::string_view id) const;

  /// token -> record ids containing it, ascending.
  const std::map<std::string, std::vector<std::string>>& token_index() const { return postings_; }
  /// ln(1 + N / df); zero for tokens absent from the corpus.
  double idf(const std::string& token) const {
    auto it = idf_.find(token);
    return it == idf_.end() ? 0.0 : it->second;
  }

  Json to_json() const;

  bool operator==(const ThreatCorpus& o) const {
    return weaknesses_ == o.weaknesses_ && patterns_ == o.patterns_ && vulns_ == o.vulns_ && postings_ == o.postings_ &&
           idf_ == o.idf_;
  }

 private:
  void index();

  std::vector<WeaknessRecord> weaknesses_;
  std::vector<AttackPatternRecord> patterns_;
  std::vector<VulnRecord> vulns_;
  std::map<std::string, RecordKind> kinds_;
  std::map<std::string, std::size_t> weakness_index_;
  std::map<std::string, std::vector<std::string>> postings_;
  std::map<std::string, double> idf_;
};

namespace detail {

inline void check_id(const std::string& id, const std::regex& pattern, const char* what) {
  if (!std::regex_match(id, pattern)) throw Error(ErrorCode::SchemaError, id, std::string("malformed ") + what + " id");
}

template <typename Record>
void sort_and_check_unique(std::vector<Record>& records, std::set<std::string>& all_ids) {
  std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) { return a.id < b.id; });
  for (const auto& r : records) {
    if (!all_ids.insert(r.id).second) throw Error(ErrorCode::SchemaError, r.id, "duplicate record id");
  }
}

inline void canonical(std::vector<std::string>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

}  // namespace detail

inline ThreatCorpus ThreatCorpus::from_records(std::vector<WeaknessRecord> weaknesses,
                                               std::vector<AttackPatternRecord> patterns,
                                               std::vector<VulnRecord> vulns) {
  static const std::regex cwe_id("CWE-[0-9]+");
  static const std::regex capec_id("CAPEC-[0-9]+");
  static const std::regex cve_id("CVE-[0-9]{4}-[0-9]{4,}");

  ThreatCorpus c;
  std::set<std::string> ids;
  detail::sort_and_check_unique(weaknesses, ids);
  detail::sort_and_check_unique(patterns, ids);
  detail::sort_and_check_unique(vulns, ids);

  for (auto& w : weaknesses) {
    detail::check_id(w.id, cwe_id, "weakness");
    detail::canonical(w.parents);
  }
  for (auto& p : patterns) {
    detail::check_id(p.id, capec_id, "attack pattern");
    detail::canonical(p.related_weaknesses);
  }
  for (auto& v : vulns) {
    detail::check_id(v.id, cve_id, "vulnerability");
    detail::canonical(v.weakness_refs);
  }

  c.weaknesses_ = std::move(weaknesses);
  c.patterns_ = std::move(patterns);
  c.vulns_ = std::move(vulns);
  for (std::size_t i = 0; i < c.weaknesses_.size(); ++i) {
    c.weakness_index_.emplace(c.weaknesses_[i].id, i);
    c.kinds_.emplace(c.weaknesses_[i].id, RecordKind::Weakness);
  }
  for (const auto& p : c.patterns_) c.kinds_.emplace(p.id, RecordKind::AttackPattern);
  for (const auto& v : c.vulns_) c.kinds_.emplace(v.id, RecordKind::Vulnerability);

  auto require_weakness = [&](const std::string& owner, const std::string& ref) {
    if (!c.weakness_index_.count(ref))
      throw Error(ErrorCode::DanglingReference, owner, "references missing weakness " + ref);
  };
  for (const auto& w : c.weaknesses_)
    for (const auto& p : w.parents) require_weakness(w.id, p);
  for (const auto& p : c.patterns_)
    for (const auto& r : p.related_weaknesses) require_weakness(p.id, r);
  for (const auto& v : c.vulns_)
    for (const auto& r : v.weakness_refs) require_weakness(v.id, r);

  // ChildOf acyclicity: three-colour DFS.
  std::vector<int> colour(c.weaknesses_.size(), 0);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    colour[i] = 1;
    for (const auto& p : c.weaknesses_[i].parents) {
      auto j = c.weakness_index_.at(p);
      if (colour[j] == 1) throw Error(ErrorCode::HierarchyCycle, p, "ChildOf links form a cycle");
      if (colour[j] == 0) visit(j);
    }
    colour[i] = 2;
  };
  for (std::size_t i = 0; i < c.weaknesses_.size(); ++i) {
    if (colour[i] == 0) visit(i);
  }

  c.index();
  return c;
}

inline std::string ThreatCorpus::text_of(std::string_view id) const {
  switch (kind_of(id)) {
    case RecordKind::Weakness: {
      const auto& w = weakness(id);
      return w.name + " " + w.description;
    }
    case RecordKind::AttackPattern: {
      auto it = std::find_if(patterns_.begin(), patterns_.end(), [&](const auto& p) { return p.id == id; });
      return it->name + " " + it->description;
    }
    case RecordKind::Vulnerability: return vuln(id)->description;
  }
  return {};
}

inline void ThreatCorpus::index() {
  postings_.clear();
  idf_.clear();
  for (const auto& [id, kind] : kinds_) {
    for (const auto& token : tokenize(text_of(id))) postings_[token].push_back(id);
  }
  const auto n = static_cast<double>(kinds_.size());
  for (auto& [token, ids] : postings_) {
    std::sort(ids.begin(), ids.end());
    idf_[token] = std::log(1.0 + n / static_cast<double>(ids.size()));
  }
}

inline ThreatCorpus ThreatCorpus::ingest(const Json& doc) {
  io::expect_keys(doc, {"weaknesses", "patterns", "vulns"}, "corpus");
  auto list = [&](const char* key) -> const Json& {
    static const Json empty = Json::array();
    auto it = doc.find(key);
    if (it == doc.end()) return empty;
    if (!it->is_array()) throw Error(ErrorCode::SchemaError, "corpus", std::string("'") + key + "' must be a list");
    return *it;
  };
  std::vector<WeaknessRecord> weaknesses;
  for (const auto& j : list("weaknesses")) {
    io::expect_keys(j, {"id", "name", "description", "parents"}, "weakness");
    auto id = io::require_string(j, "id", "weakness");
    weaknesses.push_back({id, io::require_string(j, "name", id), io::optional_string(j, "description", id),
                          io::string_list(j, "parents", id, false)});
  }
  std::vector<AttackPatternRecord> patterns;
  for (const auto& j : list("patterns")) {
    io::expect_keys(j, {"id", "name", "description", "related_weaknesses"}, "pattern");
    auto id = io::require_string(j, "id", "pattern");
    patterns.push_back({id, io::require_string(j, "name", id), io::optional_string(j, "description", id),
                        io::string_list(j, "related_weaknesses", id, false)});
  }
  std::vector<VulnRecord> vulns;
  for (const auto& j : list("vulns")) {
    io::expect_keys(j, {"id", "description", "weakness_refs"}, "vuln");
    auto id = io::require_string(j, "id", "vuln");
    vulns.push_back({id, io::require_string(j, "description", id), io::string_list(j, "weakness_refs", id, false)});
  }
  return from_records(std::move(weaknesses), std::move(patterns), std::move(vulns));
}

inline Json ThreatCorpus::to_json() const {
  Json j;
  j["weaknesses"] = Json::array();
  for (const auto& w : weaknesses_)
    j["weaknesses"].push_back({{"id", w.id}, {"name", w.name}, {"description", w.description}, {"parents", w.parents}});
  j["patterns"] = Json::array();
  for (const auto& p : patterns_)
    j["patterns"].push_back({{"id", p.id},
                             {"name", p.name},
                             {"description", p.description},
                             {"related_weaknesses", p.related_weaknesses}});
  j["vulns"] = Json::array();
  for (const auto& v : vulns_)
    j["vulns"].push_back({{"id", v.id}, {"description", v.description}, {"weakness_refs", v.weakness_refs}});
  return j;
}

/// Ancestors of a weakness in breadth-first order, each listed once.
inline std::vector<std::string> expand_hierarchy(const ThreatCorpus& corpus, std::string_view cwe) {
  const auto& start = corpus.weakness(cwe);
  std::vector<std::string> out;
  std::set<std::string> seen{start.id};
  std::deque<std::string> queue{start.id};
  while (!queue.empty()) {
    auto id = std::move(queue.front());
    queue.pop_front();
    for (const auto& p : corpus.weakness(id).parents) {
      if (seen.insert(p).second) {
        out.push_back(p);
        queue.push_back(p);
      }
    }
  }
  return out;
}

struct Hit {
  std::string record_id;
  RecordKind kind = RecordKind::Weakness;
  double score = 0.0;
  bool derived = false;
  // For derived hits: the CVE that matched directly, then each weakness on
  // the climb. For direct hits: just the record id.
  std::vector<std::string> derivation;

  bool operator==(const Hit&) const = default;
};

struct Mapping {
  std::string component;
  std::vector<Hit> hits;

  const Hit* find(std::string_view id) const {
    auto it = std::find_if(hits.begin(), hits.end(), [&](const Hit& h) { return h.record_id == id; });
    return it == hits.end() ? nullptr : &*it;
  }
  bool operator==(const Mapping&) const = default;
};

struct MatchOptions {
  std::size_t top_k = 10;
  double threshold = 0.0;
};

/// Tokens describing a node: keywords, label and attribute values.
inline std::set<std::string> descriptor_tokens(const Node& node) {
  std::set<std::string> out;
  auto add = [&](std::string_view text) {
    for (auto& t : tokenize(text)) out.insert(std::move(t));
  };
  for (const auto& k : node.keywords) add(k);
  add(node.label);
  for (const auto& [key, value] : node.attributes) add(value);
  return out;
}

/// Raw relevance of every record sharing at least one token with the
/// descriptor (index lookup; tokens are summed in ascending order).
inline std::map<std::string, double> score_records(const ThreatCorpus& corpus, const std::set<std::string>& tokens) {
  std::map<std::string, double> scores;
  const auto& index = corpus.token_index();
  for (const auto& token : tokens) {
    auto it = index.find(token);
    if (it == index.end()) continue;
    const double w = corpus.idf(token);
    for (const auto& id : it->second) scores[id] += w;
  }
  return scores;
}

namespace detail {

inline bool hit_order(const Hit& a, const Hit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.record_id < b.record_id;
}

/// Chains CVE -> referenced CWE -> ... -> ancestor, shortest first (BFS).
inline std::vector<std::vector<std::string>> weakness_climbs(const ThreatCorpus& corpus, const VulnRecord& v) {
  std::vector<std::vector<std::string>> chains;
  std::set<std::string> seen;
  std::deque<std::vector<std::string>> queue;
  for (const auto& w : v.weakness_refs) {
    if (seen.insert(w).second) queue.push_back({v.id, w});
  }
  while (!queue.empty()) {
    auto chain = std::move(queue.front());
    queue.pop_front();
    for (const auto& p : corpus.weakness(chain.back()).parents) {
      if (seen.insert(p).second) {
        auto next = chain;
        next.push_back(p);
        queue.push_back(std::move(next));
      }
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

}  // namespace detail

/// Ranks records against a component's descriptor. The `top_k` best direct
/// hits above `threshold` are kept; each CVE among them contributes derived
/// hits for its weaknesses and their ancestors at the CVE's score.
inline Mapping map_component(const ThreatCorpus& corpus, const Node& node, const MatchOptions& options = {}) {
  auto tokens = descriptor_tokens(node);
  if (tokens.empty()) throw Error(ErrorCode::EmptyDescriptor, node.id, "node has no keywords, label or attributes");

  std::vector<Hit> direct;
  for (const auto& [id, score] : score_records(corpus, tokens)) {
    if (score > options.threshold) direct.push_back({id, corpus.kind_of(id), score, false, {id}});
  }
  std::sort(direct.begin(), direct.end(), detail::hit_order);
  if (direct.size() > options.top_k) direct.resize(options.top_k);

  std::map<std::string, Hit> merged;
  for (const auto& h : direct) merged.emplace(h.record_id, h);
  for (const auto& h : direct) {
    if (h.kind != RecordKind::Vulnerability) continue;
    for (auto& chain : detail::weakness_climbs(corpus, *corpus.vuln(h.record_id))) {
      Hit d{chain.back(), RecordKind::Weakness, h.score, true, chain};
      auto [it, inserted] = merged.emplace(d.record_id, d);
      if (inserted) continue;
      // A record reachable several ways keeps its best score; on ties a
      // direct match wins, then the shorter and smaller derivation.
      const auto& cur = it->second;
      bool better = d.score > cur.score ||
                    (d.score == cur.score && cur.derived &&
                     (d.derivation.size() < cur.derivation.size() ||
                      (d.derivation.size() == cur.derivation.size() && d.derivation < cur.derivation)));
      if (better) it->second = std::move(d);
    }
  }

  Mapping m{node.id, {}};
  for (auto& [id, hit] : merged) m.hits.push_back(std::move(hit));
  std::sort(m.hits.begin(), m.hits.end(), detail::hit_order);
  return m;
}

}  // namespace missionware
