#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "csv.hpp"
#include "unicode.hpp"
#include "util.hpp"
#include "xml.hpp"

namespace aetas::corpus {

using nlohmann::json;

std::vector<std::string> normalize_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    std::size_t b = 0, e = current.size();
    while (b < e && current[b] == '-') ++b;
    while (e > b && current[e - 1] == '-') --e;
    if (e > b) tokens.emplace_back(current.substr(b, e - b));
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = unicode::decode(text, pos);
    char32_t lower = unicode::to_lower(cp);
    if (unicode::is_alpha(lower) || unicode::is_digit(lower) || cp == '-') {
      unicode::encode(lower, current);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

TokenizedDoc tokenize(const Document& doc) {
  return TokenizedDoc{doc.id, doc.year, normalize_tokenize(doc.text)};
}

namespace {

// Accepts a 4-digit year, or a longer string starting with one ("1750-04-25").
bool parse_year_prefix(const std::string& value, int& out) {
  if (value.size() < 4) return false;
  for (int i = 0; i < 4; ++i)
    if (!std::isdigit(static_cast<unsigned char>(value[i]))) return false;
  if (value.size() > 4 && std::isdigit(static_cast<unsigned char>(value[4])))
    return false;
  out = std::stoi(value.substr(0, 4));
  return true;
}

}  // namespace

TeiExtractResult extract_tei_text(std::string_view xml_input,
                                  const std::set<std::string>& text_container_tags,
                                  const std::string& date_attribute_path,
                                  const std::string& id_prefix, int year_min,
                                  int year_max) {
  if (date_attribute_path.size() < 2 || date_attribute_path[0] != '@')
    throw ConfigError("date attribute path must be \"@<name>\", got \"" +
                      date_attribute_path + "\"");
  std::string date_attr = date_attribute_path.substr(1);

  struct Capture {
    std::string tag;
    int depth;  // depth of the container element itself
    std::string date_value;
    bool has_date = false;
    std::string explicit_id;
    std::vector<std::string> segments;
  };

  TeiExtractResult result;
  std::vector<Capture> active;
  int depth = 0;

  xml::Callbacks cb;
  cb.start_element = [&](std::string_view name, const std::vector<xml::Attribute>& attrs) {
    ++depth;
    if (text_container_tags.count(std::string(name))) {
      Capture cap;
      cap.tag = name;
      cap.depth = depth;
      for (const auto& a : attrs) {
        if (a.name == date_attr) {
          cap.date_value = a.value;
          cap.has_date = true;
        }
        if (a.name == "xml:id" || (a.name == "id" && cap.explicit_id.empty()))
          cap.explicit_id = a.value;
      }
      active.push_back(std::move(cap));
    }
  };
  cb.text = [&](const std::string& t) {
    std::string_view seg = trim(t);
    if (seg.empty()) return;
    for (auto& cap : active) cap.segments.emplace_back(seg);
  };
  cb.end_element = [&](std::string_view name) {
    if (!active.empty() && active.back().depth == depth &&
        active.back().tag == name) {
      Capture cap = std::move(active.back());
      active.pop_back();
      int year = 0;
      if (!cap.has_date || !parse_year_prefix(cap.date_value, year) ||
          year < year_min || year > year_max) {
        ++result.skipped;
      } else {
        Document doc;
        doc.year = year;
        if (!cap.explicit_id.empty()) {
          doc.id = cap.explicit_id;
        } else {
          char buf[32];
          std::snprintf(buf, sizeof(buf), "-%06zu", result.documents.size() + 1);
          doc.id = id_prefix + buf;
        }
        std::string text;
        for (std::size_t i = 0; i < cap.segments.size(); ++i) {
          if (i) text.push_back(' ');
          text += cap.segments[i];
        }
        doc.text = std::move(text);
        result.documents.push_back(std::move(doc));
      }
    }
    --depth;
  };

  xml::parse(xml_input, cb);
  return result;
}

std::vector<Document> load_jsonl(const std::filesystem::path& path, int year_min,
                                 int year_max) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": invalid JSON: " + e.what());
    }
    auto where = [&] { return path.string() + ":" + std::to_string(lineno); };
    if (!j.contains("id") || !j["id"].is_string())
      throw DataError(where() + ": missing string field \"id\"");
    if (!j.contains("year") || !j["year"].is_number_integer())
      throw DataError(where() + ": missing integer field \"year\"");
    if (!j.contains("text") || !j["text"].is_string())
      throw DataError(where() + ": missing string field \"text\"");
    Document d{j["id"].get<std::string>(), j["year"].get<int>(),
               j["text"].get<std::string>()};
    if (d.year < year_min || d.year > year_max)
      throw DataError(where() + ": year " + std::to_string(d.year) +
                      " outside corpus range [" + std::to_string(year_min) + ", " +
                      std::to_string(year_max) + "]");
    if (!seen.insert(d.id).second)
      throw DataError(where() + ": duplicate document id \"" + d.id + "\"");
    docs.push_back(std::move(d));
  }
  return docs;
}

std::string to_jsonl(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    json j{{"id", d.id}, {"year", d.year}, {"text", d.text}};
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::string tokens_to_jsonl(const std::vector<TokenizedDoc>& docs) {
  std::string out;
  for (const auto& d : docs) {
    json j{{"id", d.id}, {"year", d.year}, {"tokens", d.tokens}};
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<TokenizedDoc> tokens_from_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open token file: " + path.string());
  std::vector<TokenizedDoc> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": invalid JSON: " + e.what());
    }
    TokenizedDoc d;
    d.id = j.at("id").get<std::string>();
    d.year = j.at("year").get<int>();
    d.tokens = j.at("tokens").get<std::vector<std::string>>();
    docs.push_back(std::move(d));
  }
  return docs;
}

void sort_docs(std::vector<TokenizedDoc>& docs) {
  std::sort(docs.begin(), docs.end(), [](const TokenizedDoc& a, const TokenizedDoc& b) {
    if (a.year != b.year) return a.year < b.year;
    return a.id < b.id;
  });
}

std::vector<TimeBin> bin_by_decade(const std::vector<TokenizedDoc>& docs,
                                   std::uint64_t min_tokens) {
  if (docs.empty()) throw DataError("bin_by_decade: no documents");

  std::vector<const TokenizedDoc*> sorted;
  sorted.reserve(docs.size());
  for (const auto& d : docs) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(), [](const TokenizedDoc* a, const TokenizedDoc* b) {
    if (a->year != b->year) return a->year < b->year;
    return a->id < b->id;
  });

  struct DecadeAgg {
    std::vector<const TokenizedDoc*> docs;
    std::uint64_t tokens = 0;
    int min_year = 0, max_year = 0;
  };
  std::map<int, DecadeAgg> decades;  // keyed by decade start, chronological
  for (const TokenizedDoc* d : sorted) {
    int dec = d->year - ((d->year % 10 + 10) % 10);
    auto& agg = decades[dec];
    if (agg.docs.empty()) {
      agg.min_year = agg.max_year = d->year;
    } else {
      agg.min_year = std::min(agg.min_year, d->year);
      agg.max_year = std::max(agg.max_year, d->year);
    }
    agg.docs.push_back(d);
    agg.tokens += d->tokens.size();
  }

  std::vector<TimeBin> bins;
  auto it = decades.begin();
  while (it != decades.end()) {
    int first_decade = it->first;
    std::uint64_t tokens = 0;
    int min_year = it->second.min_year, max_year = it->second.max_year;
    std::vector<const TokenizedDoc*> members;
    while (it != decades.end()) {
      tokens += it->second.tokens;
      min_year = std::min(min_year, it->second.min_year);
      max_year = std::max(max_year, it->second.max_year);
      members.insert(members.end(), it->second.docs.begin(), it->second.docs.end());
      ++it;
      if (tokens >= min_tokens) break;
    }
    TimeBin bin;
    bin.spec.label = std::to_string(first_decade) + "s";
    bin.spec.start_year = min_year;
    bin.spec.end_year = max_year;
    bin.token_count = tokens;
    std::unordered_set<std::string_view> types;
    for (const TokenizedDoc* d : members) {
      bin.doc_ids.push_back(d->id);
      for (const auto& t : d->tokens) types.insert(t);
    }
    bin.vocab_size = types.size();
    bins.push_back(std::move(bin));
  }
  return bins;
}

namespace {

// Longest suffix first; ties in length keep list order.
const std::pair<std::string_view, std::string_view> kSuffixRules[] = {
    {"ies", "y"}, {"ing", ""}, {"es", ""}, {"ed", ""}, {"s", ""},
};

// Stem after applying the first rule whose result is at least 3 characters;
// empty when no rule applies.
std::string lemma_candidate(const std::string& token) {
  for (const auto& [suffix, repl] : kSuffixRules) {
    if (token.size() > suffix.size() &&
        token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0) {
      std::string stem = token.substr(0, token.size() - suffix.size());
      stem += repl;
      if (stem.size() >= 3) return stem;
    }
  }
  return {};
}

}  // namespace

std::set<std::string> lemma_reduce(const std::set<std::string>& vocab) {
  std::unordered_map<std::string, int> candidate_count;
  std::unordered_map<std::string, std::string> candidate_of;
  for (const auto& token : vocab) {
    std::string stem = lemma_candidate(token);
    if (!stem.empty() && stem != token) {
      candidate_of[token] = stem;
      candidate_count[stem] += 1;
    }
  }
  std::set<std::string> out;
  for (const auto& token : vocab) {
    auto it = candidate_of.find(token);
    if (it != candidate_of.end() &&
        (vocab.count(it->second) || candidate_count[it->second] >= 2)) {
      out.insert(it->second);
    } else {
      out.insert(token);
    }
  }
  return out;
}

std::vector<DiagnosticsRow> diagnostics(
    const std::vector<TimeBin>& bins,
    const std::unordered_map<std::string, const TokenizedDoc*>& docs_by_id) {
  std::vector<DiagnosticsRow> rows;
  for (const auto& bin : bins) {
    DiagnosticsRow row;
    row.label = bin.spec.label;
    row.start_year = bin.spec.start_year;
    row.end_year = bin.spec.end_year;
    row.tokens = bin.token_count;
    std::set<std::string> types;
    for (const auto& id : bin.doc_ids) {
      auto it = docs_by_id.find(id);
      if (it == docs_by_id.end())
        throw DataError("diagnostics: unknown document id \"" + id + "\"");
      for (const auto& t : it->second->tokens) types.insert(t);
    }
    row.vocab = types.size();
    row.lemma_vocab = lemma_reduce(types).size();
    row.reduction_pct =
        row.vocab == 0 ? 0.0
                       : 100.0 * static_cast<double>(row.vocab - row.lemma_vocab) /
                             static_cast<double>(row.vocab);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows) {
  std::string out = "bin,start_year,end_year,tokens,vocab,lemma_vocab,reduction_pct\n";
  for (const auto& r : rows) {
    out += csv::join_row({r.label, std::to_string(r.start_year),
                          std::to_string(r.end_year), std::to_string(r.tokens),
                          std::to_string(r.vocab), std::to_string(r.lemma_vocab),
                          format_csv_double(r.reduction_pct)});
  }
  return out;
}

std::vector<Target> load_targets(const std::filesystem::path& path) {
  auto rows = csv::parse(read_file(path));
  std::vector<Target> targets;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.empty() || (row.size() == 1 && trim(row[0]).empty())) continue;
    if (i == 0 && row.size() >= 1 && row[0] == "word") continue;  // header
    if (row.size() < 1 || row[0].empty())
      throw DataError(path.string() + ": row " + std::to_string(i + 1) +
                      ": empty target word");
    Target t;
    t.word = row[0];
    t.domain = row.size() > 1 ? row[1] : "";
    targets.push_back(std::move(t));
  }
  if (targets.empty()) throw DataError(path.string() + ": no target words");
  return targets;
}

}  // namespace aetas::corpus
