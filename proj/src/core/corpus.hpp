#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aetas::corpus {

struct Document {
  std::string id;
  int year = 0;
  std::string text;
};

struct TokenizedDoc {
  std::string id;
  int year = 0;
  std::vector<std::string> tokens;
};

struct BinSpec {
  std::string label;  // first covered decade, e.g. "1750s"
  int start_year = 0;
  int end_year = 0;  // inclusive
};

struct TimeBin {
  BinSpec spec;
  std::vector<std::string> doc_ids;  // (year, id) order
  std::uint64_t token_count = 0;
  std::uint64_t vocab_size = 0;  // type count before any frequency filter
};

struct DiagnosticsRow {
  std::string label;
  int start_year = 0;
  int end_year = 0;
  std::uint64_t tokens = 0;
  std::uint64_t vocab = 0;
  std::uint64_t lemma_vocab = 0;
  double reduction_pct = 0.0;
};

struct Target {
  std::string word;
  std::string domain;
};

// Lowercases, maps every code point that is not a letter, digit, or hyphen
// to a separator, and strips leading/trailing hyphens per token. Idempotent
// on its own output.
std::vector<std::string> normalize_tokenize(std::string_view text);

TokenizedDoc tokenize(const Document& doc);

struct TeiExtractResult {
  std::vector<Document> documents;
  int skipped = 0;  // containers with missing or unparseable dates
};

// Pulls one Document per matched container element out of a TEI-style XML
// stream. date_attribute_path must be "@<name>"; a leading YYYY prefix of a
// longer date value is accepted. Text is the trimmed descendant text nodes
// joined by single spaces.
TeiExtractResult extract_tei_text(std::string_view xml_input,
                                  const std::set<std::string>& text_container_tags,
                                  const std::string& date_attribute_path,
                                  const std::string& id_prefix = "doc",
                                  int year_min = 1600, int year_max = 2100);

std::vector<Document> load_jsonl(const std::filesystem::path& path,
                                 int year_min = 1600, int year_max = 2100);
std::string to_jsonl(const std::vector<Document>& docs);

std::string tokens_to_jsonl(const std::vector<TokenizedDoc>& docs);
std::vector<TokenizedDoc> tokens_from_jsonl(const std::filesystem::path& path);

// Stable (year, id) order used everywhere downstream.
void sort_docs(std::vector<TokenizedDoc>& docs);

// Assigns documents to calendar decades, then merges any decade below
// min_tokens forward until the running total reaches the threshold. The
// final bin is kept even when below threshold. Bin spans record actual
// covered years.
std::vector<TimeBin> bin_by_decade(const std::vector<TokenizedDoc>& docs,
                                   std::uint64_t min_tokens = 5'000'000);

// Naive suffix-stripping used for the vocabulary-reduction diagnostic only.
// A token collapses to its stem when the stem is already a vocabulary entry
// or another token reduces to the same stem.
std::set<std::string> lemma_reduce(const std::set<std::string>& vocab);

std::vector<DiagnosticsRow> diagnostics(
    const std::vector<TimeBin>& bins,
    const std::unordered_map<std::string, const TokenizedDoc*>& docs_by_id);

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows);

std::vector<Target> load_targets(const std::filesystem::path& path);

}  // namespace aetas::corpus
