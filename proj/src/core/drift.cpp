#include "drift.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "csv.hpp"
#include "linalg.hpp"
#include "util.hpp"

namespace aetas::drift {

using nlohmann::json;

double cosine_drift(const emb::EmbeddingSpace& a, const emb::EmbeddingSpace& b,
                    std::string_view word) {
  return 1.0 - linalg::cosine(a.vector_of(word), b.vector_of(word));
}

std::vector<Neighbor> top_k_neighbors(const emb::EmbeddingSpace& space,
                                      std::string_view word, std::size_t k) {
  auto idx = space.vocab.find(word);
  if (!idx)
    throw DataError("word \"" + std::string(word) + "\" not in vocabulary of space \"" +
                    space.label + "\"");
  if (k >= space.vocab.size())
    throw DataError("k=" + std::to_string(k) + " must be below vocabulary size " +
                    std::to_string(space.vocab.size()));
  auto query = space.vectors.row(*idx);
  std::vector<Neighbor> all;
  all.reserve(space.vocab.size() - 1);
  for (std::size_t i = 0; i < space.vocab.size(); ++i) {
    if (i == *idx) continue;
    all.push_back({space.vocab.words[i], linalg::cosine(query, space.vectors.row(i))});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& x, const Neighbor& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.word < y.word;
  });
  all.resize(k);
  return all;
}

double neighbor_jaccard(const emb::EmbeddingSpace& a, const emb::EmbeddingSpace& b,
                        std::string_view word, std::size_t k) {
  std::set<std::string> sa, sb;
  for (const auto& n : top_k_neighbors(a, word, k)) sa.insert(n.word);
  for (const auto& n : top_k_neighbors(b, word, k)) sb.insert(n.word);
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

DriftTable drift_table(const std::vector<emb::EmbeddingSpace>& aligned_spaces,
                       const std::vector<corpus::Target>& targets,
                       const std::vector<std::pair<std::string, std::string>>& spans,
                       const std::vector<int>& k_list) {
  std::unordered_map<std::string, const emb::EmbeddingSpace*> by_label;
  for (const auto& s : aligned_spaces) by_label[s.label] = &s;
  auto lookup = [&](const std::string& label) -> const emb::EmbeddingSpace& {
    auto it = by_label.find(label);
    if (it == by_label.end())
      throw ConfigError("span references unknown bin label \"" + label + "\"");
    return *it->second;
  };

  DriftTable table;
  for (const auto& target : targets) {
    for (const auto& [start, end] : spans) {
      const auto& sa = lookup(start);
      const auto& sb = lookup(end);
      std::string missing;
      if (!sa.vocab.find(target.word)) missing = start;
      else if (!sb.vocab.find(target.word)) missing = end;
      if (!missing.empty()) {
        table.skipped.push_back(
            {target.word, start, end, "not in vocabulary of \"" + missing + "\""});
        continue;
      }
      double d = cosine_drift(sa, sb, target.word);
      for (int k : k_list) {
        DriftRecord rec;
        rec.word = target.word;
        rec.domain = target.domain;
        rec.start_label = start;
        rec.end_label = end;
        rec.k = k;
        rec.drift = d;
        rec.neighbors_start = top_k_neighbors(sa, target.word, static_cast<std::size_t>(k));
        rec.neighbors_end = top_k_neighbors(sb, target.word, static_cast<std::size_t>(k));
        std::set<std::string> set_a, set_b;
        for (const auto& n : rec.neighbors_start) set_a.insert(n.word);
        for (const auto& n : rec.neighbors_end) set_b.insert(n.word);
        std::size_t inter = 0;
        for (const auto& w : set_a) inter += set_b.count(w);
        rec.overlap = static_cast<double>(inter) /
                      static_cast<double>(set_a.size() + set_b.size() - inter);
        table.records.push_back(std::move(rec));
      }
    }
  }
  auto key = [](const DriftRecord& r) {
    return std::tie(r.word, r.start_label, r.end_label, r.k);
  };
  std::sort(table.records.begin(), table.records.end(),
            [&](const DriftRecord& x, const DriftRecord& y) { return key(x) < key(y); });
  std::sort(table.skipped.begin(), table.skipped.end(),
            [](const SkippedTarget& x, const SkippedTarget& y) {
              return std::tie(x.word, x.start_label, x.end_label) <
                     std::tie(y.word, y.start_label, y.end_label);
            });
  return table;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DataError("spearman needs two equal-length vectors of size >= 2");
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw NumericError("spearman undefined: a rank vector has zero variance");
  return sxy / std::sqrt(sxx * syy);
}

PivotBaselineRecord pivot_baseline(const emb::EmbeddingSpace& a,
                                   const emb::EmbeddingSpace& b, std::string_view word,
                                   std::size_t n_pivots, std::size_t top_m) {
  auto ia = a.vocab.find(word);
  auto ib = b.vocab.find(word);
  if (!ia)
    throw DataError("word \"" + std::string(word) + "\" not in vocabulary of space \"" +
                    a.label + "\"");
  if (!ib)
    throw DataError("word \"" + std::string(word) + "\" not in vocabulary of space \"" +
                    b.label + "\"");

  struct Scored {
    std::string word;
    double score;
  };
  std::vector<Scored> shared;
  const double ta = static_cast<double>(a.vocab.total_tokens);
  const double tb = static_cast<double>(b.vocab.total_tokens);
  for (std::size_t i = 0; i < a.vocab.size(); ++i) {
    const auto& w = a.vocab.words[i];
    if (w == word) continue;
    auto j = b.vocab.find(w);
    if (!j) continue;
    double rel = static_cast<double>(a.vocab.counts[i]) / ta +
                 static_cast<double>(b.vocab.counts[*j]) / tb;
    shared.push_back({w, rel});
  }
  if (shared.empty())
    throw DataError("no shared pivot candidates between \"" + a.label + "\" and \"" +
                    b.label + "\"");
  if (shared.size() < n_pivots) {
    std::cerr << "warning: only " << shared.size() << " shared words for "
              << n_pivots << " requested pivots; using all\n";
    n_pivots = shared.size();
  }
  std::sort(shared.begin(), shared.end(), [](const Scored& x, const Scored& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.word < y.word;
  });
  shared.resize(n_pivots);

  PivotBaselineRecord rec;
  rec.word = std::string(word);
  rec.start_label = a.label;
  rec.end_label = b.label;
  rec.n_pivots = n_pivots;

  std::vector<double> sim_a(n_pivots), sim_b(n_pivots);
  auto va = a.vectors.row(*ia);
  auto vb = b.vectors.row(*ib);
  for (std::size_t i = 0; i < n_pivots; ++i) {
    sim_a[i] = linalg::cosine(va, a.vector_of(shared[i].word));
    sim_b[i] = linalg::cosine(vb, b.vector_of(shared[i].word));
  }

  auto top_set = [&](const std::vector<double>& sim) {
    std::vector<std::size_t> idx(n_pivots);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t p, std::size_t q) {
      if (sim[p] != sim[q]) return sim[p] > sim[q];
      return shared[p].word < shared[q].word;
    });
    std::set<std::string> out;
    for (std::size_t i = 0; i < std::min(top_m, n_pivots); ++i)
      out.insert(shared[idx[i]].word);
    return out;
  };
  auto set_a = top_set(sim_a);
  auto set_b = top_set(sim_b);
  std::size_t inter = 0;
  for (const auto& w : set_a) inter += set_b.count(w);
  rec.jaccard_top_m = static_cast<double>(inter) /
                      static_cast<double>(set_a.size() + set_b.size() - inter);
  rec.spearman = spearman(sim_a, sim_b);
  return rec;
}

double temporal_norm(const emb::EmbeddingSpace& aligned,
                     const emb::EmbeddingSpace& anchor, std::string_view word) {
  auto va = aligned.vector_of(word);
  auto vb = anchor.vector_of(word);
  if (va.size() != vb.size())
    throw DataError("dimension mismatch between \"" + aligned.label + "\" and \"" +
                    anchor.label + "\"");
  double sum = 0;
  for (std::size_t i = 0; i < va.size(); ++i) sum += (va[i] - vb[i]) * (va[i] - vb[i]);
  return std::sqrt(sum);
}

std::string drift_csv(const DriftTable& table) {
  std::string out = "word,domain,start,end,k,drift,overlap\n";
  for (const auto& r : table.records)
    out += csv::join_row({r.word, r.domain, r.start_label, r.end_label,
                          std::to_string(r.k), format_csv_double(r.drift),
                          format_csv_double(r.overlap)});
  return out;
}

std::string skipped_csv(const DriftTable& table) {
  std::string out = "word,start,end,reason\n";
  for (const auto& s : table.skipped)
    out += csv::join_row({s.word, s.start_label, s.end_label, s.reason});
  return out;
}

std::string neighbors_json(const DriftTable& table) {
  json records = json::array();
  for (const auto& r : table.records) {
    json ns = json::array(), ne = json::array();
    for (const auto& n : r.neighbors_start)
      ns.push_back({{"word", n.word}, {"cosine", n.score}});
    for (const auto& n : r.neighbors_end)
      ne.push_back({{"word", n.word}, {"cosine", n.score}});
    records.push_back({{"word", r.word},
                       {"start", r.start_label},
                       {"end", r.end_label},
                       {"k", r.k},
                       {"start_neighbors", std::move(ns)},
                       {"end_neighbors", std::move(ne)}});
  }
  json skipped = json::array();
  for (const auto& s : table.skipped)
    skipped.push_back({{"word", s.word},
                       {"start", s.start_label},
                       {"end", s.end_label},
                       {"reason", s.reason}});
  return json{{"records", std::move(records)}, {"skipped", std::move(skipped)}}
             .dump(2) +
         "\n";
}

std::string pivot_csv(const std::vector<PivotBaselineRecord>& records) {
  std::string out = "word,start,end,n_pivots,jaccard_top_m,spearman\n";
  for (const auto& r : records)
    out += csv::join_row({r.word, r.start_label, r.end_label,
                          std::to_string(r.n_pivots),
                          format_csv_double(r.jaccard_top_m),
                          format_csv_double(r.spearman)});
  return out;
}

std::string norms_csv(const std::vector<TemporalNormRecord>& records) {
  std::string out = "word,bin,anchor,norm\n";
  for (const auto& r : records)
    out += csv::join_row({r.word, r.bin_label, r.anchor_label,
                          format_csv_double(r.norm)});
  return out;
}

}  // namespace aetas::drift
