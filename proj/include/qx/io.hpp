// Copyright 2026 The QX Authors.
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
//
// File formats:
//
//   Embeddings, CSV    header "id,v0,...,v{d-1}[,speaker]", UTF-8, '.' decimal
//                      separator, one utterance per row.
//   Embeddings, JSONL  one object per line:
//                      {"id": "...", "vector": [...], "speaker": "..."}
//                      with "speaker" optional.
//   Embeddings, binary magic "QXEB", little-endian u32 version (= 1), u32 N,
//                      u32 d, then N records of (u16 id length, UTF-8 id
//                      bytes, d little-endian 32-bit floats).  A file loads
//                      and re-saves byte-identically; note that saving a set
//                      quantizes components to 32-bit floats and that the
//                      format carries no speaker labels.
//   Trial list         whitespace-separated lines "label enroll_id test_id"
//                      with label 1 = target / 0 = nontarget, or the
//                      unlabeled variant "enroll_id test_id".
//   Score file, CSV    header "enroll_id,test_id,score[,label]", one trial
//                      per row, label 1/0 as above.
//
// Text embeddings are written with 17 significant digits (lossless for
// doubles); score files with 6 significant digits so diffs stay stable.

#ifndef QX_IO_HPP_
#define QX_IO_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qx/embedding.hpp"
#include "qx/error.hpp"
#include "qx/trial.hpp"

namespace qx {

enum class Format { csv, jsonl, binary };

inline std::optional<Format> format_from_extension(const std::string& path) {
  auto ends_with = [&](const char* suffix) {
    const std::size_t n = std::strlen(suffix);
    return path.size() >= n && path.compare(path.size() - n, n, suffix) == 0;
  };
  if (ends_with(".csv")) return Format::csv;
  if (ends_with(".jsonl")) return Format::jsonl;
  if (ends_with(".qxeb") || ends_with(".bin")) return Format::binary;
  return std::nullopt;
}

namespace detail {

inline std::string fmt_double(double x, const char* spec) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), spec, x);
  return buf;
}

inline std::string fmt_full(double x) { return fmt_double(x, "%.17g"); }
inline std::string fmt_score(double x) { return fmt_double(x, "%.6g"); }

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Locale-independent: '.' is the decimal separator regardless of environment.
inline bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::string read_line(std::istream& in, bool* ok) {
  std::string line;
  *ok = static_cast<bool>(std::getline(in, line));
  if (*ok && !line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

inline void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

// Checks shared by all embedding loaders, with a per-format locus string.
inline void check_components(const std::vector<double>& v,
                             const std::string& locus) {
  for (double x : v)
    if (!std::isfinite(x))
      throw Error(locus + ": non-finite component");
  bool zero = true;
  for (double x : v)
    if (x != 0.0) { zero = false; break; }
  if (zero) throw Error(locus + ": zero vector");
}

inline void add_checked(EmbeddingSet& set, Embedding e, const std::string& locus) {
  if (e.id.empty()) throw Error(locus + ": empty id");
  if (set.find(e.id)) throw Error(locus + ": duplicate id '" + e.id + "'");
  check_components(e.values, locus);
  set.add(std::move(e));
}

// --- CSV ------------------------------------------------------------------

inline EmbeddingSet load_embeddings_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  bool ok = false;
  const std::string header = read_line(in, &ok);
  if (!ok) throw Error(path + ": empty file, expected a header row");
  std::vector<std::string> cols = split(header, ',');
  if (cols.size() < 2 || cols[0] != "id")
    throw Error(path + ": malformed header '" + header + "'");
  bool has_speaker = cols.back() == "speaker";
  const std::size_t d = cols.size() - 1 - (has_speaker ? 1 : 0);
  if (d == 0) throw Error(path + ": header declares no vector columns");
  for (std::size_t k = 0; k < d; ++k)
    if (cols[k + 1] != "v" + std::to_string(k))
      throw Error(path + ": malformed header, expected column 'v" +
                  std::to_string(k) + "', found '" + cols[k + 1] + "'");

  EmbeddingSet set(static_cast<std::uint32_t>(d));
  std::size_t row = 0;
  while (true) {
    const std::string line = read_line(in, &ok);
    if (!ok) break;
    if (line.empty()) continue;
    ++row;
    const std::string locus = path + ": row " + std::to_string(row);
    std::vector<std::string> fields = split(line, ',');
    if (fields.size() != cols.size())
      throw Error(locus + ": expected " + std::to_string(cols.size()) +
                  " fields, found " + std::to_string(fields.size()) +
                  " (dimension mismatch)");
    Embedding e;
    e.id = fields[0];
    e.values.resize(d);
    for (std::size_t k = 0; k < d; ++k)
      if (!parse_double(fields[k + 1], &e.values[k]))
        throw Error(locus + ": malformed number '" + fields[k + 1] + "'");
    if (has_speaker) e.speaker = fields.back();
    add_checked(set, std::move(e), locus);
  }
  return set;
}

inline void save_embeddings_csv(const std::string& path, const EmbeddingSet& set) {
  bool any_speaker = false;
  for (std::uint32_t i = 0; i < set.size(); ++i)
    if (!set.speaker(i).empty()) { any_speaker = true; break; }

  std::ofstream out = open_out(path);
  out << "id";
  for (std::uint32_t k = 0; k < set.dim(); ++k) out << ",v" << k;
  if (any_speaker) out << ",speaker";
  out << "\n";
  for (std::uint32_t i = 0; i < set.size(); ++i) {
    const std::string& id = set.id(i);
    if (id.find_first_of(",\n\r") != std::string::npos)
      throw Error("id '" + id + "' cannot be written to CSV");
    out << id;
    for (double x : set.vec(i)) out << "," << fmt_full(x);
    if (any_speaker) out << "," << set.speaker(i);
    out << "\n";
  }
  finish_write(out, path);
}

// --- JSONL ----------------------------------------------------------------

inline EmbeddingSet load_embeddings_jsonl(const std::string& path) {
  std::ifstream in = open_in(path);
  std::optional<EmbeddingSet> set;
  std::size_t record = 0;
  bool ok = false;
  while (true) {
    const std::string line = read_line(in, &ok);
    if (!ok) break;
    if (line.empty()) continue;
    ++record;
    const std::string locus = path + ": record " + std::to_string(record);

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      // Non-standard but common encodings of non-finite numbers; map them to
      // null so they surface as a non-finite error rather than a parse error.
      std::string patched = line;
      for (const char* tok : {"-Infinity", "Infinity", "NaN"}) {
        std::size_t pos;
        while ((pos = patched.find(tok)) != std::string::npos)
          patched.replace(pos, std::strlen(tok), "null");
      }
      try {
        obj = nlohmann::json::parse(patched);
      } catch (const nlohmann::json::parse_error&) {
        throw Error(locus + ": malformed JSON");
      }
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("vector") || !obj["vector"].is_array())
      throw Error(locus + ": expected {\"id\": ..., \"vector\": [...]}");

    Embedding e;
    e.id = obj["id"].get<std::string>();
    const auto& arr = obj["vector"];
    e.values.reserve(arr.size());
    for (const auto& x : arr) {
      if (x.is_null())
        throw Error(locus + ": non-finite component");
      if (!x.is_number())
        throw Error(locus + ": vector holds a non-numeric component");
      e.values.push_back(x.get<double>());
    }
    if (obj.contains("speaker")) {
      if (!obj["speaker"].is_string())
        throw Error(locus + ": speaker must be a string");
      e.speaker = obj["speaker"].get<std::string>();
    }
    if (!set) {
      if (e.values.empty()) throw Error(locus + ": empty vector");
      set.emplace(static_cast<std::uint32_t>(e.values.size()));
    } else if (e.values.size() != set->dim()) {
      throw Error(locus + ": dimension mismatch (" +
                  std::to_string(e.values.size()) + " vs " +
                  std::to_string(set->dim()) + ")");
    }
    add_checked(*set, std::move(e), locus);
  }
  if (!set) throw Error(path + ": no records");
  return *std::move(set);
}

inline void save_embeddings_jsonl(const std::string& path, const EmbeddingSet& set) {
  std::ofstream out = open_out(path);
  for (std::uint32_t i = 0; i < set.size(); ++i) {
    nlohmann::ordered_json obj;
    obj["id"] = set.id(i);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (double x : set.vec(i)) arr.push_back(x);
    obj["vector"] = std::move(arr);
    if (!set.speaker(i).empty()) obj["speaker"] = set.speaker(i);
    out << obj.dump() << "\n";
  }
  finish_write(out, path);
}

// --- binary ---------------------------------------------------------------

inline constexpr char kBinaryMagic[4] = {'Q', 'X', 'E', 'B'};
inline constexpr std::uint32_t kBinaryVersion = 1;

inline void put_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f32le(std::string& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32le(out, bits);
}

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string path)
      : in_(in), path_(std::move(path)) {}

  std::uint16_t u16(const std::string& what) {
    unsigned char b[2];
    read(b, 2, what);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32(const std::string& what) {
    unsigned char b[4];
    read(b, 4, what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }
  float f32(const std::string& what) {
    const std::uint32_t bits = u32(what);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  void read(void* buf, std::size_t n, const std::string& what) {
    in_.read(static_cast<char*>(buf), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw Error(path_ + ": truncated file while reading " + what);
  }
  bool at_eof() {
    in_.peek();
    return in_.eof();
  }

 private:
  std::istream& in_;
  std::string path_;
};

inline EmbeddingSet load_embeddings_binary(const std::string& path) {
  std::ifstream in = open_in(path, /*binary=*/true);
  BinaryReader r(in, path);
  char magic[4];
  r.read(magic, 4, "magic");
  if (std::memcmp(magic, kBinaryMagic, 4) != 0)
    throw Error(path + ": bad magic, not an embedding file");
  const std::uint32_t version = r.u32("version");
  if (version != kBinaryVersion)
    throw Error(path + ": unsupported version " + std::to_string(version));
  const std::uint32_t n = r.u32("record count");
  const std::uint32_t d = r.u32("dimension");
  if (d == 0) throw Error(path + ": dimension must be positive");

  EmbeddingSet set(d);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::string locus = path + ": record " + std::to_string(i + 1);
    const std::uint16_t len = r.u16("id length");
    Embedding e;
    e.id.resize(len);
    if (len) r.read(e.id.data(), len, "id bytes");
    e.values.resize(d);
    for (std::uint32_t k = 0; k < d; ++k)
      e.values[k] = static_cast<double>(r.f32("component"));
    add_checked(set, std::move(e), locus);
  }
  if (!r.at_eof()) throw Error(path + ": trailing bytes after last record");
  return set;
}

inline void save_embeddings_binary(const std::string& path, const EmbeddingSet& set) {
  std::string buf;
  buf.reserve(16 + static_cast<std::size_t>(set.size()) * (set.dim() * 4 + 18));
  buf.append(kBinaryMagic, 4);
  put_u32le(buf, kBinaryVersion);
  put_u32le(buf, set.size());
  put_u32le(buf, set.dim());
  for (std::uint32_t i = 0; i < set.size(); ++i) {
    const std::string& id = set.id(i);
    if (id.size() > 0xffff)
      throw Error("id '" + id.substr(0, 32) + "...' exceeds 65535 bytes");
    put_u16le(buf, static_cast<std::uint16_t>(id.size()));
    buf.append(id);
    for (double x : set.vec(i)) put_f32le(buf, static_cast<float>(x));
  }
  std::ofstream out = open_out(path, /*binary=*/true);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish_write(out, path);
}

}  // namespace detail

inline EmbeddingSet load_embeddings(const std::string& path, Format format) {
  switch (format) {
    case Format::csv: return detail::load_embeddings_csv(path);
    case Format::jsonl: return detail::load_embeddings_jsonl(path);
    case Format::binary: return detail::load_embeddings_binary(path);
  }
  throw Error("unknown embedding format");
}

inline void save_embeddings(const std::string& path, const EmbeddingSet& set,
                            Format format) {
  switch (format) {
    case Format::csv: detail::save_embeddings_csv(path, set); return;
    case Format::jsonl: detail::save_embeddings_jsonl(path, set); return;
    case Format::binary: detail::save_embeddings_binary(path, set); return;
  }
  throw Error("unknown embedding format");
}

// --- trial lists ------------------------------------------------------------

inline TrialList load_trials(const std::string& path) {
  std::ifstream in = detail::open_in(path);
  TrialList trials;
  std::size_t n_fields = 0;  // 3 = labeled, 2 = unlabeled; fixed by first line
  std::size_t line_no = 0;
  bool ok = false;
  while (true) {
    const std::string line = detail::read_line(in, &ok);
    if (!ok) break;
    ++line_no;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    std::string t;
    while (ss >> t) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string locus = path + ": line " + std::to_string(line_no);
    if (n_fields == 0) {
      if (tok.size() != 2 && tok.size() != 3)
        throw Error(locus + ": expected 'label enroll test' or 'enroll test'");
      n_fields = tok.size();
    } else if (tok.size() != n_fields) {
      throw Error(locus + ": expected " + std::to_string(n_fields) +
                  " fields, found " + std::to_string(tok.size()));
    }
    TrialPair trial;
    if (n_fields == 3) {
      if (tok[0] == "1")
        trial.label = Label::target;
      else if (tok[0] == "0")
        trial.label = Label::nontarget;
      else
        throw Error(locus + ": label must be 1 or 0, found '" + tok[0] + "'");
      trial.enroll_id = tok[1];
      trial.test_id = tok[2];
    } else {
      trial.enroll_id = tok[0];
      trial.test_id = tok[1];
    }
    trials.push_back(std::move(trial));
  }
  return trials;
}

inline void save_trials(const std::string& path, const TrialList& trials) {
  bool all_labeled = true;
  for (const auto& t : trials)
    if (t.label == Label::unknown) { all_labeled = false; break; }
  std::ofstream out = detail::open_out(path);
  for (const auto& t : trials) {
    for (const std::string* id : {&t.enroll_id, &t.test_id})
      if (id->find_first_of(" \t\n\r") != std::string::npos)
        throw Error("id '" + *id + "' cannot be written to a trial list");
    if (all_labeled) out << (t.label == Label::target ? "1 " : "0 ");
    out << t.enroll_id << " " << t.test_id << "\n";
  }
  detail::finish_write(out, path);
}

// --- score files -------------------------------------------------------------

inline ScoreSet load_scores(const std::string& path, std::string system = "") {
  std::ifstream in = detail::open_in(path);
  bool ok = false;
  const std::string header = detail::read_line(in, &ok);
  if (!ok) throw Error(path + ": empty file, expected a header row");
  bool has_label;
  if (header == "enroll_id,test_id,score")
    has_label = false;
  else if (header == "enroll_id,test_id,score,label")
    has_label = true;
  else
    throw Error(path + ": malformed header '" + header + "'");

  ScoreSet out;
  out.system = system.empty() ? path : std::move(system);
  std::size_t row = 0;
  while (true) {
    const std::string line = detail::read_line(in, &ok);
    if (!ok) break;
    if (line.empty()) continue;
    ++row;
    const std::string locus = path + ": row " + std::to_string(row);
    std::vector<std::string> fields = detail::split(line, ',');
    if (fields.size() != (has_label ? 4u : 3u))
      throw Error(locus + ": expected " + std::to_string(has_label ? 4 : 3) +
                  " fields, found " + std::to_string(fields.size()));
    TrialPair trial;
    trial.enroll_id = fields[0];
    trial.test_id = fields[1];
    double score;
    if (!detail::parse_double(fields[2], &score))
      throw Error(locus + ": malformed score '" + fields[2] + "'");
    if (!std::isfinite(score)) throw Error(locus + ": non-finite score");
    if (has_label) {
      if (fields[3] == "1")
        trial.label = Label::target;
      else if (fields[3] == "0")
        trial.label = Label::nontarget;
      else
        throw Error(locus + ": label must be 1 or 0, found '" + fields[3] + "'");
    }
    out.trials.push_back(std::move(trial));
    out.scores.push_back(score);
  }
  return out;
}

inline void save_scores(const std::string& path, const ScoreSet& scores) {
  bool all_labeled = !scores.trials.empty();
  for (const auto& t : scores.trials)
    if (t.label == Label::unknown) { all_labeled = false; break; }

  std::ofstream out = detail::open_out(path);
  out << (all_labeled ? "enroll_id,test_id,score,label" : "enroll_id,test_id,score")
      << "\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const TrialPair& t = scores.trials[i];
    for (const std::string* id : {&t.enroll_id, &t.test_id})
      if (id->find_first_of(",\n\r") != std::string::npos)
        throw Error("id '" + *id + "' cannot be written to CSV");
    out << t.enroll_id << "," << t.test_id << ","
        << detail::fmt_score(scores.scores[i]);
    if (all_labeled) out << "," << (t.label == Label::target ? "1" : "0");
    out << "\n";
  }
  detail::finish_write(out, path);
}

}  // namespace qx

#endif  // QX_IO_HPP_
