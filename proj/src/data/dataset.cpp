// Copyright 2026 The GESN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string_view>

#include "gesn/dataset.hpp"
#include "gesn/error.hpp"

namespace gesn::data {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Splits into lines, dropping one trailing empty line and any '\r'.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, const fs::path& file, std::size_t line,
               const char* what) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(file.string(), line,
                     std::string("invalid ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

fs::path part(const fs::path& dir, const std::string& name, const char* ext) {
  return dir / (name + ext);
}

struct Meta {
  int nodes = -1;
  int features = -1;
  int classes = -1;
  int directed = -1;
};

Meta parse_meta(const fs::path& file, std::string_view text) {
  Meta meta;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (tokens(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(file.string(), i + 1, "expected key=value");
    }
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    int* slot = nullptr;
    if (key == "nodes") slot = &meta.nodes;
    if (key == "features") slot = &meta.features;
    if (key == "classes") slot = &meta.classes;
    if (key == "directed") slot = &meta.directed;
    if (slot == nullptr) {
      throw ParseError(file.string(), i + 1,
                       "unknown key '" + std::string(key) + "'");
    }
    *slot = parse_number<int>(value, file, i + 1, "integer");
  }
  auto require = [&](int v, const char* key) {
    if (v < 0) {
      throw ParseError(file.string(), lines.size() + 1,
                       std::string("missing or negative '") + key + "'");
    }
  };
  require(meta.nodes, "nodes");
  require(meta.features, "features");
  require(meta.classes, "classes");
  require(meta.directed, "directed");
  if (meta.directed > 1) {
    throw ParseError(file.string(), 0, "directed must be 0 or 1");
  }
  if (meta.classes < 2) {
    throw ParseError(file.string(), 0, "need at least two classes");
  }
  return meta;
}

void expect_rows(const fs::path& file, std::size_t found, int expected) {
  if (found != static_cast<std::size_t>(expected)) {
    throw ParseError(file.string(), std::min<std::size_t>(found, expected) + 1,
                     "expected " + std::to_string(expected) + " rows, found " +
                         std::to_string(found));
  }
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("SHA-256 initialisation failed");
    }
  }
  void update(std::string_view bytes) {
    EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size());
  }
  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest, &len);
    std::string out;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
      std::snprintf(byte, sizeof(byte), "%02x", digest[i]);
      out += byte;
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

bool dataset_exists(const fs::path& dir, const std::string& name) {
  for (const char* ext : {".meta", ".edges", ".x", ".y"}) {
    if (!fs::exists(part(dir, name, ext))) return false;
  }
  return true;
}

std::string dataset_checksum(const fs::path& dir, const std::string& name) {
  Sha256 sha;
  for (const char* ext : {".meta", ".edges", ".x", ".y"}) {
    sha.update(read_file(part(dir, name, ext)));
  }
  if (const auto ids = part(dir, name, ".ids"); fs::exists(ids)) {
    sha.update(read_file(ids));
  }
  return sha.hex();
}

CanonicalDataset load_dataset(const fs::path& dir, const std::string& name) {
  const fs::path meta_path = part(dir, name, ".meta");
  const fs::path edges_path = part(dir, name, ".edges");
  const fs::path x_path = part(dir, name, ".x");
  const fs::path y_path = part(dir, name, ".y");
  const fs::path ids_path = part(dir, name, ".ids");
  for (const auto& p : {meta_path, edges_path, x_path, y_path}) {
    if (!fs::exists(p)) throw Error("missing dataset file " + p.string());
  }

  Sha256 sha;
  const std::string meta_text = read_file(meta_path);
  sha.update(meta_text);
  const Meta meta = parse_meta(meta_path, meta_text);
  const int n = meta.nodes;

  std::vector<Arc> arcs;
  {
    const std::string text = read_file(edges_path);
    sha.update(text);
    const auto lines = split_lines(text);
    arcs.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto tok = tokens(lines[i]);
      if (tok.empty()) continue;
      if (tok.size() != 2) {
        throw ParseError(edges_path.string(), i + 1,
                         "expected 'src<TAB>dst', got " +
                             std::to_string(tok.size()) + " field(s)");
      }
      const auto src = parse_number<std::int32_t>(tok[0], edges_path, i + 1, "node index");
      const auto dst = parse_number<std::int32_t>(tok[1], edges_path, i + 1, "node index");
      if (src < 0 || src >= n || dst < 0 || dst >= n) {
        throw ParseError(edges_path.string(), i + 1,
                         "endpoint outside [0, " + std::to_string(n) + ")");
      }
      arcs.push_back({src, dst});
    }
  }

  Eigen::MatrixXd features(n, meta.features);
  {
    const std::string text = read_file(x_path);
    sha.update(text);
    const auto lines = split_lines(text);
    expect_rows(x_path, lines.size(), n);
    for (int v = 0; v < n; ++v) {
      const auto tok = tokens(lines[v]);
      if (tok.size() != static_cast<std::size_t>(meta.features)) {
        throw ParseError(x_path.string(), v + 1,
                         "expected " + std::to_string(meta.features) +
                             " features, found " + std::to_string(tok.size()));
      }
      for (int j = 0; j < meta.features; ++j) {
        features(v, j) = parse_number<double>(tok[j], x_path, v + 1, "real");
      }
    }
  }

  std::vector<int> labels(n);
  {
    const std::string text = read_file(y_path);
    sha.update(text);
    const auto lines = split_lines(text);
    expect_rows(y_path, lines.size(), n);
    std::set<int> seen;
    for (int v = 0; v < n; ++v) {
      const auto tok = tokens(lines[v]);
      if (tok.size() != 1) {
        throw ParseError(y_path.string(), v + 1, "expected one class id");
      }
      labels[v] = parse_number<int>(tok[0], y_path, v + 1, "class id");
      if (labels[v] < 0 || labels[v] >= meta.classes) {
        throw ParseError(y_path.string(), v + 1,
                         "label " + std::to_string(labels[v]) +
                             " outside [0, " + std::to_string(meta.classes) + ")");
      }
      seen.insert(labels[v]);
    }
    if (n > 0 && seen.size() < 2) {
      throw ParseError(y_path.string(), 1, "labels cover fewer than two classes");
    }
  }

  std::vector<std::int64_t> ids;
  if (fs::exists(ids_path)) {
    const std::string text = read_file(ids_path);
    sha.update(text);
    const auto lines = split_lines(text);
    expect_rows(ids_path, lines.size(), n);
    ids.reserve(n);
    for (int v = 0; v < n; ++v) {
      const auto tok = tokens(lines[v]);
      if (tok.size() != 1) {
        throw ParseError(ids_path.string(), v + 1, "expected one identifier");
      }
      ids.push_back(parse_number<std::int64_t>(tok[0], ids_path, v + 1, "identifier"));
    }
  }

  return CanonicalDataset{
      SparseGraph(n, arcs, meta.directed == 1, std::move(features),
                  std::move(labels), meta.classes, std::move(ids)),
      name, sha.hex()};
}

void save_dataset(const fs::path& dir, const std::string& name,
                  const SparseGraph& g) {
  if (!g.has_labels()) throw Error("save_dataset: graph has no labels");
  fs::create_directories(dir);
  auto open = [&](const char* ext) {
    std::ofstream out(part(dir, name, ext), std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + part(dir, name, ext).string());
    return out;
  };
  {
    auto out = open(".meta");
    out << "nodes=" << g.num_nodes() << "\nfeatures=" << g.num_features()
        << "\nclasses=" << g.num_classes() << "\ndirected="
        << (g.directed() ? 1 : 0) << "\n";
  }
  {
    auto out = open(".edges");
    // undirected graphs store each edge once, smaller endpoint first
    for (const Arc& a : g.arcs()) {
      if (g.directed() || a.src < a.dst) out << a.src << '\t' << a.dst << '\n';
    }
  }
  {
    auto out = open(".x");
    char buf[32];
    for (int v = 0; v < g.num_nodes(); ++v) {
      for (int j = 0; j < g.num_features(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", g.features()(v, j));
        if (j > 0) out << ' ';
        out << buf;
      }
      out << '\n';
    }
  }
  {
    auto out = open(".y");
    for (int v = 0; v < g.num_nodes(); ++v) out << g.labels()[v] << '\n';
  }
  const auto ids = g.node_ids();
  bool identity = true;
  for (std::size_t v = 0; v < ids.size(); ++v) {
    identity = identity && ids[v] == static_cast<std::int64_t>(v);
  }
  const fs::path ids_path = part(dir, name, ".ids");
  if (!identity) {
    auto out = open(".ids");
    for (auto id : ids) out << id << '\n';
  } else if (fs::exists(ids_path)) {
    fs::remove(ids_path);
  }
}

}  // namespace gesn::data
