#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "jstrack/common.hpp"

namespace jstrack {

enum class ScriptOrigin { InPage, External };

inline std::string to_string(ScriptOrigin o) {
  return o == ScriptOrigin::InPage ? "in_page" : "external";
}

struct ScriptRecord {
  std::string id;
  std::string source;
  ScriptOrigin origin = ScriptOrigin::InPage;
  std::string page_id;
  std::string url;                    // external records
  std::optional<Label> label;
  std::string label_rule;             // R1..R12, only with label
  bool missing_source = false;        // external with no sidecar

  bool featurizable() const { return !missing_source; }
};

struct PageSnapshot {
  std::string page_id;
  std::string html_path;
  std::string tool;  // off, NS, GT, AP, DC, PB, or other
};

struct Dataset {
  std::vector<ScriptRecord> records;
  std::set<std::string> pages;

  void add(ScriptRecord r) {
    if (!ids_.insert(r.id).second) throw DuplicateIdError(r.id);
    if (!r.page_id.empty()) pages.insert(r.page_id);
    records.push_back(std::move(r));
  }
  bool has_id(const std::string& id) const { return ids_.count(id) != 0; }

 private:
  std::unordered_set<std::string> ids_;
};

namespace detail {

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

inline std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from) {
  if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i)
    if (iequals(hay.substr(i, needle.size()), needle)) return i;
  return std::string_view::npos;
}

struct TagAttr {
  std::string name;
  std::string value;
};

// Scans attributes between `pos` and the closing '>' of a tag; tolerant of
// quoting styles and stray characters. Returns position after '>'.
inline std::size_t scan_attrs(std::string_view html, std::size_t pos,
                              std::vector<TagAttr>& attrs, bool& self_closing) {
  self_closing = false;
  while (pos < html.size() && html[pos] != '>') {
    if (std::isspace(static_cast<unsigned char>(html[pos])) || html[pos] == '/') {
      if (html[pos] == '/' && pos + 1 < html.size() && html[pos + 1] == '>')
        self_closing = true;
      ++pos;
      continue;
    }
    std::size_t name_start = pos;
    while (pos < html.size() && html[pos] != '=' && html[pos] != '>' &&
           html[pos] != '/' && !std::isspace(static_cast<unsigned char>(html[pos])))
      ++pos;
    TagAttr attr;
    attr.name = std::string(html.substr(name_start, pos - name_start));
    for (auto& c : attr.name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (pos < html.size() && html[pos] == '=') {
      ++pos;
      while (pos < html.size() && std::isspace(static_cast<unsigned char>(html[pos]))) ++pos;
      if (pos < html.size() && (html[pos] == '"' || html[pos] == '\'')) {
        char q = html[pos++];
        std::size_t vstart = pos;
        while (pos < html.size() && html[pos] != q) ++pos;
        attr.value = std::string(html.substr(vstart, pos - vstart));
        if (pos < html.size()) ++pos;
      } else {
        std::size_t vstart = pos;
        while (pos < html.size() && html[pos] != '>' &&
               !std::isspace(static_cast<unsigned char>(html[pos])))
          ++pos;
        attr.value = std::string(html.substr(vstart, pos - vstart));
      }
    }
    if (!attr.name.empty()) attrs.push_back(std::move(attr));
  }
  return pos < html.size() ? pos + 1 : pos;
}

}  // namespace detail

// Maps an external script URL to its sidecar file name in a snapshot bundle.
inline std::string sidecar_name(const std::string& url) {
  return hex64(fnv1a64(url)) + ".js";
}

// Extracts one record per script element from an HTML document, in document
// order. Tolerant tag scan: malformed HTML never errors. In-page bodies are
// verbatim slices of the input. External records resolve their source from
// `sidecar_dir` when provided; a missing sidecar leaves the record flagged.
inline std::vector<ScriptRecord> ingest_page(
    std::string_view html, const std::string& page_id, const std::string& tool,
    const std::optional<std::filesystem::path>& sidecar_dir = std::nullopt) {
  std::vector<ScriptRecord> out;
  std::size_t pos = 0;
  int index = 0;
  while (true) {
    std::size_t open = detail::ifind(html, "<script", pos);
    if (open == std::string_view::npos) break;
    char after = open + 7 < html.size() ? html[open + 7] : '\0';
    if (after != '>' && after != '/' && !std::isspace(static_cast<unsigned char>(after))) {
      pos = open + 7;  // e.g. <scriptfoo
      continue;
    }
    std::vector<detail::TagAttr> attrs;
    bool self_closing = false;
    std::size_t body_start = detail::scan_attrs(html, open + 7, attrs, self_closing);
    std::string src_url;
    for (const auto& a : attrs)
      if (a.name == "src") src_url = a.value;

    std::string body;
    if (self_closing || body_start >= html.size()) {
      pos = body_start;
    } else {
      std::size_t close = detail::ifind(html, "</script", body_start);
      if (close == std::string_view::npos) {
        body = std::string(html.substr(body_start));
        pos = html.size();
      } else {
        body = std::string(html.substr(body_start, close - body_start));
        std::size_t gt = html.find('>', close);
        pos = gt == std::string_view::npos ? html.size() : gt + 1;
      }
    }

    ScriptRecord r;
    r.id = page_id + ":" + tool + ":" + std::to_string(index++);
    r.page_id = page_id;
    if (src_url.empty()) {
      r.origin = ScriptOrigin::InPage;
      r.source = std::move(body);
    } else {
      r.origin = ScriptOrigin::External;
      r.url = src_url;
      if (sidecar_dir) {
        auto path = *sidecar_dir / sidecar_name(src_url);
        if (std::filesystem::exists(path)) {
          std::ifstream in(path, std::ios::binary);
          std::ostringstream ss;
          if (!in || !std::filesystem::is_regular_file(path) || !(ss << in.rdbuf()))
            throw IoError("unreadable sidecar: " + path.string());
          r.source = ss.str();
        } else {
          r.missing_source = true;
        }
      } else {
        r.missing_source = true;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Bundle layout: pages/<page_id>/<tool>/index.html plus
// pages/<page_id>/<tool>/ext/<hash>.js sidecars.
inline std::vector<ScriptRecord> ingest_bundle_page(const std::filesystem::path& bundle,
                                                    const std::string& page_id,
                                                    const std::string& tool) {
  auto dir = bundle / "pages" / page_id / tool;
  auto html_path = dir / "index.html";
  std::ifstream in(html_path, std::ios::binary);
  if (!in) throw IoError("cannot read " + html_path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ingest_page(ss.str(), page_id, tool, dir / "ext");
}

// ----- manifest -----

namespace detail {

inline std::map<std::string, std::string> parse_manifest_fields(const std::string& line) {
  std::map<std::string, std::string> fields;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t bar = line.find('|', pos);
    if (bar == std::string::npos) bar = line.size();
    std::string piece = line.substr(pos, bar - pos);
    if (!piece.empty()) {
      auto eq = piece.find('=');
      if (eq == std::string::npos) throw DataError("field without '=': " + piece);
      fields[piece.substr(0, eq)] = piece.substr(eq + 1);
    }
    pos = bar + 1;
  }
  return fields;
}

}  // namespace detail

// One record per line: `id=…|page=…|tool=off|origin=in_page|label=tracking|
// rule=R5|path=scripts/000.js`. Unknown keys ignored; paths are relative to
// the manifest's directory.
inline Dataset load_dataset(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot read " + manifest_path.string());
  auto base = manifest_path.parent_path();
  Dataset ds;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::map<std::string, std::string> fields;
    try {
      fields = detail::parse_manifest_fields(line);
    } catch (const DataError& e) {
      throw ManifestError(line_no, e.what());
    }
    if (!fields.count("id")) throw ManifestError(line_no, "missing id");
    ScriptRecord r;
    r.id = fields["id"];
    r.page_id = fields.count("page") ? fields["page"] : "";
    if (fields.count("origin")) {
      if (fields["origin"] == "in_page") r.origin = ScriptOrigin::InPage;
      else if (fields["origin"] == "external") r.origin = ScriptOrigin::External;
      else throw ManifestError(line_no, "bad origin: " + fields["origin"]);
    }
    if (r.origin == ScriptOrigin::InPage && r.page_id.empty())
      throw ManifestError(line_no, "in_page record without page");
    if (fields.count("url")) r.url = fields["url"];
    if (fields.count("label")) {
      if (fields["label"] == "tracking") r.label = Label::Tracking;
      else if (fields["label"] == "functional") r.label = Label::Functional;
      else throw ManifestError(line_no, "bad label: " + fields["label"]);
    }
    if (fields.count("rule")) {
      if (!r.label) throw ManifestError(line_no, "rule without label");
      r.label_rule = fields["rule"];
    }
    if (fields.count("path")) {
      auto p = base / fields["path"];
      std::ifstream src(p, std::ios::binary);
      if (!src) throw IoError("cannot read script file " + p.string());
      std::ostringstream ss;
      ss << src.rdbuf();
      r.source = ss.str();
    } else if (r.origin == ScriptOrigin::External) {
      r.missing_source = true;
    }
    ds.add(std::move(r));
  }
  return ds;
}

// Writes manifest + one script file per record under `out_dir/scripts/`.
inline void save_dataset(const Dataset& ds, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "scripts");
  std::ofstream manifest(out_dir / "manifest.txt", std::ios::binary);
  if (!manifest) throw IoError("cannot write manifest");
  int k = 0;
  for (const auto& r : ds.records) {
    std::string path;
    if (!r.missing_source) {
      char name[32];
      std::snprintf(name, sizeof(name), "%06d.js", k++);
      path = std::string("scripts/") + name;
      std::ofstream out(out_dir / path, std::ios::binary);
      out << r.source;
    }
    manifest << "id=" << r.id;
    if (!r.page_id.empty()) manifest << "|page=" << r.page_id;
    manifest << "|origin=" << to_string(r.origin);
    if (!r.url.empty()) manifest << "|url=" << r.url;
    if (r.label) manifest << "|label=" << to_string(*r.label);
    if (!r.label_rule.empty()) manifest << "|rule=" << r.label_rule;
    if (!path.empty()) manifest << "|path=" << path;
    manifest << "\n";
  }
}

// Drops records whose source bytes hash-collide with an earlier record;
// records with no source are kept.
inline Dataset dedup_by_source(const Dataset& ds) {
  Dataset out;
  std::unordered_set<std::uint64_t> seen;
  for (const auto& r : ds.records) {
    if (!r.missing_source && !seen.insert(fnv1a64(r.source)).second) continue;
    out.add(r);
  }
  return out;
}

}  // namespace jstrack
