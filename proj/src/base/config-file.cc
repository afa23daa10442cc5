// src/base/config-file.cc

// Copyright 2026  awe contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "awe/base/config-file.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "awe/base/common.h"

namespace awe {

namespace {

std::string Trim(const std::string &s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Removes a trailing '#' comment that is not inside a quoted string.
std::string StripComment(const std::string &line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_quote = !in_quote;
    if (line[i] == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

std::string Unquote(const std::string &raw, const std::string &key) {
  std::string v = Trim(raw);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] == '\\' && i + 2 < v.size()) ++i;
      out.push_back(v[i]);
    }
    return out;
  }
  if (!v.empty() && v.front() == '"')
    throw Error("unterminated string for key '" + key + "'");
  return v;
}

// Splits the inside of a bracketed list at top-level commas.
std::vector<std::string> SplitList(const std::string &raw,
                                   const std::string &key) {
  std::string v = Trim(raw);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw Error("expected a [list] for key '" + key + "'");
  std::vector<std::string> items;
  std::string cur;
  int depth = 0;
  bool in_quote = false;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    char c = v[i];
    if (c == '"' && v[i - 1] != '\\') in_quote = !in_quote;
    if (!in_quote) {
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == ',' && depth == 0) {
        items.push_back(Trim(cur));
        cur.clear();
        continue;
      }
    }
    cur.push_back(c);
  }
  if (!Trim(cur).empty()) items.push_back(Trim(cur));
  return items;
}

}  // namespace

ConfigFile ConfigFile::Parse(const std::string &text, const std::string &origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section, pending_key, pending_value;
  int line_no = 0, depth = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = Trim(StripComment(line));
    if (depth > 0) {
      // Continuation of a multi-line list.
      pending_value += " " + body;
      for (char c : body) depth += (c == '[') - (c == ']');
      if (depth <= 0) {
        cfg.values_[pending_key] = pending_value;
        depth = 0;
      }
      continue;
    }
    if (body.empty()) continue;
    if (body.front() == '[' && body.back() == ']' &&
        body.find('=') == std::string::npos) {
      section = Trim(body.substr(1, body.size() - 2));
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(origin + ":" + std::to_string(line_no) +
                  ": expected 'key = value'");
    std::string key = Trim(body.substr(0, eq));
    std::string value = Trim(body.substr(eq + 1));
    if (key.empty())
      throw Error(origin + ":" + std::to_string(line_no) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (cfg.values_.count(key))
      throw Error(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                  key + "'");
    for (char c : value) depth += (c == '[') - (c == ']');
    if (depth > 0) {
      pending_key = key;
      pending_value = value;
      continue;
    }
    depth = 0;
    cfg.values_[key] = value;
  }
  if (depth > 0) throw Error(origin + ": unterminated list for '" + pending_key + "'");
  return cfg;
}

ConfigFile ConfigFile::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str(), path);
}

std::optional<std::string> ConfigFile::Take(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  consumed_.insert(key);
  return it->second;
}

std::string ConfigFile::GetString(const std::string &key,
                                  const std::string &def) const {
  auto v = Take(key);
  return v ? Unquote(*v, key) : def;
}

double ConfigFile::GetDouble(const std::string &key, double def) const {
  auto v = Take(key);
  if (!v) return def;
  try {
    std::size_t used = 0;
    double d = std::stod(*v, &used);
    if (used != Trim(*v).size()) throw std::invalid_argument(key);
    return d;
  } catch (const std::exception &) {
    throw Error(origin_ + ": key '" + key + "' is not a number: " + *v);
  }
}

long long ConfigFile::GetInt(const std::string &key, long long def) const {
  auto v = Take(key);
  if (!v) return def;
  try {
    std::size_t used = 0;
    long long n = std::stoll(*v, &used);
    if (used != Trim(*v).size()) throw std::invalid_argument(key);
    return n;
  } catch (const std::exception &) {
    throw Error(origin_ + ": key '" + key + "' is not an integer: " + *v);
  }
}

bool ConfigFile::GetBool(const std::string &key, bool def) const {
  auto v = Take(key);
  if (!v) return def;
  if (*v == "true") return true;
  if (*v == "false") return false;
  throw Error(origin_ + ": key '" + key + "' is not a boolean: " + *v);
}

std::vector<std::string> ConfigFile::GetStringList(
    const std::string &key, const std::vector<std::string> &def) const {
  auto v = Take(key);
  if (!v) return def;
  std::vector<std::string> out;
  for (const auto &item : SplitList(*v, key)) out.push_back(Unquote(item, key));
  return out;
}

std::vector<std::vector<std::string>> ConfigFile::GetStringListList(
    const std::string &key,
    const std::vector<std::vector<std::string>> &def) const {
  auto v = Take(key);
  if (!v) return def;
  std::vector<std::vector<std::string>> out;
  for (const auto &item : SplitList(*v, key)) {
    std::vector<std::string> inner;
    for (const auto &x : SplitList(item, key)) inner.push_back(Unquote(x, key));
    out.push_back(std::move(inner));
  }
  return out;
}

void ConfigFile::CheckAllConsumed() const {
  for (const auto &[key, value] : values_)
    if (!consumed_.count(key))
      throw Error(origin_ + ": unknown key '" + key + "'");
}

std::string QuoteConfigString(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace awe
