// include/awe/base/config-file.h

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

#ifndef AWE_BASE_CONFIG_FILE_H_
#define AWE_BASE_CONFIG_FILE_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace awe {

/// Flat key/value document in a small TOML subset:
///
///   # comment
///   key = 12
///   name = "A0"
///   flag = true
///   langs = ["A1", "A2"]
///   sequences = [["A1", "B1"], ["B1", "A1"]]
///   [section]        # later keys are read as "section.key"
///
/// Values are kept as raw text and converted on access. Every getter marks
/// its key as consumed so that CheckAllConsumed() can flag typos.
class ConfigFile {
 public:
  ConfigFile() = default;
  static ConfigFile Parse(const std::string &text, const std::string &origin);
  static ConfigFile Load(const std::string &path);

  bool Has(const std::string &key) const { return values_.count(key) != 0; }

  std::string GetString(const std::string &key, const std::string &def) const;
  double GetDouble(const std::string &key, double def) const;
  long long GetInt(const std::string &key, long long def) const;
  bool GetBool(const std::string &key, bool def) const;
  std::vector<std::string> GetStringList(
      const std::string &key, const std::vector<std::string> &def) const;
  std::vector<std::vector<std::string>> GetStringListList(
      const std::string &key,
      const std::vector<std::vector<std::string>> &def) const;

  /// Throws naming the first key that no getter asked for.
  void CheckAllConsumed() const;

  void Set(const std::string &key, const std::string &raw) { values_[key] = raw; }
  const std::map<std::string, std::string> &raw() const { return values_; }

 private:
  std::optional<std::string> Take(const std::string &key) const;

  std::string origin_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

/// Quotes a string for writing back into a ConfigFile document.
std::string QuoteConfigString(const std::string &s);

}  // namespace awe

#endif  // AWE_BASE_CONFIG_FILE_H_
