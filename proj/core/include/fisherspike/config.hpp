// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fisherspike/simulate.hpp"

namespace fisherspike {

/// Sectioned key/value text:
///
///   # comment
///   [section]
///   key = value
///
/// Section and key order is kept. Used for run configurations and for the
/// summary documents written by the CLI.
class KeyValueDocument {
 public:
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };
  struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;

    const Entry* find(std::string_view key) const;
  };

  /// Throws kParse with "<source>:<line>: ..." diagnostics for malformed
  /// lines, entries outside a section, and repeated sections or keys.
  static KeyValueDocument parse(std::string_view text, std::string_view source = "<input>");

  const std::vector<Section>& sections() const noexcept { return sections_; }
  const Section* find(std::string_view name) const;
  const std::string& source() const noexcept { return source_; }

  Section& add_section(std::string name);
  /// Appends to the most recently added section.
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set_int(std::string key, std::uint64_t value);

  std::string to_string() const;

 private:
  std::string source_;
  std::vector<Section> sections_;
};

/// Round-trippable decimal text of a double.
std::string format_double(double v);
/// Parses the full string as a double / unsigned integer; throws kParse.
double parse_double(std::string_view text);
std::uint64_t parse_uint(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);
std::vector<std::uint64_t> parse_uint_list(std::string_view text);

/// Builds a ModelConfig from a document following the schema in
/// docs/config.md. Unknown sections or keys and invalid values throw kParse
/// with the offending line.
ModelConfig config_from_document(const KeyValueDocument& doc);
ModelConfig parse_config(std::string_view text, std::string_view source = "<input>");
/// Throws kIo when the file cannot be read.
ModelConfig load_config(const std::filesystem::path& path);

/// Canonical document with every field spelled out.
KeyValueDocument config_to_document(const ModelConfig& config);
std::string canonical_config(const ModelConfig& config);

/// FNV-1a 64 of the canonical text.
std::uint64_t config_fingerprint(const ModelConfig& config);
std::string fingerprint_hex(std::uint64_t fingerprint);

}  // namespace fisherspike
