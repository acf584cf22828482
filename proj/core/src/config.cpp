// Copyright 2026 The fisherspike Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fisherspike/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fisherspike/error.hpp"

namespace fisherspike {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(',', start);
    out.push_back(trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (out.size() == 1 && out.front().empty()) out.clear();
  return out;
}

[[noreturn]] void fail_at(const KeyValueDocument& doc, int line, const std::string& msg) {
  throw Error(ErrorCode::kParse, doc.source() + ":" + std::to_string(line) + ": " + msg);
}

// Calls fn(value) and rewraps any library error with the entry's location.
template <class Fn>
auto convert(const KeyValueDocument& doc, const KeyValueDocument::Entry& e, Fn&& fn) {
  try {
    return fn(e.value);
  } catch (const Error& err) {
    fail_at(doc, e.line, "invalid value for '" + e.key + "': " + err.what());
  }
}

const std::map<std::string, std::set<std::string>, std::less<>>& schema() {
  static const std::map<std::string, std::set<std::string>, std::less<>> s{
      {"model", {"p", "n1", "n2", "ratio"}},
      {"spikes", {"values", "multiplicities"}},
      {"base", {"values", "weights"}},
      {"sigma", {"case", "rho"}},
      {"dist", {"x", "y"}},
      {"truncation", {"exponent", "scale"}},
      {"mc", {"reps", "seed"}},
      {"regime", {"mode"}},
      {"backend", {"kind", "dimension", "replicates", "seed"}},
  };
  return s;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

}  // namespace

const KeyValueDocument::Entry* KeyValueDocument::Section::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const KeyValueDocument::Section* KeyValueDocument::find(std::string_view name) const {
  for (const auto& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

KeyValueDocument KeyValueDocument::parse(std::string_view text, std::string_view source) {
  KeyValueDocument doc;
  doc.source_ = std::string(source);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_at(doc, line_no, "unterminated section header");
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail_at(doc, line_no, "empty section name");
      if (const auto* prev = doc.find(name)) {
        fail_at(doc, line_no, "section [" + std::string(name) + "] repeats line " +
                                  std::to_string(prev->line));
      }
      doc.sections_.push_back({std::string(name), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail_at(doc, line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) fail_at(doc, line_no, "empty key");
    if (doc.sections_.empty()) fail_at(doc, line_no, "entry '" + std::string(key) + "' outside any section");
    auto& section = doc.sections_.back();
    if (const auto* prev = section.find(key)) {
      fail_at(doc, line_no, "key '" + std::string(key) + "' repeats line " + std::to_string(prev->line));
    }
    section.entries.push_back({std::string(key), std::string(value), line_no});
  }
  return doc;
}

KeyValueDocument::Section& KeyValueDocument::add_section(std::string name) {
  sections_.push_back({std::move(name), 0, {}});
  return sections_.back();
}

void KeyValueDocument::set(std::string key, std::string value) {
  if (sections_.empty()) throw Error(ErrorCode::kInvalidArgument, "set() before add_section()");
  sections_.back().entries.push_back({std::move(key), std::move(value), 0});
}

void KeyValueDocument::set(std::string key, double value) { set(std::move(key), format_double(value)); }

void KeyValueDocument::set_int(std::string key, std::uint64_t value) {
  set(std::move(key), std::to_string(value));
}

std::string KeyValueDocument::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < sections_.size(); ++i) {
    if (i) os << '\n';
    os << '[' << sections_[i].name << "]\n";
    for (const auto& e : sections_[i].entries) os << e.key << " = " << e.value << '\n';
  }
  return os.str();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParse, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kParse, "not an unsigned integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split_list(text)) out.push_back(parse_double(item));
  return out;
}

std::vector<std::uint64_t> parse_uint_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (auto item : split_list(text)) out.push_back(parse_uint(item));
  return out;
}

ModelConfig config_from_document(const KeyValueDocument& doc) {
  for (const auto& section : doc.sections()) {
    const auto it = schema().find(section.name);
    if (it == schema().end()) fail_at(doc, section.line, "unknown section [" + section.name + "]");
    for (const auto& e : section.entries) {
      if (!it->second.count(e.key)) {
        fail_at(doc, e.line, "unknown key '" + e.key + "' in [" + section.name + "]");
      }
    }
  }
  auto get = [&](std::string_view sec, std::string_view key) -> const KeyValueDocument::Entry* {
    const auto* s = doc.find(sec);
    return s ? s->find(key) : nullptr;
  };
  auto as_size = [](const std::string& v) { return static_cast<std::size_t>(parse_uint(v)); };
  auto as_double = [](const std::string& v) { return parse_double(v); };

  ModelConfig c;
  const auto* model = doc.find("model");
  if (!model) throw Error(ErrorCode::kParse, doc.source() + ": missing section [model]");
  for (const char* key : {"p", "n1", "n2"}) {
    if (!model->find(key)) fail_at(doc, model->line, "[model] needs '" + std::string(key) + "'");
  }
  c.p = convert(doc, *model->find("p"), as_size);
  c.n1 = convert(doc, *model->find("n1"), as_size);
  c.n2 = convert(doc, *model->find("n2"), as_size);
  if (const auto* e = get("model", "ratio")) c.ratio_convention = convert(doc, *e, parse_ratio_convention);

  std::vector<double> values;
  std::vector<std::uint64_t> mults;
  int spikes_line = 0;
  if (const auto* e = get("spikes", "values")) {
    values = convert(doc, *e, parse_double_list);
    spikes_line = e->line;
  }
  if (const auto* e = get("spikes", "multiplicities")) {
    mults = convert(doc, *e, parse_uint_list);
    if (mults.size() != values.size()) {
      fail_at(doc, e->line, "multiplicities has " + std::to_string(mults.size()) + " entries for " +
                                std::to_string(values.size()) + " spike values");
    }
    spikes_line = e->line;
  } else {
    mults.assign(values.size(), 1);
  }
  std::vector<SpikeGroup> groups;
  for (std::size_t i = 0; i < values.size(); ++i) groups.push_back({values[i], mults[i]});
  try {
    c.spikes = SpikeSpec(std::move(groups));
  } catch (const Error& err) {
    fail_at(doc, spikes_line, err.what());
  }

  if (doc.find("base")) {
    const auto* ev = get("base", "values");
    if (!ev) fail_at(doc, doc.find("base")->line, "[base] needs 'values'");
    const auto atoms = convert(doc, *ev, parse_double_list);
    std::vector<double> weights(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
    if (const auto* ew = get("base", "weights")) {
      weights = convert(doc, *ew, parse_double_list);
      if (weights.size() != atoms.size()) fail_at(doc, ew->line, "weights and values differ in length");
    }
    c.base_atoms.clear();
    for (std::size_t i = 0; i < atoms.size(); ++i) c.base_atoms.push_back({atoms[i], weights[i]});
  }

  if (const auto* e = get("sigma", "case")) c.sigma_case = convert(doc, *e, parse_sigma_case);
  if (const auto* e = get("sigma", "rho")) c.rho = convert(doc, *e, as_double);
  if (const auto* e = get("dist", "x")) c.dist_x = convert(doc, *e, parse_distribution);
  if (const auto* e = get("dist", "y")) c.dist_y = convert(doc, *e, parse_distribution);
  if (const auto* e = get("truncation", "exponent")) c.truncation.eta_exponent = convert(doc, *e, as_double);
  if (const auto* e = get("truncation", "scale")) c.truncation.eta_scale = convert(doc, *e, as_double);
  if (const auto* e = get("mc", "reps")) c.reps = convert(doc, *e, as_size);
  if (const auto* e = get("mc", "seed")) c.seed = convert(doc, *e, parse_uint);
  if (const auto* e = get("regime", "mode")) c.regime = convert(doc, *e, parse_regime);
  if (const auto* e = get("backend", "kind")) {
    c.backend = convert(doc, *e, [](const std::string& v) {
      if (v == "quadrature") return StieltjesBackend::kQuadrature;
      if (v == "montecarlo") return StieltjesBackend::kMonteCarlo;
      throw Error(ErrorCode::kConfig, "expected quadrature or montecarlo");
    });
  }
  if (const auto* e = get("backend", "dimension")) c.backend_options.dimension = convert(doc, *e, as_size);
  if (const auto* e = get("backend", "replicates")) c.backend_options.replicates = convert(doc, *e, as_size);
  if (const auto* e = get("backend", "seed")) c.backend_options.seed = convert(doc, *e, parse_uint);

  try {
    c.validate();
  } catch (const Error& err) {
    throw Error(ErrorCode::kParse, doc.source() + ": " + err.what());
  }
  return c;
}

ModelConfig parse_config(std::string_view text, std::string_view source) {
  return config_from_document(KeyValueDocument::parse(text, source));
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

KeyValueDocument config_to_document(const ModelConfig& c) {
  KeyValueDocument doc;
  doc.add_section("model");
  doc.set_int("p", c.p);
  doc.set_int("n1", c.n1);
  doc.set_int("n2", c.n2);
  doc.set("ratio", std::string(to_string(c.ratio_convention)));

  doc.add_section("spikes");
  std::vector<double> values;
  std::string mults;
  for (const auto& g : c.spikes.groups()) {
    values.push_back(g.alpha);
    mults += (mults.empty() ? "" : ", ") + std::to_string(g.multiplicity);
  }
  doc.set("values", join_doubles(values));
  doc.set("multiplicities", mults);

  doc.add_section("base");
  std::vector<double> atoms, weights;
  for (const auto& a : c.base_atoms) {
    atoms.push_back(a.value);
    weights.push_back(a.weight);
  }
  doc.set("values", join_doubles(atoms));
  doc.set("weights", join_doubles(weights));

  doc.add_section("sigma");
  doc.set("case", std::string(to_string(c.sigma_case)));
  doc.set("rho", c.rho);
  doc.add_section("dist");
  doc.set("x", std::string(to_string(c.dist_x)));
  doc.set("y", std::string(to_string(c.dist_y)));
  doc.add_section("truncation");
  doc.set("exponent", c.truncation.eta_exponent);
  doc.set("scale", c.truncation.eta_scale);
  doc.add_section("mc");
  doc.set_int("reps", c.reps);
  doc.set_int("seed", c.seed);
  doc.add_section("regime");
  doc.set("mode", std::string(to_string(c.regime)));
  doc.add_section("backend");
  doc.set("kind", std::string(c.backend == StieltjesBackend::kQuadrature ? "quadrature" : "montecarlo"));
  doc.set_int("dimension", c.backend_options.dimension);
  doc.set_int("replicates", c.backend_options.replicates);
  doc.set_int("seed", c.backend_options.seed);
  return doc;
}

std::string canonical_config(const ModelConfig& config) { return config_to_document(config).to_string(); }

std::uint64_t config_fingerprint(const ModelConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint_hex(std::uint64_t fingerprint) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint));
  return buf;
}

}  // namespace fisherspike
