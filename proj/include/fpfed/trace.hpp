// Copyright 2026 The fpfed Authors
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
#ifndef FPFED_TRACE_HPP_
#define FPFED_TRACE_HPP_

// Execution-trace data model and the JSON-lines trace file format.
//
// One line per script record:
//   {"id":"<url>#<hash>","domain":"a.com","calls":[{"api":"I.m","args":[..],
//    "ret":..,"more":k}, ...]}
// Scalar summaries are JSON null/bool/number/string, {"f":"NaN"|"Infinity"|
// "-Infinity"} for non-finite numbers, and {"len":n,"h":"<16 hex>"} for
// strings longer than kMaxInlineString. "ret" is omitted when null and
// "more" (arguments dropped by truncation) when zero. See docs/formats.md.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpfed/error.hpp"
#include "fpfed/random.hpp"

namespace fpfed {

inline constexpr std::size_t kMaxArgs = 8;
inline constexpr std::size_t kMaxInlineString = 256;

// A string too long to keep verbatim: its length and 64-bit FNV-1a hash.
struct LongString {
  std::uint64_t length = 0;
  std::uint64_t hash = 0;
  friend bool operator==(const LongString&, const LongString&) = default;
};

using Null = std::monostate;
using ScalarSummary = std::variant<Null, bool, double, std::string, LongString>;

inline ScalarSummary summarize_string(std::string_view s) {
  if (s.size() > kMaxInlineString) return LongString{s.size(), fnv1a64(s)};
  return std::string(s);
}

// Length of a string-valued summary; nullopt-like -1 for non-strings.
inline std::int64_t string_length(const ScalarSummary& v) {
  if (auto* s = std::get_if<std::string>(&v)) return static_cast<std::int64_t>(s->size());
  if (auto* l = std::get_if<LongString>(&v)) return static_cast<std::int64_t>(l->length);
  return -1;
}

inline bool scalar_equal(const ScalarSummary& a, const ScalarSummary& b) {
  // Bitwise-style equality for doubles so NaN summaries compare equal to
  // themselves and round-trip checks stay reflexive.
  if (auto* x = std::get_if<double>(&a)) {
    auto* y = std::get_if<double>(&b);
    if (!y) return false;
    if (std::isnan(*x) && std::isnan(*y)) return true;
    return *x == *y;
  }
  return a == b;
}

class ApiCallRecord {
 public:
  ApiCallRecord() = default;

  // Validates the name and truncates `args` to kMaxArgs, remembering how
  // many were dropped.
  ApiCallRecord(std::string api_name, std::vector<ScalarSummary> args = {},
                ScalarSummary return_value = Null{}, std::uint32_t dropped_args = 0)
      : api_name_(std::move(api_name)),
        args_(std::move(args)),
        return_value_(std::move(return_value)),
        dropped_args_(dropped_args) {
    validate_api_name(api_name_);
    if (args_.size() > kMaxArgs) {
      dropped_args_ += static_cast<std::uint32_t>(args_.size() - kMaxArgs);
      args_.resize(kMaxArgs);
    }
  }

  static void validate_api_name(std::string_view name) {
    if (name.empty()) throw InvalidInput("api_name must be non-empty");
    auto dot = name.find('.');
    if (dot != std::string_view::npos &&
        (name.find('.', dot + 1) != std::string_view::npos || dot == 0 ||
         dot + 1 == name.size())) {
      throw InvalidInput("api_name must have the form Interface.member: " +
                         std::string(name));
    }
  }

  const std::string& api_name() const noexcept { return api_name_; }
  std::string_view interface_name() const noexcept {
    auto dot = api_name_.find('.');
    return dot == std::string::npos ? std::string_view{} : std::string_view(api_name_).substr(0, dot);
  }
  std::string_view member_name() const noexcept {
    auto dot = api_name_.find('.');
    return dot == std::string::npos ? std::string_view(api_name_)
                                    : std::string_view(api_name_).substr(dot + 1);
  }
  const std::vector<ScalarSummary>& args() const noexcept { return args_; }
  const ScalarSummary& return_value() const noexcept { return return_value_; }
  std::uint32_t dropped_args() const noexcept { return dropped_args_; }

  // Property writes are recorded as one-argument records on the property.
  bool is_property_write() const noexcept { return !args_.empty(); }

  friend bool operator==(const ApiCallRecord& a, const ApiCallRecord& b) {
    if (a.api_name_ != b.api_name_ || a.dropped_args_ != b.dropped_args_ ||
        a.args_.size() != b.args_.size() || !scalar_equal(a.return_value_, b.return_value_)) {
      return false;
    }
    for (std::size_t i = 0; i < a.args_.size(); ++i) {
      if (!scalar_equal(a.args_[i], b.args_[i])) return false;
    }
    return true;
  }

 private:
  std::string api_name_;
  std::vector<ScalarSummary> args_;
  ScalarSummary return_value_;
  std::uint32_t dropped_args_ = 0;
};

struct ScriptTrace {
  std::string script_id;
  std::string source_domain;
  std::vector<ApiCallRecord> calls;

  friend bool operator==(const ScriptTrace&, const ScriptTrace&) = default;
};

// "<url>#<content_hash>". The hash must be a non-empty hex digest; since '#'
// never occurs in a hex digest the mapping is injective.
inline std::string canonical_script_id(std::string_view url, std::string_view content_hash) {
  if (url.empty()) throw InvalidInput("canonical_script_id: empty url");
  if (content_hash.empty()) throw InvalidInput("canonical_script_id: empty content hash");
  for (char c : content_hash) {
    bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
    if (!hex) throw InvalidInput("canonical_script_id: content hash is not hex");
  }
  std::string id;
  id.reserve(url.size() + 1 + content_hash.size());
  id.append(url).push_back('#');
  id.append(content_hash);
  return id;
}

enum class FpType : std::uint8_t { kCanvas = 0, kCanvasFont = 1, kWebRtc = 2, kAudio = 3 };

inline constexpr std::array<FpType, 4> kAllFpTypes = {FpType::kCanvas, FpType::kCanvasFont,
                                                      FpType::kWebRtc, FpType::kAudio};

inline std::string_view to_string(FpType t) {
  switch (t) {
    case FpType::kCanvas: return "Canvas";
    case FpType::kCanvasFont: return "CanvasFont";
    case FpType::kWebRtc: return "WebRTC";
    case FpType::kAudio: return "Audio";
  }
  return "?";
}

inline FpType fp_type_from_string(std::string_view s) {
  for (FpType t : kAllFpTypes) {
    if (to_string(t) == s) return t;
  }
  throw InvalidInput("unknown fingerprinting type: " + std::string(s));
}

// Which fingerprinting behaviours a script exhibits.
struct LabelSet {
  bool canvas = false;
  bool canvas_font = false;
  bool webrtc = false;
  bool audio = false;

  bool is_fingerprinting() const noexcept { return canvas || canvas_font || webrtc || audio; }

  bool has(FpType t) const noexcept {
    switch (t) {
      case FpType::kCanvas: return canvas;
      case FpType::kCanvasFont: return canvas_font;
      case FpType::kWebRtc: return webrtc;
      case FpType::kAudio: return audio;
    }
    return false;
  }

  void set(FpType t, bool v = true) noexcept {
    switch (t) {
      case FpType::kCanvas: canvas = v; break;
      case FpType::kCanvasFont: canvas_font = v; break;
      case FpType::kWebRtc: webrtc = v; break;
      case FpType::kAudio: audio = v; break;
    }
  }

  // Bit i set iff type i present; 0 for non-fingerprinting, 1..15 otherwise.
  unsigned mask() const noexcept {
    return (canvas ? 1u : 0u) | (canvas_font ? 2u : 0u) | (webrtc ? 4u : 0u) | (audio ? 8u : 0u);
  }

  static LabelSet from_mask(unsigned m) noexcept {
    return LabelSet{(m & 1u) != 0, (m & 2u) != 0, (m & 4u) != 0, (m & 8u) != 0};
  }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;
};

struct LabeledScript {
  ScriptTrace trace;
  LabelSet fp_types;
  bool label() const noexcept { return fp_types.is_fingerprinting(); }
};

namespace trace_json {

using Json = nlohmann::ordered_json;

inline std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline Json encode(const ScalarSummary& v) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Null>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (std::isnan(x)) return Json{{"f", "NaN"}};
          if (std::isinf(x)) return Json{{"f", x > 0 ? "Infinity" : "-Infinity"}};
          return x;
        } else if constexpr (std::is_same_v<T, LongString>) {
          return Json{{"len", x.length}, {"h", hex16(x.hash)}};
        } else {
          return x;
        }
      },
      v);
}

inline ScalarSummary decode_scalar(const Json& j, std::size_t line) {
  switch (j.type()) {
    case Json::value_t::null: return Null{};
    case Json::value_t::boolean: return j.get<bool>();
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
    case Json::value_t::number_float: return j.get<double>();
    case Json::value_t::string: return j.get<std::string>();
    case Json::value_t::object: {
      if (j.contains("f") && j.size() == 1 && j["f"].is_string()) {
        auto s = j["f"].get<std::string>();
        if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
        if (s == "Infinity") return std::numeric_limits<double>::infinity();
        if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
      }
      if (j.contains("len") && j.contains("h") && j.size() == 2 &&
          j["len"].is_number_unsigned() && j["h"].is_string()) {
        auto h = j["h"].get<std::string>();
        if (h.size() == 16) {
          try {
            std::size_t used = 0;
            std::uint64_t hv = std::stoull(h, &used, 16);
            if (used == 16) return LongString{j["len"].get<std::uint64_t>(), hv};
          } catch (const std::exception&) {
          }
        }
      }
      break;
    }
    default: break;
  }
  throw ParseError(line, "invalid scalar summary: " + j.dump());
}

inline Json encode(const ScriptTrace& t) {
  Json calls = Json::array();
  for (const auto& c : t.calls) {
    Json jc;
    jc["api"] = c.api_name();
    Json args = Json::array();
    for (const auto& a : c.args()) args.push_back(encode(a));
    jc["args"] = std::move(args);
    if (!std::holds_alternative<Null>(c.return_value())) jc["ret"] = encode(c.return_value());
    if (c.dropped_args() != 0) jc["more"] = c.dropped_args();
    calls.push_back(std::move(jc));
  }
  Json j;
  j["id"] = t.script_id;
  j["domain"] = t.source_domain;
  j["calls"] = std::move(calls);
  return j;
}

inline ScriptTrace decode_trace(const Json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError(line, "record is not an object");
  auto need_string = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw ParseError(line, std::string("missing or non-string field '") + key + "'");
    }
    return it->get<std::string>();
  };
  ScriptTrace t;
  t.script_id = need_string("id");
  t.source_domain = need_string("domain");
  auto calls = j.find("calls");
  if (calls == j.end() || !calls->is_array()) throw ParseError(line, "missing 'calls' array");
  t.calls.reserve(calls->size());
  for (const auto& jc : *calls) {
    if (!jc.is_object()) throw ParseError(line, "call is not an object");
    auto api = jc.find("api");
    if (api == jc.end() || !api->is_string() || api->get_ref<const std::string&>().empty()) {
      throw ParseError(line, "call with missing api_name");
    }
    std::vector<ScalarSummary> args;
    if (auto a = jc.find("args"); a != jc.end()) {
      if (!a->is_array()) throw ParseError(line, "'args' is not an array");
      if (a->size() > kMaxArgs) throw ParseError(line, "more than 8 argument summaries");
      for (const auto& x : *a) args.push_back(decode_scalar(x, line));
    }
    ScalarSummary ret = Null{};
    if (auto r = jc.find("ret"); r != jc.end()) ret = decode_scalar(*r, line);
    std::uint32_t more = 0;
    if (auto m = jc.find("more"); m != jc.end()) {
      if (!m->is_number_unsigned()) throw ParseError(line, "'more' must be a count");
      more = m->get<std::uint32_t>();
    }
    try {
      t.calls.emplace_back(api->get<std::string>(), std::move(args), std::move(ret), more);
    } catch (const InvalidInput& e) {
      throw ParseError(line, e.what());
    }
  }
  return t;
}

}  // namespace trace_json

inline std::string format_trace_line(const ScriptTrace& t) { return trace_json::encode(t).dump(); }

inline ScriptTrace parse_trace_line(std::string_view line, std::size_t line_no = 0) {
  trace_json::Json j;
  try {
    j = trace_json::Json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
  }
  return trace_json::decode_trace(j, line_no);
}

inline std::vector<ScriptTrace> read_traces(std::istream& in) {
  std::vector<ScriptTrace> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_trace_line(line, line_no));
  }
  return out;
}

inline void write_traces(std::ostream& out, const std::vector<ScriptTrace>& traces) {
  for (const auto& t : traces) out << format_trace_line(t) << '\n';
}

inline std::vector<ScriptTrace> parse_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path);
  return read_traces(in);
}

inline void write_trace_file(const std::vector<ScriptTrace>& traces, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write trace file: " + path);
  write_traces(out, traces);
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace fpfed

#endif  // FPFED_TRACE_HPP_
