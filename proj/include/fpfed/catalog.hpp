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
#ifndef FPFED_CATALOG_HPP_
#define FPFED_CATALOG_HPP_

// Feature catalog: the ordered API-call-count slots followed by the custom
// predicate slots, plus named masks (feature sets) over the slot range.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpfed/error.hpp"
#include "fpfed/random.hpp"
#include "fpfed/trace.hpp"

namespace fpfed {

// Sorted, duplicate-free slot indices.
class FeatureMask {
 public:
  FeatureMask() = default;
  explicit FeatureMask(std::vector<std::uint32_t> slots) : slots_(std::move(slots)) {
    std::sort(slots_.begin(), slots_.end());
    slots_.erase(std::unique(slots_.begin(), slots_.end()), slots_.end());
  }

  static FeatureMask range(std::uint32_t begin, std::uint32_t end) {
    std::vector<std::uint32_t> s;
    for (auto i = begin; i < end; ++i) s.push_back(i);
    return FeatureMask(std::move(s));
  }

  std::size_t size() const noexcept { return slots_.size(); }
  bool empty() const noexcept { return slots_.empty(); }
  const std::vector<std::uint32_t>& slots() const noexcept { return slots_; }
  std::uint32_t operator[](std::size_t i) const { return slots_[i]; }
  bool contains(std::uint32_t slot) const {
    return std::binary_search(slots_.begin(), slots_.end(), slot);
  }

  // Throws InvalidMask if empty or if any slot is >= slot_count.
  void validate(std::size_t slot_count) const {
    if (slots_.empty()) throw InvalidMask("feature mask is empty");
    if (slots_.back() >= slot_count) {
      throw InvalidMask("mask slot " + std::to_string(slots_.back()) + " out of range " +
                        std::to_string(slot_count));
    }
  }

  friend FeatureMask operator|(const FeatureMask& a, const FeatureMask& b) {
    std::vector<std::uint32_t> s;
    std::set_union(a.slots_.begin(), a.slots_.end(), b.slots_.begin(), b.slots_.end(),
                   std::back_inserter(s));
    return FeatureMask(std::move(s));
  }
  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;

 private:
  std::vector<std::uint32_t> slots_;
};

enum class CustomTarget : std::uint8_t { kArgument, kReturn };

// Binary predicate over one API's argument or return value.
struct CustomFeatureSpec {
  // Matches strings (inline or summarized) of exactly this length.
  struct StringLength {
    std::uint64_t length = 0;
    friend bool operator==(const StringLength&, const StringLength&) = default;
  };
  using Matcher = std::variant<ScalarSummary, StringLength>;

  std::string api_name;
  CustomTarget target = CustomTarget::kArgument;
  std::uint32_t arg_index = 0;
  Matcher matcher;

  bool matches(const ApiCallRecord& call) const {
    const ScalarSummary* v = nullptr;
    if (target == CustomTarget::kReturn) {
      v = &call.return_value();
    } else if (arg_index < call.args().size()) {
      v = &call.args()[arg_index];
    }
    if (v == nullptr) return false;
    if (auto* len = std::get_if<StringLength>(&matcher)) {
      return string_length(*v) == static_cast<std::int64_t>(len->length);
    }
    return scalar_equal(*v, std::get<ScalarSummary>(matcher));
  }

  // Canonical text used for duplicate detection and display.
  std::string key() const {
    std::string k = api_name;
    k += target == CustomTarget::kReturn ? "|ret|" : "|arg" + std::to_string(arg_index) + "|";
    if (auto* len = std::get_if<StringLength>(&matcher)) {
      k += "len=" + std::to_string(len->length);
    } else {
      k += "eq=" + trace_json::encode(std::get<ScalarSummary>(matcher)).dump();
    }
    return k;
  }
};

inline const std::vector<std::string>& builtin_feature_set_names() {
  static const std::vector<std::string> names = {"All", "FPInspector", "JShelter",
                                                 "HighEntropy", "ExtHighEntropy"};
  return names;
}

class FeatureCatalog {
 public:
  FeatureCatalog() = default;
  FeatureCatalog(std::vector<std::string> api_counts, std::vector<CustomFeatureSpec> custom,
                 std::map<std::string, FeatureMask> named_sets)
      : api_counts_(std::move(api_counts)),
        custom_(std::move(custom)),
        named_sets_(std::move(named_sets)) {
    std::set<std::string> seen;
    for (const auto& a : api_counts_) {
      ApiCallRecord::validate_api_name(a);
      if (!seen.insert(a).second) throw CardinalityError("duplicate api_name in catalog: " + a);
    }
    std::set<std::string> seen_custom;
    for (const auto& c : custom_) {
      ApiCallRecord::validate_api_name(c.api_name);
      if (c.target == CustomTarget::kArgument && c.arg_index >= kMaxArgs) {
        throw InvalidInput("custom feature argument index >= 8: " + c.api_name);
      }
      if (!seen_custom.insert(c.key()).second) {
        throw CardinalityError("duplicate custom feature: " + c.key());
      }
    }
    for (const auto& [name, mask] : named_sets_) {
      try {
        mask.validate(slot_count());
      } catch (const InvalidMask& e) {
        throw CardinalityError("feature set " + name + ": " + e.what());
      }
    }
  }

  std::size_t api_count_size() const noexcept { return api_counts_.size(); }
  std::size_t custom_size() const noexcept { return custom_.size(); }
  std::size_t slot_count() const noexcept { return api_counts_.size() + custom_.size(); }
  bool is_api_count_slot(std::size_t slot) const noexcept { return slot < api_counts_.size(); }

  const std::vector<std::string>& api_counts() const noexcept { return api_counts_; }
  const std::vector<CustomFeatureSpec>& custom() const noexcept { return custom_; }
  const std::map<std::string, FeatureMask>& named_sets() const noexcept { return named_sets_; }

  const FeatureMask& mask(const std::string& name) const {
    auto it = named_sets_.find(name);
    if (it == named_sets_.end()) throw InvalidMask("unknown feature set: " + name);
    return it->second;
  }
  bool has_set(const std::string& name) const { return named_sets_.count(name) != 0; }

  std::string slot_name(std::size_t slot) const {
    if (slot < api_counts_.size()) return api_counts_[slot];
    return custom_.at(slot - api_counts_.size()).key();
  }

  std::optional<std::uint32_t> api_slot(const std::string& api) const {
    for (std::size_t i = 0; i < api_counts_.size(); ++i) {
      if (api_counts_[i] == api) return static_cast<std::uint32_t>(i);
    }
    return std::nullopt;
  }

  // Stable 64-bit digest of the catalog contents; stored in checkpoints.
  std::uint64_t digest() const {
    std::uint64_t h = fnv1a64("fpfed-catalog");
    for (const auto& a : api_counts_) h = mix64(h ^ fnv1a64(a));
    for (const auto& c : custom_) h = mix64(h ^ fnv1a64(c.key()));
    return h;
  }

 private:
  std::vector<std::string> api_counts_;
  std::vector<CustomFeatureSpec> custom_;
  std::map<std::string, FeatureMask> named_sets_;
};

namespace catalog_json {

using Json = nlohmann::ordered_json;

inline Json encode(const FeatureCatalog& cat) {
  Json j;
  j["format"] = "fpfed-catalog/1";
  j["api_counts"] = cat.api_counts();
  Json custom = Json::array();
  for (const auto& c : cat.custom()) {
    Json jc;
    jc["api"] = c.api_name;
    if (c.target == CustomTarget::kReturn) {
      jc["ret"] = true;
    } else {
      jc["arg"] = c.arg_index;
    }
    if (auto* len = std::get_if<CustomFeatureSpec::StringLength>(&c.matcher)) {
      jc["str_len"] = len->length;
    } else {
      jc["equals"] = trace_json::encode(std::get<ScalarSummary>(c.matcher));
    }
    custom.push_back(std::move(jc));
  }
  j["custom"] = std::move(custom);
  Json sets = Json::object();
  for (const auto& [name, mask] : cat.named_sets()) {
    // Compress into half-open ranges.
    Json ranges = Json::array();
    const auto& s = mask.slots();
    for (std::size_t i = 0; i < s.size();) {
      std::size_t k = i;
      while (k + 1 < s.size() && s[k + 1] == s[k] + 1) ++k;
      ranges.push_back(Json::array({s[i], s[k] + 1}));
      i = k + 1;
    }
    sets[name] = Json{{"size", mask.size()}, {"ranges", std::move(ranges)}};
  }
  j["sets"] = std::move(sets);
  return j;
}

inline FeatureCatalog decode(const Json& j) {
  try {
    if (!j.is_object()) throw ParseError(0, "catalog must be a JSON object");
    std::vector<std::string> apis = j.at("api_counts").get<std::vector<std::string>>();
    std::vector<CustomFeatureSpec> custom;
    for (const auto& jc : j.at("custom")) {
      CustomFeatureSpec c;
      c.api_name = jc.at("api").get<std::string>();
      if (jc.contains("ret")) {
        c.target = CustomTarget::kReturn;
      } else {
        c.target = CustomTarget::kArgument;
        c.arg_index = jc.at("arg").get<std::uint32_t>();
      }
      if (jc.contains("str_len")) {
        c.matcher = CustomFeatureSpec::StringLength{jc.at("str_len").get<std::uint64_t>()};
      } else {
        c.matcher = trace_json::decode_scalar(jc.at("equals"), 0);
      }
      custom.push_back(std::move(c));
    }
    std::map<std::string, FeatureMask> sets;
    if (j.contains("sets")) {
      for (const auto& [name, js] : j.at("sets").items()) {
        std::vector<std::uint32_t> slots;
        if (js.contains("indices")) {
          for (const auto& x : js.at("indices")) slots.push_back(x.get<std::uint32_t>());
        }
        if (js.contains("ranges")) {
          for (const auto& r : js.at("ranges")) {
            auto b = r.at(0).get<std::uint32_t>(), e = r.at(1).get<std::uint32_t>();
            for (auto i = b; i < e; ++i) slots.push_back(i);
          }
        }
        FeatureMask mask(std::move(slots));
        if (js.contains("size") && js.at("size").get<std::size_t>() != mask.size()) {
          throw CardinalityError("feature set " + name + " declares " +
                                 std::to_string(js.at("size").get<std::size_t>()) +
                                 " slots but lists " + std::to_string(mask.size()));
        }
        sets.emplace(name, std::move(mask));
      }
    }
    return FeatureCatalog(std::move(apis), std::move(custom), std::move(sets));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("catalog schema: ") + e.what());
  }
}

}  // namespace catalog_json

inline FeatureCatalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open catalog: " + path);
  catalog_json::Json j;
  try {
    j = catalog_json::Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, std::string("catalog is not valid JSON: ") + e.what());
  }
  return catalog_json::decode(j);
}

inline void save_catalog(const FeatureCatalog& cat, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write catalog: " + path);
  out << catalog_json::encode(cat).dump(1) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Synthetic catalog with the reference cardinalities:
//   684 API-count slots (first 500 form the FP-Inspector surface) and 830
//   custom slots; All=1514, FPInspector=1330, JShelter=96+492,
//   HighEntropy=109 API counts, ExtHighEntropy=HighEntropy+17 API+23 custom.
// Names of real, well-known APIs are used where the labelers or generator
// depend on them; the remainder are deterministic placeholders.

namespace synthetic {

inline constexpr std::size_t kApiCounts = 684;
inline constexpr std::size_t kFpInspectorApis = 500;
inline constexpr std::size_t kCustom = 830;
inline constexpr std::size_t kJShelterApis = 96;
inline constexpr std::size_t kJShelterCustom = 492;
inline constexpr std::size_t kHighEntropy = 109;
inline constexpr std::size_t kExtApis = 17;
inline constexpr std::size_t kExtCustom = 23;

// APIs the ground-truth labelers look at.
inline const std::vector<std::string>& heuristic_apis() {
  static const std::vector<std::string> v = {
      "CanvasRenderingContext2D.fillText", "CanvasRenderingContext2D.strokeText",
      "CanvasRenderingContext2D.fillStyle", "CanvasRenderingContext2D.strokeStyle",
      "CanvasRenderingContext2D.save", "CanvasRenderingContext2D.restore",
      "CanvasRenderingContext2D.measureText", "CanvasRenderingContext2D.font",
      "HTMLCanvasElement.toDataURL", "HTMLCanvasElement.addEventListener",
      "RTCPeerConnection.createDataChannel", "RTCPeerConnection.createOffer",
      "RTCPeerConnection.onicecandidate", "RTCPeerConnection.localDescription",
      "AudioContext.createOscillator", "AudioContext.createDynamicsCompressor",
      "AudioContext.destination", "OfflineAudioContext.createOscillator",
      "OfflineAudioContext.createDynamicsCompressor", "OfflineAudioContext.destination",
      "OfflineAudioContext.startRendering", "OfflineAudioContext.oncomplete"};
  return v;
}

// Other real APIs in the FP-Inspector surface.
inline const std::vector<std::string>& fp_inspector_named_apis() {
  static const std::vector<std::string> v = {
      "CanvasRenderingContext2D.textBaseline", "CanvasRenderingContext2D.textAlign",
      "CanvasRenderingContext2D.fillRect", "CanvasRenderingContext2D.arc",
      "CanvasRenderingContext2D.getImageData", "CanvasRenderingContext2D.isPointInPath",
      "CanvasRenderingContext2D.lineJoin", "CanvasRenderingContext2D.rect",
      "CanvasRenderingContext2D.beginPath", "CanvasRenderingContext2D.closePath",
      "CanvasRenderingContext2D.globalCompositeOperation", "CanvasRenderingContext2D.shadowBlur",
      "HTMLCanvasElement.getContext", "HTMLCanvasElement.width", "HTMLCanvasElement.height",
      "HTMLCanvasElement.toBlob", "HTMLCanvasElement.nodeName",
      "HTMLCanvasElement.getElementsByTagName", "WebGLRenderingContext.getExtension",
      "WebGLRenderingContext.getParameter", "WebGLRenderingContext.pixelStorei",
      "WebGLRenderingContext.getAttribLocation", "WebGLRenderingContext.depthMask",
      "WebGLRenderingContext.getSupportedExtensions",
      "WebGLRenderingContext.getShaderPrecisionFormat", "WebGLRenderingContext.readPixels",
      "RTCPeerConnection.setLocalDescription", "RTCPeerConnection.iceGatheringState",
      "RTCPeerConnection.signalingState", "RTCPeerConnection.close", "AudioContext.sampleRate",
      "AudioContext.state", "AudioContext.createAnalyser", "AnalyserNode.channelInterpretation",
      "AnalyserNode.channelCountMode", "AnalyserNode.getFloatFrequencyData", "OscillatorNode.type",
      "OscillatorNode.frequency", "OscillatorNode.start", "OscillatorNode.connect",
      "DynamicsCompressorNode.threshold", "DynamicsCompressorNode.knee",
      "DynamicsCompressorNode.ratio", "DynamicsCompressorNode.reduction",
      "Navigator.userAgent", "Navigator.platform", "Navigator.language", "Navigator.languages",
      "Navigator.plugins", "Navigator.mimeTypes", "Navigator.hardwareConcurrency",
      "Navigator.cookieEnabled", "Navigator.doNotTrack", "Navigator.maxTouchPoints",
      "Navigator.vendor", "Navigator.appVersion", "Screen.width", "Screen.height",
      "Screen.colorDepth", "Screen.pixelDepth", "Screen.availWidth", "Screen.availHeight",
      "Document.cookie", "Document.referrer", "Document.getElementsByTagName",
      "Document.createElement", "Node.isConnected", "Window.devicePixelRatio",
      "Window.innerWidth", "Window.innerHeight", "Window.localStorage", "Window.sessionStorage",
      "Window.indexedDB", "Date.getTimezoneOffset", "Storage.getItem", "Storage.setItem",
      "Performance.now", "Element.getBoundingClientRect", "HTMLElement.offsetWidth",
      "HTMLElement.offsetHeight"};
  return v;
}

// Real APIs present only in the Chrome surface.
inline const std::vector<std::string>& chrome_only_named_apis() {
  static const std::vector<std::string> v = {
      "BatteryManager.level", "BatteryManager.charging", "BatteryManager.chargingTime",
      "BatteryManager.dischargingTime", "Navigator.getBattery", "Navigator.deviceMemory",
      "Navigator.webdriver", "Navigator.connection", "NetworkInformation.effectiveType",
      "NetworkInformation.rtt", "NetworkInformation.downlink", "MediaDevices.enumerateDevices",
      "Permissions.query", "NavigatorUAData.getHighEntropyValues", "NavigatorUAData.brands",
      "NavigatorUAData.mobile", "NavigatorUAData.platform", "Keyboard.getLayoutMap",
      "Gamepad.id", "ScreenOrientation.type"};
  return v;
}

// Real APIs in the High Entropy set (natively traced); the rest is filled.
inline const std::vector<std::string>& high_entropy_named_apis() {
  static const std::vector<std::string> v = {
      "HTMLCanvasElement.toDataURL", "CanvasRenderingContext2D.getImageData",
      "CanvasRenderingContext2D.isPointInPath", "WebGLRenderingContext.getParameter",
      "WebGLRenderingContext.getSupportedExtensions", "WebGLRenderingContext.readPixels",
      "WebGLRenderingContext.getShaderPrecisionFormat", "AudioContext.sampleRate",
      "Navigator.userAgent", "Navigator.platform", "Navigator.language", "Navigator.languages",
      "Navigator.plugins", "Navigator.mimeTypes", "Navigator.hardwareConcurrency",
      "Navigator.maxTouchPoints", "Navigator.vendor", "Navigator.appVersion",
      "Navigator.deviceMemory", "Navigator.webdriver", "Navigator.connection",
      "Screen.width", "Screen.height", "Screen.colorDepth", "Screen.pixelDepth",
      "Screen.availWidth", "Screen.availHeight", "Window.devicePixelRatio",
      "Date.getTimezoneOffset", "MediaDevices.enumerateDevices",
      "NavigatorUAData.getHighEntropyValues", "NavigatorUAData.brands",
      "NavigatorUAData.mobile", "NavigatorUAData.platform", "Keyboard.getLayoutMap",
      "Gamepad.id", "ScreenOrientation.type", "NetworkInformation.effectiveType",
      "NetworkInformation.rtt", "NetworkInformation.downlink"};
  return v;
}

// Table-of-samples style custom features over real APIs.
inline std::vector<CustomFeatureSpec> named_custom() {
  auto arg = [](std::string api, std::uint32_t i, ScalarSummary v) {
    return CustomFeatureSpec{std::move(api), CustomTarget::kArgument, i, std::move(v)};
  };
  auto ret = [](std::string api, ScalarSummary v) {
    return CustomFeatureSpec{std::move(api), CustomTarget::kReturn, 0, std::move(v)};
  };
  return {
      arg("CanvasRenderingContext2D.fillStyle", 0, std::string("gradient")),
      ret("CanvasRenderingContext2D.textAlign", std::string("start")),
      ret("CanvasRenderingContext2D.textBaseline", std::string("top")),
      ret("CanvasRenderingContext2D.lineJoin", std::string("round")),
      arg("WebGLRenderingContext.getExtension", 0, std::string("EXT_blend_minmax")),
      arg("WebGLRenderingContext.getExtension", 0, std::string("WEBGL_draw_buffers")),
      arg("WebGLRenderingContext.getExtension", 0, std::string("WEBGL_lose_context")),
      arg("WebGLRenderingContext.pixelStorei", 1, 4.0),
      arg("WebGLRenderingContext.getAttribLocation", 1, std::string("r5")),
      arg("WebGLRenderingContext.depthMask", 0, false),
      arg("HTMLCanvasElement.getElementsByTagName", 0, std::string("script")),
      ret("Node.isConnected", false),
      arg("Document.getElementsByTagName", 0, std::string("head")),
      ret("HTMLCanvasElement.nodeName", std::string("canvas")),
      ret("AnalyserNode.channelInterpretation", std::string("suspended")),
      ret("AnalyserNode.channelCountMode", std::string("max")),
      ret("OscillatorNode.type", std::string("triangle")),
      ret("AudioContext.state", std::string("suspended")),
      ret("RTCPeerConnection.iceGatheringState", std::string("complete")),
      ret("RTCPeerConnection.signalingState", std::string("stable")),
      arg("CanvasRenderingContext2D.fillText", 0, std::string("Cwm fjordbank glyphs vext quiz")),
      ret("HTMLCanvasElement.toDataURL", std::string("data:image/png")),
      arg("CanvasRenderingContext2D.font", 0, std::string("18pt Arial")),
      arg("OfflineAudioContext.createDynamicsCompressor", 0, Null{}),
      ret("AudioContext.sampleRate", 44100.0),
      arg("RTCPeerConnection.createDataChannel", 0, std::string("")),
      arg("Storage.setItem", 0, std::string("_fp")),
      ret("Navigator.webdriver", false),
      arg("Document.createElement", 0, std::string("canvas")),
      arg("HTMLCanvasElement.getContext", 0, std::string("webgl")),
  };
}

inline std::string placeholder_api(std::string_view prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*s%03zu.member%zu", static_cast<int>(prefix.size()),
                prefix.data(), i / 4, i % 4);
  return buf;
}

// Deterministically selects `k` elements of `pool` not in `exclude`.
inline std::vector<std::uint32_t> pick(std::vector<std::uint32_t> pool, std::size_t k,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(std::min(k, pool.size()));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace synthetic

inline FeatureCatalog synthetic_catalog() {
  using namespace synthetic;
  std::vector<std::string> apis;
  std::set<std::string> taken;
  auto add = [&](const std::string& a) {
    if (taken.insert(a).second) apis.push_back(a);
  };
  for (const auto& a : heuristic_apis()) add(a);
  for (const auto& a : fp_inspector_named_apis()) add(a);
  for (std::size_t i = 0; apis.size() < kFpInspectorApis; ++i) add(placeholder_api("FpiApi", i));
  for (const auto& a : chrome_only_named_apis()) add(a);
  for (std::size_t i = 0; apis.size() < kApiCounts; ++i) add(placeholder_api("ChromeApi", i));

  std::vector<CustomFeatureSpec> custom = named_custom();
  // Placeholder predicates: argument equality on a small token alphabet, a
  // few return-value checks and string-length checks.
  for (std::size_t i = 0; custom.size() < kCustom; ++i) {
    std::string api = placeholder_api("CustomApi", i / 3);
    switch (i % 3) {
      case 0:
        custom.push_back({api, CustomTarget::kArgument, 0, std::string("tok") + std::to_string(i)});
        break;
      case 1:
        custom.push_back({api, CustomTarget::kReturn, 0, static_cast<double>(i)});
        break;
      default:
        custom.push_back({api, CustomTarget::kArgument, 1,
                          CustomFeatureSpec::StringLength{16 + i % 48}});
        break;
    }
  }

  const auto n_api = static_cast<std::uint32_t>(kApiCounts);
  const auto n_all = static_cast<std::uint32_t>(kApiCounts + kCustom);
  auto index_of = [&](const std::string& a) {
    return static_cast<std::uint32_t>(std::find(apis.begin(), apis.end(), a) - apis.begin());
  };

  std::map<std::string, FeatureMask> sets;
  sets["All"] = FeatureMask::range(0, n_all);
  sets["FPInspector"] = FeatureMask::range(0, static_cast<std::uint32_t>(kFpInspectorApis)) |
                        FeatureMask::range(n_api, n_all);

  // High Entropy: the named natively-traced APIs plus placeholders.
  std::vector<std::uint32_t> he;
  for (const auto& a : high_entropy_named_apis()) he.push_back(index_of(a));
  {
    std::vector<std::uint32_t> pool;
    for (std::uint32_t i = 0; i < n_api; ++i) {
      if (apis[i].rfind("FpiApi", 0) == 0 || apis[i].rfind("ChromeApi", 0) == 0) pool.push_back(i);
    }
    auto fill = pick(pool, kHighEntropy - he.size(), 0x4845);
    he.insert(he.end(), fill.begin(), fill.end());
  }
  sets["HighEntropy"] = FeatureMask(he);

  // JShelter: canvas/webgl/audio/webrtc/navigator-ish APIs first.
  std::vector<std::uint32_t> js;
  for (std::uint32_t i = 0; i < n_api && js.size() < kJShelterApis; ++i) {
    const auto& a = apis[i];
    if (a.rfind("Canvas", 0) == 0 || a.rfind("HTMLCanvas", 0) == 0 || a.rfind("WebGL", 0) == 0 ||
        a.rfind("RTC", 0) == 0 || a.rfind("Audio", 0) == 0 || a.rfind("OfflineAudio", 0) == 0 ||
        a.rfind("Oscillator", 0) == 0 || a.rfind("Analyser", 0) == 0 ||
        a.rfind("DynamicsCompressor", 0) == 0 || a.rfind("Navigator", 0) == 0 ||
        a.rfind("Screen", 0) == 0 || a.rfind("Battery", 0) == 0) {
      js.push_back(i);
    }
  }
  for (std::uint32_t i = 0; i < n_api && js.size() < kJShelterApis; ++i) {
    if (std::find(js.begin(), js.end(), i) == js.end()) js.push_back(i);
  }
  for (std::uint32_t j = 0; j < kJShelterCustom; ++j) js.push_back(n_api + j);
  sets["JShelter"] = FeatureMask(js);

  // Ext High Entropy reference instance: 17 API counts and 23 custom slots
  // outside High Entropy, taken from the informative named region.
  std::vector<std::uint32_t> ext;
  for (std::uint32_t i = 0; i < n_api && ext.size() < kExtApis; ++i) {
    if (!sets["HighEntropy"].contains(i) && apis[i].rfind("FpiApi", 0) != 0 &&
        apis[i].rfind("ChromeApi", 0) != 0) {
      ext.push_back(i);
    }
  }
  for (std::uint32_t j = 0; j < kExtCustom; ++j) ext.push_back(n_api + j);
  sets["ExtHighEntropy"] = sets["HighEntropy"] | FeatureMask(ext);

  return FeatureCatalog(std::move(apis), std::move(custom), std::move(sets));
}

}  // namespace fpfed

#endif  // FPFED_CATALOG_HPP_
