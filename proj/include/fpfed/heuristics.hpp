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
#ifndef FPFED_HEURISTICS_HPP_
#define FPFED_HEURISTICS_HPP_

// High-precision ground-truth labelers for the four fingerprinting types.
// All labelers are pure and order-insensitive over the trace.

#include <set>
#include <string_view>

#include "fpfed/trace.hpp"

namespace fpfed::heuristics {

inline constexpr std::size_t kFontThreshold = 20;
inline constexpr std::size_t kMeasureTextThreshold = 20;

inline constexpr std::string_view kContext2d = "CanvasRenderingContext2D";
inline constexpr std::string_view kCanvasElement = "HTMLCanvasElement";
inline constexpr std::string_view kPeerConnection = "RTCPeerConnection";

inline bool is_canvas_interface(std::string_view iface) {
  return iface == kCanvasElement || iface == kContext2d || iface == "OffscreenCanvas" ||
         iface == "OffscreenCanvasRenderingContext2D";
}

inline bool is_audio_context_interface(std::string_view iface) {
  return iface == "AudioContext" || iface == "OfflineAudioContext" ||
         iface == "BaseAudioContext";
}

inline bool label_canvas(const ScriptTrace& trace) {
  bool text = false, style = false, extract = false;
  for (const auto& c : trace.calls) {
    auto iface = c.interface_name();
    auto member = c.member_name();
    if (is_canvas_interface(iface) &&
        (member == "save" || member == "restore" || member == "addEventListener")) {
      return false;
    }
    if (iface == kContext2d) {
      if (member == "fillText" || member == "strokeText") text = true;
      if ((member == "fillStyle" || member == "strokeStyle") && c.is_property_write()) {
        style = true;
      }
    } else if (iface == kCanvasElement && member == "toDataURL") {
      extract = true;
    }
  }
  return text && style && extract;
}

inline bool label_canvas_font(const ScriptTrace& trace) {
  std::set<std::string> fonts;
  std::size_t measure = 0;
  for (const auto& c : trace.calls) {
    if (c.interface_name() != kContext2d) continue;
    auto member = c.member_name();
    if (member == "measureText") {
      ++measure;
    } else if (member == "font" && c.is_property_write()) {
      // Distinct values are compared on their serialized summary.
      fonts.insert(trace_json::encode(c.args().front()).dump());
    }
  }
  return fonts.size() > kFontThreshold && measure > kMeasureTextThreshold;
}

inline bool label_webrtc(const ScriptTrace& trace) {
  bool create = false, ice = false;
  for (const auto& c : trace.calls) {
    if (c.interface_name() != kPeerConnection) continue;
    auto member = c.member_name();
    if (member == "createDataChannel" || member == "createOffer") create = true;
    if (member == "onicecandidate" || member == "localDescription") ice = true;
  }
  return create && ice;
}

inline bool label_audio(const ScriptTrace& trace) {
  for (const auto& c : trace.calls) {
    auto member = c.member_name();
    if (!is_audio_context_interface(c.interface_name())) continue;
    if (member == "createOscillator" || member == "createDynamicsCompressor" ||
        member == "destination" || member == "startRendering" || member == "oncomplete") {
      return true;
    }
  }
  return false;
}

// True when a call to `api_name` can influence any of the labelers above.
inline bool is_trigger_api(std::string_view api_name) {
  const auto dot = api_name.find('.');
  if (dot == std::string_view::npos) return false;
  const auto iface = api_name.substr(0, dot);
  const auto member = api_name.substr(dot + 1);
  if (is_canvas_interface(iface)) {
    return member == "save" || member == "restore" || member == "addEventListener" ||
           member == "fillText" || member == "strokeText" || member == "fillStyle" ||
           member == "strokeStyle" || member == "toDataURL" || member == "measureText" ||
           member == "font";
  }
  if (iface == kPeerConnection) {
    return member == "createDataChannel" || member == "createOffer" ||
           member == "onicecandidate" || member == "localDescription";
  }
  if (is_audio_context_interface(iface)) {
    return member == "createOscillator" || member == "createDynamicsCompressor" ||
           member == "destination" || member == "startRendering" || member == "oncomplete";
  }
  return false;
}

inline LabelSet label(const ScriptTrace& trace) {
  return LabelSet{label_canvas(trace), label_canvas_font(trace), label_webrtc(trace),
                  label_audio(trace)};
}

inline LabeledScript label_script(ScriptTrace trace) {
  LabelSet l = label(trace);
  return LabeledScript{std::move(trace), l};
}

}  // namespace fpfed::heuristics

#endif  // FPFED_HEURISTICS_HPP_
