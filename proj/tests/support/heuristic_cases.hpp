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

#ifndef FPFED_TESTS_SUPPORT_HEURISTIC_CASES_HPP_
#define FPFED_TESTS_SUPPORT_HEURISTIC_CASES_HPP_

// Hand-built traces at the decision boundary of each labeler: a full match,
// every conjunct removed in turn, and the 20-versus-21 thresholds.

#include <string>
#include <vector>

#include "fpfed/trace.hpp"

namespace fpfed::testing {

struct HeuristicCase {
  std::string name;
  ScriptTrace trace;
  LabelSet expected;
};

inline ApiCallRecord call(std::string api, std::vector<ScalarSummary> args = {},
                          ScalarSummary ret = Null{}) {
  return ApiCallRecord(std::move(api), std::move(args), std::move(ret));
}

inline ApiCallRecord write(std::string api, ScalarSummary value) {
  return ApiCallRecord(std::move(api), {std::move(value)});
}

class TraceBuilder {
 public:
  TraceBuilder& add(ApiCallRecord c) {
    t_.calls.push_back(std::move(c));
    return *this;
  }
  TraceBuilder& canvas_text() {
    return add(call("CanvasRenderingContext2D.fillText", {std::string("Cwm fjordbank"), 2.0, 15.0}));
  }
  TraceBuilder& canvas_style() {
    return add(write("CanvasRenderingContext2D.fillStyle", std::string("#f60")));
  }
  TraceBuilder& canvas_extract() {
    return add(call("HTMLCanvasElement.toDataURL", {}, std::string("data:image/png;base64,AA")));
  }
  TraceBuilder& fonts(int distinct, int total) {
    for (int i = 0; i < total; ++i) {
      add(write("CanvasRenderingContext2D.font",
                std::string("12px font") + std::to_string(i % distinct)));
    }
    return *this;
  }
  TraceBuilder& measures(int n) {
    for (int i = 0; i < n; ++i) {
      add(call("CanvasRenderingContext2D.measureText", {std::string("mmmmmmmmmmlli")}));
    }
    return *this;
  }
  ScriptTrace build(std::string id) {
    t_.script_id = std::move(id);
    t_.source_domain = "crafted.example";
    return std::move(t_);
  }

 private:
  ScriptTrace t_;
};

inline LabelSet only(FpType t) {
  LabelSet l;
  l.set(t);
  return l;
}

inline std::vector<HeuristicCase> heuristic_cases() {
  std::vector<HeuristicCase> v;
  auto add = [&](std::string name, TraceBuilder b, LabelSet expected) {
    auto id = "crafted/" + name + "#00";
    v.push_back({std::move(name), b.build(std::move(id)), expected});
  };
  const LabelSet none;
  const auto canvas = only(FpType::kCanvas);
  const auto font = only(FpType::kCanvasFont);
  const auto rtc = only(FpType::kWebRtc);
  const auto audio = only(FpType::kAudio);

  // Canvas.
  add("canvas_full", TraceBuilder().canvas_text().canvas_style().canvas_extract(), canvas);
  add("canvas_stroke_variants",
      TraceBuilder()
          .add(call("CanvasRenderingContext2D.strokeText", {std::string("x"), 1.0, 1.0}))
          .add(write("CanvasRenderingContext2D.strokeStyle", std::string("red")))
          .canvas_extract(),
      canvas);
  add("canvas_no_text", TraceBuilder().canvas_style().canvas_extract(), none);
  add("canvas_no_style", TraceBuilder().canvas_text().canvas_extract(), none);
  add("canvas_style_read_only",
      TraceBuilder()
          .canvas_text()
          .add(call("CanvasRenderingContext2D.fillStyle", {}, std::string("#000000")))
          .canvas_extract(),
      none);
  add("canvas_no_extract", TraceBuilder().canvas_text().canvas_style(), none);
  add("canvas_with_save",
      TraceBuilder().canvas_text().canvas_style().canvas_extract().add(
          call("CanvasRenderingContext2D.save")),
      none);
  add("canvas_with_restore",
      TraceBuilder().add(call("CanvasRenderingContext2D.restore")).canvas_text().canvas_style()
          .canvas_extract(),
      none);
  add("canvas_with_listener",
      TraceBuilder().canvas_text().add(
          call("HTMLCanvasElement.addEventListener", {std::string("click")})).canvas_style()
          .canvas_extract(),
      none);

  // Canvas font.
  add("font_21_fonts_21_measures", TraceBuilder().fonts(21, 21).measures(21), font);
  add("font_20_fonts_50_measures", TraceBuilder().fonts(20, 20).measures(50), none);
  add("font_21_fonts_20_measures", TraceBuilder().fonts(21, 21).measures(20), none);
  add("font_repeated_values", TraceBuilder().fonts(20, 60).measures(30), none);
  add("font_no_measures", TraceBuilder().fonts(40, 40), none);

  // WebRTC.
  add("webrtc_offer_local_description",
      TraceBuilder()
          .add(call("RTCPeerConnection.createOffer"))
          .add(call("RTCPeerConnection.localDescription", {}, std::string("v=0"))),
      rtc);
  add("webrtc_channel_ice_reversed",
      TraceBuilder()
          .add(write("RTCPeerConnection.onicecandidate", std::string("function")))
          .add(call("RTCPeerConnection.createDataChannel", {std::string("")})),
      rtc);
  add("webrtc_channel_only",
      TraceBuilder().add(call("RTCPeerConnection.createDataChannel", {std::string("")})), none);
  add("webrtc_ice_only",
      TraceBuilder().add(write("RTCPeerConnection.onicecandidate", std::string("function"))),
      none);

  // Audio.
  add("audio_oscillator", TraceBuilder().add(call("AudioContext.createOscillator")), audio);
  add("audio_start_rendering_only",
      TraceBuilder().add(call("OfflineAudioContext.startRendering")), audio);
  add("audio_destination", TraceBuilder().add(call("AudioContext.destination")), audio);
  add("audio_user_agent_only",
      TraceBuilder().add(call("Navigator.userAgent", {}, std::string("Mozilla/5.0"))), none);

  // Mixed and degenerate.
  add("empty_trace", TraceBuilder(), none);
  LabelSet canvas_audio = canvas;
  canvas_audio.audio = true;
  add("canvas_and_audio",
      TraceBuilder().add(call("OfflineAudioContext.createDynamicsCompressor")).canvas_text()
          .canvas_style().canvas_extract(),
      canvas_audio);
  return v;
}

}  // namespace fpfed::testing

#endif  // FPFED_TESTS_SUPPORT_HEURISTIC_CASES_HPP_
