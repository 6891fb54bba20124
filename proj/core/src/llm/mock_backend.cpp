// Copyright 2026 The bimflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bimflow/llm/mock_backend.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "bimflow/util/text.hpp"

namespace bimflow::llm {

using nlohmann::json;

std::string_view to_string(FailureMode mode) {
  switch (mode) {
    case FailureMode::MalformedJson: return "MalformedJson";
    case FailureMode::RuleViolation: return "RuleViolation";
    case FailureMode::Timeout: return "Timeout";
  }
  return "?";
}

const std::vector<std::string>& known_violation_rules() {
  static const std::vector<std::string> ids{"structural_material", "min_structural_thickness",
                                            "requested_total_thickness"};
  return ids;
}

namespace {

[[noreturn]] void invalid_script(const std::string& why) {
  throw GatewayError(GatewayErrc::InvalidScript, why);
}

FailureSpec parse_failure(const json& f, const std::string& where) {
  if (!f.is_object()) invalid_script(where + ": failure must be an object");
  FailureSpec spec;
  const auto mode = f.value("mode", std::string{});
  if (mode == "MalformedJson") {
    spec.mode = FailureMode::MalformedJson;
  } else if (mode == "RuleViolation") {
    spec.mode = FailureMode::RuleViolation;
  } else if (mode == "Timeout") {
    spec.mode = FailureMode::Timeout;
  } else {
    invalid_script(where + ": unknown failure mode '" + mode + "'");
  }
  if (!f.contains("p") || !f["p"].is_number()) invalid_script(where + ": failure.p is required");
  spec.probability = f["p"].get<double>();
  if (f.contains("rule")) {
    const auto& r = f["rule"];
    if (r.is_string()) {
      spec.rules.push_back(r.get<std::string>());
    } else if (r.is_array()) {
      for (const auto& x : r) {
        if (!x.is_string()) invalid_script(where + ": failure.rule entries must be strings");
        spec.rules.push_back(x.get<std::string>());
      }
    } else {
      invalid_script(where + ": failure.rule must be a string or array");
    }
  }
  spec.violation_material = f.value("material", spec.violation_material);
  spec.violation_thickness = f.value("thickness", spec.violation_thickness);
  return spec;
}

RuleMatcher parse_matcher(const json& m, const std::string& where) {
  RuleMatcher matcher;
  if (m.is_null()) return matcher;
  if (!m.is_object()) invalid_script(where + ": match must be an object");
  if (m.contains("substring")) matcher.substring = m["substring"].get<std::string>();
  matcher.ignore_case = m.value("ignore_case", false);
  const auto field = m.value("field", std::string("any"));
  if (field == "any") {
    matcher.field = RuleMatcher::Field::Any;
  } else if (field == "system") {
    matcher.field = RuleMatcher::Field::System;
  } else if (field == "user") {
    matcher.field = RuleMatcher::Field::User;
  } else {
    invalid_script(where + ": unknown match.field '" + field + "'");
  }
  if (m.contains("tags")) {
    for (const auto& [k, v] : m["tags"].items()) {
      if (!v.is_string()) invalid_script(where + ": tag values must be strings");
      matcher.tags[k] = v.get<std::string>();
    }
  }
  if (m.contains("regex")) matcher.regex = m["regex"].get<std::string>();
  return matcher;
}

std::string json_escape_inner(const std::string& value) {
  auto dumped = json(value).dump();
  return dumped.substr(1, dumped.size() - 2);
}

std::string expand_template(const std::string& tmpl, const ChatRequest& request,
                            const std::smatch* captures, bool escape) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto open = tmpl.find("{{", pos);
    if (open == std::string::npos) break;
    // {{{name}}} inserts the value verbatim, {{name}} JSON-escapes it when
    // the template is a JSON document.
    const bool raw = tmpl.compare(open, 3, "{{{") == 0;
    const std::size_t width = raw ? 3 : 2;
    auto close = tmpl.find(raw ? "}}}" : "}}", open + width);
    if (close == std::string::npos) break;
    out.append(tmpl, pos, open - pos);
    auto key = std::string(util::trim(std::string_view(tmpl).substr(open + width, close - open - width)));
    std::string value;
    if (!key.empty() && key[0] == '$') {
      std::size_t index = 0;
      try {
        index = static_cast<std::size_t>(std::stoul(key.substr(1)));
      } catch (const std::exception&) {
        index = 0;
      }
      if (captures != nullptr && index > 0 && index < captures->size()) {
        value = (*captures)[index].str();
      }
    } else if (auto it = request.tags.find(key); it != request.tags.end()) {
      value = it->second;
    }
    out += (escape && !raw) ? json_escape_inner(value) : value;
    pos = close + width;
  }
  out.append(tmpl, pos, std::string::npos);
  return out;
}

bool haystack_contains(const RuleMatcher& m, const ChatRequest& request) {
  auto contains = [&](std::string_view text) {
    return m.ignore_case ? util::icontains(text, *m.substring)
                         : text.find(*m.substring) != std::string_view::npos;
  };
  switch (m.field) {
    case RuleMatcher::Field::System:
      return contains(request.system_instruction);
    case RuleMatcher::Field::User:
      return contains(last_user_content(request));
    case RuleMatcher::Field::Any:
      if (contains(request.system_instruction)) return true;
      return std::any_of(request.messages.begin(), request.messages.end(),
                         [&](const ChatMessage& msg) { return contains(msg.content); });
  }
  return false;
}

}  // namespace

MockScript parse_mock_script(const json& doc) {
  if (!doc.is_object()) invalid_script("script must be a JSON object");
  MockScript script;
  try {
    script.seed = doc.value("seed", std::uint64_t{0});
    script.default_latency_ms = doc.value("latency_ms", std::int64_t{0});
    const auto& rules = doc.contains("rules") ? doc["rules"] : json::array();
    if (!rules.is_array()) invalid_script("rules must be an array");
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const auto& r = rules[i];
      const auto where = "rules[" + std::to_string(i) + "]";
      if (!r.is_object()) invalid_script(where + ": must be an object");
      MockRule rule;
      rule.name = r.value("name", where);
      rule.matcher = parse_matcher(r.contains("match") ? r["match"] : json(), where);
      if (!r.contains("response")) invalid_script(where + ": response is required");
      const auto& resp = r["response"];
      if (resp.is_string()) {
        rule.response = resp.get<std::string>();
      } else {
        // Structured responses are serialized; placeholders inside string
        // values are expanded with JSON escaping.
        rule.response = resp.dump();
      }
      if (r.contains("failure") && !r["failure"].is_null()) {
        rule.failure = parse_failure(r["failure"], where);
      }
      rule.latency_ms = r.value("latency_ms", script.default_latency_ms);
      script.rules.push_back(std::move(rule));
    }
    if (doc.contains("transcripts")) {
      for (const auto& [digest, t] : doc["transcripts"].items()) {
        ScriptedTranscript st;
        st.text = t.at("text").get<std::string>();
        st.language = t.value("language", st.language);
        st.duration_s = t.value("duration", 0.0);
        script.transcripts[util::to_lower(digest)] = std::move(st);
      }
    }
  } catch (const json::exception& e) {
    invalid_script(e.what());
  }
  validate_script(script);
  return script;
}

MockScript load_mock_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid_script("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    invalid_script(path.string() + ": " + e.what());
  }
  return parse_mock_script(doc);
}

void validate_script(const MockScript& script) {
  for (const auto& rule : script.rules) {
    if (rule.latency_ms < 0) invalid_script(rule.name + ": latency_ms must be >= 0");
    if (rule.matcher.regex) {
      try {
        std::regex re(*rule.matcher.regex);
      } catch (const std::regex_error& e) {
        invalid_script(rule.name + ": bad regex: " + e.what());
      }
    }
    if (!rule.failure) continue;
    const auto& f = *rule.failure;
    if (!(f.probability >= 0.0 && f.probability <= 1.0)) {
      invalid_script(rule.name + ": failure probability must be within [0, 1]");
    }
    if (f.mode == FailureMode::RuleViolation) {
      if (f.rules.empty()) invalid_script(rule.name + ": RuleViolation needs a rule id");
      for (const auto& id : f.rules) {
        const auto& known = known_violation_rules();
        if (std::find(known.begin(), known.end(), id) == known.end()) {
          invalid_script(rule.name + ": unknown rule id '" + id + "'");
        }
      }
    }
  }
  for (const auto& [digest, t] : script.transcripts) {
    if (t.text.empty() && t.duration_s != 0.0) {
      invalid_script("transcript " + digest + ": empty text needs duration 0");
    }
  }
}

std::string sha256_hex(std::span<const std::byte> data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(length * 2);
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string inject_rule_violation(const std::string& reply, const std::string& rule_id,
                                  const FailureSpec& failure) {
  json doc = json::parse(util::extract_json_text(reply), nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("layers") ||
      !doc["layers"].is_array()) {
    return reply;
  }
  for (auto& layer : doc["layers"]) {
    if (!layer.is_object()) continue;
    const bool structural = layer.contains("layer_type") && layer["layer_type"].is_string() &&
                            util::iequals(layer["layer_type"].get<std::string>(), "Structure");
    if (rule_id == "structural_material" && structural) {
      layer["material"] = failure.violation_material;
    } else if (rule_id == "min_structural_thickness" && structural) {
      layer["thickness"] = failure.violation_thickness;
    } else if (rule_id == "requested_total_thickness") {
      layer["thickness"] = failure.violation_thickness / 10.0;
    }
  }
  return doc.dump();
}

MockBackend::MockBackend(MockScript script, std::shared_ptr<Clock> clock)
    : MockBackend(script, script.seed, std::move(clock)) {}

MockBackend::MockBackend(MockScript script, std::uint64_t seed, std::shared_ptr<Clock> clock)
    : script_(std::make_shared<const MockScript>(std::move(script))),
      rng_(seed),
      clock_(clock ? std::move(clock) : std::make_shared<VirtualClock>()) {
  validate_script(*script_);
  for (const auto& rule : script_->rules) {
    compiled_.emplace_back(rule.matcher.regex.value_or(""));
  }
}

double MockBackend::next_uniform() {
  // 53 high bits -> [0, 1); identical on every platform, unlike
  // std::uniform_real_distribution.
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

ChatResponse MockBackend::complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  const auto user = std::string(last_user_content(request));
  for (std::size_t i = 0; i < script_->rules.size(); ++i) {
    const auto& rule = script_->rules[i];
    const auto& m = rule.matcher;
    if (m.substring && !haystack_contains(m, request)) continue;
    bool tags_ok = true;
    for (const auto& [k, v] : m.tags) {
      auto it = request.tags.find(k);
      if (it == request.tags.end() || (v != "*" && it->second != v)) {
        tags_ok = false;
        break;
      }
    }
    if (!tags_ok) continue;
    std::smatch captures;
    if (m.regex && !std::regex_search(user, captures, compiled_[i])) continue;

    const bool escape = !rule.response.empty() && rule.response.front() == '{';
    auto content = expand_template(rule.response, request, m.regex ? &captures : nullptr, escape);

    clock_->sleep_for(std::chrono::milliseconds(rule.latency_ms));
    if (rule.failure) {
      const auto& f = *rule.failure;
      if (next_uniform() < f.probability) {
        switch (f.mode) {
          case FailureMode::Timeout:
            throw GatewayError(GatewayErrc::BackendUnreachable,
                               "scripted timeout (rule '" + rule.name + "')", true);
          case FailureMode::MalformedJson:
            content = content.substr(0, content.size() / 2);
            break;
          case FailureMode::RuleViolation: {
            auto pick = static_cast<std::size_t>(next_uniform() * static_cast<double>(f.rules.size()));
            pick = std::min(pick, f.rules.size() - 1);
            content = inject_rule_violation(content, f.rules[pick], f);
            break;
          }
        }
      }
    }
    if (content.empty()) {
      throw GatewayError(GatewayErrc::ResponseEmpty, "rule '" + rule.name + "' produced no text");
    }
    ChatResponse response;
    response.content = std::move(content);
    response.backend_id = id();
    response.latency_ms = rule.latency_ms;
    return response;
  }
  throw GatewayError(GatewayErrc::ResponseEmpty, "no scripted rule matched the request");
}

Transcript MockBackend::transcribe(std::span<const std::byte> audio, std::string_view media_type) {
  if (audio.empty()) throw GatewayError(GatewayErrc::UnsupportedMedia, "audio blob is empty");
  if (!is_supported_audio_type(media_type)) {
    throw GatewayError(GatewayErrc::UnsupportedMedia,
                       "unsupported media type '" + std::string(media_type) + "'");
  }
  const auto digest = sha256_hex(audio);
  auto it = script_->transcripts.find(digest);
  if (it == script_->transcripts.end() || it->second.text.empty()) {
    throw GatewayError(GatewayErrc::ResponseEmpty, "no transcript scripted for audio " + digest);
  }
  return Transcript{it->second.text, it->second.language, it->second.duration_s};
}

std::unique_ptr<ChatBackend> MockBackend::fork(std::uint64_t seed,
                                               std::shared_ptr<Clock> clock) const {
  return std::make_unique<MockBackend>(*script_, seed, clock ? std::move(clock) : clock_);
}

}  // namespace bimflow::llm
