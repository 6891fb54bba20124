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

#include "bimflow/server/multipart.hpp"

#include <regex>

#include "bimflow/util/text.hpp"

namespace bimflow::server {

namespace {

std::optional<std::string> header_param(std::string_view header, std::string_view key) {
  const std::regex re(R"re((?:^|[;\s]))re" + std::string(key) + R"re(\s*=\s*(?:"([^"]*)"|([^;\s]+)))re",
                      std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(header.begin(), header.end(), m, re)) return std::nullopt;
  return m[1].matched ? m[1].str() : m[2].str();
}

}  // namespace

std::optional<std::string> multipart_boundary(std::string_view content_type) {
  if (util::ifind(content_type, "multipart/form-data") == std::string_view::npos) return std::nullopt;
  return header_param(content_type, "boundary");
}

std::vector<FormPart> parse_multipart(std::string_view body, std::string_view boundary) {
  if (boundary.empty()) throw MultipartError("empty multipart boundary");
  const std::string delim = "--" + std::string(boundary);
  auto pos = body.find(delim);
  if (pos == std::string_view::npos) throw MultipartError("multipart boundary not found");

  std::vector<FormPart> parts;
  pos += delim.size();
  for (;;) {
    if (body.substr(pos, 2) == "--") return parts;  // closing delimiter
    if (body.substr(pos, 2) != "\r\n") throw MultipartError("malformed multipart delimiter line");
    pos += 2;
    const auto header_end = body.find("\r\n\r\n", pos);
    if (header_end == std::string_view::npos) throw MultipartError("multipart part without header terminator");
    const auto next = body.find("\r\n" + delim, header_end + 4);
    if (next == std::string_view::npos) throw MultipartError("multipart body is not terminated");

    FormPart part;
    part.content_type = "text/plain";
    for (const auto& line : util::split(body.substr(pos, header_end - pos), '\n')) {
      auto l = util::trim(line);
      const auto colon = l.find(':');
      if (colon == std::string_view::npos) continue;
      const auto key = util::trim(l.substr(0, colon));
      const auto value = util::trim(l.substr(colon + 1));
      if (util::iequals(key, "content-disposition")) {
        if (auto n = header_param(value, "name")) part.name = *n;
        if (auto f = header_param(value, "filename")) part.filename = *f;
      } else if (util::iequals(key, "content-type")) {
        part.content_type = std::string(value);
      }
    }
    if (part.name.empty()) throw MultipartError("multipart part without a form-data name");
    part.data = std::string(body.substr(header_end + 4, next - header_end - 4));
    parts.push_back(std::move(part));
    pos = next + 2 + delim.size();
  }
}

const FormPart* find_part(const std::vector<FormPart>& parts, std::string_view name) {
  for (const auto& p : parts) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace bimflow::server
