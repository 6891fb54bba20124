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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bimflow::server {

struct FormPart {
  std::string name;
  std::optional<std::string> filename;
  std::string content_type;  // "text/plain" when the part has no header
  std::string data;
};

class MultipartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Boundary parameter of a multipart/form-data content type.
std::optional<std::string> multipart_boundary(std::string_view content_type);

/// Splits a multipart/form-data body. Throws MultipartError when the body is
/// not delimited by `boundary` or a part lacks a form-data name.
std::vector<FormPart> parse_multipart(std::string_view body, std::string_view boundary);

const FormPart* find_part(const std::vector<FormPart>& parts, std::string_view name);

}  // namespace bimflow::server
