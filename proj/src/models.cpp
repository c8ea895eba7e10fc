// Copyright 2026 The kgsub Authors. All Rights Reserved.
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
#include "kgsub/models.hpp"

namespace kgsub {

ModelKind parse_model_kind(std::string_view s) {
  if (s == "transe" || s == "TransE") return ModelKind::TransE;
  if (s == "distmult" || s == "DistMult") return ModelKind::DistMult;
  if (s == "complex" || s == "ComplEx") return ModelKind::ComplEx;
  if (s == "rotate" || s == "RotatE") return ModelKind::RotatE;
  throw std::invalid_argument("unknown model kind '" + std::string(s) +
                              "' (expected transe, distmult, complex or rotate)");
}

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::TransE: return "TransE";
    case ModelKind::DistMult: return "DistMult";
    case ModelKind::ComplEx: return "ComplEx";
    case ModelKind::RotatE: return "RotatE";
  }
  return "?";
}

}  // namespace kgsub
