//
// Copyright 2026 The FaultForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "faultforge/degrade.hpp"      // IWYU pragma: export
#include "faultforge/error.hpp"        // IWYU pragma: export
#include "faultforge/faultlut.hpp"     // IWYU pragma: export
#include "faultforge/genai_client.hpp" // IWYU pragma: export
#include "faultforge/image.hpp"        // IWYU pragma: export
#include "faultforge/image_io.hpp"     // IWYU pragma: export
#include "faultforge/metrics.hpp"      // IWYU pragma: export
#include "faultforge/perception.hpp"   // IWYU pragma: export
#include "faultforge/scenario.hpp"     // IWYU pragma: export
