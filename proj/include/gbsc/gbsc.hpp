// Copyright 2026 The gbsc Authors
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

#ifndef GBSC_GBSC_HPP
#define GBSC_GBSC_HPP

#include "gbsc/circuit.hpp"
#include "gbsc/dropout.hpp"
#include "gbsc/elimination.hpp"
#include "gbsc/lattice.hpp"
#include "gbsc/mapping.hpp"
#include "gbsc/matrix.hpp"
#include "gbsc/pattern_tree.hpp"
#include "gbsc/pipeline.hpp"
#include "gbsc/serialization.hpp"

#endif  // GBSC_GBSC_HPP
