// SPDX-License-Identifier: Apache-2.0
//
// frespond: body-shadowing diffraction and passive detection toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "frespond/errors.hpp"
#include "frespond/geometry.hpp"
#include "frespond/antenna.hpp"
#include "frespond/diffraction.hpp"
#include "frespond/knife_edge.hpp"
#include "frespond/scenario.hpp"
#include "frespond/detection.hpp"
#include "frespond/config.hpp"
#include "frespond/io.hpp"
