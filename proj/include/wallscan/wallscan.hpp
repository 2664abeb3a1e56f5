// SPDX-License-Identifier: Apache-2.0
//
// wallscan - in-wall impulse radar imaging and material analysis toolkit
// Copyright (C) 2026 The wallscan Authors
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

#include "wallscan/matrix.hpp"
#include "wallscan/fft.hpp"
#include "wallscan/waveform.hpp"
#include "wallscan/polarimetry.hpp"
#include "wallscan/scene.hpp"
#include "wallscan/focusing.hpp"
#include "wallscan/detect.hpp"
#include "wallscan/json_io.hpp"
#include "wallscan/dataset_io.hpp"
#include "wallscan/dataset.hpp"
