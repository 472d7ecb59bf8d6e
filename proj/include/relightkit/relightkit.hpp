// Copyright 2026 The Relightkit Authors. All Rights Reserved.
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

#include "relightkit/archive.hpp"
#include "relightkit/blackbody.hpp"
#include "relightkit/calibrate.hpp"
#include "relightkit/color.hpp"
#include "relightkit/conditioning.hpp"
#include "relightkit/dataset.hpp"
#include "relightkit/demosaic.hpp"
#include "relightkit/error.hpp"
#include "relightkit/evaluate.hpp"
#include "relightkit/fusion.hpp"
#include "relightkit/image.hpp"
#include "relightkit/keyvalue.hpp"
#include "relightkit/lightpair_io.hpp"
#include "relightkit/manifest.hpp"
#include "relightkit/metrics.hpp"
#include "relightkit/pfm.hpp"
#include "relightkit/png.hpp"
#include "relightkit/relight.hpp"
#include "relightkit/resize.hpp"
#include "relightkit/sampler.hpp"
#include "relightkit/service.hpp"
#include "relightkit/tonemap.hpp"
