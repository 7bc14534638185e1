// Copyright 2026 The FusionTrack Authors
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

#ifndef FUSIONTRACK__FUSIONTRACK_HPP_
#define FUSIONTRACK__FUSIONTRACK_HPP_

#include "fusiontrack/association.hpp"
#include "fusiontrack/bev_nms.hpp"
#include "fusiontrack/box_estimation.hpp"
#include "fusiontrack/common.hpp"
#include "fusiontrack/config.hpp"
#include "fusiontrack/evaluation.hpp"
#include "fusiontrack/hungarian.hpp"
#include "fusiontrack/io/logs.hpp"
#include "fusiontrack/motion_models.hpp"
#include "fusiontrack/parallel.hpp"
#include "fusiontrack/pipeline.hpp"
#include "fusiontrack/rig_geometry.hpp"
#include "fusiontrack/scenario.hpp"
#include "fusiontrack/sim_render.hpp"
#include "fusiontrack/sr_ukf.hpp"
#include "fusiontrack/svg.hpp"
#include "fusiontrack/tracker.hpp"

#endif  // FUSIONTRACK__FUSIONTRACK_HPP_
