// Copyright 2026 The hybridnv Authors
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

// JSON mapping of the library types. Frequencies are written in linear units
// with explicit suffixes; timeline records also carry the exact angular values
// so that documents round-trip bit for bit.

#include <json.hpp>

#include "hybridnv/cluster.hpp"
#include "hybridnv/protocols.hpp"

namespace hybridnv {

using Json = nlohmann::ordered_json;

Json device_to_json(const DeviceParams& p);
// Unknown keys are rejected; missing keys keep the values of `base`.
DeviceParams device_from_json(const Json& j, DeviceParams base = {});
Json device_angular_to_json(const DeviceParams& p);

Json segment_to_json(const ControlSegment& s);
ControlSegment segment_from_json(const Json& j);
Json timeline_to_json(const Timeline& tl);
Timeline timeline_from_json(const Json& j);

Json plan_to_json(const ProtocolPlan& formula, const ProtocolPlan& final_plan);
Json calibration_to_json(const CalibrationResult& r);
CalibrationResult calibration_from_json(const Json& j);

Json fidelity_to_json(const FidelityReport& r);
FidelityReport fidelity_from_json(const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json density_to_json(const DensityMatrixReport& r);

Json schedule_to_json(const Lattice& lat, const LatticeSchedule& s);

}  // namespace hybridnv
