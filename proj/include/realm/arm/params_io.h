// Copyright 2026 The realm-desk Authors
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

#ifndef REALM_ARM_PARAMS_IO_H_
#define REALM_ARM_PARAMS_IO_H_

#include <filesystem>

#include "realm/arm/types.h"
#include "realm/common/json_eigen.h"

namespace realm::arm {

Json PoseToJson(const Pose& pose);
Pose PoseFromJson(const Json& j);

Json ArmStateToJson(const ArmState& state);
ArmState ArmStateFromJson(const Json& j);

Json ArmParamsToJson(const ArmParams& params);
ArmParams ArmParamsFromJson(const Json& j);

ArmParams LoadArmParams(const std::filesystem::path& path);
void SaveArmParams(const ArmParams& params, const std::filesystem::path& path);

}  // namespace realm::arm

#endif  // REALM_ARM_PARAMS_IO_H_
