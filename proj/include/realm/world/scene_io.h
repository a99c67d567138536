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

#ifndef REALM_WORLD_SCENE_IO_H_
#define REALM_WORLD_SCENE_IO_H_

#include <filesystem>

#include "realm/common/json_eigen.h"
#include "realm/world/scene.h"
#include "realm/world/world.h"

namespace realm::world {

Json RigidObjectToJson(const RigidObject& o);
RigidObject RigidObjectFromJson(const Json& j);

Json SceneToJson(const Scene& scene);
Scene SceneFromJson(const Json& j);
Scene LoadScene(const std::filesystem::path& path);

Json WorldConfigToJson(const WorldConfig& c);
WorldConfig WorldConfigFromJson(const Json& j);

}  // namespace realm::world

#endif  // REALM_WORLD_SCENE_IO_H_
