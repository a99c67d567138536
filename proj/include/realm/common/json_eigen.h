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

#ifndef REALM_COMMON_JSON_EIGEN_H_
#define REALM_COMMON_JSON_EIGEN_H_

#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include "json.hpp"

namespace realm {

using Json = nlohmann::json;

template <typename Derived>
Json VectorToJson(const Eigen::MatrixBase<Derived>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <int N>
Eigen::Matrix<double, N, 1> VectorFromJson(const Json& j,
                                           std::string_view what = "vector") {
  if (!j.is_array() || j.size() != static_cast<size_t>(N)) {
    throw std::invalid_argument(std::string(what) + ": expected array of " +
                                std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = j.at(i).get<double>();
  return v;
}

inline Json QuaternionToJson(const Eigen::Quaterniond& q) {
  return Json::array({q.w(), q.x(), q.y(), q.z()});
}

inline Eigen::Quaterniond QuaternionFromJson(const Json& j) {
  const Eigen::Vector4d v = VectorFromJson<4>(j, "quaternion [w,x,y,z]");
  return Eigen::Quaterniond(v(0), v(1), v(2), v(3));
}

}  // namespace realm

#endif  // REALM_COMMON_JSON_EIGEN_H_
