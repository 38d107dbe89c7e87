// Copyright 2026 The gridsec Authors
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

#include <filesystem>
#include <string>
#include <string_view>

#include "gridsec/grid_model.hpp"

namespace gridsec {

/// Parses the JSON instance document. Throws InstanceError naming the
/// offending key, node or edge.
PlanningInstance parse_instance(std::string_view document);
PlanningInstance load_instance(const std::filesystem::path& path);

struct PlanFile {
  std::string instance_hash;
  Plan plan;
};

PlanFile parse_plan(std::string_view document);
PlanFile load_plan(const std::filesystem::path& path);
std::string plan_to_json(const PlanningInstance& instance, const Plan& plan);
void save_plan(const std::filesystem::path& path, const PlanningInstance& instance,
               const Plan& plan);

/// Serializes an instance in the same schema parse_instance reads.
std::string instance_to_json(const PlanningInstance& instance);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace gridsec
