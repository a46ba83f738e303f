// Copyright 2026 The cvcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CVCLUSTER_TOOLS_CLI_H
#define CVCLUSTER_TOOLS_CLI_H

#include <ostream>
#include <string>
#include <vector>

namespace cvcluster::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitGate = 3;

/// Runs one invocation. `args` excludes the program name. Primary output goes to `out`
/// unless a subcommand writes to a declared path; errors go to `err` as one JSON object.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace cvcluster::cli

#endif
