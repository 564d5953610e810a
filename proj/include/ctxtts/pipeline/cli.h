// Copyright (c) 2026 ctxtts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTXTTS_PIPELINE_CLI_H_
#define CTXTTS_PIPELINE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace ctxtts::pipeline {

// Runs one subcommand. args excludes the program name. Results go to out as
// JSON lines; a failure prints a single JSON line {"error":..,"message":..}
// to err and returns nonzero (2 for usage errors, 1 otherwise).
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctxtts::pipeline

#endif  // CTXTTS_PIPELINE_CLI_H_
