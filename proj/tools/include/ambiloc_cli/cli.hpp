/**
 * Copyright 2026 The ambiloc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ambiloc::cli {

/// Process exit codes. Each failure class has its own code.
enum ExitCode : int {
  kOk = 0,
  kUsageError = 2,
  kConfigError = 3,
  kMissingInput = 4,
  kRuntimeError = 5,
  kSelftestFailed = 6,
};

/// Runs one subcommand. args excludes the program name. Reports go to
/// `out`, log lines ("[info] ...") to `log`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace ambiloc::cli
