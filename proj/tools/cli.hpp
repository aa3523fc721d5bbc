// Copyright 2026 The replymatch Authors
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

// Command-line driver. A corpus directory holds NAME.jsonl (canonical log)
// and NAME.ann (gold links) per chat log; derived artifacts are written as
// NAME.scores, NAME.links, NAME.threads and NAME.freq into an output
// directory.

#ifndef REPLYMATCH_TOOLS_CLI_HPP_
#define REPLYMATCH_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace replymatch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitInputError = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace replymatch::cli

#endif  // REPLYMATCH_TOOLS_CLI_HPP_
