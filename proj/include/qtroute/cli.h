// Copyright 2026 The qtroute Authors. All Rights Reserved.
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

#ifndef QTROUTE_CLI_H_
#define QTROUTE_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace qtroute::cli {

// Runs the `qtroute` command line. `args` excludes the program name. Returns
// the process exit status; diagnostics and usage go to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qtroute::cli

#endif  // QTROUTE_CLI_H_
