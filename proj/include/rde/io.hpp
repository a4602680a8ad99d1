// Copyright 2026 The rde Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// JSON and CSV serialization for every exported object.
//
// Distributions and channels share one JSON schema:
//   {"axes": [{"name": ..., "role": ..., "labels": [...]}, ...],
//    "probs": [... row-major ...]}
// For channels axes[0] is the input and axes[1] the output. JSON numbers
// round-trip losslessly; CSV emits 12 significant digits and is meant for
// plotting.
#ifndef RDE_IO_HPP_
#define RDE_IO_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rde/closed_form.hpp"
#include "rde/dp.hpp"
#include "rde/oracle.hpp"
#include "rde/pipeline.hpp"
#include "rde/prob.hpp"
#include "rde/rd.hpp"
#include "rde/region.hpp"

namespace rde {

using Json = nlohmann::json;

Json axis_to_json(const Axis& axis);
Axis axis_from_json(const Json& j);
std::vector<Axis> axes_from_json(const Json& j);  // {"axes":[...]} or [...]

Json to_json(const Pmf& p);
Pmf pmf_from_json(const Json& j);

Json to_json(const JointPmf& p);
JointPmf joint_from_json(const Json& j);

Json to_json(const Channel& c);
Channel channel_from_json(const Json& j);

Json to_json(const DistortionSpec& d);
DistortionSpec distortion_from_json(const Json& j);

Json to_json(const RegionPoint& pt);
Json region_entries_to_json(std::span<const RegionCurveEntry> entries);

Json to_json(const WaterfillSolution& w);
Json to_json(const OracleReport& r);
Json to_json(const Metrics& m);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

// 12 significant digits, the CSV number format.
std::string format_sig12(double v);

void write_rd_curve_csv(std::ostream& out, std::span<const RDPoint> points);
void write_waterfill_curve_csv(std::ostream& out,
                               std::span<const GammaCurvePoint> points);
void write_gaussian_curve_csv(std::ostream& out,
                              std::span<const GaussianCurvePoint> points);
// distortion,equivocation_bits,rate_bits rows of solver gamma points.
void write_gamma_curve_csv(std::ostream& out,
                           std::span<const RegionCurveEntry> entries);
void write_accuracy_curve_csv(std::ostream& out,
                              std::span<const AccuracyPoint> points);

}  // namespace rde

#endif  // RDE_IO_HPP_
