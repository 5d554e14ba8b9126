#pragma once

#include "json.hpp"

#include "opiqsdc/channel.hpp"
#include "opiqsdc/frame_coding.hpp"
#include "opiqsdc/pulse_sim.hpp"
#include "opiqsdc/rates.hpp"
#include "opiqsdc/sweeps.hpp"

namespace opiqsdc {

using Json = nlohmann::ordered_json;

// Non-finite doubles become null; JSON has no infinities.
Json number_or_null(double v);

Json to_json(const SystemParams& params);
Json to_json(const RateBreakdown& r);
Json to_json(const ComparisonRates& c);
Json to_json(const CurvePoint& p);
Json curve_json(const std::vector<CurvePoint>& curve);
Json to_json(const CrossingResult& c);
Json to_json(const MaxDistanceResult& m);
Json to_json(const IntensityOptimum& o);
Json to_json(const std::optional<Estimate>& e);
Json to_json(const SimReport& r);
Json to_json(const AnalyticComparison& c);
Json to_json(const FrameRecord& f);
Json to_json(const PipelineResult& r);

}  // namespace opiqsdc
