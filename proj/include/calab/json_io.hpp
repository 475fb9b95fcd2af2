#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "calab/core.hpp"
#include "calab/decider.hpp"
#include "calab/gilman.hpp"
#include "calab/kurka.hpp"
#include "calab/spectral.hpp"

namespace calab::io {

// ordered_json keeps insertion order, so serialized reports are stable bytes.
using Json = nlohmann::ordered_json;

// Deterministic shortest-faithful formatting for CSV cells ("%.17g").
std::string format_double(double x);

Json rule_json(const LocalRule& rule, const std::string& id);
Json surjectivity_json(const SurjectivityReport& report);
Json certificate_json(const BlockingCertificate& cert);
Json kurka_json(const KurkaReport& report);
Json ratio_json(const RatioEstimate& est);
Json propagation_json(const PropagationEstimate& est);
Json gilman_json(const GilmanVerdict& verdict);
Json scan_json(const SpectralScan& scan);
Json rationality_json(const RationalityVerdict& verdict);
Json correlation_json(const std::vector<CorrelationPoint>& points);

// CSV emission (header + rows, '\n' line endings).
std::string scan_csv(const SpectralScan& scan);
std::string profile_csv(const GilmanVerdict& verdict);

// Write via a temp file plus rename so concurrent corpus runs never expose a
// partial file. Creates parent directories as needed.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace calab::io
