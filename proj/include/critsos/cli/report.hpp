#pragma once

#include <string>
#include <vector>

#include "critsos/certify/conditions.hpp"
#include "critsos/cli/hierarchy.hpp"

namespace critsos {
namespace cli {

enum class ReportFormat { kTable, kStructured };

ReportFormat parse_report_format(const std::string& text);

/// Table for people, or a JSON document carrying every row field plus the
/// serialized certificates. Timing lives only in "solve_seconds".
std::string report(const Problem& problem, const HierarchyResult& result,
                   ReportFormat format,
                   const std::vector<certify::BhcReport>& bhc = {});

}  // namespace cli
}  // namespace critsos
