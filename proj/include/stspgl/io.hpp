#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stspgl/model.hpp"
#include "stspgl/scenarios.hpp"

namespace stspgl {

/// Instance JSON:
///   nodes: [{id, x, y}]  or  dist: [[...]]   (dist wins when both are given)
///   time: [[...]]        optional travel times, default = design costs
///   compulsory: [ids]
///   requests: [{h, k, demand: [per scenario]}]
///   theta, rho, alpha, rounding: "euc2d" | "exact"
Instance parse_instance(const std::string& text);
Instance read_instance(const std::string& path);
/// Pretty JSON text; stable for a given instance.
std::string instance_to_json(const Instance& inst);
void write_instance(const Instance& inst, const std::string& path);

struct TsplibData {
    std::string name;
    std::vector<Point> points;
};

/// NODE_COORD_SECTION of an EUC_2D TSPLIB file, in node-id order.
TsplibData parse_tsplib(std::istream& in);
TsplibData read_tsplib(const std::string& path);

/// Result JSON: status, bounds (null when infinite), cover, tour, served
/// requests, costs and scenario metrics. Carries no timings, so equal runs
/// give equal text.
std::string result_to_json(const Instance& inst, const StspGlResult& result);

std::string trace_csv_header();
void write_trace_csv(std::ostream& out, const SolveTrace& trace);
void write_trace_csv(const std::string& path, const SolveTrace& trace);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRow& row);

/// Number for CSV cells: "inf" / "-inf" for infinities.
std::string format_number(double value);

/// Writes `text` to `path`, throwing Error on failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace stspgl
