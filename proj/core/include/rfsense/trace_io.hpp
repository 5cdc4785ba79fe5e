/*
 * rfsense - trace and ground-truth file formats.
 *
 * CSV trace:   header "packet,timestamp,pair,subcarrier,magnitude_db",
 *              one row per present cell, metadata in a sidecar JSON file.
 * JSONL trace: one metadata object, then one object per frame:
 *              {"packet": n, "timestamp": t, "cells": [[pair, sub, db], ...]}.
 * Ground truth CSV: header "time,link_id,direction".
 * Tx schedule CSV:  header "packet,tx_offset_db".
 *
 * dB values are serialized with 4 decimal places; timestamps use the
 * shortest exact representation, so parse(serialize(trace)) == trace for
 * traces whose dB values already sit on the 4-decimal grid.
 */
#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rfsense/trace.hpp"

namespace rfsense {

enum class TraceFormat { csv, jsonl };

TraceMeta read_meta_json(std::istream& in);
void write_meta_json(std::ostream& out, const TraceMeta& meta);

/// Rows out of packet order, duplicate (packet, pair, subcarrier) cells and
/// non-finite magnitudes are errors, never silently repaired.
Trace read_trace_csv(std::istream& in, const TraceMeta& meta);
void write_trace_csv(std::ostream& out, const Trace& trace);

Trace read_trace_jsonl(std::istream& in);
void write_trace_jsonl(std::ostream& out, const Trace& trace);

GroundTruth read_ground_truth_csv(std::istream& in);
void write_ground_truth_csv(std::ostream& out, const GroundTruth& truth);

std::vector<double> read_tx_schedule_csv(std::istream& in);
void write_tx_schedule_csv(std::ostream& out, std::span<const double> schedule);

/// Sidecar metadata path for a CSV trace: trace.csv -> trace.meta.json.
std::filesystem::path meta_sidecar_path(const std::filesystem::path& trace_path);

/// Format from the file extension (.csv / .jsonl). Throws ConfigError.
TraceFormat format_from_path(const std::filesystem::path& path);

/// Loads a trace from disk; CSV reads the sidecar unless meta_path is given.
Trace load_trace(const std::filesystem::path& path,
                 const std::filesystem::path& meta_path = {});
/// Saves a trace; CSV also writes the sidecar.
void save_trace(const std::filesystem::path& path, const Trace& trace);

GroundTruth load_ground_truth(const std::filesystem::path& path);
void save_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
std::vector<double> load_tx_schedule(const std::filesystem::path& path);
void save_tx_schedule(const std::filesystem::path& path, std::span<const double> schedule);

/// Nearest value on the serialized 4-decimal dB grid.
double quantize_db(double magnitude_db);

}  // namespace rfsense
