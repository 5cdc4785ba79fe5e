#include "rfsense/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>

#include "json.hpp"

#include "rfsense/errors.hpp"

namespace rfsense {

namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest representation that parses back to the same double.
std::string format_exact(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string format_db(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

double parse_double_field(std::string_view field, std::size_t line, const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(field) + "'", line);
  }
  return value;
}

std::int64_t parse_int_field(std::string_view field, std::size_t line, const char* what) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(field) + "'", line);
  }
  return value;
}

std::vector<std::string_view> split_csv(std::string_view row) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = row.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(row.substr(start));
      break;
    }
    fields.push_back(row.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

// getline that tolerates trailing \r\n.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

TraceMeta meta_from_json(const nlohmann::json& j) {
  TraceMeta meta;
  try {
    meta.link_id = j.at("link_id").get<std::string>();
    meta.num_pairs = j.at("num_pairs").get<int>();
    meta.num_subcarriers = j.at("num_subcarriers").get<int>();
    meta.nominal_rate_hz = j.at("nominal_rate_hz").get<double>();
    meta.spatial_index.assign(static_cast<std::size_t>(std::max(meta.num_pairs, 0)), 0.0);
    const auto& spatial = j.at("spatial_index");
    if (spatial.size() != meta.spatial_index.size()) {
      throw DataError("meta: spatial_index must carry exactly one entry per pair");
    }
    for (auto it = spatial.begin(); it != spatial.end(); ++it) {
      int pair = std::stoi(it.key());
      if (pair < 0 || pair >= meta.num_pairs) {
        throw DataError("meta: spatial_index pair id out of range");
      }
      meta.spatial_index[static_cast<std::size_t>(pair)] = it.value().get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("meta: ") + e.what());
  }
  meta.validate();
  return meta;
}

ordered_json meta_to_json(const TraceMeta& meta) {
  ordered_json spatial = ordered_json::object();
  for (int j = 0; j < meta.num_pairs; ++j) {
    spatial[std::to_string(j)] = meta.spatial_index[static_cast<std::size_t>(j)];
  }
  return ordered_json{{"link_id", meta.link_id},
                      {"num_pairs", meta.num_pairs},
                      {"num_subcarriers", meta.num_subcarriers},
                      {"nominal_rate_hz", meta.nominal_rate_hz},
                      {"spatial_index", spatial}};
}

void check_cell(std::int64_t packet, int pair, int sub, double db, const TraceMeta& meta,
                const Frame& frame, std::size_t line) {
  if (pair < 0 || pair >= meta.num_pairs) {
    throw DataError("line " + std::to_string(line) + ": pair id " + std::to_string(pair) +
                    " outside [0, " + std::to_string(meta.num_pairs) + ")");
  }
  if (sub < 0 || sub >= meta.num_subcarriers) {
    throw DataError("line " + std::to_string(line) + ": subcarrier id " + std::to_string(sub) +
                    " outside [0, " + std::to_string(meta.num_subcarriers) + ")");
  }
  if (!std::isfinite(db)) {
    throw DataError("line " + std::to_string(line) + ": non-finite magnitude");
  }
  if (frame.cells.present(pair, sub)) {
    throw DataError("line " + std::to_string(line) + ": duplicate cell (" +
                    std::to_string(packet) + ", " + std::to_string(pair) + ", " +
                    std::to_string(sub) + ")");
  }
}

}  // namespace

TraceMeta read_meta_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid metadata JSON: ") + e.what(), 1);
  }
  return meta_from_json(j);
}

void write_meta_json(std::ostream& out, const TraceMeta& meta) {
  out << meta_to_json(meta).dump(2) << '\n';
}

Trace read_trace_csv(std::istream& in, const TraceMeta& meta) {
  meta.validate();
  Trace trace;
  trace.meta = meta;

  std::string line;
  std::size_t line_no = 1;
  if (!next_line(in, line)) throw ParseError("missing header", 1);
  if (line != "packet,timestamp,pair,subcarrier,magnitude_db") {
    throw ParseError("unexpected header '" + line + "'", 1);
  }

  Frame* current = nullptr;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 5) {
      throw ParseError("expected 5 fields, got " + std::to_string(fields.size()), line_no);
    }
    std::int64_t packet = parse_int_field(fields[0], line_no, "packet index");
    double timestamp = parse_double_field(fields[1], line_no, "timestamp");
    auto pair = static_cast<int>(parse_int_field(fields[2], line_no, "pair id"));
    auto sub = static_cast<int>(parse_int_field(fields[3], line_no, "subcarrier id"));
    double db = parse_double_field(fields[4], line_no, "magnitude");

    if (current == nullptr || packet != current->packet) {
      if (current != nullptr && packet < current->packet) {
        throw ParseError("row out of packet order (packet " + std::to_string(packet) +
                             " after " + std::to_string(current->packet) + ")",
                         line_no);
      }
      Frame frame;
      frame.packet = packet;
      frame.timestamp = timestamp;
      frame.cells = CellGrid(meta.num_pairs, meta.num_subcarriers);
      trace.frames.push_back(std::move(frame));
      current = &trace.frames.back();
    } else if (timestamp != current->timestamp) {
      throw ParseError("inconsistent timestamp within packet " + std::to_string(packet),
                       line_no);
    }
    check_cell(packet, pair, sub, db, meta, *current, line_no);
    current->cells.set(pair, sub, db);
  }
  trace.validate();
  return trace;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "packet,timestamp,pair,subcarrier,magnitude_db\n";
  for (const Frame& frame : trace.frames) {
    const std::string packet = std::to_string(frame.packet);
    const std::string timestamp = format_exact(frame.timestamp);
    for (int j = 0; j < frame.cells.num_pairs(); ++j) {
      for (int k = 0; k < frame.cells.num_subcarriers(); ++k) {
        if (!frame.cells.present(j, k)) continue;
        out << packet << ',' << timestamp << ',' << j << ',' << k << ','
            << format_db(frame.cells.raw(j, k)) << '\n';
      }
    }
  }
}

Trace read_trace_jsonl(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  nlohmann::json meta_json;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      meta_json = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    break;
  }
  if (meta_json.is_null()) throw ParseError("missing metadata object", 1);

  Trace trace;
  trace.meta = meta_from_json(meta_json);

  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    Frame frame;
    try {
      frame.packet = j.at("packet").get<std::int64_t>();
      frame.timestamp = j.at("timestamp").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid frame object: ") + e.what(), line_no);
    }
    if (!trace.frames.empty() && frame.packet <= trace.frames.back().packet) {
      throw ParseError("frame out of packet order (packet " + std::to_string(frame.packet) +
                           " after " + std::to_string(trace.frames.back().packet) + ")",
                       line_no);
    }
    frame.cells = CellGrid(trace.meta.num_pairs, trace.meta.num_subcarriers);
    auto cells_it = j.find("cells");
    if (cells_it == j.end() || !cells_it->is_array()) {
      throw ParseError("frame object missing 'cells' array", line_no);
    }
    for (const auto& cell : *cells_it) {
      if (!cell.is_array() || cell.size() != 3) {
        throw ParseError("cell entries must be [pair, subcarrier, magnitude_db]", line_no);
      }
      int pair = 0;
      int sub = 0;
      double db = 0.0;
      try {
        pair = cell[0].get<int>();
        sub = cell[1].get<int>();
        db = cell[2].get<double>();
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid cell entry: ") + e.what(), line_no);
      }
      check_cell(frame.packet, pair, sub, db, trace.meta, frame, line_no);
      frame.cells.set(pair, sub, db);
    }
    trace.frames.push_back(std::move(frame));
  }
  trace.validate();
  return trace;
}

void write_trace_jsonl(std::ostream& out, const Trace& trace) {
  out << meta_to_json(trace.meta).dump() << '\n';
  for (const Frame& frame : trace.frames) {
    ordered_json cells = ordered_json::array();
    for (int j = 0; j < frame.cells.num_pairs(); ++j) {
      for (int k = 0; k < frame.cells.num_subcarriers(); ++k) {
        if (!frame.cells.present(j, k)) continue;
        cells.push_back({j, k, quantize_db(frame.cells.raw(j, k))});
      }
    }
    ordered_json record{
        {"packet", frame.packet}, {"timestamp", frame.timestamp}, {"cells", std::move(cells)}};
    out << record.dump() << '\n';
  }
}

GroundTruth read_ground_truth_csv(std::istream& in) {
  GroundTruth truth;
  std::string line;
  std::size_t line_no = 1;
  if (!next_line(in, line)) throw ParseError("missing header", 1);
  if (line != "time,link_id,direction") {
    throw ParseError("unexpected header '" + line + "'", 1);
  }
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 3) {
      throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), line_no);
    }
    CrossingEvent event;
    event.time_s = parse_double_field(fields[0], line_no, "time");
    event.link_id = std::string(fields[1]);
    event.direction = static_cast<int>(parse_int_field(fields[2], line_no, "direction"));
    truth.events.push_back(std::move(event));
  }
  truth.validate();
  return truth;
}

void write_ground_truth_csv(std::ostream& out, const GroundTruth& truth) {
  out << "time,link_id,direction\n";
  for (const CrossingEvent& event : truth.events) {
    out << format_exact(event.time_s) << ',' << event.link_id << ',' << event.direction << '\n';
  }
}

std::vector<double> read_tx_schedule_csv(std::istream& in) {
  std::vector<double> schedule;
  std::string line;
  std::size_t line_no = 1;
  if (!next_line(in, line)) throw ParseError("missing header", 1);
  if (line != "packet,tx_offset_db") {
    throw ParseError("unexpected header '" + line + "'", 1);
  }
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 2) {
      throw ParseError("expected 2 fields, got " + std::to_string(fields.size()), line_no);
    }
    std::int64_t packet = parse_int_field(fields[0], line_no, "packet index");
    if (packet != static_cast<std::int64_t>(schedule.size())) {
      throw ParseError("packet indexes must be contiguous from 0", line_no);
    }
    schedule.push_back(parse_double_field(fields[1], line_no, "tx offset"));
  }
  return schedule;
}

void write_tx_schedule_csv(std::ostream& out, std::span<const double> schedule) {
  out << "packet,tx_offset_db\n";
  for (std::size_t n = 0; n < schedule.size(); ++n) {
    out << n << ',' << format_db(schedule[n]) << '\n';
  }
}

std::filesystem::path meta_sidecar_path(const std::filesystem::path& trace_path) {
  std::filesystem::path sidecar = trace_path;
  sidecar.replace_extension(".meta.json");
  return sidecar;
}

TraceFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".csv") return TraceFormat::csv;
  if (ext == ".jsonl") return TraceFormat::jsonl;
  throw ConfigError("unsupported trace extension '" + ext + "' (expected .csv or .jsonl)");
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace

Trace load_trace(const std::filesystem::path& path, const std::filesystem::path& meta_path) {
  TraceFormat format = format_from_path(path);
  auto in = open_input(path);
  if (format == TraceFormat::jsonl) return read_trace_jsonl(in);
  auto sidecar = meta_path.empty() ? meta_sidecar_path(path) : meta_path;
  auto meta_in = open_input(sidecar);
  TraceMeta meta = read_meta_json(meta_in);
  return read_trace_csv(in, meta);
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
  TraceFormat format = format_from_path(path);
  auto out = open_output(path);
  if (format == TraceFormat::jsonl) {
    write_trace_jsonl(out, trace);
    return;
  }
  write_trace_csv(out, trace);
  auto meta_out = open_output(meta_sidecar_path(path));
  write_meta_json(meta_out, trace.meta);
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_ground_truth_csv(in);
}

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  auto out = open_output(path);
  write_ground_truth_csv(out, truth);
}

std::vector<double> load_tx_schedule(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_tx_schedule_csv(in);
}

void save_tx_schedule(const std::filesystem::path& path, std::span<const double> schedule) {
  auto out = open_output(path);
  write_tx_schedule_csv(out, schedule);
}

double quantize_db(double magnitude_db) {
  return std::strtod(format_db(magnitude_db).c_str(), nullptr);
}

}  // namespace rfsense
