#include "rfsense/detection_io.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

#include "rfsense/errors.hpp"

namespace rfsense {

namespace {
using ordered_json = nlohmann::ordered_json;
}

void write_detections_jsonl(std::ostream& out, std::span<const DetectionRecord> detections) {
  for (const DetectionRecord& record : detections) {
    ordered_json votes = ordered_json::array();
    for (const PairDetection& vote : record.event.votes) votes.push_back(vote.pair_id);
    ordered_json j{{"link_id", record.event.link_id},
                   {"trigger_time", record.event.trigger_time},
                   {"packet", record.event.packet},
                   {"votes", std::move(votes)},
                   {"direction", record.direction.direction},
                   {"slope", record.direction.slope}};
    out << j.dump() << '\n';
  }
}

std::vector<DetectionRecord> read_detections_jsonl(std::istream& in) {
  std::vector<DetectionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    DetectionRecord record;
    try {
      record.event.link_id = j.at("link_id").get<std::string>();
      record.event.trigger_time = j.at("trigger_time").get<double>();
      record.event.packet = j.at("packet").get<std::int64_t>();
      for (const auto& pair : j.at("votes")) {
        PairDetection vote;
        vote.pair_id = pair.get<int>();
        record.event.votes.push_back(vote);
      }
      record.direction.direction = j.value("direction", 0);
      record.direction.slope = j.value("slope", 0.0);
      record.direction.pairs_used = static_cast<int>(record.event.votes.size());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid detection record: ") + e.what(), line_no);
    }
    records.push_back(std::move(record));
  }
  return records;
}

void write_tx_estimates_csv(std::ostream& out, std::span<const TxEstimate> estimates) {
  out << "packet,t_hat_db,sample_count\n";
  char buf[32];
  for (const TxEstimate& e : estimates) {
    std::snprintf(buf, sizeof(buf), "%.4f", e.t_hat_db);
    out << e.packet << ',' << buf << ',' << e.sample_count << '\n';
  }
}

std::vector<TxEstimate> read_tx_estimates_csv(std::istream& in) {
  std::vector<TxEstimate> estimates;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "packet,t_hat_db,sample_count") {
    throw ParseError("unexpected header '" + line + "'", 1);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    TxEstimate e;
    char* end = nullptr;
    e.packet = std::strtoll(line.c_str(), &end, 10);
    if (*end != ',') throw ParseError("malformed row", line_no);
    e.t_hat_db = std::strtod(end + 1, &end);
    if (*end != ',') throw ParseError("malformed row", line_no);
    e.sample_count = static_cast<int>(std::strtol(end + 1, &end, 10));
    if (*end != '\0') throw ParseError("malformed row", line_no);
    estimates.push_back(e);
  }
  return estimates;
}

void write_pair_stats_csv(std::ostream& out, std::span<const PairSnapshot> stats) {
  out << "packet,timestamp,pair,short_var,long_var,gamma\n";
  char buf[32];
  auto emit = [&](std::optional<double> value) {
    out << ',';
    if (value) {
      std::snprintf(buf, sizeof(buf), "%.6g", *value);
      out << buf;
    }
  };
  for (const PairSnapshot& s : stats) {
    std::snprintf(buf, sizeof(buf), "%.6f", s.timestamp);
    out << s.packet << ',' << buf << ',' << s.pair_id;
    emit(s.short_var);
    emit(s.long_var);
    emit(s.threshold);
    out << '\n';
  }
}

}  // namespace rfsense
