#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "electrend/calendar.hpp"

namespace electrend {

/// The three camps a tweet can favor. FF = Fernández-Fernández, MP = Macri-Pichetto.
enum class Camp { FF = 0, MP = 1, Third = 2 };
inline constexpr std::array<Camp, 3> kCamps = {Camp::FF, Camp::MP, Camp::Third};

enum class StanceLabel { ProMP, ProFF, ProThird, Neutral };
inline constexpr std::array<StanceLabel, 4> kStanceLabels = {
    StanceLabel::ProFF, StanceLabel::ProMP, StanceLabel::ProThird, StanceLabel::Neutral};

std::string_view to_string(Camp camp);
std::string_view to_string(StanceLabel label);
std::optional<Camp> parse_camp(std::string_view name);
std::optional<StanceLabel> parse_stance(std::string_view name);
StanceLabel stance_for(Camp camp);

/// Assigned day of a record relative to the corpus origin.
struct DayStamp {
  DayIndex t = 0;
  Date date{};
  bool operator==(const DayStamp&) const = default;
};

/// One ingested message. `day` is set by ingestion, `stance` by classification.
struct TweetRecord {
  std::string tweet_id;
  std::string user_id;
  Timestamp created_at{};
  std::string text;
  /// Lowercase tags without '#', deduplicated, in order of first appearance.
  std::vector<std::string> hashtags;
  std::optional<DayStamp> day;
  std::optional<StanceLabel> stance;

  bool operator==(const TweetRecord&) const = default;
};

/// Parses one JSONL line. Required keys: id, user, ts, text. Optional: hashtags
/// (trusted when present, otherwise extracted from text), day, date, stance.
/// Throws ParseError carrying `line_no`.
TweetRecord parse_record(std::string_view line, std::size_t line_no = 0);

/// Compact single-line JSON with a fixed key order; parse_record(serialize_record(r)) == r.
std::string serialize_record(const TweetRecord& record);

/// '#' followed by a maximal run of word characters; lowercased, deduplicated.
std::vector<std::string> extract_hashtags(std::string_view text);

}  // namespace electrend
