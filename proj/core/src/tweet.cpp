#include "electrend/tweet.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "electrend/errors.hpp"
#include "electrend/text.hpp"

namespace electrend {

std::string_view to_string(Camp camp) {
  switch (camp) {
    case Camp::FF: return "FF";
    case Camp::MP: return "MP";
    case Camp::Third: return "Third";
  }
  return "?";
}

std::string_view to_string(StanceLabel label) {
  switch (label) {
    case StanceLabel::ProMP: return "ProMP";
    case StanceLabel::ProFF: return "ProFF";
    case StanceLabel::ProThird: return "ProThird";
    case StanceLabel::Neutral: return "Neutral";
  }
  return "?";
}

std::optional<Camp> parse_camp(std::string_view name) {
  const std::string key = text::lower(name);
  if (key == "ff") return Camp::FF;
  if (key == "mp") return Camp::MP;
  if (key == "third" || key == "other" || key == "others") return Camp::Third;
  return std::nullopt;
}

std::optional<StanceLabel> parse_stance(std::string_view name) {
  for (const auto label : kStanceLabels) {
    if (to_string(label) == name) return label;
  }
  return std::nullopt;
}

StanceLabel stance_for(Camp camp) {
  switch (camp) {
    case Camp::FF: return StanceLabel::ProFF;
    case Camp::MP: return StanceLabel::ProMP;
    case Camp::Third: return StanceLabel::ProThird;
  }
  return StanceLabel::Neutral;
}

std::vector<std::string> extract_hashtags(std::string_view s) {
  std::vector<std::string> tags;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const char32_t cp = text::decode(s, pos);
    if (cp != '#' && cp != 0xFF03) continue;  // U+FF03 fullwidth number sign
    std::string tag;
    std::size_t probe = pos;
    while (probe < s.size()) {
      std::size_t next = probe;
      const char32_t c = text::decode(s, next);
      if (!text::is_word_char(c)) break;
      text::append_utf8(tag, text::to_lower(c));
      probe = next;
    }
    pos = probe;
    if (!tag.empty() && std::find(tags.begin(), tags.end(), tag) == tags.end()) {
      tags.push_back(std::move(tag));
    }
  }
  return tags;
}

namespace {

const std::string& required_string(const nlohmann::json& obj, const char* key,
                                   std::size_t line_no) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line_no, std::string("missing required field '") + key + "'");
  if (!it->is_string()) {
    throw ParseError(line_no, std::string("field '") + key + "' is not a string");
  }
  return it->get_ref<const std::string&>();
}

std::string id_field(const nlohmann::json& obj, const char* key, std::size_t line_no) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line_no, std::string("missing required field '") + key + "'");
  // numeric ids are common in archived dumps
  if (it->is_number_unsigned() || it->is_number_integer()) return it->dump();
  if (!it->is_string() || it->get_ref<const std::string&>().empty()) {
    throw ParseError(line_no, std::string("field '") + key + "' must be a non-empty string");
  }
  return it->get<std::string>();
}

}  // namespace

TweetRecord parse_record(std::string_view line, std::size_t line_no) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_no, "malformed JSON");
  }
  if (!obj.is_object()) throw ParseError(line_no, "record is not a JSON object");

  TweetRecord rec;
  rec.tweet_id = id_field(obj, "id", line_no);
  rec.user_id = id_field(obj, "user", line_no);
  const std::string& ts = required_string(obj, "ts", line_no);
  const auto parsed = parse_timestamp(ts);
  if (!parsed) throw ParseError(line_no, "invalid timestamp '" + ts + "'");
  rec.created_at = *parsed;
  rec.text = required_string(obj, "text", line_no);

  if (const auto it = obj.find("hashtags"); it != obj.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError(line_no, "field 'hashtags' is not an array");
    for (const auto& tag : *it) {
      if (!tag.is_string()) throw ParseError(line_no, "hashtag is not a string");
      std::string_view raw = tag.get_ref<const std::string&>();
      if (!raw.empty() && raw.front() == '#') raw.remove_prefix(1);
      if (raw.empty()) continue;
      std::string norm = text::lower(raw);
      if (std::find(rec.hashtags.begin(), rec.hashtags.end(), norm) == rec.hashtags.end()) {
        rec.hashtags.push_back(std::move(norm));
      }
    }
  } else {
    rec.hashtags = extract_hashtags(rec.text);
  }

  const auto day_it = obj.find("day");
  const auto date_it = obj.find("date");
  if (day_it != obj.end() || date_it != obj.end()) {
    if (day_it == obj.end() || date_it == obj.end() || !day_it->is_number_integer() ||
        !date_it->is_string()) {
      throw ParseError(line_no, "'day' and 'date' must appear together");
    }
    const auto date = parse_date(date_it->get_ref<const std::string&>());
    const auto t = day_it->get<long long>();
    if (!date || t < 1) throw ParseError(line_no, "invalid day stamp");
    rec.day = DayStamp{static_cast<DayIndex>(t), *date};
  }
  if (const auto it = obj.find("stance"); it != obj.end()) {
    const auto label = it->is_string() ? parse_stance(it->get_ref<const std::string&>())
                                       : std::nullopt;
    if (!label) throw ParseError(line_no, "invalid stance");
    rec.stance = *label;
  }
  return rec;
}

std::string serialize_record(const TweetRecord& record) {
  nlohmann::ordered_json obj;
  obj["id"] = record.tweet_id;
  obj["user"] = record.user_id;
  obj["ts"] = format_timestamp(record.created_at);
  obj["text"] = record.text;
  obj["hashtags"] = record.hashtags;
  if (record.day) {
    obj["day"] = record.day->t;
    obj["date"] = format_date(record.day->date);
  }
  if (record.stance) obj["stance"] = std::string(to_string(*record.stance));
  // invalid UTF-8 in text is replaced rather than aborting the export
  return obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace electrend
