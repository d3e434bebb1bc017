#include "electrend/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "electrend/errors.hpp"
#include "electrend/io.hpp"
#include "electrend/parallel.hpp"

namespace electrend {

namespace {

constexpr int kCampVocabulary = 200;
constexpr int kSharedVocabulary = 500;
constexpr int kCampTags = 20;
constexpr int kSharedTags = 20;
constexpr double kSharedTagRate = 0.1;

constexpr std::array<std::string_view, 10> kSyllables = {"ka", "lo", "mi", "nu", "pe",
                                                         "ra", "si", "to", "ve", "zu"};

constexpr std::array<std::string_view, 10> kCandidateTerms = {
    "Alberto Fernandez", "alferdez",     "CFK",    "Kirchner",        "@mauriciomacri",
    "Macri",             "Pichetto",     "Lavagna", "@MiguelPichetto", "@CFKArgentina"};

const std::array<std::vector<std::string_view>, 3>& seed_tags() {
  static const std::array<std::vector<std::string_view>, 3> tags = {
      std::vector<std::string_view>{"FuerzaCristina", "Nestorvuelva", "Nestorpudo",
                                    "NuncamasMacri"},
      std::vector<std::string_view>{"Cambiemos", "MM2019"},
      std::vector<std::string_view>{"Lavagna"}};
  return tags;
}

// Four-syllable pseudo-word for an index below 10000.
std::string pseudo_word(int index) {
  std::string out;
  int divisor = 1000;
  for (int i = 0; i < 4; ++i) {
    out += kSyllables[static_cast<std::size_t>((index / divisor) % 10)];
    divisor /= 10;
  }
  return out;
}

std::string camp_word(Camp c, int k) { return pseudo_word(static_cast<int>(c) * 1000 + k); }
std::string shared_word(int k) { return pseudo_word(3000 + k); }
std::string camp_tag(Camp c, int k) { return pseudo_word(5000 + static_cast<int>(c) * 100 + k); }
std::string shared_tag(int k) { return pseudo_word(6000 + k); }

Camp camp_at(double latent, const StanceMix& mix) {
  if (latent < mix.ff) return Camp::FF;
  if (latent < mix.ff + mix.mp) return Camp::MP;
  return Camp::Third;
}

Camp opposing(Camp c) { return c == Camp::FF ? Camp::MP : Camp::FF; }

std::mt19937_64 user_stream(std::uint64_t seed, std::size_t user, std::uint32_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(user), static_cast<std::uint32_t>(user >> 32),
                    salt};
  return std::mt19937_64(seq);
}

std::string tweet_text(std::mt19937_64& rng, const ElectorateSpec& spec,
                       std::optional<Camp> camp) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> candidate(0, kCandidateTerms.size() - 1);
  std::uniform_int_distribution<int> camp_vocab(0, kCampVocabulary - 1);
  std::uniform_int_distribution<int> shared_vocab(0, kSharedVocabulary - 1);
  std::uniform_int_distribution<int> camp_tag_pick(0, kCampTags - 1);
  std::uniform_int_distribution<int> shared_tag_pick(0, kSharedTags - 1);

  std::vector<std::string> words;
  words.emplace_back(kCandidateTerms[candidate(rng)]);
  if (camp) {
    for (int i = 0; i < 3; ++i) words.push_back(camp_word(*camp, camp_vocab(rng)));
  }
  words.push_back(shared_word(shared_vocab(rng)));
  words.push_back(shared_word(shared_vocab(rng)));
  std::shuffle(words.begin() + 1, words.end(), rng);

  std::string text = fmt::format("{}", fmt::join(words, " "));
  if (camp) {
    if (unit(rng) < spec.seed_tag_rate) {
      const auto& tags = seed_tags()[static_cast<std::size_t>(*camp)];
      std::uniform_int_distribution<std::size_t> pick(0, tags.size() - 1);
      text += fmt::format(" #{}", tags[pick(rng)]);
    }
    if (unit(rng) < spec.camp_tag_rate) {
      std::uniform_int_distribution<int> how_many(1, 3);
      const int n = how_many(rng);
      for (int i = 0; i < n; ++i) text += " #" + camp_tag(*camp, camp_tag_pick(rng));
    }
  }
  if (unit(rng) < kSharedTagRate) text += " #" + shared_tag(shared_tag_pick(rng));
  return text;
}

struct UserOutput {
  std::vector<TweetRecord> records;
  std::vector<StanceLabel> labels;
};

std::string user_id_of(std::size_t index) { return fmt::format("u{:06d}", index); }

void emit(UserOutput& out, std::size_t user, std::size_t& seq, const std::string& user_id,
          Timestamp ts, std::string text, StanceLabel label) {
  if (seq >= 1000000) throw DataError("synthetic user " + user_id + " exceeds 10^6 tweets");
  TweetRecord r;
  r.tweet_id = fmt::format("{:06d}{:06d}", user, seq++);
  r.user_id = user_id;
  r.created_at = ts;
  r.hashtags = extract_hashtags(text);
  r.text = std::move(text);
  out.records.push_back(std::move(r));
  out.labels.push_back(label);
}

UserOutput generate_user(const ElectorateSpec& spec, std::size_t index, UserTruth& truth) {
  UserOutput out;
  auto rng = user_stream(spec.seed, index, 0x5eed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  truth.user_id = user_id_of(index);
  truth.latent = unit(rng);
  truth.is_bot = unit(rng) < spec.bot_fraction;
  truth.stance = camp_at(truth.latent, spec.mix_on(spec.days));

  double rate = spec.mean_rate;
  if (spec.heterogeneity > 0) {
    const double shape = 1.0 / (spec.heterogeneity * spec.heterogeneity);
    std::gamma_distribution<double> gamma(shape, spec.mean_rate / shape);
    rate = gamma(rng);
  } else {
    (void)unit(rng);
  }

  std::size_t seq = 0;
  for (int d = 1; d <= spec.days; ++d) {
    const Timestamp day_start{std::chrono::sys_seconds(spec.start + std::chrono::days(d - 1))};
    const Camp base = camp_at(truth.latent, spec.mix_on(d));

    if (truth.is_bot) {
      if (unit(rng) >= spec.bot_burst_prob) continue;
      const int span = spec.bot_burst_minutes * 60;
      std::uniform_int_distribution<int> start_at(0, 86400 - span);
      std::uniform_int_distribution<int> offset(0, span - 1);
      const int begin = start_at(rng);
      const std::string text = tweet_text(rng, spec, base);
      std::vector<int> offsets(static_cast<std::size_t>(spec.bot_burst_size));
      for (auto& o : offsets) o = begin + offset(rng);
      std::sort(offsets.begin(), offsets.end());
      for (int o : offsets) {
        emit(out, index, seq, truth.user_id, day_start + std::chrono::seconds(o), text,
             stance_for(base));
      }
      continue;
    }

    std::poisson_distribution<int> daily(rate);
    const int n = rate > 0 ? daily(rng) : 0;
    std::vector<int> seconds(static_cast<std::size_t>(n));
    std::uniform_int_distribution<int> second_of_day(0, 86399);
    for (auto& s : seconds) s = second_of_day(rng);
    std::sort(seconds.begin(), seconds.end());
    for (int s : seconds) {
      std::optional<Camp> camp = base;
      if (unit(rng) < spec.neutral_rate) {
        camp.reset();
      } else if (base != Camp::Third && unit(rng) < spec.crosstalk) {
        camp = opposing(base);
      }
      auto text = tweet_text(rng, spec, camp);
      emit(out, index, seq, truth.user_id, day_start + std::chrono::seconds(s), std::move(text),
           camp ? stance_for(*camp) : StanceLabel::Neutral);
    }
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || !std::isfinite(v)) {
    throw UsageError(fmt::format("spec key '{}': '{}' is not a number", key, value));
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) {
    throw UsageError(fmt::format("spec key '{}': '{}' is not an integer", key, value));
  }
  return static_cast<long long>(v);
}

StanceMix parse_mix(const std::string& key, std::istringstream& in) {
  StanceMix m;
  std::string a, b, c, extra;
  if (!(in >> a >> b >> c) || (in >> extra)) {
    throw UsageError(fmt::format("spec key '{}' expects three proportions", key));
  }
  m.ff = parse_double(key, a);
  m.mp = parse_double(key, b);
  m.third = parse_double(key, c);
  return m;
}

}  // namespace

void StanceMix::validate() const {
  for (double p : {ff, mp, third}) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("stance proportions must lie in [0, 1]");
  }
  if (std::abs(ff + mp + third - 1.0) > 1e-9) {
    throw UsageError(fmt::format("stance proportions sum to {}, not 1", ff + mp + third));
  }
}

void ElectorateSpec::validate() const {
  mix.validate();
  for (const auto& [day, m] : drift) {
    if (day < 1) throw UsageError("drift day must be >= 1");
    m.validate();
  }
  if (n_users > 999999) throw UsageError("n_users must be below 10^6");
  if (days < 1) throw UsageError("days must be >= 1");
  if (!(mean_rate >= 0)) throw UsageError("mean_rate must be >= 0");
  if (!(heterogeneity >= 0)) throw UsageError("heterogeneity must be >= 0");
  auto probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError(fmt::format("{} must lie in [0, 1]", name));
  };
  if (!(crosstalk >= 0.0 && crosstalk < 0.5)) throw UsageError("crosstalk must lie in [0, 0.5)");
  probability(neutral_rate, "neutral_rate");
  probability(seed_tag_rate, "seed_tag_rate");
  probability(camp_tag_rate, "camp_tag_rate");
  probability(bot_fraction, "bot_fraction");
  probability(bot_burst_prob, "bot_burst_prob");
  if (bot_burst_size < 1) throw UsageError("bot_burst_size must be >= 1");
  if (bot_burst_minutes < 1 || bot_burst_minutes > 1440) {
    throw UsageError("bot_burst_minutes must lie in [1, 1440]");
  }
}

const StanceMix& ElectorateSpec::mix_on(DayIndex day) const {
  auto it = drift.upper_bound(day);
  if (it == drift.begin()) return mix;
  return std::prev(it)->second;
}

std::string ElectorateSpec::run_id() const {
  std::ostringstream text;
  write_spec(text, *this);
  io::Sha256 h;
  h.update(text.str());
  return h.hex_digest().substr(0, 16);
}

ElectorateSpec parse_spec(std::istream& in) {
  ElectorateSpec spec;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header) {
      if (t != "electrend-electorate 1") {
        throw UsageError("spec must start with 'electrend-electorate 1'");
      }
      header = true;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(fmt::format("spec line {}: expected 'key = value'", line_no));
    }
    const auto key = trim(std::string_view(t).substr(0, eq));
    const auto value = trim(std::string_view(t).substr(eq + 1));
    if (key == "n_users") {
      const auto n = parse_integer(key, value);
      if (n < 0) throw UsageError("n_users must be >= 0");
      spec.n_users = static_cast<std::size_t>(n);
    } else if (key == "days") {
      spec.days = static_cast<int>(parse_integer(key, value));
    } else if (key == "start") {
      auto d = parse_date(value);
      if (!d) throw UsageError(fmt::format("spec key 'start': bad date '{}'", value));
      spec.start = *d;
    } else if (key == "mix") {
      std::istringstream fields(value);
      spec.mix = parse_mix(key, fields);
    } else if (key == "drift") {
      std::istringstream fields(value);
      std::string day;
      fields >> day;
      const auto d = static_cast<DayIndex>(parse_integer(key, day));
      spec.drift[d] = parse_mix(key, fields);
    } else if (key == "mean_rate") {
      spec.mean_rate = parse_double(key, value);
    } else if (key == "heterogeneity") {
      spec.heterogeneity = parse_double(key, value);
    } else if (key == "crosstalk") {
      spec.crosstalk = parse_double(key, value);
    } else if (key == "neutral_rate") {
      spec.neutral_rate = parse_double(key, value);
    } else if (key == "seed_tag_rate") {
      spec.seed_tag_rate = parse_double(key, value);
    } else if (key == "camp_tag_rate") {
      spec.camp_tag_rate = parse_double(key, value);
    } else if (key == "bot_fraction") {
      spec.bot_fraction = parse_double(key, value);
    } else if (key == "bot_burst_prob") {
      spec.bot_burst_prob = parse_double(key, value);
    } else if (key == "bot_burst_size") {
      spec.bot_burst_size = static_cast<int>(parse_integer(key, value));
    } else if (key == "bot_burst_minutes") {
      spec.bot_burst_minutes = static_cast<int>(parse_integer(key, value));
    } else if (key == "seed") {
      std::size_t used = 0;
      try {
        spec.seed = std::stoull(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size()) throw UsageError("spec key 'seed' must be an unsigned integer");
    } else {
      throw UsageError(fmt::format("spec line {}: unknown key '{}'", line_no, key));
    }
  }
  if (!header) throw UsageError("empty spec");
  spec.validate();
  return spec;
}

ElectorateSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open spec '" + path.string() + "'");
  return parse_spec(in);
}

void write_spec(std::ostream& out, const ElectorateSpec& spec) {
  out << "electrend-electorate 1\n";
  out << fmt::format("n_users = {}\n", spec.n_users);
  out << fmt::format("days = {}\n", spec.days);
  out << fmt::format("start = {}\n", format_date(spec.start));
  out << fmt::format("mix = {} {} {}\n", spec.mix.ff, spec.mix.mp, spec.mix.third);
  for (const auto& [day, m] : spec.drift) {
    out << fmt::format("drift = {} {} {} {}\n", day, m.ff, m.mp, m.third);
  }
  out << fmt::format("mean_rate = {}\n", spec.mean_rate);
  out << fmt::format("heterogeneity = {}\n", spec.heterogeneity);
  out << fmt::format("crosstalk = {}\n", spec.crosstalk);
  out << fmt::format("neutral_rate = {}\n", spec.neutral_rate);
  out << fmt::format("seed_tag_rate = {}\n", spec.seed_tag_rate);
  out << fmt::format("camp_tag_rate = {}\n", spec.camp_tag_rate);
  out << fmt::format("bot_fraction = {}\n", spec.bot_fraction);
  out << fmt::format("bot_burst_prob = {}\n", spec.bot_burst_prob);
  out << fmt::format("bot_burst_size = {}\n", spec.bot_burst_size);
  out << fmt::format("bot_burst_minutes = {}\n", spec.bot_burst_minutes);
  out << fmt::format("seed = {}\n", spec.seed);
}

Camp GroundTruth::stance_on(const UserTruth& user, DayIndex day) const {
  return camp_at(user.latent, spec.mix_on(day));
}

StanceMix GroundTruth::proportions_on(DayIndex day) const {
  std::array<std::size_t, 3> n{};
  std::size_t total = 0;
  for (const auto& u : users) {
    if (u.is_bot) continue;
    ++n[static_cast<std::size_t>(stance_on(u, day))];
    ++total;
  }
  if (total == 0) return StanceMix{0, 0, 0};
  const double t = static_cast<double>(total);
  return StanceMix{static_cast<double>(n[0]) / t, static_cast<double>(n[1]) / t,
                   static_cast<double>(n[2]) / t};
}

SyntheticElectorate generate(const ElectorateSpec& spec, unsigned workers) {
  spec.validate();
  SyntheticElectorate out;
  out.truth.spec = spec;
  out.truth.run_id = spec.run_id();
  out.truth.users.resize(spec.n_users);

  std::vector<UserOutput> per_user(spec.n_users);
  parallel_shards(spec.n_users, resolve_workers(workers),
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i) {
                      per_user[i] = generate_user(spec, i, out.truth.users[i]);
                    }
                  });

  std::size_t total = 0;
  for (const auto& u : per_user) total += u.records.size();
  std::vector<TweetRecord> records;
  std::vector<StanceLabel> labels;
  records.reserve(total);
  labels.reserve(total);
  for (auto& u : per_user) {
    std::move(u.records.begin(), u.records.end(), std::back_inserter(records));
    labels.insert(labels.end(), u.labels.begin(), u.labels.end());
    u = {};
  }

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].created_at != records[b].created_at) {
      return records[a].created_at < records[b].created_at;
    }
    return records[a].tweet_id < records[b].tweet_id;
  });
  out.corpus.reserve(total);
  out.tweet_labels.reserve(total);
  for (std::size_t i : order) {
    out.corpus.push_back(std::move(records[i]));
    out.tweet_labels.push_back(labels[i]);
  }
  return out;
}

void write_truth_csv(std::ostream& out, const GroundTruth& truth) {
  out << "user_id,stance,is_bot\n";
  for (const auto& u : truth.users) {
    out << u.user_id << ',' << to_string(u.stance) << ',' << (u.is_bot ? 1 : 0) << '\n';
  }
}

double RecoveryReport::max_final_error() const {
  return std::max(final_error_ff.value_or(std::numeric_limits<double>::infinity()),
                  final_error_mp.value_or(std::numeric_limits<double>::infinity()));
}

RecoveryReport recovery_report(const TrendSeries& estimates, const GroundTruth& truth) {
  if (!estimates.run_id.empty() && estimates.run_id != truth.run_id) {
    throw DataError(fmt::format("series run '{}' does not match truth run '{}'",
                                estimates.run_id, truth.run_id));
  }
  RecoveryReport report;
  for (const auto& p : estimates.points) {
    RecoveryDay d;
    d.day = p.day;
    const auto mix = truth.proportions_on(p.day);
    d.truth_ff = 100.0 * mix.ff;
    d.truth_mp = 100.0 * mix.mp;
    if (p.pct_ff) d.error_ff = std::abs(*p.pct_ff - d.truth_ff);
    if (p.pct_mp) d.error_mp = std::abs(*p.pct_mp - d.truth_mp);
    report.days.push_back(d);
  }
  if (!report.days.empty()) {
    report.final_error_ff = report.days.back().error_ff;
    report.final_error_mp = report.days.back().error_mp;
  }
  for (auto it = report.days.rbegin(); it != report.days.rend(); ++it) {
    const bool ok = it->error_ff && it->error_mp && *it->error_ff < 1.0 && *it->error_mp < 1.0;
    if (!ok) break;
    report.convergence_day = it->day;
  }
  return report;
}

void write_recovery_csv(std::ostream& out, const RecoveryReport& report) {
  auto cell = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.4f}", *v) : std::string();
  };
  out << "T,truth_ff,truth_mp,error_ff,error_mp\n";
  for (const auto& d : report.days) {
    out << fmt::format("{},{:.4f},{:.4f},{},{}\n", d.day, d.truth_ff, d.truth_mp,
                       cell(d.error_ff), cell(d.error_mp));
  }
}

}  // namespace electrend
