#include "flexsched/market_calendar.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "flexsched/errors.hpp"
#include "text_util.hpp"

namespace flexsched {
namespace {

constexpr int kDayMinutes = 24 * 60;

int hm(int h, int m = 0) { return h * 60 + m; }

SidcRound row(int id, int open, int close, std::vector<NegotiablePeriod> periods) {
  return SidcRound{id, open, close, std::move(periods)};
}

int parse_clock(const std::string& field) {
  const auto colon = field.find(':');
  if (colon == std::string::npos) {
    throw ParseError("calendar: bad time '" + field + "'");
  }
  const int h = detail::parse_int(field.substr(0, colon), "calendar hour");
  const int m = detail::parse_int(field.substr(colon + 1), "calendar minute");
  if (h < 0 || m < 0 || m >= 60) throw ParseError("calendar: bad time '" + field + "'");
  return hm(h, m);
}

std::string format_clock(int minutes) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

int parse_day_offset(const std::string& field) {
  if (field == "D-1" || field == "-1") return -1;
  if (field == "D" || field == "0") return 0;
  throw ParseError("calendar: bad day offset '" + field + "'");
}

void check_round(const SidcRound& r) {
  if (r.open_min >= r.close_min) {
    throw ParseError("calendar: round " + std::to_string(r.round_id) + " opens after it closes");
  }
  for (const auto& p : r.periods) {
    if (p.day_offset < -1 || p.day_offset > 0 || p.first_hour < 1 || p.last_hour > 24 ||
        p.first_hour > p.last_hour) {
      throw ParseError("calendar: round " + std::to_string(r.round_id) + " has a bad period");
    }
  }
}

// A round at `shift` minutes covers [open+shift, close+shift) on the consult day.
struct Match {
  const SidcRound* round = nullptr;
  int shift = 0;
};

int overlap(int a0, int a1, int b0, int b1) { return std::max(0, std::min(a1, b1) - std::max(a0, b0)); }

}  // namespace

std::vector<SidcRound> load_calendar() {
  const NegotiablePeriod whole_d{0, 1, 24};
  std::vector<SidcRound> rounds;
  rounds.push_back(row(17, hm(14), hm(15), {{-1, 17, 24}}));
  rounds.push_back(row(18, hm(15), hm(15, 20), {{-1, 18, 24}}));
  rounds.push_back(row(18, hm(15, 20), hm(16), {{-1, 18, 24}, whole_d}));
  for (int id = 19; id <= 24; ++id) {
    const int open = id - 3;  // round 19 trades 16:00-17:00
    rounds.push_back(row(id, hm(open), hm(open + 1), {{-1, id, 24}, whole_d}));
  }
  rounds.push_back(row(1, hm(22, 20), hm(23), {whole_d}));
  rounds.push_back(row(2, hm(23), hm(24), {{0, 2, 24}}));
  for (int id = 3; id <= 16; ++id) {
    const int open = 24 + id - 3;  // round 3 trades D 00:00-01:00
    rounds.push_back(row(id, hm(open), hm(open + 1), {{0, id, 24}}));
  }
  return rounds;
}

MarketCalendar::MarketCalendar() : rounds_(load_calendar()) {}

MarketCalendar::MarketCalendar(std::vector<SidcRound> rounds) : rounds_(std::move(rounds)) {
  for (const auto& r : rounds_) check_round(r);
}

MarketCalendar MarketCalendar::parse_csv(const std::string& text) {
  std::vector<SidcRound> rounds;
  std::map<std::tuple<int, int, int>, std::size_t> index;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split(line, ',');
    if (fields.size() != 6) {
      throw ParseError("calendar line " + std::to_string(line_no) + ": expected 6 fields");
    }
    if (line_no == 1 && fields[0] == "round_id") continue;
    const int id = detail::parse_int(fields[0], "round_id");
    const int open = parse_clock(fields[1]);
    const int close = parse_clock(fields[2]);
    NegotiablePeriod period{parse_day_offset(fields[3]), detail::parse_int(fields[4], "first_hour"),
                            detail::parse_int(fields[5], "last_hour")};
    const auto key = std::make_tuple(id, open, close);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, rounds.size());
      rounds.push_back(row(id, open, close, {period}));
    } else {
      rounds[it->second].periods.push_back(period);
    }
  }
  if (rounds.empty()) throw ParseError("calendar: no rounds");
  return MarketCalendar(std::move(rounds));
}

MarketCalendar MarketCalendar::from_csv(const std::filesystem::path& path) {
  return parse_csv(detail::read_file(path));
}

std::string MarketCalendar::to_csv() const {
  std::ostringstream out;
  out << "round_id,open,close,day_offset,first_hour,last_hour\n";
  for (const auto& r : rounds_) {
    for (const auto& p : r.periods) {
      out << r.round_id << ',' << format_clock(r.open_min) << ',' << format_clock(r.close_min) << ','
          << (p.day_offset < 0 ? "D-1" : "D") << ',' << p.first_hour << ',' << p.last_hour << '\n';
    }
  }
  return out.str();
}

namespace {

Match find_round(const std::vector<SidcRound>& rounds, int h_sidc) {
  if (h_sidc < 1 || h_sidc > 24) {
    throw BadParams("consult slot must be in 1..24, got " + std::to_string(h_sidc));
  }
  const int start = (h_sidc - 1) * 60;
  const int end = start + 60;
  for (const int shift : {0, -kDayMinutes}) {
    for (const auto& r : rounds) {
      if (r.open_min + shift <= start && start < r.close_min + shift) return {&r, shift};
    }
  }
  Match best;
  int best_overlap = 30;  // strictly more than half the slot
  for (const int shift : {0, -kDayMinutes}) {
    for (const auto& r : rounds) {
      const int o = overlap(start, end, r.open_min + shift, r.close_min + shift);
      if (o > best_overlap) {
        best = {&r, shift};
        best_overlap = o;
      }
    }
  }
  if (best.round == nullptr) {
    throw NoActiveRound("no SIDC round is open at consult slot " + std::to_string(h_sidc));
  }
  return best;
}

}  // namespace

const SidcRound& MarketCalendar::round_for_consult(int h_sidc) const {
  return *find_round(rounds_, h_sidc).round;
}

TradingWindow MarketCalendar::window_for_consult(int h_sidc) const {
  const Match m = find_round(rounds_, h_sidc);
  // Rows traded on day D, matched one day earlier, negotiate the consult day.
  const int day_shift = m.shift < 0 ? -1 : 0;
  int lo = 1 << 30;
  int hi = -1;
  for (const auto& p : m.round->periods) {
    const int day = p.day_offset + day_shift;
    if (day < -1) continue;
    const int base = (day + 1) * 24;
    lo = std::min(lo, base + p.first_hour);
    hi = std::max(hi, base + p.last_hour);
  }
  if (hi < 0) {
    throw NoActiveRound("round " + std::to_string(m.round->round_id) +
                        " negotiates no slot inside the planning window");
  }
  return TradingWindow{lo, hi, h_sidc};
}

}  // namespace flexsched
