#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace flexsched {

// Delivery hours of one day that a trading round may negotiate.
struct NegotiablePeriod {
  int day_offset = 0;  // -1 = D-1, 0 = D
  int first_hour = 1;  // 1..24 inclusive
  int last_hour = 24;

  bool operator==(const NegotiablePeriod&) const = default;
};

// One row of the continuous intraday session table. Trading times are minutes
// on a single timeline starting at D-1 00:00, so 24:00 is D 00:00.
struct SidcRound {
  int round_id = 0;
  int open_min = 0;
  int close_min = 0;
  std::vector<NegotiablePeriod> periods;

  bool operator==(const SidcRound&) const = default;
};

// Tradeable delivery slots [tau1, tau2] (1-based, inclusive) of a planning
// window whose first day is D-1, for a consult made at slot h_sidc of D-1.
struct TradingWindow {
  int tau1 = 0;
  int tau2 = 0;
  int h_sidc = 0;

  bool contains(int slot) const { return slot >= tau1 && slot <= tau2; }
  bool operator==(const TradingWindow&) const = default;
};

// The 25 session rows (round 18 split at 15:20), immutable after load.
std::vector<SidcRound> load_calendar();

class MarketCalendar {
 public:
  MarketCalendar();
  explicit MarketCalendar(std::vector<SidcRound> rounds);

  // CSV columns: round_id, open, close, day_offset, first_hour, last_hour.
  // open/close are HH:MM on the D-1 timeline (hours >= 24 fall on day D);
  // rows sharing (round_id, open, close) form one round.
  static MarketCalendar from_csv(const std::filesystem::path& path);
  static MarketCalendar parse_csv(const std::string& text);
  std::string to_csv() const;

  const std::vector<SidcRound>& rounds() const { return rounds_; }

  // Round serving a whole-hour consult slot: the round open at the slot
  // start, otherwise the round open for the majority of the slot.
  // Throws NoActiveRound.
  const SidcRound& round_for_consult(int h_sidc) const;

  // Throws NoActiveRound, BadParams for h_sidc outside 1..24.
  TradingWindow window_for_consult(int h_sidc) const;

 private:
  std::vector<SidcRound> rounds_;
};

}  // namespace flexsched
