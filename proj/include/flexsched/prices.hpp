#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexsched/model_builder.hpp"

namespace flexsched {

using Date = std::chrono::sys_days;

// Throws ParseError for anything but YYYY-MM-DD.
Date parse_date(const std::string& text);
std::string format_date(Date date);

inline constexpr int kSlotsPerDay = 24;

// One row of a daily price file. `sidc` is NaN outside trading sessions.
struct PriceRecord {
  Date date;
  int slot = 1;  // 1..24
  double day_ahead_forecast = 0;
  double day_ahead_actual = 0;
  double sidc = 0;
};

struct DayPrices {
  std::array<double, kSlotsPerDay> day_ahead_forecast{};
  std::array<double, kSlotsPerDay> day_ahead_actual{};
  std::array<double, kSlotsPerDay> sidc{};
};

class PriceStore {
 public:
  void put(Date date, const DayPrices& prices) { days_[date] = prices; }
  bool contains(Date date) const { return days_.count(date) != 0; }
  const DayPrices& at(Date date) const;
  std::size_t size() const { return days_.size(); }
  bool empty() const { return days_.empty(); }
  Date first() const;
  Date last() const;
  const std::map<Date, DayPrices>& days() const { return days_; }

  std::vector<PriceRecord> records() const;

  // First date in [from, from + count) without prices, if any.
  std::optional<Date> first_missing(Date from, int count) const;

  // Horizon prices for a planning window whose first day is `first_day`
  // (day D-1). Days D-1 and D use the cleared day-ahead prices, later days
  // the forecast column; SIDC prices are the recorded ones throughout.
  // Throws MissingPrices naming the first absent date.
  PriceSet price_set(Date first_day, int horizon_slots) const;

 private:
  std::map<Date, DayPrices> days_;
};

// Daily files named YYYY-MM-DD.csv with header
// slot,day_ahead_forecast,day_ahead_actual,sidc and slots 1..24; an empty
// sidc field means no session. Throws ParseError (file and line), GapError
// naming missing dates between the first and last file, IoError.
PriceStore ingest_prices(const std::filesystem::path& dir);
DayPrices parse_day_file(const std::string& text, const std::string& file_label = "prices");

std::string day_file_text(const DayPrices& prices);
void export_prices(const PriceStore& store, const std::filesystem::path& dir);

enum class SynthKind { Flat, Sinusoid, MatchMoments };
SynthKind parse_synth_kind(const std::string& name);

struct SynthParams {
  double price = 50;      // flat
  double mean = 60;       // sinusoid
  double amplitude = 20;  // sinusoid, peak slot 7 and trough slot 19
  double noise_sd = 0;    // sinusoid: Gaussian noise added per slot and column
  const PriceStore* source = nullptr;  // match-moments
  std::uint64_t seed = 1;
};

// Deterministic for a given seed. Match-moments draws Gaussian prices and
// rescales each column to the source column's mean and standard deviation.
// Throws BadParams.
PriceStore synth_prices(SynthKind kind, const SynthParams& params, Date start, int days);

// Converts OMIE hourly marginal price files (`YYYY;MM;DD;H;PT;ES;` rows, any
// header or `*` lines ignored) into a store. The Spanish price is used. With
// no forecast file the forecast column repeats the cleared price; with no
// SIDC file the sidc column is empty. 23-hour days repeat the hour before
// the gap; 25-hour days average the repeated hour.
PriceStore convert_omie(const std::vector<std::filesystem::path>& day_ahead_files,
                        const std::vector<std::filesystem::path>& sidc_files = {},
                        const std::vector<std::filesystem::path>& forecast_files = {});

}  // namespace flexsched
