#include "flexsched/prices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "flexsched/errors.hpp"
#include "text_util.hpp"

namespace flexsched {

using namespace std::chrono;

Date parse_date(const std::string& text) {
  const auto fail = [&] { return ParseError("bad date '" + text + "' (expected YYYY-MM-DD)"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw fail();
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (text[i] < '0' || text[i] > '9') throw fail();
  }
  const year_month_day ymd{year{std::stoi(text.substr(0, 4))}, month{static_cast<unsigned>(std::stoi(text.substr(5, 2)))},
                           day{static_cast<unsigned>(std::stoi(text.substr(8, 2)))}};
  if (!ymd.ok()) throw fail();
  return sys_days{ymd};
}

std::string format_date(Date date) {
  const year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

// --- store ----------------------------------------------------------------

const DayPrices& PriceStore::at(Date date) const {
  auto it = days_.find(date);
  if (it == days_.end()) throw MissingPrices("no prices for " + format_date(date));
  return it->second;
}

Date PriceStore::first() const {
  if (days_.empty()) throw MissingPrices("price store is empty");
  return days_.begin()->first;
}

Date PriceStore::last() const {
  if (days_.empty()) throw MissingPrices("price store is empty");
  return days_.rbegin()->first;
}

std::vector<PriceRecord> PriceStore::records() const {
  std::vector<PriceRecord> out;
  out.reserve(days_.size() * kSlotsPerDay);
  for (const auto& [date, p] : days_) {
    for (int h = 0; h < kSlotsPerDay; ++h) {
      out.push_back({date, h + 1, p.day_ahead_forecast[h], p.day_ahead_actual[h], p.sidc[h]});
    }
  }
  return out;
}

std::optional<Date> PriceStore::first_missing(Date from, int count) const {
  for (int d = 0; d < count; ++d) {
    if (!contains(from + std::chrono::days{d})) return from + std::chrono::days{d};
  }
  return std::nullopt;
}

PriceSet PriceStore::price_set(Date first_day, int horizon_slots) const {
  const int span = (horizon_slots + kSlotsPerDay - 1) / kSlotsPerDay;
  if (auto gap = first_missing(first_day, span)) {
    throw MissingPrices("no prices for " + format_date(*gap) + " (planning window from " + format_date(first_day) +
                        " needs " + std::to_string(span) + " days)");
  }
  PriceSet out;
  out.day_ahead_eur_mwh.reserve(static_cast<std::size_t>(horizon_slots));
  out.sidc_eur_mwh.reserve(static_cast<std::size_t>(horizon_slots));
  for (int t = 0; t < horizon_slots; ++t) {
    const int d = t / kSlotsPerDay;
    const auto& day = at(first_day + std::chrono::days{d});
    const int h = t % kSlotsPerDay;
    out.day_ahead_eur_mwh.push_back(d < 2 ? day.day_ahead_actual[h] : day.day_ahead_forecast[h]);
    out.sidc_eur_mwh.push_back(day.sidc[h]);
  }
  return out;
}

// --- daily files ----------------------------------------------------------

DayPrices parse_day_file(const std::string& text, const std::string& label) {
  DayPrices p;
  std::array<bool, kSlotsPerDay> seen{};
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header = false;
  const auto fail = [&](const std::string& why) {
    return ParseError(label + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (!header) {
      if (f != std::vector<std::string>{"slot", "day_ahead_forecast", "day_ahead_actual", "sidc"}) {
        throw fail("expected header slot,day_ahead_forecast,day_ahead_actual,sidc");
      }
      header = true;
      continue;
    }
    if (f.size() != 4) throw fail("expected 4 fields, got " + std::to_string(f.size()));
    int slot = 0;
    double fc = 0, ac = 0, sidc = NAN;
    try {
      slot = detail::parse_int(f[0], "slot");
      fc = detail::parse_double(f[1], "day_ahead_forecast");
      ac = detail::parse_double(f[2], "day_ahead_actual");
      if (!f[3].empty()) sidc = detail::parse_double(f[3], "sidc");
    } catch (const ParseError& e) {
      throw fail(e.what());
    }
    if (slot < 1 || slot > kSlotsPerDay) throw fail("slot " + std::to_string(slot) + " outside 1..24");
    if (seen[static_cast<std::size_t>(slot - 1)]) throw fail("slot " + std::to_string(slot) + " repeated");
    if (!std::isfinite(fc) || !std::isfinite(ac) || (!f[3].empty() && !std::isfinite(sidc))) {
      throw fail("prices must be finite");
    }
    seen[static_cast<std::size_t>(slot - 1)] = true;
    p.day_ahead_forecast[static_cast<std::size_t>(slot - 1)] = fc;
    p.day_ahead_actual[static_cast<std::size_t>(slot - 1)] = ac;
    p.sidc[static_cast<std::size_t>(slot - 1)] = sidc;
  }
  if (!header) throw fail("empty file");
  for (int h = 0; h < kSlotsPerDay; ++h) {
    if (!seen[static_cast<std::size_t>(h)]) {
      throw ParseError(label + ": slot " + std::to_string(h + 1) + " missing");
    }
  }
  return p;
}

PriceStore ingest_prices(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("price directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  PriceStore store;
  for (const auto& file : files) {
    Date date;
    try {
      date = parse_date(file.stem().string());
    } catch (const ParseError&) {
      throw ParseError(file.string() + ": file name is not a YYYY-MM-DD date");
    }
    store.put(date, parse_day_file(detail::read_file(file), file.string()));
  }
  if (store.empty()) throw IoError("no YYYY-MM-DD.csv price files in " + dir.string());
  std::vector<std::string> missing;
  for (Date d = store.first(); d <= store.last(); d += std::chrono::days{1}) {
    if (!store.contains(d)) missing.push_back(format_date(d));
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 10) list += ", ...";
    throw GapError(std::to_string(missing.size()) + " missing day(s) in " + dir.string() + ": " + list);
  }
  return store;
}

std::string day_file_text(const DayPrices& p) {
  std::string out = "slot,day_ahead_forecast,day_ahead_actual,sidc\n";
  for (std::size_t h = 0; h < kSlotsPerDay; ++h) {
    out += std::to_string(h + 1) + "," + detail::format_double(p.day_ahead_forecast[h]) + "," +
           detail::format_double(p.day_ahead_actual[h]) + "," +
           (std::isfinite(p.sidc[h]) ? detail::format_double(p.sidc[h]) : "") + "\n";
  }
  return out;
}

void export_prices(const PriceStore& store, const std::filesystem::path& dir) {
  for (const auto& [date, p] : store.days()) detail::write_file(dir / (format_date(date) + ".csv"), day_file_text(p));
}

// --- synthetic prices -----------------------------------------------------

SynthKind parse_synth_kind(const std::string& name) {
  if (name == "flat") return SynthKind::Flat;
  if (name == "sinusoid") return SynthKind::Sinusoid;
  if (name == "match-moments") return SynthKind::MatchMoments;
  throw BadParams("unknown price generator '" + name + "' (flat, sinusoid, match-moments)");
}

namespace {

struct Moments {
  double mean = 0;
  double sd = 0;
  std::size_t count = 0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    m.mean += x;
    ++m.count;
  }
  if (m.count == 0) return m;
  m.mean /= static_cast<double>(m.count);
  double ss = 0;
  for (double x : v) {
    if (std::isfinite(x)) ss += (x - m.mean) * (x - m.mean);
  }
  m.sd = std::sqrt(ss / static_cast<double>(m.count));
  return m;
}

// `count` Gaussian draws rescaled to exactly the target sample moments.
std::vector<double> matched(std::mt19937_64& rng, std::size_t count, const Moments& target) {
  std::normal_distribution<double> z(0, 1);
  std::vector<double> v(count);
  for (auto& x : v) x = z(rng);
  const auto got = moments(v);
  for (auto& x : v) x = target.mean + (got.sd > 0 ? target.sd * (x - got.mean) / got.sd : 0.0);
  return v;
}

}  // namespace

PriceStore synth_prices(SynthKind kind, const SynthParams& params, Date start, int count) {
  if (count < 1) throw BadParams("days must be positive");
  PriceStore store;
  std::mt19937_64 rng(params.seed);
  switch (kind) {
    case SynthKind::Flat: {
      if (!std::isfinite(params.price)) throw BadParams("flat price must be finite");
      DayPrices p;
      p.day_ahead_forecast.fill(params.price);
      p.day_ahead_actual.fill(params.price);
      p.sidc.fill(params.price);
      for (int d = 0; d < count; ++d) store.put(start + std::chrono::days{d}, p);
      return store;
    }
    case SynthKind::Sinusoid: {
      if (!std::isfinite(params.mean) || !(params.amplitude >= 0) || !(params.noise_sd >= 0)) {
        throw BadParams("sinusoid needs a finite mean and non-negative amplitude and noise");
      }
      std::normal_distribution<double> noise(0, 1);
      for (int d = 0; d < count; ++d) {
        DayPrices p;
        for (std::size_t h = 0; h < kSlotsPerDay; ++h) {
          const double base =
              params.mean + params.amplitude * std::sin(2 * std::numbers::pi * static_cast<double>(h) / kSlotsPerDay);
          const auto draw = [&] { return params.noise_sd > 0 ? params.noise_sd * noise(rng) : 0.0; };
          p.day_ahead_actual[h] = base + draw();
          p.day_ahead_forecast[h] = base + draw();
          p.sidc[h] = base + draw();
        }
        store.put(start + std::chrono::days{d}, p);
      }
      return store;
    }
    case SynthKind::MatchMoments: {
      if (!params.source || params.source->empty()) throw BadParams("match-moments needs a source price set");
      std::vector<double> fc, ac, sidc;
      for (const auto& r : params.source->records()) {
        fc.push_back(r.day_ahead_forecast);
        ac.push_back(r.day_ahead_actual);
        sidc.push_back(r.sidc);
      }
      const auto n = static_cast<std::size_t>(count) * kSlotsPerDay;
      const auto m_sidc = moments(sidc);
      const auto new_fc = matched(rng, n, moments(fc));
      const auto new_ac = matched(rng, n, moments(ac));
      const auto new_sidc = m_sidc.count ? matched(rng, n, m_sidc) : std::vector<double>(n, NAN);
      for (int d = 0; d < count; ++d) {
        DayPrices p;
        for (std::size_t h = 0; h < kSlotsPerDay; ++h) {
          const std::size_t i = static_cast<std::size_t>(d) * kSlotsPerDay + h;
          p.day_ahead_forecast[h] = new_fc[i];
          p.day_ahead_actual[h] = new_ac[i];
          p.sidc[h] = new_sidc[i];
        }
        store.put(start + std::chrono::days{d}, p);
      }
      return store;
    }
  }
  throw BadParams("unknown price generator");
}

// --- OMIE conversion ------------------------------------------------------

namespace {

using HourlySeries = std::map<Date, std::vector<double>>;

HourlySeries read_omie(const std::vector<std::filesystem::path>& files) {
  HourlySeries out;
  for (const auto& file : files) {
    std::istringstream in(detail::read_file(file));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = detail::trim(line);
      if (line.empty() || line[0] == '*') continue;
      auto f = detail::split(line, ';');
      while (!f.empty() && f.back().empty()) f.pop_back();
      if (f.size() < 6 || f[0].size() != 4 || f[0].find_first_not_of("0123456789") != std::string::npos) {
        continue;  // header lines such as MARGINALPDBC;
      }
      const auto label = file.string() + ":" + std::to_string(line_no);
      try {
        for (auto& s : f) std::replace(s.begin(), s.end(), ',', '.');
        const year_month_day ymd{year{detail::parse_int(f[0], "year")},
                                 month{static_cast<unsigned>(detail::parse_int(f[1], "month"))},
                                 day{static_cast<unsigned>(detail::parse_int(f[2], "day"))}};
        if (!ymd.ok()) throw ParseError("bad date");
        const int hour = detail::parse_int(f[3], "hour");
        const double price = detail::parse_double(f[5], "price");
        auto& v = out[sys_days{ymd}];
        if (hour != static_cast<int>(v.size()) + 1) throw ParseError("hours must run 1, 2, ... within a day");
        v.push_back(price);
      } catch (const ParseError& e) {
        throw ParseError(label + ": " + e.what());
      }
    }
  }
  return out;
}

std::array<double, kSlotsPerDay> to_24(const std::vector<double>& v, Date date) {
  std::array<double, kSlotsPerDay> out{};
  if (v.size() == 24) {
    std::copy(v.begin(), v.end(), out.begin());
  } else if (v.size() == 23) {
    // Spring change: hour 3 is skipped, repeat hour 2.
    out[0] = v[0];
    out[1] = v[1];
    out[2] = v[1];
    std::copy(v.begin() + 2, v.end(), out.begin() + 3);
  } else if (v.size() == 25) {
    // Autumn change: hour 3 occurs twice.
    out[0] = v[0];
    out[1] = v[1];
    out[2] = 0.5 * (v[2] + v[3]);
    std::copy(v.begin() + 4, v.end(), out.begin() + 3);
  } else {
    throw ParseError("OMIE data for " + format_date(date) + " has " + std::to_string(v.size()) + " hours");
  }
  return out;
}

}  // namespace

PriceStore convert_omie(const std::vector<std::filesystem::path>& day_ahead_files,
                        const std::vector<std::filesystem::path>& sidc_files,
                        const std::vector<std::filesystem::path>& forecast_files) {
  const auto da = read_omie(day_ahead_files);
  const auto sidc = read_omie(sidc_files);
  const auto fc = read_omie(forecast_files);
  if (da.empty()) throw ParseError("no OMIE day-ahead rows found");
  PriceStore store;
  for (const auto& [date, hours] : da) {
    DayPrices p;
    p.day_ahead_actual = to_24(hours, date);
    auto f = fc.find(date);
    p.day_ahead_forecast = f != fc.end() ? to_24(f->second, date) : p.day_ahead_actual;
    auto s = sidc.find(date);
    if (s != sidc.end()) p.sidc = to_24(s->second, date);
    else p.sidc.fill(NAN);
    store.put(date, p);
  }
  return store;
}

}  // namespace flexsched
