#include "mrlop/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mrlop/rng.hpp"

namespace mrlop {

namespace {

constexpr long kSeasonStartDay[4] = {0, 91, 182, 273};
constexpr long kYearDays = 365;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

double parse_double(const std::string& s, const std::string& path, int line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": not a number: '" + s + "'");
    }
}

}  // namespace

const char* season_name(Season s) {
    switch (s) {
        case Season::winter: return "winter";
        case Season::spring: return "spring";
        case Season::summer: return "summer";
        case Season::fall: return "fall";
    }
    return "?";
}

Season season_from_name(const std::string& name) {
    for (int i = 0; i < 4; ++i) {
        if (name == season_name(static_cast<Season>(i))) return static_cast<Season>(i);
    }
    throw std::invalid_argument("unknown season name: '" + name + "'");
}

Season season_of_day(long day) {
    long d = day % kYearDays;
    if (d < 0) d += kYearDays;
    for (int i = 3; i >= 0; --i) {
        if (d >= kSeasonStartDay[i]) return static_cast<Season>(i);
    }
    return Season::winter;
}

void PriceProfile::validate() const {
    for (int h = 0; h < 24; ++h) {
        if (!(hourly_usd_per_kwh[h] > 0.0)) {
            throw std::invalid_argument(std::string("price profile ") + season_name(season) +
                                        " hour " + std::to_string(h) +
                                        ": prices must be strictly positive");
        }
    }
}

void WeatherSeries::validate() const {
    if (timestamps_h.size() != ghi_w_m2.size()) {
        throw std::invalid_argument("weather series: timestamp/ghi length mismatch");
    }
    if (timestamps_h.size() < 2) {
        throw std::invalid_argument("weather series: needs at least two samples");
    }
    const double dt = timestamps_h[1] - timestamps_h[0];
    if (!(dt > 0.0)) throw std::invalid_argument("weather series: non-increasing timestamps");
    for (std::size_t i = 1; i < timestamps_h.size(); ++i) {
        double step = timestamps_h[i] - timestamps_h[i - 1];
        if (std::abs(step - dt) > 1e-9) {
            throw std::invalid_argument("weather series: non-uniform grid near hour " +
                                        std::to_string(timestamps_h[i]));
        }
    }
    for (std::size_t i = 0; i < ghi_w_m2.size(); ++i) {
        if (!(ghi_w_m2[i] >= 0.0)) {
            throw std::invalid_argument("weather series: negative irradiance at hour " +
                                        std::to_string(timestamps_h[i]));
        }
    }
}

double WeatherSeries::dt_hours() const { return timestamps_h[1] - timestamps_h[0]; }

double WeatherSeries::end_hour() const { return timestamps_h.back() + dt_hours(); }

void LoadSchedule::validate() const {
    if (!(demand_mw >= 0.0)) throw std::invalid_argument("load schedule: negative demand");
    if (!(active_start_h >= 0.0 && active_start_h < active_end_h && active_end_h <= 24.0)) {
        throw std::invalid_argument("load schedule: need 0 <= start < end <= 24");
    }
}

bool LoadSchedule::active_at(double hour_of_day) const {
    return hour_of_day >= active_start_h && hour_of_day < active_end_h;
}

std::array<PriceProfile, 4> default_seasonal_prices() {
    // Shapes follow common time-of-use tariffs: a pre-dawn valley (01:00 to
    // 06:00), a midday dip outside winter (solar-heavy grid), an evening peak
    // that decays before midnight. The late-evening shoulder stays well above
    // the valley so storage is worth draining before the day boundary rather
    // than holding into the next morning.
    std::array<PriceProfile, 4> out;
    out[0] = {Season::winter,
              {0.170, 0.085, 0.075, 0.070, 0.078, 0.092, 0.140, 0.190,
               0.230, 0.240, 0.230, 0.220, 0.210, 0.210, 0.220, 0.240,
               0.270, 0.330, 0.380, 0.360, 0.300, 0.240, 0.200, 0.180}};
    out[1] = {Season::spring,
              {0.150, 0.075, 0.065, 0.060, 0.068, 0.080, 0.120, 0.160,
               0.180, 0.140, 0.100, 0.085, 0.078, 0.082, 0.095, 0.120,
               0.170, 0.260, 0.330, 0.310, 0.260, 0.200, 0.170, 0.160}};
    out[2] = {Season::summer,
              {0.160, 0.080, 0.070, 0.065, 0.072, 0.085, 0.110, 0.150,
               0.170, 0.120, 0.090, 0.075, 0.068, 0.070, 0.085, 0.110,
               0.180, 0.300, 0.400, 0.440, 0.340, 0.250, 0.190, 0.170}};
    out[3] = {Season::fall,
              {0.150, 0.078, 0.068, 0.062, 0.070, 0.083, 0.120, 0.170,
               0.200, 0.160, 0.120, 0.100, 0.092, 0.096, 0.110, 0.140,
               0.190, 0.280, 0.350, 0.330, 0.270, 0.210, 0.180, 0.160}};
    for (const auto& p : out) p.validate();
    return out;
}

std::array<PriceProfile, 4> load_price_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open price file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (split_csv_line(line) != std::vector<std::string>{"season", "hour", "usd_per_kwh"}) {
        throw std::runtime_error(path + ": expected header 'season,hour,usd_per_kwh'");
    }
    std::array<PriceProfile, 4> out;
    std::array<std::array<bool, 24>, 4> seen{};
    for (int i = 0; i < 4; ++i) out[i].season = static_cast<Season>(i);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 3 fields");
        }
        Season s;
        try {
            s = season_from_name(fields[0]);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        double hour_f = parse_double(fields[1], path, line_no);
        int hour = static_cast<int>(hour_f);
        if (hour_f != hour || hour < 0 || hour > 23) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": hour must be an integer in [0, 23]");
        }
        int si = static_cast<int>(s);
        if (seen[si][hour]) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": duplicate row for " +
                                     fields[0] + " hour " + std::to_string(hour));
        }
        seen[si][hour] = true;
        out[si].hourly_usd_per_kwh[hour] = parse_double(fields[2], path, line_no);
    }
    for (int si = 0; si < 4; ++si) {
        for (int h = 0; h < 24; ++h) {
            if (!seen[si][h]) {
                throw std::runtime_error(path + ": missing row for " +
                                         season_name(static_cast<Season>(si)) + " hour " +
                                         std::to_string(h));
            }
        }
        out[si].validate();
    }
    return out;
}

WeatherSeries load_weather_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open weather file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (split_csv_line(line) != std::vector<std::string>{"hour", "ghi_w_m2"}) {
        throw std::runtime_error(path + ": expected header 'hour,ghi_w_m2'");
    }
    WeatherSeries out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 2 fields");
        }
        out.timestamps_h.push_back(parse_double(fields[0], path, line_no));
        out.ghi_w_m2.push_back(parse_double(fields[1], path, line_no));
    }
    out.validate();
    return out;
}

void write_price_csv(const std::string& path, const std::array<PriceProfile, 4>& profiles) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write price file: " + path);
    out << "season,hour,usd_per_kwh\n";
    char buf[64];
    for (const auto& p : profiles) {
        for (int h = 0; h < 24; ++h) {
            std::snprintf(buf, sizeof(buf), "%.10g", p.hourly_usd_per_kwh[h]);
            out << season_name(p.season) << ',' << h << ',' << buf << '\n';
        }
    }
}

void write_weather_csv(const std::string& path, const WeatherSeries& series) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write weather file: " + path);
    out << "hour,ghi_w_m2\n";
    char buf[64];
    for (std::size_t i = 0; i < series.timestamps_h.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.10g", series.timestamps_h[i]);
        out << buf << ',';
        std::snprintf(buf, sizeof(buf), "%.10g", series.ghi_w_m2[i]);
        out << buf << '\n';
    }
}

WeatherSeries synth_weather(int day_count, double peak_ghi_w_m2, double jitter_frac,
                            std::uint64_t seed) {
    if (day_count <= 0) throw std::invalid_argument("synth_weather: day_count must be positive");
    if (peak_ghi_w_m2 < 0.0) throw std::invalid_argument("synth_weather: negative peak");
    if (jitter_frac < 0.0 || jitter_frac >= 1.0) {
        throw std::invalid_argument("synth_weather: jitter_frac must be in [0, 1)");
    }
    WeatherSeries out;
    out.timestamps_h.reserve(static_cast<std::size_t>(day_count) * 24);
    out.ghi_w_m2.reserve(static_cast<std::size_t>(day_count) * 24);
    Rng rng(mix_seed(seed, 0x57454154ull));  // per-day amplitude stream
    for (int d = 0; d < day_count; ++d) {
        double amp = peak_ghi_w_m2;
        if (jitter_frac > 0.0) amp *= 1.0 + rng.uniform(-jitter_frac, jitter_frac);
        for (int h = 0; h < 24; ++h) {
            out.timestamps_h.push_back(d * 24.0 + h);
            double g = 0.0;
            if (h >= 6 && h <= 18) {
                // Half-sine over the 13 daylight samples, peak at noon.
                g = amp * std::sin(std::numbers::pi * (h - 5.0) / 14.0);
            }
            out.ghi_w_m2.push_back(g);
        }
    }
    out.validate();
    return out;
}

ForecastProvider::ForecastProvider(std::array<PriceProfile, 4> prices, WeatherSeries weather,
                                   LoadSchedule load, ForecastConfig cfg)
    : prices_(std::move(prices)), weather_(std::move(weather)), load_(load), cfg_(cfg) {
    for (int i = 0; i < 4; ++i) {
        if (prices_[i].season != static_cast<Season>(i)) {
            throw std::invalid_argument("forecast provider: price profiles must be ordered "
                                        "winter, spring, summer, fall");
        }
        prices_[i].validate();
    }
    weather_.validate();
    load_.validate();
}

Season ForecastProvider::season_at(double t_hour) const {
    return season_of_day(static_cast<long>(std::floor(t_hour / 24.0)));
}

double ForecastProvider::price_at(double t_hour) const {
    if (t_hour < 0.0) throw std::out_of_range("price_at: negative time");
    Season s = season_at(t_hour);
    int hod = static_cast<int>(std::floor(std::fmod(t_hour, 24.0)));
    return prices_[static_cast<int>(s)].hourly_usd_per_kwh[hod];
}

ForecastSlice ForecastProvider::slice(double origin_hour, double dt_hours, int steps) const {
    if (!(dt_hours == 0.5 || dt_hours == 1.0 || dt_hours == 2.0)) {
        throw std::invalid_argument("slice: dt must be one of 0.5, 1, 2 hours");
    }
    if (steps <= 0) throw std::invalid_argument("slice: steps must be positive");
    if (origin_hour < weather_.timestamps_h.front()) {
        throw std::out_of_range("slice: origin before weather series start");
    }
    const double last = origin_hour + dt_hours * (steps - 1);
    if (last >= weather_.end_hour()) {
        throw std::out_of_range("slice: weather series ends at hour " +
                                std::to_string(weather_.end_hour()) + ", need " +
                                std::to_string(last));
    }
    ForecastSlice out;
    out.dt_hours = dt_hours;
    out.origin_hour = origin_hour;
    out.prices_usd_per_kwh.resize(steps);
    out.irradiance_w_m2.resize(steps);
    out.load_target_mw.resize(steps);
    const Season origin_season = season_at(origin_hour);
    const double w_dt = weather_.dt_hours();
    const double w_t0 = weather_.timestamps_h.front();
    for (int k = 0; k < steps; ++k) {
        const double t = origin_hour + k * dt_hours;
        const double hod = std::fmod(t, 24.0);
        const Season s = cfg_.season_lookahead ? season_at(t) : origin_season;
        out.prices_usd_per_kwh[k] =
            prices_[static_cast<int>(s)].hourly_usd_per_kwh[static_cast<int>(std::floor(hod))];
        auto wi = static_cast<std::size_t>(std::floor((t - w_t0) / w_dt));
        out.irradiance_w_m2[k] = weather_.ghi_w_m2[wi];
        out.load_target_mw[k] = load_.active_at(hod) ? load_.demand_mw : 0.0;
    }
    return out;
}

std::vector<double> ForecastProvider::reset_price_vector(double t_hour) const {
    std::vector<double> out(48);
    for (int k = 0; k < 48; ++k) out[k] = price_at(t_hour + 0.5 * k);
    return out;
}

bool detect_reset(const std::vector<double>& current, const std::vector<double>& previous,
                  double epsilon) {
    if (current.size() != previous.size()) {
        throw std::invalid_argument("detect_reset: vector length mismatch");
    }
    for (std::size_t i = 0; i < current.size(); ++i) {
        if (std::abs(current[i] - previous[i]) > epsilon) return true;
    }
    return false;
}

}  // namespace mrlop
