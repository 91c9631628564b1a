#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mrlop {

enum class Season { winter = 0, spring = 1, summer = 2, fall = 3 };

const char* season_name(Season s);
Season season_from_name(const std::string& name);  // throws std::invalid_argument

// Calendar: 365-day year, season blocks starting at days 0/91/182/273.
Season season_of_day(long day);

// Diurnal electricity price profile for one season, USD/kWh by hour of day.
struct PriceProfile {
    Season season = Season::winter;
    std::array<double, 24> hourly_usd_per_kwh{};

    void validate() const;  // all prices strictly positive
};

// Global horizontal irradiance series on a uniform time grid.
struct WeatherSeries {
    std::vector<double> timestamps_h;  // hours since series start, uniform spacing
    std::vector<double> ghi_w_m2;      // >= 0, same length as timestamps

    void validate() const;
    double dt_hours() const;  // grid spacing
    double end_hour() const;  // last covered instant (timestamp of last sample + dt)
};

struct LoadSchedule {
    double demand_mw = 1.0;
    double active_start_h = 8.0;  // hour of day, inclusive
    double active_end_h = 20.0;   // exclusive

    void validate() const;
    bool active_at(double hour_of_day) const;
};

// Piecewise-constant forecast over a control horizon: one sample per step,
// sampled at each step's start instant (zero-order hold).
struct ForecastSlice {
    std::vector<double> prices_usd_per_kwh;
    std::vector<double> irradiance_w_m2;
    std::vector<double> load_target_mw;
    double dt_hours = 1.0;
    double origin_hour = 0.0;

    int steps() const { return static_cast<int>(prices_usd_per_kwh.size()); }
};

struct ForecastConfig {
    // When true, a slice that crosses a season boundary switches to the next
    // season's price profile at the boundary; when false the whole slice
    // keeps the origin day's profile.
    bool season_lookahead = true;
};

// Built-in synthetic seasonal tariffs (time-of-use shaped: cheap nights,
// midday solar dip outside winter, evening peak).
std::array<PriceProfile, 4> default_seasonal_prices();

// CSV I/O. Price files carry the header `season,hour,usd_per_kwh` and one row
// per (season, hour); weather files carry `hour,ghi_w_m2`.
std::array<PriceProfile, 4> load_price_csv(const std::string& path);
WeatherSeries load_weather_csv(const std::string& path);
void write_price_csv(const std::string& path, const std::array<PriceProfile, 4>& profiles);
void write_weather_csv(const std::string& path, const WeatherSeries& series);

// Clear-sky-like synthetic irradiance: daylight 06:00-18:00 inclusive, sine
// bump peaking at noon, amplitude jittered per day by +-jitter_frac when a
// nonzero fraction is given. Hourly samples.
WeatherSeries synth_weather(int day_count, double peak_ghi_w_m2,
                            double jitter_frac = 0.0, std::uint64_t seed = 0);

class ForecastProvider {
public:
    ForecastProvider(std::array<PriceProfile, 4> prices, WeatherSeries weather,
                     LoadSchedule load, ForecastConfig cfg = {});

    // dt must be one of {0.5, 1, 2} hours; the weather series must cover the
    // whole window [origin, origin + dt*steps).
    ForecastSlice slice(double origin_hour, double dt_hours, int steps) const;

    // 24 h of prices at 30 min resolution starting at t_hour; the change
    // detector compares consecutive cycles' vectors.
    std::vector<double> reset_price_vector(double t_hour) const;

    double price_at(double t_hour) const;
    Season season_at(double t_hour) const;
    double coverage_hours() const { return weather_.end_hour(); }
    const LoadSchedule& load() const { return load_; }
    const std::array<PriceProfile, 4>& prices() const { return prices_; }

private:
    std::array<PriceProfile, 4> prices_;
    WeatherSeries weather_;
    LoadSchedule load_;
    ForecastConfig cfg_;
};

// L-infinity change detector for price reset vectors.
bool detect_reset(const std::vector<double>& current, const std::vector<double>& previous,
                  double epsilon = 1e-8);

}  // namespace mrlop
