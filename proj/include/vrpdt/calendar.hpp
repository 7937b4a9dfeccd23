#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "errors.hpp"

namespace vrpdt {

using Seconds = std::int64_t;

inline constexpr Seconds kDaySeconds = 86'400;

/// Date/time features of a trip departure, in the layout of the trip CSV.
struct CalendarFeatures {
    int day_of_week = 0;  // 0 = Monday
    int day_of_month = 1;
    int hour = 0;
    bool weekend = false;
    bool work_day = true;
    bool peak_hour = false;
    bool public_holiday = false;
    Seconds seconds_of_day = 0;
};

/// Peak hours are 07:00-10:00 and 16:00-19:00 local.
inline bool is_peak_hour(int hour) { return (hour >= 7 && hour < 10) || (hour >= 16 && hour < 19); }

struct Weather {
    double temperature = 15.0;
    double dew = 8.0;
    double humid = 60.0;
    double rain = 0.0;
    double snow = 0.0;
    double visible = 10.0;
    double fog = 0.0;
    double thunder = 0.0;
    double tornado = 0.0;
    double clear = 1.0;
    double haze = 0.0;
    double heavy_rain = 0.0;
    double heavy_snow = 0.0;
    double light_rain = 0.0;
    double light_snow = 0.0;

    static constexpr std::array<const char*, 15> kNames{
        "temperature", "dew",  "humid", "rain",       "snow",       "visible",    "fog",       "thunder",
        "tornado",     "clear", "haze", "heavy_rain", "heavy_snow", "light_rain", "light_snow"};

    std::array<double, 15> values() const {
        return {temperature, dew,  humid,      rain,       snow,       visible,    fog,       thunder,
                tornado,     clear, haze,      heavy_rain, heavy_snow, light_rain, light_snow};
    }
};

/// Wall-clock anchor of second 0 of the planning horizon, plus the holiday list.
class Calendar {
public:
    Calendar() : Calendar(parse_datetime("2024-03-12T06:00:00")) {}

    explicit Calendar(std::chrono::sys_seconds start, std::vector<std::chrono::sys_days> holidays = {})
        : start_(start), holidays_(std::move(holidays)) {}

    static std::chrono::sys_seconds parse_datetime(const std::string& text) {
        int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
        const int got = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s);
        if (got < 3 || (got > 3 && got < 5)) throw FormatError("bad datetime '" + text + "'");
        const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                              std::chrono::day{static_cast<unsigned>(d)}};
        if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 59) {
            throw FormatError("bad datetime '" + text + "'");
        }
        return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} +
               std::chrono::seconds{s};
    }

    static std::chrono::sys_days parse_date(const std::string& text) {
        return std::chrono::floor<std::chrono::days>(parse_datetime(text));
    }

    static std::string format_datetime(std::chrono::sys_seconds t) {
        const auto day = std::chrono::floor<std::chrono::days>(t);
        const std::chrono::year_month_day ymd{day};
        const auto secs = (t - day).count();
        char buf[96];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                      static_cast<long long>(secs / 3600), static_cast<long long>(secs / 60 % 60),
                      static_cast<long long>(secs % 60));
        return buf;
    }

    std::chrono::sys_seconds start() const { return start_; }
    const std::vector<std::chrono::sys_days>& holidays() const { return holidays_; }

    /// Seconds since local midnight at horizon offset `t`.
    Seconds seconds_of_day(Seconds t) const {
        const auto abs = start_ + std::chrono::seconds{t};
        return (abs - std::chrono::floor<std::chrono::days>(abs)).count();
    }

    CalendarFeatures features(Seconds t) const {
        const auto abs = start_ + std::chrono::seconds{t};
        const auto day = std::chrono::floor<std::chrono::days>(abs);
        const std::chrono::year_month_day ymd{day};
        const std::chrono::weekday wd{day};
        CalendarFeatures f;
        f.day_of_week = static_cast<int>(wd.iso_encoding()) - 1;
        f.day_of_month = static_cast<int>(static_cast<unsigned>(ymd.day()));
        f.seconds_of_day = (abs - day).count();
        f.hour = static_cast<int>(f.seconds_of_day / 3600);
        f.weekend = f.day_of_week >= 5;
        for (const auto& h : holidays_) f.public_holiday = f.public_holiday || h == day;
        f.work_day = !f.weekend && !f.public_holiday;
        f.peak_hour = f.work_day && is_peak_hour(f.hour);
        return f;
    }

private:
    std::chrono::sys_seconds start_;
    std::vector<std::chrono::sys_days> holidays_;
};

/// Calendar::features with the date part reused while queries stay on the same day.
class FeatureCursor {
public:
    explicit FeatureCursor(const Calendar& cal) : cal_(&cal) {}

    CalendarFeatures features(Seconds t) {
        const auto abs = cal_->start() + std::chrono::seconds{t};
        const auto day = std::chrono::floor<std::chrono::days>(abs);
        if (!valid_ || day != day_) {
            day_ = day;
            base_ = cal_->features(t);
            valid_ = true;
        }
        CalendarFeatures f = base_;
        f.seconds_of_day = (abs - day).count();
        f.hour = static_cast<int>(f.seconds_of_day / 3600);
        f.peak_hour = f.work_day && is_peak_hour(f.hour);
        return f;
    }

private:
    const Calendar* cal_;
    std::chrono::sys_days day_{};
    CalendarFeatures base_;
    bool valid_ = false;
};

}  // namespace vrpdt
