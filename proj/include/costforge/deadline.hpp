#pragma once

#include <chrono>
#include <optional>

namespace costforge {

// Wall-clock budget shared by enumeration and both solver phases.
class Deadline {
public:
    using Clock = std::chrono::steady_clock;

    static Deadline never() { return Deadline(std::nullopt); }
    static Deadline after(std::chrono::duration<double> budget) {
        return Deadline(Clock::now() +
                        std::chrono::duration_cast<Clock::duration>(budget));
    }

    bool expired() const { return at_ && Clock::now() >= *at_; }
    bool unlimited() const { return !at_.has_value(); }

private:
    explicit Deadline(std::optional<Clock::time_point> at) : at_(at) {}
    std::optional<Clock::time_point> at_;
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace costforge
