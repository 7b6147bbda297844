#include "epfbench/windows.hpp"

#include "epfbench/error.hpp"

namespace epf::ml {

WindowDataset build_windows(const data::HourlySeries& training, std::size_t input_days) {
    if (input_days == 0) {
        throw Error(Errc::InvalidArgument, "input window must span at least one day");
    }
    if (training.days() <= input_days) {
        throw Error(Errc::TooShort, "training window of " + std::to_string(training.days()) +
                                        " days yields no samples with a " + std::to_string(input_days) +
                                        "-day input");
    }
    const auto n = static_cast<Eigen::Index>(training.days() - input_days);
    const auto p = static_cast<Eigen::Index>(input_days * kHoursPerDay);
    WindowDataset out;
    out.inputs.resize(n, p);
    out.targets.resize(n, kHoursPerDay);
    out.sample_days.reserve(static_cast<std::size_t>(n));
    const auto v = training.values();
    for (Eigen::Index s = 0; s < n; ++s) {
        const std::size_t day = input_days + static_cast<std::size_t>(s);
        const std::size_t target_begin = day * kHoursPerDay;
        const std::size_t input_begin = target_begin - static_cast<std::size_t>(p);
        for (Eigen::Index j = 0; j < p; ++j) {
            out.inputs(s, j) = v[input_begin + static_cast<std::size_t>(j)];
        }
        for (Eigen::Index h = 0; h < kHoursPerDay; ++h) {
            out.targets(s, h) = v[target_begin + static_cast<std::size_t>(h)];
        }
        out.sample_days.push_back(add_days(training.start_day(), static_cast<long>(day)));
    }
    return out;
}

WindowDataset head(const WindowDataset& data, Eigen::Index count) {
    WindowDataset out;
    out.inputs = data.inputs.topRows(count);
    out.targets = data.targets.topRows(count);
    out.sample_days.assign(data.sample_days.begin(), data.sample_days.begin() + count);
    return out;
}

} // namespace epf::ml
