// Python bindings for the numerical core: forecasters, decomposition,
// quantile map, metrics and the DM test. Arrays cross as float64 numpy.
#include "epfbench/baselines.hpp"
#include "epfbench/backtest.hpp"
#include "epfbench/error.hpp"
#include "epfbench/forecaster.hpp"
#include "epfbench/metrics.hpp"
#include "epfbench/mstl_forecaster.hpp"
#include "epfbench/stats.hpp"
#include "epfbench/stl.hpp"
#include "epfbench/transforms.hpp"
#include "epfbench/version.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace epf;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) {
        throw py::value_error("expected a 1-d array");
    }
    return {a.data(), a.data() + a.size()};
}

Array to_array(std::span<const double> v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

// (days, 24) arrays of actuals and predictions as one model's records.
std::vector<eval::ForecastRecord> to_records(const Array& actuals, const Array& predictions) {
    if (actuals.ndim() != 2 || actuals.shape(1) != kHoursPerDay || predictions.ndim() != 2 ||
        predictions.shape(0) != actuals.shape(0) || predictions.shape(1) != kHoursPerDay) {
        throw py::value_error("expected two (days, 24) arrays of equal shape");
    }
    std::vector<eval::ForecastRecord> out(static_cast<std::size_t>(actuals.shape(0)));
    const Date start = parse_date("2000-01-01");
    for (std::size_t d = 0; d < out.size(); ++d) {
        out[d].model = "m";
        out[d].zone = "z";
        out[d].target_date = add_days(start, static_cast<long>(d));
        std::copy_n(actuals.data() + d * kHoursPerDay, kHoursPerDay, out[d].actuals.begin());
        std::copy_n(predictions.data() + d * kHoursPerDay, kHoursPerDay, out[d].predictions.begin());
    }
    return out;
}

eval::LossSeries to_losses(const std::string& model, const Array& losses) {
    eval::LossSeries s{model, "z", {}, to_vector(losses)};
    const Date start = parse_date("2000-01-01");
    for (std::size_t i = 0; i < s.losses.size(); ++i) {
        s.dates.push_back(add_days(start, static_cast<long>(i)));
    }
    return s;
}

py::dict decomposition_dict(const classical::StlDecomposition& d) {
    py::dict seasonal;
    for (std::size_t i = 0; i < d.periods.size(); ++i) {
        seasonal[py::int_(d.periods[i])] = to_array(d.seasonal[i]);
    }
    py::dict out;
    out["trend"] = to_array(d.trend);
    out["seasonal"] = seasonal;
    out["remainder"] = to_array(d.remainder);
    return out;
}

} // namespace

PYBIND11_MODULE(_epfbench, m) {
    m.doc() = "Day-ahead electricity price forecasting benchmark core";
    m.attr("__version__") = kVersion;

    static py::exception<Error> error(m, "EpfError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            py::object exc = error;
            py::object instance = exc(std::string(to_string(e.code())) + ": " + e.what());
            instance.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error.ptr(), instance.ptr());
        }
    });

    m.def("native_models", &eval::native_model_names, "Names accepted by forecast().");

    m.def(
        "forecast",
        [](const std::string& model, const Array& training, const std::string& start_day, std::size_t input_hours) {
            const data::HourlySeries series("py", parse_date(start_day), to_vector(training));
            if (input_hours == 0 || input_hours > series.size()) {
                throw py::value_error("input_hours must lie within the training window");
            }
            auto f = eval::make_native_forecaster(model);
            const auto values = series.values();
            const eval::ForecastInput in{series, values.subspan(values.size() - input_hours),
                                         add_days(series.end_day(), 1)};
            const auto out = f->forecast(in);
            return to_array(out);
        },
        py::arg("model"), py::arg("training"), py::arg("start_day") = "2024-01-01",
        py::arg("input_hours") = kHoursPerWeek,
        "Next-day 24-hour forecast from whole days of hourly training prices.");

    m.def(
        "naive_forecast", [](const Array& ctx) { return to_array(classical::naive_forecast(to_vector(ctx))); },
        py::arg("context"));
    m.def(
        "seasonal_naive_forecast",
        [](const Array& ctx, std::size_t period) {
            return to_array(classical::seasonal_naive_forecast(to_vector(ctx), period));
        },
        py::arg("context"), py::arg("period") = kHoursPerDay);
    m.def(
        "mstl_forecast", [](const Array& ctx) { return to_array(classical::mstl_forecast(to_vector(ctx))); },
        py::arg("context"));

    m.def(
        "stl_decompose",
        [](const Array& y, std::size_t period, std::size_t seasonal_window, std::size_t robust_iters) {
            classical::StlOptions o;
            o.seasonal_window = seasonal_window;
            o.robust_iters = robust_iters;
            return decomposition_dict(classical::stl_decompose(to_vector(y), period, o));
        },
        py::arg("series"), py::arg("period"), py::arg("seasonal_window") = 13, py::arg("robust_iters") = 0);
    m.def(
        "mstl_decompose",
        [](const Array& y, const std::vector<std::size_t>& periods) {
            return decomposition_dict(classical::mstl_decompose(to_vector(y), periods));
        },
        py::arg("series"), py::arg("periods") = std::vector<std::size_t>{24, 168});

    py::class_<transforms::QuantileMap>(m, "QuantileMap")
        .def_static(
            "fit",
            [](const Array& x, std::size_t n_quantiles) {
                return transforms::QuantileMap::fit(to_vector(x), n_quantiles);
            },
            py::arg("training"), py::arg("n_quantiles") = transforms::QuantileMap::kDefaultQuantiles)
        .def("transform", [](const transforms::QuantileMap& q, const Array& x) {
            return to_array(q.transform(to_vector(x)));
        })
        .def("inverse", [](const transforms::QuantileMap& q, const Array& z) {
            return to_array(q.inverse(to_vector(z)));
        })
        .def_property_readonly("n_quantiles", &transforms::QuantileMap::n_quantiles);

    m.def("normal_cdf", &stats::normal_cdf, py::arg("z"));
    m.def("normal_quantile", &stats::normal_quantile, py::arg("p"));

    m.def(
        "metrics",
        [](const Array& actuals, const Array& predictions) {
            const auto recs = to_records(actuals, predictions);
            py::dict out;
            out["mae"] = eval::compute_mae(recs);
            out["rmse"] = eval::compute_rmse(recs);
            out["smape"] = eval::compute_smape(recs);
            return out;
        },
        py::arg("actuals"), py::arg("predictions"), "MAE, RMSE and sMAPE over (days, 24) arrays.");
    m.def(
        "daily_l1_losses",
        [](const Array& actuals, const Array& predictions) {
            return to_array(eval::daily_l1_losses(to_records(actuals, predictions)).losses);
        },
        py::arg("actuals"), py::arg("predictions"));
    m.def(
        "dm_test",
        [](const Array& loss_x, const Array& loss_y) {
            const auto r = eval::dm_test(to_losses("x", loss_x), to_losses("y", loss_y));
            return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("loss_x"), py::arg("loss_y"),
        "(statistic, p_value); small p means x is more accurate than y.");
}
