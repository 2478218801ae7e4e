// pybind11 module exposing the main operations: the expandable net, prototype
// bank, distance scoring, losses, threshold calibration and decisions, weight
// initialization, synthetic data, and the experiment runner.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "podn/dataset.hpp"
#include "podn/detector.hpp"
#include "podn/experiment.hpp"
#include "podn/incremental.hpp"
#include "podn/model.hpp"
#include "podn/numerics.hpp"
#include "podn/prototypes.hpp"

namespace py = pybind11;
using namespace podn;

namespace {

Matrix matrix_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) {
        throw std::runtime_error("expected a 2-d array");
    }
    Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
    const auto view = arr.unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            m(i, j) = view(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j));
        }
    }
    return m;
}

py::array_t<double> matrix_to_array(const Matrix& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    auto view = arr.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            view(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
        }
    }
    return arr;
}

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

}  // namespace

PYBIND11_MODULE(_podn, m) {
    m.doc() = "open-set recognition with learned prototypes and triplet thresholds";

    py::class_<ExpandableNet>(m, "ExpandableNet")
        .def(py::init([](std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                         std::size_t categories, std::uint64_t seed) {
                 return ExpandableNet(ModelConfig{input_dim, hidden_dims, categories, seed});
             }),
             py::arg("input_dim"), py::arg("hidden_dims"), py::arg("categories"),
             py::arg("seed") = 0)
        .def_property_readonly("input_dim", &ExpandableNet::input_dim)
        .def_property_readonly("category_count", &ExpandableNet::category_count)
        .def("forward", [](const ExpandableNet& net, const DoubleArray& batch) {
            return matrix_to_array(net.forward(matrix_from_array(batch)));
        })
        .def("predict", [](const ExpandableNet& net, const DoubleArray& batch) {
            return net.predict(matrix_from_array(batch));
        })
        .def("expand_output_dim", &ExpandableNet::expand_output_dim, py::arg("column"),
             py::arg("bias"))
        .def("head_columns", [](const ExpandableNet& net) {
            Matrix head(net.hidden_output_dim(), net.category_count());
            for (std::size_t c = 0; c < net.category_count(); ++c) {
                for (std::size_t k = 0; k < head.rows(); ++k) {
                    head(k, c) = net.head_columns()[c](k, 0);
                }
            }
            return matrix_to_array(head);
        });

    py::class_<PrototypeBank>(m, "PrototypeBank")
        .def(py::init<std::size_t, std::size_t, double>(), py::arg("categories"),
             py::arg("feature_dim"), py::arg("epsilon") = 1e-3)
        .def_property_readonly("category_count", &PrototypeBank::category_count)
        .def_property(
            "prototypes", [](const PrototypeBank& b) { return matrix_to_array(b.prototypes); },
            [](PrototypeBank& b, const DoubleArray& arr) { b.prototypes = matrix_from_array(arr); })
        .def_property(
            "radiuses",
            [](const PrototypeBank& b) {
                return std::vector<double>(b.radiuses.data().begin(), b.radiuses.data().end());
            },
            [](PrototypeBank& b, const std::vector<double>& r) {
                b.radiuses = Matrix(1, r.size());
                for (std::size_t i = 0; i < r.size(); ++i) {
                    b.radiuses(0, i) = r[i];
                }
            })
        .def_property_readonly("epsilon_dist",
                               [](const PrototypeBank& b) { return b.epsilon_dist; });

    m.def("softmax_rows", [](const DoubleArray& arr) {
        return matrix_to_array(softmax_rows(matrix_from_array(arr)));
    });

    m.def(
        "distance_scores",
        [](const DoubleArray& features, const PrototypeBank& bank) {
            const DistanceResult result = distance_matrix(matrix_from_array(features), bank);
            return py::make_tuple(matrix_to_array(result.scores), matrix_to_array(result.squared));
        },
        py::arg("features"), py::arg("bank"),
        "reciprocal smoothed squared distances and the raw squared distances");

    m.def("mean_normalized_alpha", [](const DoubleArray& rows) {
        return mean_normalized_alpha(matrix_from_array(rows));
    });

    m.def(
        "distance_weight_init",
        [](const std::vector<double>& alpha, const ExpandableNet& net) {
            return distance_weight_init(alpha, net.head_columns());
        },
        py::arg("alpha"), py::arg("net"));

    py::class_<ThresholdSet>(m, "ThresholdSet")
        .def_readonly("eta", &ThresholdSet::eta)
        .def_readonly("mu", &ThresholdSet::mu)
        .def_readonly("delta", &ThresholdSet::delta)
        .def_property_readonly("mode",
                               [](const ThresholdSet& t) { return to_string(t.mode); });

    m.def(
        "calibrate",
        [](const std::vector<DoubleArray>& rows_per_category, double eps_mu, double rho,
           const std::string& mode) {
            std::vector<Matrix> rows;
            rows.reserve(rows_per_category.size());
            for (const auto& r : rows_per_category) {
                rows.push_back(matrix_from_array(r));
            }
            return calibrate(rows, eps_mu, rho, score_mode_from_string(mode));
        },
        py::arg("rows_per_category"), py::arg("eps_mu") = 0.5, py::arg("rho") = 0.5,
        py::arg("mode") = "distance");

    m.def(
        "decide",
        [](const std::vector<double>& row, const ThresholdSet& thresholds) {
            const Decision d = decide(row, thresholds);
            py::dict out;
            out["outcome"] = d.outcome == Outcome::accept ? "accept" : "unknown";
            out["category"] = d.category;
            out["top_value"] = d.top_value;
            out["margin"] = d.margin;
            return out;
        },
        py::arg("row"), py::arg("thresholds"));

    m.def(
        "train_initial",
        [](const DoubleArray& features, const std::vector<int>& labels, std::size_t categories,
           const std::vector<std::size_t>& hidden_dims, std::size_t epochs, std::size_t batch_size,
           double learning_rate, double momentum, double omega, double w1, double w2,
           std::uint64_t seed) {
            TrainingSet data{matrix_from_array(features), labels, categories};
            ModelConfig model_config{data.features.cols(), hidden_dims, categories,
                                     derive_seed(seed, 3)};
            TrainConfig train_config{epochs,     batch_size,           learning_rate,
                                     momentum,   LossWeights{omega, w1, w2},
                                     false,      derive_seed(seed, 4)};
            InitialTrainResult result = train_initial(data, model_config, train_config);
            py::list log;
            for (const EpochStats& stats : result.log) {
                py::dict entry;
                entry["loss1"] = stats.losses.loss1;
                entry["loss21"] = stats.losses.loss21;
                entry["loss22"] = stats.losses.loss22;
                entry["loss3"] = stats.losses.loss3;
                entry["total"] = stats.losses.total;
                entry["train_accuracy"] = stats.train_accuracy;
                log.append(entry);
            }
            return py::make_tuple(std::move(result.net), std::move(result.bank), log);
        },
        py::arg("features"), py::arg("labels"), py::arg("categories"),
        py::arg("hidden_dims") = std::vector<std::size_t>{32}, py::arg("epochs") = 40,
        py::arg("batch_size") = 32, py::arg("learning_rate") = 0.05, py::arg("momentum") = 0.9,
        py::arg("omega") = 1.0, py::arg("w1") = 0.1, py::arg("w2") = 0.01, py::arg("seed") = 0);

    m.def(
        "collect_calibration_rows",
        [](const ExpandableNet& net, const PrototypeBank& bank, const DoubleArray& features,
           const std::vector<int>& labels, std::size_t categories, const std::string& mode) {
            const std::vector<Matrix> rows = collect_calibration_rows(
                net, bank, matrix_from_array(features), labels, categories,
                score_mode_from_string(mode));
            std::vector<py::array_t<double>> out;
            out.reserve(rows.size());
            for (const Matrix& r : rows) {
                out.push_back(matrix_to_array(r));
            }
            return out;
        },
        py::arg("net"), py::arg("bank"), py::arg("features"), py::arg("labels"),
        py::arg("categories"), py::arg("mode") = "distance");

    m.def(
        "generate_synthetic",
        [](std::size_t clusters, std::size_t dim, std::size_t per_cluster, double separation,
           double sigma, std::uint64_t seed) {
            const Dataset dataset =
                generate_synthetic(SyntheticSpec{clusters, dim, per_cluster, separation, sigma, seed});
            Matrix features(dataset.samples.size(), dataset.feature_dim);
            std::vector<std::string> labels;
            labels.reserve(dataset.samples.size());
            for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
                for (std::size_t j = 0; j < dataset.feature_dim; ++j) {
                    features(i, j) = dataset.samples[i].features[j];
                }
                labels.push_back(dataset.samples[i].label);
            }
            return py::make_tuple(matrix_to_array(features), labels);
        },
        py::arg("clusters"), py::arg("dim"), py::arg("per_cluster"), py::arg("separation") = 6.0,
        py::arg("sigma") = 1.0, py::arg("seed") = 0);

    m.def(
        "run_experiment_json",
        [](const std::string& config_json, const std::string& out_dir) {
            const ExperimentRun run = run_experiment(parse_config(config_json));
            if (!out_dir.empty()) {
                write_run_files(run, out_dir);
            }
            return report_to_json_string(run.report);
        },
        py::arg("config_json"), py::arg("out_dir") = "",
        "run the full pipeline from a config JSON string; returns the report JSON");
}
