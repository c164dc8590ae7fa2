#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "relucert/attacks.hpp"
#include "relucert/certificates.hpp"
#include "relucert/data_io.hpp"
#include "relucert/oracle.hpp"
#include "relucert/synthdata.hpp"
#include "relucert/trainer.hpp"

namespace py = pybind11;
using namespace relucert;

namespace {

Matrix matrix_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) {
        throw ValidationError("expected a 2-D array");
    }
    const auto rows = static_cast<std::size_t>(arr.shape(0));
    const auto cols = static_cast<std::size_t>(arr.shape(1));
    std::vector<double> data(arr.data(), arr.data() + rows * cols);
    return Matrix::from(rows, cols, std::move(data));
}

Vector vector_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 1) {
        throw ValidationError("expected a 1-D array");
    }
    return Vector::from(std::vector<double>(arr.data(), arr.data() + arr.shape(0)));
}

py::array_t<double> matrix_to_array(const Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.rows() * m.cols(), out.mutable_data());
    return out;
}

py::array_t<double> vector_to_array(const Vector& v) {
    py::array_t<double> out(v.dim());
    std::copy(v.data(), v.data() + v.dim(), out.mutable_data());
    return out;
}

MlpNetwork network_from_layers(const py::list& layers) {
    std::vector<Layer> built;
    for (const auto& item : layers) {
        const py::tuple pair = item.cast<py::tuple>();
        if (pair.size() != 2) {
            throw ValidationError("each layer is a (weight, bias) pair");
        }
        built.push_back({matrix_from_array(pair[0].cast<py::array_t<double>>()),
                         vector_from_array(pair[1].cast<py::array_t<double>>())});
    }
    return MlpNetwork(std::move(built));
}

Dataset dataset_from_arrays(const py::array_t<double>& inputs, const std::vector<std::size_t>& labels) {
    Dataset data;
    data.inputs = matrix_from_array(inputs);
    data.labels = labels;
    return data;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "L2 robustness certificates for fully-connected ReLU classifiers";

    py::register_exception<Error>(m, "RelucertError");

    py::class_<MlpNetwork>(m, "MlpNetwork")
        .def(py::init(&network_from_layers), py::arg("layers"),
             "Build from a list of (weight, bias) numpy pairs")
        .def_property_readonly("depth", &MlpNetwork::depth)
        .def_property_readonly("input_dim", &MlpNetwork::input_dim)
        .def_property_readonly("num_classes", &MlpNetwork::num_classes)
        .def_property_readonly("widths", &MlpNetwork::widths)
        .def("layer_weight",
             [](const MlpNetwork& net, std::size_t i) { return matrix_to_array(net.layer(i).weight); })
        .def("layer_bias",
             [](const MlpNetwork& net, std::size_t i) { return vector_to_array(net.layer(i).bias); });

    m.def("forward", [](const MlpNetwork& net, const py::array_t<double>& x) {
        const ForwardTrace t = forward(net, vector_from_array(x));
        return py::make_tuple(vector_to_array(t.logits), t.predicted);
    });

    m.def("activation_pattern", [](const MlpNetwork& net, const py::array_t<double>& x) {
        return activation_pattern(forward(net, vector_from_array(x))).per_layer;
    });

    m.def("compute_region", [](const MlpNetwork& net, const py::array_t<double>& x) {
        const RegionBundle b = compute_region(net, vector_from_array(x));
        py::dict out;
        out["P"] = matrix_to_array(b.region.face_normals);
        out["q"] = vector_to_array(b.region.face_offsets);
        out["C"] = matrix_to_array(b.decision.weight);
        out["d"] = vector_to_array(b.decision.bias);
        out["layer_row_offsets"] = b.region.layer_row_offsets;
        return out;
    });

    m.def("simplex_certificate", [](const MlpNetwork& net, const py::array_t<double>& u) {
        const SimplexCertificate c = simplex_certificate(net, vector_from_array(u));
        py::dict out;
        out["p_min"] = c.p_min;
        out["d_min"] = c.d_min;
        out["value"] = c.value;
        out["face_binding"] = c.active_branch == BindingBranch::FaceBinding;
        if (c.binding_face) out["binding_face"] = *c.binding_face;
        if (c.binding_class) out["binding_class"] = *c.binding_class;
        return out;
    });

    m.def("simplex_gradient", [](const MlpNetwork& net, const py::array_t<double>& u) {
        const CertificateGradient g = simplex_gradient(net, vector_from_array(u));
        return py::make_tuple(vector_to_array(g.grad), g.at_kink);
    });

    m.def("decision_boundary_certificate", [](const MlpNetwork& net, const py::array_t<double>& u) {
        const DecisionBoundaryCertificate c = decision_boundary_certificate(net, vector_from_array(u));
        py::dict out;
        out["value"] = c.value;
        out["classes"] = c.classes;
        out["numerators"] = c.per_class_numerators;
        out["head_row_norms"] = c.head_row_norms;
        out["first_layer_spectral_norm"] = c.first_layer_spectral_norm;
        py::list thetas;
        for (const Vector& t : c.minimizing_theta) thetas.append(vector_to_array(t));
        out["minimizing_theta"] = thetas;
        return out;
    });

    m.def(
        "box_min_abs_affine",
        [](const py::array_t<double>& a, double b) {
            const BoxMinResult r = box_min_abs_affine(vector_from_array(a), b);
            return py::make_tuple(r.value, vector_to_array(r.argmin));
        },
        py::arg("a"), py::arg("b"));

    auto attack_to_dict = [](const AttackResult& r) {
        py::dict out;
        out["adversarial_input"] = vector_to_array(r.adversarial_input);
        out["distance"] = r.distance;
        out["iterations_used"] = r.iterations_used;
        out["success"] = r.success;
        return out;
    };
    m.def(
        "iterative_fgsm",
        [attack_to_dict](const MlpNetwork& net, const py::array_t<double>& u, double step,
                         std::size_t max_iters, bool clip) {
            return attack_to_dict(iterative_fgsm(net, vector_from_array(u), step, max_iters, clip));
        },
        py::arg("net"), py::arg("u"), py::arg("step") = 0.01, py::arg("max_iters") = 1000,
        py::arg("clip") = false);
    m.def(
        "deepfool",
        [attack_to_dict](const MlpNetwork& net, const py::array_t<double>& u, double overshoot,
                         std::size_t max_iters, bool clip) {
            return attack_to_dict(deepfool(net, vector_from_array(u), overshoot, max_iters, clip));
        },
        py::arg("net"), py::arg("u"), py::arg("overshoot") = 0.02, py::arg("max_iters") = 100,
        py::arg("clip") = false);

    m.def(
        "grid_oracle",
        [](const MlpNetwork& net, const py::array_t<double>& u, double radius, std::size_t levels) {
            const OracleResult r = grid_oracle(net, vector_from_array(u), radius, levels);
            py::dict out;
            out["distance_lower"] = r.distance_lower;
            out["distance_upper"] = r.distance_upper;
            out["witness"] = vector_to_array(r.witness);
            out["resolution"] = r.resolution;
            out["found"] = r.status == OracleStatus::FoundAdversarial;
            return out;
        },
        py::arg("net"), py::arg("u"), py::arg("radius"), py::arg("levels") = 4);
    m.def("enumerate_exact_2layer", [](const MlpNetwork& net, const py::array_t<double>& u) {
        return enumerate_exact_2layer(net, vector_from_array(u));
    });

    m.def("glorot_init", &glorot_init, py::arg("widths"), py::arg("seed"));
    m.def(
        "train",
        [](const MlpNetwork& net, const py::array_t<double>& inputs,
           const std::vector<std::size_t>& labels, std::size_t batch_size, std::size_t epochs,
           double learning_rate, std::uint64_t seed) {
            TrainConfig cfg;
            cfg.batch_size = batch_size;
            cfg.epochs = epochs;
            cfg.learning_rate = learning_rate;
            cfg.seed = seed;
            const TrainResult r = train(net, dataset_from_arrays(inputs, labels), cfg);
            py::list log;
            for (const EpochStats& e : r.log) log.append(py::make_tuple(e.loss, e.accuracy));
            return py::make_tuple(r.net, log);
        },
        py::arg("net"), py::arg("inputs"), py::arg("labels"), py::arg("batch_size") = 64,
        py::arg("epochs") = 20, py::arg("learning_rate") = 0.001, py::arg("seed") = 0);
    m.def("evaluate_accuracy",
          [](const MlpNetwork& net, const py::array_t<double>& inputs,
             const std::vector<std::size_t>& labels) {
              return evaluate_accuracy(net, dataset_from_arrays(inputs, labels));
          });

    m.def("save_weights", &save_weights, py::arg("net"), py::arg("path"));
    m.def("load_weights", &load_weights, py::arg("path"));
    m.def("load_idx_images", [](const std::filesystem::path& path) {
        const IdxImages images = load_idx_images(path);
        return py::make_tuple(matrix_to_array(images.data), images.rows, images.cols);
    });
    m.def("load_idx_labels", [](const std::filesystem::path& path) {
        const std::vector<std::uint8_t> labels = load_idx_labels(path);
        return std::vector<int>(labels.begin(), labels.end());
    });

    m.def(
        "synth_digits",
        [](std::size_t count, std::uint64_t seed) {
            const Dataset d = synth_digits(count, seed);
            return py::make_tuple(matrix_to_array(d.inputs), d.labels);
        },
        py::arg("count"), py::arg("seed") = 0);
    m.def(
        "synth_blobs2d",
        [](std::size_t count, std::uint64_t seed) {
            const Dataset d = synth_blobs2d(count, seed);
            return py::make_tuple(matrix_to_array(d.inputs), d.labels);
        },
        py::arg("count"), py::arg("seed") = 0);

    m.attr("__version__") = "0.1.0";
}
