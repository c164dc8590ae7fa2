#include "relucert/region.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <utility>

namespace relucert {

namespace {

std::vector<std::size_t> active_indices(const std::vector<std::uint8_t>& theta) {
    std::vector<std::size_t> act;
    act.reserve(theta.size());
    for (std::size_t j = 0; j < theta.size(); ++j) {
        if (theta[j]) act.push_back(j);
    }
    return act;
}

// next = W * diag(theta) * current, skipping the rows diag(theta) zeroes.
Matrix masked_chain_product(const Matrix& w, const std::vector<std::size_t>& act,
                            const Matrix& current) {
    const std::size_t out_rows = w.rows();
    const std::size_t dim = current.cols();
    if (act.empty()) {
        return Matrix(out_rows, dim);
    }
    Matrix w_sub(out_rows, act.size());
    for (std::size_t r = 0; r < out_rows; ++r) {
        const double* wrow = w.row_data(r);
        double* dst = w_sub.row_data(r);
        for (std::size_t jj = 0; jj < act.size(); ++jj) dst[jj] = wrow[act[jj]];
    }
    Matrix c_sub(act.size(), dim);
    for (std::size_t jj = 0; jj < act.size(); ++jj) {
        std::memcpy(c_sub.row_data(jj), current.row_data(act[jj]), dim * sizeof(double));
    }
    return matmul(w_sub, c_sub);
}

} // namespace

RegionBundle compute_region(const MlpNetwork& net, const Vector& x) {
    return compute_region(net, forward(net, x));
}

RegionBundle compute_region(const MlpNetwork& net, const ForwardTrace& trace) {
    const std::size_t depth = net.depth();
    const std::size_t dim = net.input_dim();
    if (trace.raw.size() != depth) {
        throw DimensionError("compute_region: trace has " + std::to_string(trace.raw.size()) +
                             " layers but network has " + std::to_string(depth));
    }

    RegionBundle bundle;
    bundle.pattern = activation_pattern(trace);

    const std::size_t total_rows = net.hidden_units();
    bundle.region.face_normals = Matrix(total_rows, dim);
    bundle.region.face_offsets = Vector(total_rows);
    bundle.region.layer_row_offsets.reserve(depth - 1);
    bundle.per_layer_affine.reserve(depth);

    bundle.per_layer_affine.push_back({net.layer(0).weight, net.layer(0).bias});

    std::size_t row = 0;
    for (std::size_t li = 0; li + 1 < depth; ++li) {
        const std::vector<std::uint8_t>& theta = bundle.pattern.per_layer[li];
        const Matrix& c = bundle.per_layer_affine.back().weight;
        const Vector& d = bundle.per_layer_affine.back().bias;

        bundle.region.layer_row_offsets.push_back(row);
        for (std::size_t j = 0; j < theta.size(); ++j, ++row) {
            const double sign = theta[j] ? 1.0 : -1.0;
            const double* src = c.row_data(j);
            double* dst = bundle.region.face_normals.row_data(row);
            for (std::size_t k = 0; k < dim; ++k) dst[k] = sign * src[k];
            bundle.region.face_offsets[row] = sign * d[j];
        }

        const Layer& next = net.layer(li + 1);
        const std::vector<std::size_t> act = active_indices(theta);
        Matrix c_next = masked_chain_product(next.weight, act, c);
        Vector d_next = next.bias;
        for (std::size_t r = 0; r < next.weight.rows(); ++r) {
            const double* wrow = next.weight.row_data(r);
            double sum = 0.0;
            for (std::size_t jj : act) sum += wrow[jj] * d[jj];
            d_next[r] += sum;
        }
        bundle.per_layer_affine.push_back({std::move(c_next), std::move(d_next)});
    }

    bundle.decision = bundle.per_layer_affine.back();
    return bundle;
}

bool region_contains(const ActivationRegion& region, const Vector& x, double eps) {
    if (x.dim() != region.face_normals.cols()) {
        throw DimensionError("region_contains: point has dim " + std::to_string(x.dim()) +
                             " but region lives in dim " +
                             std::to_string(region.face_normals.cols()));
    }
    for (std::size_t i = 0; i < region.face_normals.rows(); ++i) {
        const double* row = region.face_normals.row_data(i);
        double value = region.face_offsets[i];
        for (std::size_t j = 0; j < x.dim(); ++j) value += row[j] * x[j];
        if (value < -eps) return false;
    }
    return true;
}

std::vector<double> face_distances(const ActivationRegion& region, const Vector& u) {
    if (u.dim() != region.face_normals.cols()) {
        throw DimensionError("face_distances: point has dim " + std::to_string(u.dim()) +
                             " but region lives in dim " +
                             std::to_string(region.face_normals.cols()));
    }
    std::vector<double> out(region.face_normals.rows());
    for (std::size_t i = 0; i < region.face_normals.rows(); ++i) {
        const double* row = region.face_normals.row_data(i);
        double value = region.face_offsets[i];
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < u.dim(); ++j) {
            value += row[j] * u[j];
            norm_sq += row[j] * row[j];
        }
        out[i] = norm_sq == 0.0 ? std::numeric_limits<double>::infinity()
                                : std::abs(value) / std::sqrt(norm_sq);
    }
    return out;
}

DecisionFunction local_decision(const MlpNetwork& net, const ForwardTrace& trace) {
    const std::size_t depth = net.depth();
    if (trace.raw.size() != depth) {
        throw DimensionError("local_decision: trace does not match network depth");
    }
    Matrix g = net.layer(depth - 1).weight;
    Vector d = net.layer(depth - 1).bias;
    for (std::size_t li = depth - 1; li-- > 0;) {
        const Vector& z = trace.raw[li];
        std::vector<std::uint8_t> theta(z.dim());
        for (std::size_t j = 0; j < z.dim(); ++j) theta[j] = z[j] >= 0.0 ? 1 : 0;
        const std::vector<std::size_t> act = active_indices(theta);

        const Layer& layer = net.layer(li);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            const double* grow = g.row_data(r);
            double sum = 0.0;
            for (std::size_t jj : act) sum += grow[jj] * layer.bias[jj];
            d[r] += sum;
        }
        if (act.empty()) {
            g = Matrix(g.rows(), layer.weight.cols());
            continue;
        }
        Matrix g_sub(g.rows(), act.size());
        for (std::size_t r = 0; r < g.rows(); ++r) {
            const double* grow = g.row_data(r);
            double* dst = g_sub.row_data(r);
            for (std::size_t jj = 0; jj < act.size(); ++jj) dst[jj] = grow[act[jj]];
        }
        Matrix w_sub(act.size(), layer.weight.cols());
        for (std::size_t jj = 0; jj < act.size(); ++jj) {
            std::memcpy(w_sub.row_data(jj), layer.weight.row_data(act[jj]),
                        layer.weight.cols() * sizeof(double));
        }
        g = matmul(g_sub, w_sub);
    }
    return {std::move(g), std::move(d)};
}

} // namespace relucert
