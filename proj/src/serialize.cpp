// JSON serialization of density matrices and composite states.

#include "phase/serialize.hpp"

#include <string>

#include "phase/errors.hpp"

namespace phase {

using nlohmann::json;

namespace {

const json& require_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError(std::string("missing field '") + key + "'");
    return *it;
}

} // namespace

json json_of(const ComplexMatrix& m) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            entries.push_back({m(i, k).real(), m(i, k).imag()});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const json& j) {
    const auto rows = require_field(j, "rows").get<Eigen::Index>();
    const auto cols = require_field(j, "cols").get<Eigen::Index>();
    const json& entries = require_field(j, "entries");
    if (rows < 0 || cols < 0 || !entries.is_array() ||
        entries.size() != static_cast<std::size_t>(rows * cols))
        throw ConfigError("matrix entry count does not match rows*cols");
    ComplexMatrix m(rows, cols);
    std::size_t pos = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k, ++pos) {
            const json& e = entries[pos];
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("matrix entries must be [re, im] pairs");
            m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    return m;
}

json json_of(const DensityMatrix& rho) {
    return {{"type", "density"}, {"matrix", json_of(rho.matrix)}};
}

DensityMatrix density_from_json(const json& j) {
    try {
        return density_from_matrix(matrix_from_json(require_field(j, "matrix")));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad density document: ") + e.what());
    }
}

json json_of(const CompositeState& s) {
    json lambdas = json::array();
    for (Eigen::Index n = 0; n < s.lambdas.size(); ++n)
        lambdas.push_back(s.lambdas(n));
    return {{"type", "composite"},
            {"convention", convention_name(s.convention)},
            {"system_dim", s.system_dim},
            {"lambdas", std::move(lambdas)},
            {"basis", json_of(s.basis)},
            {"phase_op", json_of(s.phase_op)}};
}

AncillaConvention convention_from_name(const std::string& name) {
    if (name == "purified")
        return AncillaConvention::PURIFIED;
    if (name == "thermal-vacuum")
        return AncillaConvention::THERMAL_VACUUM;
    throw ConfigError("unknown convention '" + name + "'");
}

CompositeState composite_from_json(const json& j) {
    try {
        CompositeState s;
        s.convention = convention_from_name(require_field(j, "convention").get<std::string>());
        s.system_dim = require_field(j, "system_dim").get<Eigen::Index>();
        const json& lam = require_field(j, "lambdas");
        s.lambdas = RealVector(lam.size());
        for (std::size_t n = 0; n < lam.size(); ++n)
            s.lambdas(static_cast<Eigen::Index>(n)) = lam[n].get<double>();
        s.basis = matrix_from_json(require_field(j, "basis"));
        s.phase_op = matrix_from_json(require_field(j, "phase_op"));
        if (s.basis.rows() != s.system_dim || s.basis.cols() != s.system_dim ||
            s.phase_op.rows() != s.system_dim || s.lambdas.size() != s.system_dim)
            throw ConfigError("composite document dimensions disagree");
        if (unitarity_residual(s.phase_op) > 1e-8 || unitarity_residual(s.basis) > 1e-8)
            throw ConfigError("composite document factors are not unitary");
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad composite document: ") + e.what());
    }
}

} // namespace phase
