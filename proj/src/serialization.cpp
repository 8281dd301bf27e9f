#include "zonosmooth/serialization.hpp"

#include <cmath>
#include <stdexcept>

namespace zonosmooth::serialization {

namespace {

nlohmann::json matrix_rows(const Eigen::MatrixXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) rows.push_back(M(i, j));
    return rows;
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j, int rows, int cols, const char* name) {
    if (static_cast<int>(j.size()) != rows * cols)
        throw std::invalid_argument(std::string("zonotope json: bad length for ") + name);
    Eigen::MatrixXd M(rows, cols);
    int idx = 0;
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c) M(i, c) = j[idx++].get<double>();
    return M;
}

double entry_to_double(const nlohmann::json& v) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return lp::kInf;
        throw std::invalid_argument("zonotope json: unexpected string entry '" + s + "'");
    }
    return v.get<double>();
}

}  // namespace

nlohmann::json to_json(const cz::ConstrainedZonotope& Z) {
    nlohmann::json j;
    j["n"] = Z.dim();
    j["n_g"] = Z.num_generators();
    j["n_c"] = Z.num_constraints();
    j["G"] = matrix_rows(Z.generators());
    j["c"] = matrix_rows(Z.center());
    j["A"] = matrix_rows(Z.constraint_matrix());
    j["b"] = matrix_rows(Z.constraint_rhs());
    nlohmann::json h = nlohmann::json::array();
    for (Eigen::Index i = 0; i < Z.half_widths().size(); ++i) {
        const double v = Z.half_widths()(i);
        if (std::isinf(v))
            h.push_back("inf");
        else
            h.push_back(v);
    }
    j["h"] = h;
    return j;
}

cz::ConstrainedZonotope zonotope_from_json(const nlohmann::json& j) {
    const int n = j.at("n").get<int>();
    const int ng = j.at("n_g").get<int>();
    const int nc = j.at("n_c").get<int>();
    Eigen::MatrixXd G = matrix_from(j.at("G"), n, ng, "G");
    Eigen::VectorXd c = matrix_from(j.at("c"), n, 1, "c");
    Eigen::MatrixXd A = matrix_from(j.at("A"), nc, ng, "A");
    Eigen::VectorXd b = matrix_from(j.at("b"), nc, 1, "b");
    const auto& hj = j.at("h");
    if (static_cast<int>(hj.size()) != ng)
        throw std::invalid_argument("zonotope json: bad length for h");
    Eigen::VectorXd h(ng);
    for (int i = 0; i < ng; ++i) h(i) = entry_to_double(hj[i]);
    return cz::ConstrainedZonotope(G, c, A, b, h);
}

std::string to_string(const cz::ConstrainedZonotope& Z) { return to_json(Z).dump(); }

cz::ConstrainedZonotope zonotope_from_string(const std::string& text) {
    return zonotope_from_json(nlohmann::json::parse(text));
}

}  // namespace zonosmooth::serialization
