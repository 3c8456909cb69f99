#include "covpath/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "covpath/errors.hpp"

namespace covpath {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line) + ": not a finite number: '" + std::string(field) + "'");
    }
    return v;
}

nlohmann::json matrix_to_json(const SymMatrix& m) {
    auto rows = nlohmann::json::array();
    for (Index i = 0; i < m.size(); ++i) {
        auto row = nlohmann::json::array();
        for (Index j = 0; j < m.size(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

SymMatrix matrix_from_json(const nlohmann::json& rows, const char* name) {
    if (!rows.is_array() || rows.empty()) throw ParseError(std::string("state: '") + name + "' must be a non-empty array");
    const auto n = static_cast<Index>(rows.size());
    MatrixXd m(n, n);
    for (Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != n) {
            throw ParseError(std::string("state: '") + name + "' is not square");
        }
        for (Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    if (m != m.transpose()) throw ParseError(std::string("state: '") + name + "' is not symmetric");
    return SymMatrix::from_dense(m);
}

}  // namespace

std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + file.string());
    out << text;
    if (!out) throw InputError("write failed: " + file.string());
}

MatrixXd parse_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            row.push_back(parse_field(rest.substr(0, comma), lineno));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                             " fields, found " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("empty matrix");
    MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

MatrixXd read_csv(const std::filesystem::path& file) {
    try {
        return parse_csv(read_text(file));
    } catch (const ParseError& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
}

std::string format_csv(const MatrixXd& m) {
    std::string out;
    char buf[32];
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out.push_back(',');
            const auto res = std::to_chars(buf, buf + sizeof buf, m(i, j), std::chars_format::general, 17);
            out.append(buf, res.ptr);
        }
        out.push_back('\n');
    }
    return out;
}

void write_csv(const std::filesystem::path& file, const MatrixXd& m) { write_text(file, format_csv(m)); }

SymMatrix to_symmetric(const MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw ParseError("matrix must be square, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > kAsymmetryTolerance * scale) {
        throw AsymmetricInput("matrix asymmetry " + std::to_string(asym) + " exceeds tolerance");
    }
    return SymMatrix::from_dense(m);
}

SymMatrix to_covariance(const MatrixXd& m) {
    SymMatrix s = to_symmetric(m);
    for (Index i = 0; i < s.size(); ++i) {
        if (!(s(i, i) > 0.0)) throw NonPositiveDiagonal("covariance diagonal entry " + std::to_string(i) + " is not positive");
    }
    return s;
}

SymMatrix load_covariance(const std::filesystem::path& file) { return to_covariance(read_csv(file)); }

SymMatrix load_symmetric(const std::filesystem::path& file) { return to_symmetric(read_csv(file)); }

SymMatrix sample_covariance(const MatrixXd& data) {
    if (data.rows() < 2) throw ParseError("samples: need at least two rows");
    const VectorXd mean = data.colwise().mean();
    const MatrixXd centered = data.rowwise() - mean.transpose();
    const MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.rows());
    for (Index i = 0; i < cov.rows(); ++i) {
        if (!(cov(i, i) > 0.0)) throw NonPositiveDiagonal("samples: column " + std::to_string(i) + " has zero variance");
    }
    return SymMatrix::from_dense(cov);
}

SymMatrix load_samples(const std::filesystem::path& file) { return sample_covariance(read_csv(file)); }

void write_state(const std::filesystem::path& file, const SolverState& s) {
    nlohmann::json j;
    j["schema"] = "covpath.state/1";
    j["rho"] = s.rho;
    j["t"] = s.t;
    j["sigma"] = matrix_to_json(s.sigma);
    j["U"] = matrix_to_json(s.U);
    write_text(file, j.dump(1) + "\n");
}

SolverState read_state(const std::filesystem::path& file) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(file));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
    try {
        if (j.value("schema", "") != "covpath.state/1") throw ParseError("unknown state schema");
        SolverState s;
        s.rho = j.at("rho").get<double>();
        s.t = j.at("t").get<double>();
        s.sigma = matrix_from_json(j.at("sigma"), "sigma");
        s.U = matrix_from_json(j.at("U"), "U");
        if (s.sigma.size() != s.U.size()) throw ParseError("sigma and U differ in size");
        if (!(s.rho > 0.0) || !(s.t > 0.0)) throw ParseError("rho and t must be positive");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(file.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
}

}  // namespace covpath
