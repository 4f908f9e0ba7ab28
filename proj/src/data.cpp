#include "gwgl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "gwgl/error.hpp"

namespace gwgl {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw InvalidArgument("cannot format number");
    return std::string(buf, end);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last)
        throw InvalidArgument("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                              ", column '" + column + "'");
    return value;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (group_sizes.empty()) throw InvalidArgument("synthetic spec needs at least one group");
    for (Index s : group_sizes)
        if (s < 1) throw InvalidArgument("group sizes must be positive");
    if (snr.has_value() == sigma2.has_value())
        throw InvalidArgument("set exactly one of SNR and sigma^2");
    if (snr && !(*snr > 0.0)) throw InvalidArgument("SNR must be positive");
    if (sigma2 && !(*sigma2 > 0.0)) throw InvalidArgument("sigma^2 must be positive");
    if (!(rho_w >= 0.0 && rho_w < 1.0))
        throw InvalidArgument("within-group correlation must lie in [0, 1)");
    if (rho_jitter && !(rho_jitter->scale * rho_jitter->high < 1.0 &&
                        rho_jitter->scale * rho_jitter->low >= 0.0 &&
                        rho_jitter->low <= rho_jitter->high))
        throw InvalidArgument("rho jitter range must stay inside [0, 1)");
    if (!(outlier_prob >= 0.0 && outlier_prob < 1.0))
        throw InvalidArgument("outlier probability must lie in [0, 1)");
    if (n < 1) throw InvalidArgument("sample count must be positive");
}

Index SyntheticSpec::p() const {
    return std::accumulate(group_sizes.begin(), group_sizes.end(), Index{0});
}

std::string to_string(ResponseKind kind) {
    return kind == ResponseKind::Binary ? "binary" : "continuous";
}

ResponseKind response_kind_from_string(const std::string& name) {
    if (name == "binary") return ResponseKind::Binary;
    if (name == "continuous") return ResponseKind::Continuous;
    throw InvalidArgument("unknown response kind '" + name + "'");
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& X) const {
    if (X.cols() != shift.size()) throw InvalidArgument("standardization: column count mismatch");
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Index j = 0; j < X.cols(); ++j)
        out.col(j) = (X.col(j).array() - shift[j]) / scale[j];
    return out;
}

Eigen::VectorXd Standardization::original_coefficients(const Eigen::VectorXd& beta) const {
    return beta.cwiseQuotient(scale);
}

Dataset Dataset::take_rows(const std::vector<Index>& rows) const {
    Dataset out;
    out.kind = kind;
    out.feature_names = feature_names;
    out.response_name = response_name;
    out.standardization = standardization;
    out.X.resize(static_cast<Index>(rows.size()), X.cols());
    out.y.resize(static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.X.row(static_cast<Index>(k)) = X.row(rows[k]);
        out.y[static_cast<Index>(k)] = y[rows[k]];
    }
    if (truth) {
        out.truth = truth;
        out.truth->outlier.clear();
        if (!truth->outlier.empty())
            for (Index r : rows) out.truth->outlier.push_back(truth->outlier[static_cast<std::size_t>(r)]);
    }
    return out;
}

void Dataset::validate() const {
    if (X.rows() != y.size()) throw InvalidArgument("dataset: X and y row counts differ");
    if (static_cast<Index>(feature_names.size()) != X.cols())
        throw InvalidArgument("dataset: one feature name per column required");
    if (kind == ResponseKind::Binary)
        for (Index i = 0; i < y.size(); ++i)
            if (y[i] != 1.0 && y[i] != -1.0)
                throw InvalidArgument("dataset: binary label outside {-1, +1} at row " + std::to_string(i));
}

Eigen::MatrixXd block_covariance(const std::vector<Index>& group_sizes, double rho) {
    Index p = 0;
    for (Index s : group_sizes) p += s;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(p, p);
    Index start = 0;
    for (Index s : group_sizes) {
        sigma.block(start, start, s, s).setConstant(rho);
        start += s;
    }
    sigma.diagonal().setOnes();
    return sigma;
}

Eigen::VectorXd planted_coefficients(const std::vector<Index>& group_sizes) {
    Index p = 0;
    for (Index s : group_sizes) p += s;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Index start = 0;
    for (std::size_t l = 0; l < group_sizes.size(); ++l) {
        if ((l + 1) % 2 == 0) beta.segment(start, group_sizes[l]).setConstant(0.5);
        start += group_sizes[l];
    }
    return beta;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double rho = spec.rho_w;
    if (spec.rho_jitter) {
        std::uniform_real_distribution<double> noise(spec.rho_jitter->low, spec.rho_jitter->high);
        rho = spec.rho_jitter->scale * noise(rng);
    }

    const Index p = spec.p();
    GroundTruth truth;
    truth.beta = planted_coefficients(spec.group_sizes);
    truth.covariance = block_covariance(spec.group_sizes, rho);
    truth.rho_w = rho;
    const double signal = truth.beta.dot(truth.covariance * truth.beta);
    truth.noise_variance = spec.sigma2 ? *spec.sigma2 : signal / *spec.snr;
    if (!(truth.noise_variance > 0.0))
        throw InvalidArgument("SNR requires a nonzero signal (no even-numbered group)");
    const double sigma = std::sqrt(truth.noise_variance);

    Eigen::LLT<Eigen::MatrixXd> llt(truth.covariance);
    if (llt.info() != Eigen::Success) throw InvalidArgument("covariance is not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();

    Dataset data;
    data.X.resize(spec.n, p);
    data.y.resize(spec.n);
    truth.outlier.assign(static_cast<std::size_t>(spec.n), 0);
    Eigen::VectorXd draw(p);
    for (Index i = 0; i < spec.n; ++i) {
        for (Index j = 0; j < p; ++j) draw[j] = normal(rng);
        const Eigen::VectorXd x = chol * draw;
        data.X.row(i) = x.transpose();
        double mean = x.dot(truth.beta);
        if (unif(rng) < spec.outlier_prob) {
            mean += 5.0 * sigma;
            truth.outlier[static_cast<std::size_t>(i)] = 1;
        }
        data.y[i] = mean + sigma * normal(rng);
    }
    if (spec.binary) {
        data.kind = ResponseKind::Binary;
        for (Index i = 0; i < spec.n; ++i) data.y[i] = data.y[i] >= 0.0 ? 1.0 : -1.0;
    }
    for (Index j = 0; j < p; ++j) data.feature_names.push_back("x" + std::to_string(j + 1));
    data.truth = std::move(truth);
    return data;
}

Dataset standardize(const Dataset& data) {
    Standardization rec;
    const Index p = data.cols();
    rec.shift.resize(p);
    rec.scale.resize(p);
    for (Index j = 0; j < p; ++j) {
        const double mean = data.X.col(j).mean();
        const double norm = (data.X.col(j).array() - mean).matrix().norm();
        const double spread = data.X.col(j).maxCoeff() - data.X.col(j).minCoeff();
        if (data.rows() == 0 || spread == 0.0 || norm == 0.0) {
            const std::string name = static_cast<std::size_t>(j) < data.feature_names.size()
                                         ? data.feature_names[static_cast<std::size_t>(j)]
                                         : std::to_string(j);
            throw InvalidArgument("cannot standardize constant column '" + name + "'");
        }
        rec.shift[j] = mean;
        rec.scale[j] = norm;
    }
    return apply_standardization(data, rec);
}

Dataset apply_standardization(const Dataset& data, const Standardization& record) {
    Dataset out = data;
    out.X = record.apply(data.X);
    out.standardization = record;
    return out;
}

Dataset load_dataset(const std::string& path, const std::string& response, ResponseKind kind) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open data file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("data file '" + path + "' is empty");
    const auto header = split_csv_line(line);
    const auto it = std::find(header.begin(), header.end(), response);
    if (it == header.end())
        throw InvalidArgument("response column '" + response + "' not found in '" + path + "'");
    const auto resp_col = static_cast<std::size_t>(it - header.begin());

    std::vector<std::vector<double>> rows;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw InvalidArgument("row " + std::to_string(row_no) + " of '" + path + "' has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(header.size()));
        std::vector<double> values(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) values[c] = parse_cell(cells[c], row_no, header[c]);
        rows.push_back(std::move(values));
    }

    Dataset data;
    data.kind = kind;
    data.response_name = response;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (c != resp_col) data.feature_names.push_back(header[c]);
    const auto n = static_cast<Index>(rows.size());
    const auto p = static_cast<Index>(header.size() - 1);
    data.X.resize(n, p);
    data.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        Index col = 0;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == resp_col) data.y[i] = rows[static_cast<std::size_t>(i)][c];
            else data.X(i, col++) = rows[static_cast<std::size_t>(i)][c];
        }
    }

    if (kind == ResponseKind::Binary) {
        const bool zero_one = (data.y.array() == 0.0 || data.y.array() == 1.0).all();
        for (Index i = 0; i < n; ++i) {
            const double v = data.y[i];
            if (zero_one) {
                data.y[i] = v == 1.0 ? 1.0 : -1.0;
            } else if (v != 1.0 && v != -1.0) {
                throw InvalidArgument("label " + format_double(v) + " at row " + std::to_string(i + 2) +
                                      " is not a {0,1} or {-1,1} encoding");
            }
        }
    }
    return data;
}

void save_dataset(const std::string& path, const Dataset& data) {
    std::string out;
    for (const auto& name : data.feature_names) out += name + ",";
    out += data.response_name + "\n";
    for (Index i = 0; i < data.rows(); ++i) {
        for (Index j = 0; j < data.cols(); ++j) out += format_double(data.X(i, j)) + ",";
        out += format_double(data.y[i]) + "\n";
    }
    write_file_atomic(path, out);
}

DatasetSplit split_dataset(const Dataset& data, double train, double validation, double test,
                           std::uint64_t seed) {
    if (train < 0.0 || validation < 0.0 || test < 0.0)
        throw InvalidArgument("split fractions must be non-negative");
    if (std::abs(train + validation + test - 1.0) > 1e-9)
        throw InvalidArgument("split fractions must sum to 1");
    const Index n = data.rows();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const auto n_val = static_cast<Index>(std::floor(static_cast<double>(n) * validation + 1e-9));
    const auto n_test = static_cast<Index>(std::floor(static_cast<double>(n) * test + 1e-9));
    const Index n_train = n - n_val - n_test;

    DatasetSplit split;
    split.train_rows.assign(order.begin(), order.begin() + n_train);
    split.validation_rows.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    split.test_rows.assign(order.begin() + n_train + n_val, order.end());
    split.train = data.take_rows(split.train_rows);
    split.validation = data.take_rows(split.validation_rows);
    split.test = data.take_rows(split.test_rows);
    return split;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidArgument("cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out) throw InvalidArgument("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw InvalidArgument("cannot move output into place at '" + path + "': " + ec.message());
}

}  // namespace gwgl
