#include "mfvi/data.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mfvi {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << path << ":" << line << ": " << what;
    throw std::runtime_error(msg.str());
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path + " for reading");
    }
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    return out;
}

}  // namespace

std::string format_double(double value) {
    std::ostringstream out;
    out.precision(17);
    out << value;
    return out.str();
}

ProbitData read_libsvm(const std::string& path, int width) {
    std::ifstream in = open_in(path);
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<int> labels;
    int max_index = 0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream fields(line);
        double label;
        if (!(fields >> label)) {
            parse_fail(path, line_no, "missing label");
        }
        std::vector<std::pair<int, double>> entries;
        std::string token;
        while (fields >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos) {
                parse_fail(path, line_no, "expected index:value, got '" + token + "'");
            }
            int index = 0;
            const auto* first = token.data();
            const auto ir = std::from_chars(first, first + colon, index);
            if (ir.ec != std::errc() || ir.ptr != first + colon || index < 1) {
                parse_fail(path, line_no, "bad feature index in '" + token + "'");
            }
            double value = 0.0;
            try {
                std::size_t used = 0;
                value = std::stod(token.substr(colon + 1), &used);
                if (used != token.size() - colon - 1) {
                    parse_fail(path, line_no, "bad feature value in '" + token + "'");
                }
            } catch (const std::invalid_argument&) {
                parse_fail(path, line_no, "bad feature value in '" + token + "'");
            }
            max_index = std::max(max_index, index);
            entries.emplace_back(index, value);
        }
        rows.push_back(std::move(entries));
        labels.push_back(label <= 0.0 ? 0 : 1);
    }

    const int cols = width > 0 ? width : max_index;
    if (width > 0 && max_index > width) {
        throw std::runtime_error(path + ": feature index " + std::to_string(max_index) +
                                 " exceeds requested width " + std::to_string(width));
    }
    ProbitData data;
    data.design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), cols);
    data.responses.resize(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.responses[static_cast<Eigen::Index>(i)] = labels[i];
        for (const auto& [index, value] : rows[i]) {
            data.design(static_cast<Eigen::Index>(i), index - 1) = value;
        }
    }
    return data;
}

void write_libsvm(const std::string& path, const ProbitData& data) {
    std::ofstream out = open_out(path);
    for (Eigen::Index i = 0; i < data.design.rows(); ++i) {
        out << (data.responses[i] == 1 ? "1" : "-1");
        for (Eigen::Index j = 0; j < data.design.cols(); ++j) {
            const double v = data.design(i, j);
            if (v != 0.0) {
                out << ' ' << (j + 1) << ':' << format_double(v);
            }
        }
        out << '\n';
    }
}

Eigen::VectorXd read_value_column(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line == "x") {
            continue;
        }
        if (line.empty()) {
            continue;
        }
        try {
            values.push_back(std::stod(line));
        } catch (const std::invalid_argument&) {
            parse_fail(path, line_no, "expected a number, got '" + line + "'");
        }
    }
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_value_column(const std::string& path, const Eigen::VectorXd& values) {
    std::ofstream out = open_out(path);
    out << "x\n";
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        out << format_double(values[i]) << '\n';
    }
}

Eigen::MatrixXi read_adjacency(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<int>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<int> row;
        std::istringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, ',')) {
            if (cell != "0" && cell != "1") {
                parse_fail(path, line_no, "adjacency entries must be 0 or 1, got '" + cell + "'");
            }
            row.push_back(cell == "1" ? 1 : 0);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            parse_fail(path, line_no, "ragged adjacency row");
        }
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXi adjacency(static_cast<Eigen::Index>(rows.size()),
                              rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return adjacency;
}

void write_adjacency(const std::string& path, const Eigen::MatrixXi& adjacency) {
    std::ofstream out = open_out(path);
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
        for (Eigen::Index j = 0; j < adjacency.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << adjacency(i, j);
        }
        out << '\n';
    }
}

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size()) {
        throw std::logic_error("Table: row width does not match columns");
    }
    rows.push_back(std::move(row));
}

std::string to_csv(const Table& table) {
    std::ostringstream out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) {
            out << ',';
        }
        out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                out << ',';
            }
            out << row[c];
        }
        out << '\n';
    }
    return out.str();
}

void write_csv(const std::string& path, const Table& table) {
    std::ofstream out = open_out(path);
    out << to_csv(table);
}

void write_json(const std::string& path, const Table& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json obj;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            obj[table.columns[c]] = row[c];
        }
        rows.push_back(std::move(obj));
    }
    std::ofstream out = open_out(path);
    out << rows.dump(2) << '\n';
}

}  // namespace mfvi
