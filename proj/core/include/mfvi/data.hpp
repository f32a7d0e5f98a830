#ifndef MFVI_DATA_HPP
#define MFVI_DATA_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mfvi {

struct ProbitData {
    Eigen::MatrixXd design;
    Eigen::VectorXi responses;  // 0/1
};

// LibSVM sparse text format "label idx:val ..." with 1-based indices.
// Absent entries are zero; labels <= 0 map to 0, anything else to 1.
// width = 0 infers the number of columns from the largest index seen.
// Malformed lines raise std::runtime_error naming the line number.
ProbitData read_libsvm(const std::string& path, int width = 0);
void write_libsvm(const std::string& path, const ProbitData& data);

// One value per line under a single "x" header.
Eigen::VectorXd read_value_column(const std::string& path);
void write_value_column(const std::string& path, const Eigen::VectorXd& values);

// Dense 0/1 adjacency, one comma-separated row per line, no header.
Eigen::MatrixXi read_adjacency(const std::string& path);
void write_adjacency(const std::string& path, const Eigen::MatrixXi& adjacency);

// Shortest decimal text that round-trips a double (17 significant digits).
std::string format_double(double value);

// Column-ordered table serialized as CSV (LF endings) or a JSON array of
// row objects mirroring the columns.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

void write_csv(const std::string& path, const Table& table);
void write_json(const std::string& path, const Table& table);
std::string to_csv(const Table& table);

}  // namespace mfvi

#endif
