#pragma once

// File formats: models as JSON, datasets and panels as CSV with a header row.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasefield/chow_liu.hpp"
#include "phasefield/model.hpp"
#include "phasefield/signal.hpp"

namespace phasefield {

/// Malformed or inconsistent input data.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

/// {"p": p, "edges": [{"i", "j", "kappa", "mu"}, ...]}
Json to_json(const GraphModel& m);
GraphModel graph_model_from_json(const Json& j);

/// {"root": r, "edges": [{"parent", "child", "kappa", "mu"}, ...]}
Json to_json(const TreeModel& t);
TreeModel tree_model_from_json(const Json& j);

bool is_tree_json(const Json& j);

Json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

struct CsvMatrix {
    std::vector<std::string> header;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
};

/// Reads a numeric CSV with one header line. Ragged rows and unparsable
/// cells raise DataError.
CsvMatrix read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, std::size_t rows,
               std::size_t cols, const std::vector<double>& values);

/// Header y0..y{p-1}; values are wrapped on read.
void write_dataset_csv(const std::filesystem::path& path, const PhaseDataset& d);
PhaseDataset read_dataset_csv(const std::filesystem::path& path);

/// Header ch0..ch{p-1}; one row per time sample. dt is not stored in the file.
void write_panel_csv(const std::filesystem::path& path, const TimeSeriesPanel& panel);
TimeSeriesPanel read_panel_csv(const std::filesystem::path& path, double dt);

} // namespace phasefield
