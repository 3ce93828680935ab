#include "phasefield/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace phasefield {

namespace {

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(std::string cell, std::size_t line_no)
{
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    double v = 0.0;
    const auto* first = cell.data() + start;
    const auto* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last)
        throw DataError("line " + std::to_string(line_no) + ": cannot parse '" + cell + "' as a number");
    return v;
}

std::vector<std::string> numbered(const char* prefix, int count)
{
    std::vector<std::string> h;
    for (int i = 0; i < count; ++i) h.push_back(prefix + std::to_string(i));
    return h;
}

template <class T>
T field(const Json& j, const char* key)
{
    if (!j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw DataError(std::string("field '") + key + "' has the wrong type");
    }
}

} // namespace

Json to_json(const GraphModel& m)
{
    Json edges = Json::array();
    const auto& es = m.structure().edges();
    for (std::size_t q = 0; q < es.size(); ++q)
        edges.push_back({{"i", es[q].i}, {"j", es[q].j}, {"kappa", m.couplings()[q].kappa},
                         {"mu", m.couplings()[q].mu.radians()}});
    return Json{{"p", m.p()}, {"edges", edges}};
}

GraphModel graph_model_from_json(const Json& j)
{
    const int p = field<int>(j, "p");
    if (p < 1) throw DataError("model: p must be >= 1");
    std::vector<std::pair<Edge, EdgeCoupling>> es;
    for (const auto& e : field<Json>(j, "edges")) {
        const double mu = field<double>(e, "mu");
        if (!std::isfinite(mu)) throw DataError("model: non-finite mu");
        es.push_back({{field<int>(e, "i"), field<int>(e, "j")}, {field<double>(e, "kappa"), Angle(mu)}});
    }
    try {
        return GraphModel::from_oriented(p, es);
    } catch (const std::invalid_argument& ex) {
        throw DataError(std::string("model: ") + ex.what());
    }
}

Json to_json(const TreeModel& t)
{
    Json edges = Json::array();
    for (const auto& e : t.edges())
        edges.push_back({{"parent", e.parent}, {"child", e.child}, {"kappa", e.kappa}, {"mu", e.mu.radians()}});
    return Json{{"root", t.root()}, {"edges", edges}};
}

TreeModel tree_model_from_json(const Json& j)
{
    std::vector<TreeEdge> es;
    for (const auto& e : field<Json>(j, "edges")) {
        const double mu = field<double>(e, "mu");
        if (!std::isfinite(mu)) throw DataError("tree: non-finite mu");
        es.push_back({field<int>(e, "parent"), field<int>(e, "child"), field<double>(e, "kappa"), Angle(mu)});
    }
    try {
        return TreeModel(field<int>(j, "root"), std::move(es));
    } catch (const std::invalid_argument& ex) {
        throw DataError(std::string("tree: ") + ex.what());
    }
}

bool is_tree_json(const Json& j)
{
    return j.is_object() && j.contains("root");
}

Json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& ex) {
        throw DataError(path.string() + ": " + ex.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::string format_double(double v)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

CsvMatrix read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    CsvMatrix m;
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    m.header = split_line(line);
    m.cols = m.header.size();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_line(line);
        if (cells.size() != m.cols)
            throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " + std::to_string(m.cols));
        for (const auto& c : cells) m.values.push_back(parse_cell(c, line_no));
        ++m.rows;
    }
    return m;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, std::size_t rows,
               std::size_t cols, const std::vector<double>& values)
{
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << format_double(values[r * cols + c]);
        out << '\n';
    }
}

void write_dataset_csv(const std::filesystem::path& path, const PhaseDataset& d)
{
    write_csv(path, numbered("y", d.p()), d.n(), std::size_t(d.p()), d.values());
}

PhaseDataset read_dataset_csv(const std::filesystem::path& path)
{
    auto m = read_csv(path);
    if (m.cols == 0) throw DataError(path.string() + ": no columns");
    for (double v : m.values)
        if (!std::isfinite(v)) throw DataError(path.string() + ": non-finite phase");
    return PhaseDataset(m.rows, int(m.cols), std::move(m.values));
}

void write_panel_csv(const std::filesystem::path& path, const TimeSeriesPanel& panel)
{
    write_csv(path, numbered("ch", panel.p), panel.n_t, std::size_t(panel.p), panel.values);
}

TimeSeriesPanel read_panel_csv(const std::filesystem::path& path, double dt)
{
    auto m = read_csv(path);
    if (m.cols == 0) throw DataError(path.string() + ": no columns");
    for (double v : m.values)
        if (!std::isfinite(v)) throw DataError(path.string() + ": non-finite measurement");
    return TimeSeriesPanel{m.rows, int(m.cols), dt, std::move(m.values)};
}

} // namespace phasefield
