#include "ghop/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ghop::io {

using nlohmann::json;

void atomic_write(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp);
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("atomic_write: rename failed for " + path);
    }
}

std::string format_double(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows)
{
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::invalid_argument("write_csv: row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
    atomic_write(path, out.str());
}

namespace {

json lattice_json(const lattice::Lattice& lat)
{
    return json{{"dimension", lat.dimension},
                {"h", lat.cell_size},
                {"extents", {lat.extents[0], lat.extents[1], lat.extents[2]}},
                {"origin", {lat.origin[0], lat.origin[1], lat.origin[2]}},
                {"margin", lat.margin_cells}};
}

lattice::Lattice lattice_from_json(const json& j)
{
    lattice::Lattice lat;
    lat.dimension = j.at("dimension").get<int>();
    lat.cell_size = j.at("h").get<double>();
    for (int a = 0; a < 3; ++a) {
        lat.extents[a] = j.at("extents").at(a).get<int>();
        lat.origin[a] = j.at("origin").at(a).get<double>();
    }
    lat.margin_cells = j.at("margin").get<int>();
    if (lat.dimension < 2 || lat.dimension > 3 || lat.cell_size <= 0.0 ||
        lat.cell_count() <= 0)
        throw std::runtime_error("configuration dump: invalid lattice header");
    return lat;
}

lattice::SpinConfiguration rebuild(const lattice::Lattice& lat,
                                   const std::vector<long long>& occupied)
{
    lattice::SpinConfiguration config;
    config.lattice = lat;
    config.grid.assign(lat.cell_count(), 0);
    config.slot.assign(lat.cell_count(), -1);
    config.occupied.reserve(occupied.size());
    for (long long idx : occupied) {
        if (idx < 0 || idx >= lat.cell_count() || config.grid[idx])
            throw std::runtime_error("configuration dump: bad occupied cell");
        config.grid[idx] = 1;
        config.slot[idx] = static_cast<int>(config.occupied.size());
        config.occupied.push_back(idx);
    }
    return config;
}

// Occupied cells as index lines, list order preserved.
std::string occupied_lines(const lattice::SpinConfiguration& config)
{
    std::ostringstream out;
    for (long long idx : config.occupied) {
        const auto c = config.lattice.unpack(idx);
        out << c[0] << ' ' << c[1];
        if (config.lattice.dimension == 3) out << ' ' << c[2];
        out << '\n';
    }
    return out.str();
}

json config_json(const lattice::SpinConfiguration& config)
{
    json j = lattice_json(config.lattice);
    json cells = json::array();
    for (long long idx : config.occupied) {
        const auto c = config.lattice.unpack(idx);
        if (config.lattice.dimension == 3)
            cells.push_back({c[0], c[1], c[2]});
        else
            cells.push_back({c[0], c[1]});
    }
    j["occupied"] = std::move(cells);
    return j;
}

lattice::SpinConfiguration config_from_json(const json& j)
{
    const auto lat = lattice_from_json(j);
    std::vector<long long> occupied;
    for (const auto& cell : j.at("occupied")) {
        const int i = cell.at(0).get<int>();
        const int jj = cell.at(1).get<int>();
        const int k = lat.dimension == 3 ? cell.at(2).get<int>() : 0;
        occupied.push_back(lat.pack(i, jj, k));
    }
    return rebuild(lat, occupied);
}

} // namespace

void save_configuration(const std::string& path,
                        const lattice::SpinConfiguration& config, double jump,
                        unsigned long long seed, double probability)
{
    json header = lattice_json(config.lattice);
    header["d"] = jump;
    header["M"] = config.occupied_count();
    header["seed"] = seed;
    header["probability"] = probability;
    atomic_write(path, header.dump() + "\n" + occupied_lines(config));
}

StoredConfiguration load_configuration(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_configuration: cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_configuration: empty file " + path);

    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw std::runtime_error("load_configuration: bad header: " +
                                 std::string(e.what()));
    }

    StoredConfiguration stored;
    const auto lat = lattice_from_json(header);
    stored.jump = header.at("d").get<double>();
    stored.seed = header.at("seed").get<unsigned long long>();
    stored.probability = header.at("probability").get<double>();
    const long long m = header.at("M").get<long long>();

    std::vector<long long> occupied;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream cells(line);
        int i, j, k = 0;
        if (!(cells >> i >> j) || (lat.dimension == 3 && !(cells >> k)))
            throw std::runtime_error("load_configuration: bad cell line");
        occupied.push_back(lat.pack(i, j, k));
    }
    if (static_cast<long long>(occupied.size()) != m)
        throw std::runtime_error("load_configuration: occupied count differs "
                                 "from header M");
    stored.config = rebuild(lat, occupied);
    return stored;
}

void save_run_record(const std::string& json_path, const std::string& dump_path,
                     const optimizer::RunRecord& record, double jump)
{
    json j{{"seed", record.master_seed},
           {"d", jump},
           {"M", record.best_configuration.occupied_count()},
           {"h", record.best_configuration.lattice.cell_size},
           {"dimension", record.best_configuration.lattice.dimension},
           {"best_probability", record.best_probability},
           {"final_probability", record.final_probability},
           {"interrupted", record.interrupted},
           {"probability_trace", record.probability_trace},
           {"acceptance_trace", record.acceptance_trace},
           {"best_trace", record.best_trace},
           {"configuration_dump",
            std::filesystem::path(dump_path).filename().string()}};
    atomic_write(json_path, j.dump(2) + "\n");
    save_configuration(dump_path, record.best_configuration, jump,
                       record.master_seed, record.best_probability);
}

void save_checkpoint(const std::string& path, const optimizer::AnnealState& state,
                     double jump, unsigned long long seed)
{
    json j{{"d", jump},
           {"seed", seed},
           {"temperature", state.temperature},
           {"sweep_index", state.sweep_index},
           {"current_probability", state.current_probability},
           {"best_probability", state.best_probability},
           {"rng_state", state.rng_state},
           {"probability_trace", state.probability_trace},
           {"acceptance_trace", state.acceptance_trace},
           {"best_trace", state.best_trace},
           {"config", config_json(state.config)},
           {"best_config", config_json(state.best_configuration)}};
    atomic_write(path, j.dump() + "\n");
}

StoredCheckpoint load_checkpoint(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("load_checkpoint: bad JSON: " +
                                 std::string(e.what()));
    }
    StoredCheckpoint stored;
    stored.jump = j.at("d").get<double>();
    stored.seed = j.at("seed").get<unsigned long long>();
    auto& s = stored.state;
    s.temperature = j.at("temperature").get<double>();
    s.sweep_index = j.at("sweep_index").get<long long>();
    s.current_probability = j.at("current_probability").get<double>();
    s.best_probability = j.at("best_probability").get<double>();
    s.rng_state = j.at("rng_state").get<std::string>();
    s.probability_trace = j.at("probability_trace").get<std::vector<double>>();
    s.acceptance_trace = j.at("acceptance_trace").get<std::vector<double>>();
    s.best_trace = j.at("best_trace").get<std::vector<double>>();
    s.config = config_from_json(j.at("config"));
    s.best_configuration = config_from_json(j.at("best_config"));
    return stored;
}

void save_tempering_checkpoint(const std::string& path,
                               const optimizer::TemperingState& state, double jump,
                               unsigned long long seed)
{
    json replicas = json::array();
    for (const auto& r : state.replicas) replicas.push_back(config_json(r));
    json j{{"d", jump},
           {"seed", seed},
           {"round", state.round},
           {"current", state.current},
           {"best_probability", state.best_probability},
           {"rng_states", state.rng_states},
           {"swap_rng_state", state.swap_rng_state},
           {"probability_trace", state.probability_trace},
           {"acceptance_trace", state.acceptance_trace},
           {"best_trace", state.best_trace},
           {"replicas", std::move(replicas)},
           {"best_config", config_json(state.best_configuration)}};
    atomic_write(path, j.dump() + "\n");
}

StoredTemperingCheckpoint load_tempering_checkpoint(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_tempering_checkpoint: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("load_tempering_checkpoint: bad JSON: " +
                                 std::string(e.what()));
    }
    StoredTemperingCheckpoint stored;
    stored.jump = j.at("d").get<double>();
    stored.seed = j.at("seed").get<unsigned long long>();
    auto& s = stored.state;
    s.round = j.at("round").get<long long>();
    s.current = j.at("current").get<std::vector<double>>();
    s.best_probability = j.at("best_probability").get<double>();
    s.rng_states = j.at("rng_states").get<std::vector<std::string>>();
    s.swap_rng_state = j.at("swap_rng_state").get<std::string>();
    s.probability_trace = j.at("probability_trace").get<std::vector<double>>();
    s.acceptance_trace = j.at("acceptance_trace").get<std::vector<double>>();
    s.best_trace = j.at("best_trace").get<std::vector<double>>();
    for (const auto& r : j.at("replicas")) s.replicas.push_back(config_from_json(r));
    s.best_configuration = config_from_json(j.at("best_config"));
    return stored;
}

} // namespace ghop::io
