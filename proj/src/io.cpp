#include "clustervol/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "clustervol/error.hpp"
#include "json.hpp"

namespace clustervol {

namespace {

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        if (c == ',' && !quoted) {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(trim(field));
    return fields;
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_missing(const std::string& field) {
    const std::string l = lower(field);
    return l.empty() || l == "na" || l == "nan" || l == "null" || l == "n/a";
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput(fmt::format("cannot open '{}'", path.string()));
    return in;
}

}  // namespace

ClusterMap read_cluster_map(std::istream& in) {
    ClusterMap map;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto fields = split_fields(line);
        const bool header = first && lower(fields[0]) == "series_id";
        first = false;
        if (header) continue;
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw ParseError(fmt::format("cluster map line {}: expected series_id,cluster_id", line_no),
                             line_no);
        if (!seen.insert(fields[0]).second)
            throw ParseError(fmt::format("cluster map line {}: series '{}' listed twice", line_no,
                                         fields[0]),
                             line_no);
        map.emplace_back(fields[0], fields[1]);
    }
    if (map.empty()) throw ParseError("cluster map is empty");
    return map;
}

ClusterMap load_cluster_map(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_cluster_map(in);
}

ClusterMap parse_cluster_assignments(const std::string& text) {
    std::string csv;
    std::istringstream items(text);
    std::string item;
    while (std::getline(items, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ParseError(fmt::format("cluster assignment '{}' is not of the form id=cluster", item));
        csv += item.substr(0, eq) + "," + item.substr(eq + 1) + "\n";
    }
    std::istringstream in(csv);
    return read_cluster_map(in);
}

Panel read_panel_csv(std::istream& in, const std::optional<ClusterMap>& clusters) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (!blank(line)) header = split_fields(line);
    }
    if (header.size() < 2) throw ParseError("panel CSV needs a header with a time column and series ids");
    const std::vector<std::string> ids(header.begin() + 1, header.end());
    {
        std::set<std::string> unique(ids.begin(), ids.end());
        if (unique.size() != ids.size()) throw ParseError("panel CSV header repeats a series id", line_no);
        if (unique.count("")) throw ParseError("panel CSV header has an empty series id", line_no);
    }

    const std::size_t n = ids.size();
    std::vector<std::vector<double>> columns(n);
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto fields = split_fields(line);
        if (fields.size() != n + 1)
            throw ParseError(fmt::format("panel CSV row {}: expected {} fields, found {}", line_no,
                                         n + 1, fields.size()),
                             line_no);
        for (std::size_t j = 0; j < n; ++j) {
            const std::string& f = fields[j + 1];
            if (is_missing(f))
                throw ParseError(fmt::format("panel CSV row {}: missing value for series '{}'",
                                             line_no, ids[j]),
                                 line_no);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v))
                throw ParseError(fmt::format("panel CSV row {}: cannot parse '{}' for series '{}'",
                                             line_no, f, ids[j]),
                                 line_no);
            columns[j].push_back(v);
        }
    }
    const std::size_t t_len = columns.front().size();
    if (t_len == 0) throw ParseError("panel CSV has no data rows");

    Matrix values(n, t_len);
    for (std::size_t i = 0; i < n; ++i)
        std::copy(columns[i].begin(), columns[i].end(), values.row(i).begin());

    std::vector<std::string> names;
    std::vector<std::size_t> cluster_of(n, 0);
    if (!clusters) {
        names = {"all"};
    } else {
        std::map<std::string, std::string> lookup(clusters->begin(), clusters->end());
        for (const auto& [series, cluster] : *clusters)
            if (std::find(ids.begin(), ids.end(), series) == ids.end())
                throw InvalidInput(fmt::format("cluster map names unknown series '{}'", series));
        for (std::size_t i = 0; i < n; ++i) {
            const auto it = lookup.find(ids[i]);
            if (it == lookup.end())
                throw InvalidInput(fmt::format("series '{}' is missing from the cluster map", ids[i]));
            auto pos = std::find(names.begin(), names.end(), it->second);
            if (pos == names.end()) pos = names.insert(names.end(), it->second);
            cluster_of[i] = static_cast<std::size_t>(pos - names.begin());
        }
    }
    return Panel(std::move(values), ids, std::move(cluster_of), std::move(names));
}

Panel load_panel_csv(const std::filesystem::path& path, const std::optional<ClusterMap>& clusters) {
    auto in = open_input(path);
    return read_panel_csv(in, clusters);
}

void write_panel_csv(std::ostream& out, const Panel& panel) {
    out << "time";
    for (const auto& id : panel.series_ids()) out << ',' << id;
    out << '\n';
    for (std::size_t t = 0; t < panel.length(); ++t) {
        out << t + 1;
        for (std::size_t i = 0; i < panel.series_count(); ++i) fmt::print(out, ",{:.17g}", panel(i, t));
        out << '\n';
    }
}

void write_cluster_map(std::ostream& out, const Panel& panel) {
    out << "series_id,cluster_id\n";
    for (std::size_t i = 0; i < panel.series_count(); ++i)
        out << panel.series_ids()[i] << ',' << panel.cluster_names()[panel.cluster_of(i)] << '\n';
}

ScenarioConfig read_scenario_config(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("scenario config: {}", e.what()));
    }
    if (!j.is_object()) throw ParseError("scenario config must be a JSON object");

    ScenarioConfig c;
    try {
        c.series_count = j.value("N", c.series_count);
        c.length = j.value("T", c.length);
        c.phi = j.value("phi", c.phi);
        c.sigma_lambda = j.value("sigma_lambda", c.sigma_lambda);
        if (j.contains("cluster_sizes")) c.cluster_sizes = j.at("cluster_sizes").get<std::vector<std::size_t>>();
        if (j.contains("arch")) {
            c.arch.clear();
            for (const auto& a : j.at("arch"))
                c.arch.push_back({a.at("alpha0").get<double>(), a.at("alpha1").get<double>()});
        } else if (c.arch.size() != c.cluster_sizes.size()) {
            c.arch.assign(c.cluster_sizes.size(), ArchConfig{});
        }
        if (j.contains("contamination")) c.contamination = j.at("contamination").get<std::vector<double>>();
        c.contamination_alpha1 = j.value("contamination_alpha1", c.contamination_alpha1);
        c.seed = j.value("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("scenario config: {}", e.what()));
    }
    c.validate();
    return c;
}

void write_scenario_config(std::ostream& out, const ScenarioConfig& c) {
    nlohmann::json arch = nlohmann::json::array();
    for (const auto& a : c.arch) arch.push_back({{"alpha0", a.alpha0}, {"alpha1", a.alpha1}});
    nlohmann::json j{{"N", c.series_count},
                     {"T", c.length},
                     {"phi", c.phi},
                     {"sigma_lambda", c.sigma_lambda},
                     {"cluster_sizes", c.cluster_sizes},
                     {"arch", arch},
                     {"contamination", c.contamination},
                     {"contamination_alpha1", c.contamination_alpha1},
                     {"seed", c.seed}};
    out << j.dump(2) << '\n';
}

}  // namespace clustervol
