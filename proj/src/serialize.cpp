#include "lab/serialize.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace lab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::runtime_error("malformed number: '" + s + "'");
    return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot create " + path.string());
    return out;
}

}  // namespace

void write_measure(std::ostream& out, const DiscreteMeasure& mu) {
    out << mu.dim << "," << mu.size() << "\n";
    for (std::size_t i = 0; i < mu.size(); ++i) {
        out << format_double(mu.weights[i]);
        const auto p = mu.point(i);
        for (double x : p) out << "," << format_double(x);
        out << "\n";
    }
}

void write_measure(const std::filesystem::path& path, const DiscreteMeasure& mu) {
    auto out = open_out(path);
    write_measure(out, mu);
}

DiscreteMeasure read_measure(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("measure: missing header");
    const auto head = split(line, ',');
    if (head.size() != 2) throw std::runtime_error("measure: header must be 'd,N'");
    DiscreteMeasure mu;
    mu.dim = std::stoi(head[0]);
    const std::size_t n = std::stoul(head[1]);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("measure: truncated file");
        const auto cells = split(line, ',');
        if (cells.size() != static_cast<std::size_t>(mu.dim) + 1)
            throw std::runtime_error("measure: wrong column count");
        mu.weights.push_back(parse_double(cells[0]));
        for (int k = 0; k < mu.dim; ++k)
            mu.points.push_back(parse_double(cells[static_cast<std::size_t>(k) + 1]));
    }
    return mu;
}

DiscreteMeasure read_measure(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_measure(in);
}

void write_plan(std::ostream& out, const TransportPlan& plan) {
    for (const auto& e : plan.entries)
        out << e.i << "," << e.j << "," << format_double(e.mass) << "\n";
    out << "cost=" << format_double(plan.cost) << "\n";
}

TransportPlan read_plan(std::istream& in) {
    TransportPlan plan;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("cost=", 0) == 0) {
            plan.cost = parse_double(line.substr(5));
            return plan;
        }
        const auto cells = split(line, ',');
        if (cells.size() != 3) throw std::runtime_error("plan: expected 'i,j,mass'");
        plan.entries.push_back(
            {std::stoi(cells[0]), std::stoi(cells[1]), parse_double(cells[2])});
    }
    throw std::runtime_error("plan: missing cost trailer");
}

void write_cover(std::ostream& out, const BallCover& cover) {
    DiscreteMeasure centers;
    centers.dim = cover.dim;
    centers.points = cover.centers;
    centers.weights.assign(cover.count(), 1.0 / static_cast<double>(cover.count()));
    write_measure(out, centers);
}

void write_net_point(std::ostream& out, const NetPoint& np) {
    out << np.K << "\n";
    for (std::size_t j = 0; j < np.numerators.size(); ++j) {
        if (j) out << ",";
        out << np.numerators[j];
    }
    out << "\n";
}

NetPoint read_net_point(std::istream& in) {
    NetPoint np;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("net point: missing K");
    np.K = std::stoll(line);
    if (!std::getline(in, line)) throw std::runtime_error("net point: missing numerators");
    for (const auto& c : split(line, ',')) np.numerators.push_back(std::stoll(c));
    return np;
}

void write_density_csv(const std::filesystem::path& path, const GridDensity1D& g,
                       const std::string& potential_tag) {
    auto out = open_out(path);
    out << "# t=" << format_double(g.time) << " n_cells=" << g.n_cells
        << " x_min=" << format_double(g.x_min) << " x_max=" << format_double(g.x_max)
        << " potential=" << potential_tag << "\n";
    out << "x,f(x)\r\n";
    for (int i = 0; i < g.n_cells; ++i)
        out << format_double(g.center(i)) << "," << format_double(g.values[static_cast<std::size_t>(i)])
            << "\r\n";
}

GridDensity1D read_density_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#')
        throw std::runtime_error("density csv: missing comment header");
    GridDensity1D g;
    {
        std::istringstream hdr(line.substr(1));
        std::string tok;
        while (hdr >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "t") g.time = parse_double(val);
            if (key == "n_cells") g.n_cells = std::stoi(val);
            if (key == "x_min") g.x_min = parse_double(val);
            if (key == "x_max") g.x_max = parse_double(val);
        }
    }
    if (!std::getline(in, line)) throw std::runtime_error("density csv: truncated");
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 2) throw std::runtime_error("density csv: expected 'x,f'");
        g.values.push_back(parse_double(cells[1]));
    }
    if (static_cast<int>(g.values.size()) != g.n_cells)
        throw std::runtime_error("density csv: cell count mismatch");
    return g;
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    put_u64(out, u);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("trajectory: truncated");
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
    return v;
}

double get_f64(std::istream& in) {
    const std::uint64_t u = get_u64(in);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

}  // namespace

void write_trajectory(const std::filesystem::path& path, const TrajectoryBundle& bundle) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path.string());
    put_u64(out, bundle.n);
    put_u64(out, static_cast<std::uint64_t>(bundle.dim));
    put_u64(out, static_cast<std::uint64_t>(bundle.save_stride));
    put_f64(out, bundle.dt);
    put_u64(out, bundle.seed);
    put_u64(out, bundle.stream);
    put_u64(out, bundle.times.size());
    put_u64(out, bundle.has_coupled() ? 1 : 0);
    for (std::size_t k = 0; k < bundle.times.size(); ++k) {
        put_f64(out, bundle.times[k]);
        for (double x : bundle.X[k]) put_f64(out, x);
        if (bundle.has_coupled())
            for (double y : bundle.Y[k]) put_f64(out, y);
    }
}

TrajectoryBundle read_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    TrajectoryBundle b;
    b.n = get_u64(in);
    b.dim = static_cast<int>(get_u64(in));
    b.save_stride = static_cast<int>(get_u64(in));
    b.dt = get_f64(in);
    b.seed = get_u64(in);
    b.stream = get_u64(in);
    const std::uint64_t frames = get_u64(in);
    const bool coupled = get_u64(in) != 0;
    b.shared_noise = coupled;
    const std::size_t nd = b.n * static_cast<std::size_t>(b.dim);
    for (std::uint64_t k = 0; k < frames; ++k) {
        b.times.push_back(get_f64(in));
        std::vector<double> x(nd);
        for (double& v : x) v = get_f64(in);
        b.X.push_back(std::move(x));
        if (coupled) {
            std::vector<double> y(nd);
            for (double& v : y) v = get_f64(in);
            b.Y.push_back(std::move(y));
        }
    }
    return b;
}

std::string bound_report_json(const BoundReport& rep) {
    nlohmann::json j;
    j["theorem"] = rep.theorem;
    j["p"] = rep.p;
    j["N"] = rep.N;
    j["epsilon"] = rep.epsilon;
    j["bound"] = rep.bound;
    j["estimate"] = rep.mc_estimate;
    j["ci"] = {rep.ci_lo, rep.ci_hi};
    j["trials"] = rep.trials;
    j["admissible"] = rep.admissible;
    return j.dump();
}

}  // namespace lab
