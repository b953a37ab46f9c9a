#include "lpm/io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace lpm {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    return os;
}

void write_meta(std::ostream& os, const Metadata& meta) {
    for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == name) return c;
    throw ConfigError("CSV has no column '" + name + "'");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("not a number: '" + s + "'");
    return v;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    auto os = open_out(path);
    write_meta(os, table.meta);
    for (std::size_t c = 0; c < table.header.size(); ++c) os << (c ? "," : "") << table.header[c];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
        os << "\n";
    }
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto body = line.substr(line.find_first_not_of("# "));
            const auto eq = body.find('=');
            if (eq != std::string::npos) t.meta[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        auto cells = split(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(t.header.size()) + " fields");
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw ConfigError(path.string() + ": no header row");
    return t;
}

void write_embedding(const std::filesystem::path& path, const Embedding& tau, const Metadata& meta) {
    auto os = open_out(path);
    write_meta(os, meta);
    os << "id,x,y\n";
    for (NodeId i = 0; i < tau.size(); ++i) os << i << "," << format_double(tau[i].x) << "," << format_double(tau[i].y) << "\n";
}

Embedding read_embedding(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    const std::size_t ci = t.column("id"), cx = t.column("x"), cy = t.column("y");
    Embedding tau(t.rows.size());
    std::vector<bool> seen(t.rows.size(), false);
    for (const auto& r : t.rows) {
        const auto i = static_cast<std::size_t>(parse_double(r[ci]));
        if (i >= tau.size() || seen[i]) throw ConfigError(path.string() + ": node ids must be 0..n-1, each once");
        seen[i] = true;
        tau[i] = {parse_double(r[cx]), parse_double(r[cy])};
    }
    return tau;
}

SampleWriter::SampleWriter(const std::filesystem::path& embedding_csv, const std::filesystem::path& theta_csv,
                           const Metadata& meta)
    : emb_(open_out(embedding_csv)), th_(open_out(theta_csv)) {
    write_meta(emb_, meta);
    write_meta(th_, meta);
    emb_ << "sweep,node_id,x,y\n";
    th_ << "sweep,beta0,beta1,sigma\n";
}

void SampleWriter::write(const Sample& s) {
    for (NodeId i = 0; i < s.tau.size(); ++i)
        emb_ << s.sweep << "," << i << "," << format_double(s.tau[i].x) << "," << format_double(s.tau[i].y) << "\n";
    th_ << s.sweep << "," << format_double(s.theta.beta0) << "," << format_double(s.theta.beta1) << ","
        << format_double(s.theta.sigma) << "\n";
}

void write_samples(const std::filesystem::path& embedding_csv, const std::filesystem::path& theta_csv,
                   const std::vector<Sample>& samples, const Metadata& meta) {
    SampleWriter w(embedding_csv, theta_csv, meta);
    for (const auto& s : samples) w.write(s);
}

std::vector<Sample> read_samples(const std::filesystem::path& embedding_csv, const std::filesystem::path& theta_csv) {
    const auto th = read_csv(theta_csv);
    const std::size_t ts = th.column("sweep"), tb0 = th.column("beta0"), tb1 = th.column("beta1"),
                      tsg = th.column("sigma");
    std::vector<Sample> out;
    std::map<std::size_t, std::size_t> slot;
    for (const auto& r : th.rows) {
        Sample s;
        s.sweep = static_cast<std::size_t>(parse_double(r[ts]));
        s.theta = {parse_double(r[tb0]), parse_double(r[tb1]), parse_double(r[tsg])};
        slot[s.sweep] = out.size();
        out.push_back(std::move(s));
    }
    const auto em = read_csv(embedding_csv);
    const std::size_t es = em.column("sweep"), ei = em.column("node_id"), ex = em.column("x"), ey = em.column("y");
    for (const auto& r : em.rows) {
        const auto it = slot.find(static_cast<std::size_t>(parse_double(r[es])));
        if (it == slot.end()) throw ConfigError(embedding_csv.string() + ": sweep missing from " + theta_csv.string());
        auto& tau = out[it->second].tau;
        const auto i = static_cast<std::size_t>(parse_double(r[ei]));
        if (i >= tau.size()) tau.resize(i + 1);
        tau[i] = {parse_double(r[ex]), parse_double(r[ey])};
    }
    return out;
}

std::vector<Sample> read_embedding_samples(const std::filesystem::path& embedding_csv) {
    const auto em = read_csv(embedding_csv);
    const std::size_t es = em.column("sweep"), ei = em.column("node_id"), ex = em.column("x"), ey = em.column("y");
    std::map<std::size_t, Embedding> by_sweep;
    for (const auto& r : em.rows) {
        auto& tau = by_sweep[static_cast<std::size_t>(parse_double(r[es]))];
        const auto i = static_cast<std::size_t>(parse_double(r[ei]));
        if (i >= tau.size()) tau.resize(i + 1);
        tau[i] = {parse_double(r[ex]), parse_double(r[ey])};
    }
    std::vector<Sample> out;
    for (auto& [sweep, tau] : by_sweep) {
        Sample s;
        s.sweep = sweep;
        s.tau = std::move(tau);
        out.push_back(std::move(s));
    }
    return out;
}

void write_contour(const std::filesystem::path& path, const ContourGrid& grid, const Metadata& meta) {
    auto os = open_out(path);
    write_meta(os, meta);
    os << "ix,iy,x,y,log_density,prob\n";
    const auto& g = grid.grid;
    for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
            const std::size_t c = static_cast<std::size_t>(ix) * static_cast<std::size_t>(g.ny) + static_cast<std::size_t>(iy);
            const Point p = g.cell(ix, iy);
            os << ix << "," << iy << "," << format_double(p.x) << "," << format_double(p.y) << ","
               << format_double(grid.log_density[c]) << "," << format_double(grid.prob[c]) << "\n";
        }
}

void write_bench(const std::filesystem::path& path, const std::vector<BenchRow>& rows, const Metadata& meta) {
    auto os = open_out(path);
    write_meta(os, meta);
    os << "algo,n,K,kappa,b,median_sweep_ms,reps\n";
    for (const auto& r : rows)
        os << to_string(r.algo) << "," << r.n << "," << r.K << "," << r.kappa << "," << format_double(r.b) << ","
           << format_double(r.median_sweep_ms) << "," << r.reps << "\n";
}

void write_distances(const std::filesystem::path& peers_csv, const std::filesystem::path& order_csv,
                     const DistanceStats& stats, const Metadata& meta) {
    auto os = open_out(peers_csv);
    write_meta(os, meta);
    os << "# center=" << stats.center << "\n";
    os << "peer,sample,distance\n";
    for (std::size_t k = 0; k < stats.peers.size(); ++k)
        for (std::size_t s = 0; s < stats.distances[k].size(); ++s)
            os << stats.peers[k] << "," << s << "," << format_double(stats.distances[k][s]) << "\n";
    auto oo = open_out(order_csv);
    write_meta(oo, meta);
    oo << "# center=" << stats.center << "\n";
    oo << "rank,mean,q05,q50,q95\n";
    for (std::size_t r = 0; r < stats.order_stats.size(); ++r) {
        const auto& o = stats.order_stats[r];
        oo << r + 1 << "," << format_double(o.mean) << "," << format_double(o.q05) << "," << format_double(o.q50) << ","
           << format_double(o.q95) << "\n";
    }
}

}  // namespace lpm
