#include "lpm/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "json.hpp"

namespace lpm {

Point box_center(BoxKey key, double b) { return {b * key.zx / 3.0 - 0.5 * b, b * key.zy / 3.0 - 0.5 * b}; }

BoxKey box_assign(Point p, double b) {
    if (!(b > 0.0)) throw ConfigError("box_assign: box side must be positive");
    // nearest center per axis, then search its 3x3 neighborhood
    const int zx0 = static_cast<int>(std::lround((p.x + 0.5 * b) * 3.0 / b));
    const int zy0 = static_cast<int>(std::lround((p.y + 0.5 * b) * 3.0 / b));
    BoxKey best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (int zx = zx0 - 1; zx <= zx0 + 1; ++zx)
        for (int zy = zy0 - 1; zy <= zy0 + 1; ++zy) {
            const Point c = box_center({zx, zy}, b);
            const double d = std::max(std::abs(p.x - c.x), std::abs(p.y - c.y));
            if (d < best_d) {
                best_d = d;
                best = {zx, zy};
            }
        }
    return best;
}

std::vector<std::vector<NodeId>> Partition::members() const {
    std::vector<std::vector<NodeId>> out(K());
    for (std::size_t s = 0; s < K(); ++s) out[s].reserve(block_sizes[s]);
    for (NodeId i = 0; i < n(); ++i) out[assign[i]].push_back(i);
    return out;
}

Partition Partition::singletons(std::size_t n) {
    Partition p;
    p.assign.resize(n);
    std::iota(p.assign.begin(), p.assign.end(), BlockId{0});
    p.block_sizes.assign(n, 1);
    return p;
}

Partition Partition::from_assignment(std::vector<BlockId> assign) {
    Partition p;
    BlockId max_block = 0;
    for (BlockId a : assign) max_block = std::max(max_block, a);
    p.block_sizes.assign(assign.empty() ? 0 : max_block + 1, 0);
    for (BlockId a : assign) ++p.block_sizes[a];
    for (std::size_t s = 0; s < p.block_sizes.size(); ++s)
        if (p.block_sizes[s] == 0) throw ConfigError("partition: block " + std::to_string(s) + " is empty");
    p.assign = std::move(assign);
    return p;
}

Partition build_partition(const Embedding& tau, double b) {
    if (!(b > 0.0)) throw ConfigError("build_partition: box side must be positive");
    Partition part;
    part.b = b;
    part.assign.resize(tau.size());
    std::map<BoxKey, BlockId> seen;
    for (NodeId i = 0; i < tau.size(); ++i) {
        const BoxKey key = box_assign(tau[i], b);
        auto [it, inserted] = seen.try_emplace(key, static_cast<BlockId>(part.box_keys.size()));
        if (inserted) {
            part.box_keys.push_back(key);
            part.block_sizes.push_back(0);
        }
        part.assign[i] = it->second;
        ++part.block_sizes[it->second];
    }
    return part;
}

double max_intra_block_distance(const Embedding& tau, const Partition& part) {
    double worst = 0.0;
    for (const auto& block : part.members())
        for (std::size_t a = 0; a < block.size(); ++a)
            for (std::size_t c = a + 1; c < block.size(); ++c)
                worst = std::max(worst, distance(tau[block[a]], tau[block[c]]));
    return worst;
}

bool is_b_good(const Embedding& tau, const Partition& part, double b) {
    if (tau.size() != part.n()) throw ConfigError("is_b_good: embedding and partition sizes differ");
    for (const auto& block : part.members()) {
        if (block.size() < 2) continue;
        double lx = std::numeric_limits<double>::infinity(), ly = lx, hx = -lx, hy = -lx;
        for (NodeId i : block) {
            lx = std::min(lx, tau[i].x);
            hx = std::max(hx, tau[i].x);
            ly = std::min(ly, tau[i].y);
            hy = std::max(hy, tau[i].y);
        }
        if ((hx - lx) * (hx - lx) + (hy - ly) * (hy - ly) <= b * b) continue;
        for (std::size_t a = 0; a < block.size(); ++a)
            for (std::size_t c = a + 1; c < block.size(); ++c)
                if (squared_distance(tau[block[a]], tau[block[c]]) > b * b) return false;
    }
    return true;
}

namespace {

// Nodes of every connected component at least half as large as the largest.
std::vector<NodeId> major_components(const Graph& g) {
    std::vector<bool> seen(g.n(), false);
    std::vector<std::vector<NodeId>> comps;
    std::vector<NodeId> stack;
    for (NodeId s = 0; s < g.n(); ++s) {
        if (seen[s]) continue;
        comps.emplace_back();
        stack.assign(1, s);
        seen[s] = true;
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            comps.back().push_back(v);
            for (NodeId w : g.neighbors(v))
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
    }
    std::size_t largest = 0;
    for (const auto& c : comps) largest = std::max(largest, c.size());
    std::vector<NodeId> out;
    for (const auto& c : comps)
        if (2 * c.size() >= largest) out.insert(out.end(), c.begin(), c.end());
    std::sort(out.begin(), out.end());
    return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void normalize(std::vector<double>& v) {
    const double nrm = std::sqrt(dot(v, v));
    if (nrm > 0.0)
        for (double& x : v) x /= nrm;
}

}  // namespace

Embedding spectral_embed(const Graph& g, const SpectralOptions& opts) {
    const std::size_t n = g.n();
    if (n < 3) throw DegenerateInputError("spectral_embed: need at least 3 nodes");
    const Point center{0.5, 0.5};
    Embedding out(n, center);

    const auto comp = major_components(g);
    const std::size_t m = comp.size();
    if (m < 3) return out;
    std::vector<long> local(n, -1);
    for (std::size_t i = 0; i < m; ++i) local[comp[i]] = static_cast<long>(i);

    std::vector<double> dinv_sqrt(m);
    for (std::size_t i = 0; i < m; ++i) dinv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(comp[i]) + 1));

    // y = (I + N) x / 2 with N = D^{-1/2}(A + I)D^{-1/2}
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t i = 0; i < m; ++i) {
            double acc = x[i] * dinv_sqrt[i];
            for (NodeId j : g.neighbors(comp[i])) {
                const auto lj = static_cast<std::size_t>(local[j]);
                acc += x[lj] * dinv_sqrt[lj];
            }
            y[i] = 0.5 * (x[i] + dinv_sqrt[i] * acc);
        }
    };

    std::vector<double> trivial(m);
    for (std::size_t i = 0; i < m; ++i) trivial[i] = 1.0 / dinv_sqrt[i];
    normalize(trivial);

    std::vector<std::vector<double>> v(2, std::vector<double>(m)), w(2, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        v[0][i] = std::sin(1.0 + static_cast<double>(i));
        v[1][i] = std::cos(2.0 * static_cast<double>(i) + 0.5);
    }
    auto orthonormalize = [&](std::vector<std::vector<double>>& u) {
        for (std::size_t c = 0; c < 2; ++c) {
            axpy(-dot(u[c], trivial), trivial, u[c]);
            for (std::size_t p = 0; p < c; ++p) axpy(-dot(u[c], u[p]), u[p], u[c]);
            normalize(u[c]);
        }
    };
    orthonormalize(v);
    for (int it = 0; it < opts.max_iter; ++it) {
        for (std::size_t c = 0; c < 2; ++c) apply(v[c], w[c]);
        orthonormalize(w);
        double change = 0.0;
        for (std::size_t c = 0; c < 2; ++c) {
            double dp = 0.0, dm = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                dp = std::max(dp, std::abs(w[c][i] - v[c][i]));
                dm = std::max(dm, std::abs(w[c][i] + v[c][i]));
            }
            change = std::max(change, std::min(dp, dm));
        }
        std::swap(v, w);
        if (change < opts.tol) break;
    }

    std::vector<std::vector<double>> coord(2, std::vector<double>(m));
    for (std::size_t c = 0; c < 2; ++c) {
        apply(v[c], w[c]);
        const double lambda = 2.0 * dot(v[c], w[c]) - 1.0;
        std::size_t arg = 0;
        for (std::size_t i = 1; i < m; ++i)
            if (std::abs(v[c][i]) > std::abs(v[c][arg])) arg = i;
        const double sign = v[c][arg] < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < m; ++i) coord[c][i] = sign * lambda * dinv_sqrt[i] * v[c][i];
    }

    double lo[2], hi[2];
    for (std::size_t c = 0; c < 2; ++c) {
        lo[c] = *std::min_element(coord[c].begin(), coord[c].end());
        hi[c] = *std::max_element(coord[c].begin(), coord[c].end());
    }
    const double spread = std::max(hi[0] - lo[0], hi[1] - lo[1]);
    if (spread < 1e-9) return out;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = (coord[0][i] - 0.5 * (lo[0] + hi[0])) / spread + 0.5;
        const double y = (coord[1][i] - 0.5 * (lo[1] + hi[1])) / spread + 0.5;
        out[comp[i]] = {x, y};
    }
    return out;
}

void write_partition(const std::filesystem::path& csv, const Partition& part) {
    std::ofstream os(csv);
    if (!os) throw ConfigError("cannot write " + csv.string());
    os << "node_id,block_id\n";
    for (NodeId i = 0; i < part.n(); ++i) os << i << "," << part.assign[i] << "\n";

    nlohmann::json meta;
    meta["b"] = part.b;
    meta["K"] = part.K();
    meta["n"] = part.n();
    auto keys = nlohmann::json::array();
    for (const auto& k : part.box_keys) keys.push_back({{"g", k.g()}, {"h", k.h()}, {"zx", k.zx}, {"zy", k.zy}});
    meta["box_keys"] = keys;
    auto json_path = csv;
    json_path.replace_extension(".json");
    std::ofstream js(json_path);
    js << meta.dump(2) << "\n";
}

Partition read_partition(const std::filesystem::path& csv) {
    std::ifstream is(csv);
    if (!is) throw ConfigError("cannot open partition file " + csv.string());
    std::string line;
    std::vector<std::pair<NodeId, BlockId>> rows;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("node_id", 0) == 0) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        long i = -1, s = -1;
        if (!(ls >> i >> s) || i < 0 || s < 0) throw ConfigError(csv.string() + ": malformed row '" + line + "'");
        rows.emplace_back(static_cast<NodeId>(i), static_cast<BlockId>(s));
    }
    std::vector<BlockId> assign(rows.size());
    std::vector<bool> set(rows.size(), false);
    for (auto [i, s] : rows) {
        if (i >= rows.size() || set[i]) throw ConfigError(csv.string() + ": node ids must be 0..n-1, each once");
        assign[i] = s;
        set[i] = true;
    }
    Partition part = Partition::from_assignment(std::move(assign));

    auto json_path = csv;
    json_path.replace_extension(".json");
    if (std::ifstream js(json_path); js) {
        auto meta = nlohmann::json::parse(js);
        part.b = meta.value("b", 0.0);
        for (const auto& k : meta.value("box_keys", nlohmann::json::array()))
            part.box_keys.push_back({k.at("zx").get<int>(), k.at("zy").get<int>()});
    }
    return part;
}

}  // namespace lpm
