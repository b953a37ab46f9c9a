#include "lpm/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lpm/analysis.hpp"
#include "lpm/io.hpp"
#include "lpm/model.hpp"
#include "lpm/partition.hpp"
#include "lpm/sampler.hpp"

namespace lpm::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Binds CLI11 options to variables and remembers how to serialize each one,
// so a run's resolved configuration can be written back as JSON.
class Registry {
public:
    explicit Registry(CLI::App* app) : app_(app) {}

    CLI::App* app() const { return app_; }

    template <class T>
    CLI::Option* add(const std::string& name, T& var, const std::string& desc) {
        values_.emplace_back(name, [&var] { return json(var); });
        return app_->add_option("--" + name, var, desc)->capture_default_str();
    }

    template <class T>
    CLI::Option* add_list(const std::string& name, std::vector<T>& var, const std::string& desc) {
        values_.emplace_back(name, [&var] { return json(var); });
        return app_->add_option("--" + name, var, desc)->delimiter(',')->capture_default_str();
    }

    CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
        values_.emplace_back(name, [&var] { return json(var); });
        return app_->add_flag("--" + name, var, desc);
    }

    bool has(const std::string& key) const {
        return std::any_of(values_.begin(), values_.end(), [&](const auto& v) { return v.first == key; });
    }

    json values() const {
        json out = json::object();
        for (const auto& [name, get] : values_) out[name] = get();
        return out;
    }

private:
    CLI::App* app_;
    std::vector<std::pair<std::string, std::function<json()>>> values_;
};

struct Common {
    std::string config;
    std::string out;
};

struct GenerateArgs {
    std::size_t n = 2000;
    double beta0 = 0.1, beta1 = 0.7, sigma = 0.6;
    double prior_sd = 0.25;
    std::uint64_t seed = 1;
};

struct PartitionArgs {
    std::string graph, embedding;
    bool spectral = false;
    double b = 0.1;
};

struct SampleArgs {
    std::string graph;
    std::string init = "spectral";
    std::string partition;
    std::string algo = "fast";
    int kappa = 4;
    double b = 0.1;
    std::size_t sweeps = 1000, burn_in = 0, thin = 1;
    std::uint64_t seed = 1;
    double beta0 = -1.0, beta1 = -1.0, sigma = -1.0;  // negative: center of the prior box
    bool fix_theta = false;
    double embedding_sd = 0.0, beta_sd = 0.01, sigma_sd = 0.02;
    std::size_t refresh = 50;
    double drift_tol = 1e-6;
    bool no_truncate = false;
    bool random_scan = false;
    double prior_sd = 0.25;
    std::size_t chains = 1;
};

struct ContourArgs {
    std::string graph, embedding;
    long node = -1;
    double beta0 = 0.1, beta1 = 0.7, sigma = 0.6;
    std::string evaluator = "exact";
    int kappa = 4;
    double b = 0.1;
    bool truncate = false;
    int nx = 100, ny = 100;
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    double prior_sd = 0.25;
};

struct DistancesArgs {
    std::string samples, theta_samples, truth;
    long center = -1;  // negative: drawn from the seed
    std::vector<long> peers;
    std::uint64_t seed = 1;
    std::size_t max_rank = 20;
    std::size_t kde_points = 200;
    bool allow_scale = false;
};

struct BoundArgs {
    std::size_t n = 0;
    int kappa = 1;
    double b = 0.1;
    double mg = 1.0, rho = 1.0;
    bool tv = false;
};

struct BenchArgs {
    std::vector<std::string> algos{"faster", "fast"};
    std::vector<std::size_t> sizes{2000, 4000};
    double density = 0.0;
    double b = 0.45;
    int kappa = 1;
    std::size_t sweeps = 5, warmup = 1, repeats = 3;
    std::uint64_t seed = 1;
};

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    localtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y%m%d-%H%M%S");
    return os.str();
}

fs::path make_run_dir(const std::string& out, std::uint64_t seed) {
    const fs::path dir = out.empty() ? fs::path("runs") / (timestamp() + "-seed" + std::to_string(seed)) : fs::path(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create run directory " + dir.string() + ": " + ec.message());
    return dir;
}

void write_metadata(const fs::path& dir, const std::string& command, const json& config, const json& results) {
    json meta;
    meta["command"] = command;
    meta["config"] = config;
    meta["results"] = results;
    std::ofstream os(dir / "metadata.json");
    if (!os) throw ConfigError("cannot write " + (dir / "metadata.json").string());
    os << meta.dump(2) << "\n";
}

Metadata csv_meta(const std::string& command, const json& config) {
    Metadata m{{"command", command}};
    for (const auto& [k, v] : config.items()) {
        if (k == "out" || k == "config") continue;
        m[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    return m;
}

Graph load_graph(const std::string& path) {
    if (path.empty()) throw ConfigError("--graph is required");
    return read_edge_list(path);
}

void check_size(std::size_t got, std::size_t want, const std::string& what) {
    if (got != want)
        throw ConfigError(what + " has " + std::to_string(got) + " nodes, the graph has " + std::to_string(want));
}

int apply_thread_cap() {
    const char* env = std::getenv("LPM_THREADS");
    if (!env || !*env) return omp_get_max_threads();
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError(std::string("LPM_THREADS must be a positive integer, got '") + env + "'");
    omp_set_num_threads(static_cast<int>(v));
    return static_cast<int>(v);
}

// JSON config entries become leading arguments, so flags given on the command
// line take precedence. A stored metadata.json is accepted as well.
std::vector<std::string> config_arguments(const std::string& path, const std::string& command, const Registry& reg,
                                          const std::vector<std::string>& user_args) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");
    if (doc.contains("config") && doc.contains("command")) {
        if (doc["command"] != command)
            throw ConfigError("config file " + path + " was written by '" + doc["command"].get<std::string>() + "'");
        doc = doc["config"];
    }
    auto given = [&](const std::string& key) {
        return std::any_of(user_args.begin(), user_args.end(), [&](const std::string& a) {
            return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
        });
    };
    std::vector<std::string> out;
    for (const auto& [key, value] : doc.items()) {
        if (key == "config" || key == "out") continue;
        if (!reg.has(key)) throw ConfigError("config file " + path + ": unknown key '" + key + "'");
        if (given(key) || value.is_null()) continue;
        if (value.is_boolean()) {
            out.push_back("--" + key + "=" + (value.get<bool>() ? "true" : "false"));
            continue;
        }
        std::string text;
        if (value.is_array()) {
            for (const auto& v : value) text += (text.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
        } else {
            text = value.is_string() ? value.get<std::string>() : value.dump();
        }
        out.push_back("--" + key);
        out.push_back(text);
    }
    return out;
}

json stats_json(const RunResult& r) {
    json j;
    j["node_acceptance"] = r.stats.node_acceptance();
    j["node_proposals"] = r.stats.node_proposals;
    j["theta_proposals"] = r.stats.theta_proposals;
    j["theta_accepts"] = r.stats.theta_accepts;
    j["truncation_rejects"] = r.stats.truncation_rejects;
    j["max_refresh_drift"] = r.stats.max_drift;
    j["init_seconds"] = r.stats.init_seconds;
    double total = 0.0;
    for (double s : r.stats.sweep_seconds) total += s;
    j["sweep_seconds_total"] = total;
    j["median_sweep_ms"] = r.stats.sweep_seconds.empty() ? 0.0 : 1e3 * quantile(r.stats.sweep_seconds, 0.5);
    j["final_theta"] = {r.final_theta.beta0, r.final_theta.beta1, r.final_theta.sigma};
    j["final_log_likelihood"] = r.final_loglik;
    return j;
}

int cmd_generate(const GenerateArgs& a, const Common& c, const json& cfg, std::ostream& out) {
    const LinkParams theta{a.beta0, a.beta1, a.sigma};
    theta.validate();
    if (a.n < 2) throw ConfigError("--n must be at least 2");
    TruncGaussPrior prior;
    prior.sd = a.prior_sd;
    if (!(prior.sd > 0.0)) throw ConfigError("--prior-sd must be positive");
    const auto dir = make_run_dir(c.out, a.seed);
    const auto net = sample_graph(a.n, theta, prior, a.seed);
    write_edge_list(dir / "graph.txt", net.graph);
    write_embedding(dir / "latent.csv", net.z, csv_meta("generate", cfg));
    write_metadata(dir, "generate", cfg, {{"n", a.n}, {"edges", net.graph.m_und()}});
    out << dir.string() << ": n=" << a.n << " edges=" << net.graph.m_und() << "\n";
    return kOk;
}

int cmd_partition(const PartitionArgs& a, const Common& c, const json& cfg, std::ostream& out) {
    if (!(a.b > 0.0)) throw ConfigError("--b must be positive");
    if (a.embedding.empty() == !a.spectral) throw ConfigError("give exactly one of --embedding and --spectral");
    Embedding tau;
    std::optional<Graph> g;
    if (!a.graph.empty()) g = load_graph(a.graph);
    if (a.spectral) {
        if (!g) throw ConfigError("--spectral needs --graph");
        tau = spectral_embed(*g);
    } else {
        tau = read_embedding(a.embedding);
        if (g) check_size(tau.size(), g->n(), "embedding");
    }
    const auto dir = make_run_dir(c.out, 0);
    if (a.spectral) write_embedding(dir / "embedding.csv", tau, csv_meta("partition", cfg));
    const auto part = build_partition(tau, a.b);
    write_partition(dir / "partition.csv", part);
    const double spread = max_intra_block_distance(tau, part);
    write_metadata(dir, "partition", cfg, {{"n", part.n()}, {"K", part.K()}, {"max_intra_block_distance", spread}});
    out << dir.string() << ": n=" << part.n() << " K=" << part.K() << " max intra-block distance=" << spread << "\n";
    return kOk;
}

int cmd_sample(const SampleArgs& a, const Common& c, const json& cfg, std::ostream& out, int threads) {
    SamplerConfig sc;
    sc.algo = parse_algo(a.algo);
    sc.kappa = sc.algo == Algo::faster ? 1 : a.kappa;
    sc.b = a.b;
    sc.sweeps = a.sweeps;
    sc.burn_in = a.burn_in;
    sc.thinning = a.thin;
    sc.embedding_sd = a.embedding_sd;
    sc.beta_sd = a.beta_sd;
    sc.sigma_sd = a.sigma_sd;
    sc.prior.sd = a.prior_sd;
    sc.truncate = !a.no_truncate;
    sc.refresh_every = a.refresh;
    sc.drift_tolerance = a.drift_tol;
    sc.random_scan = a.random_scan;
    sc.update_theta = !a.fix_theta;
    sc.seed = a.seed;
    const int given = (a.beta0 >= 0.0) + (a.beta1 >= 0.0) + (a.sigma >= 0.0);
    if (given == 3) {
        sc.theta0 = LinkParams{a.beta0, a.beta1, a.sigma};
    } else if (given != 0) {
        throw ConfigError("give all of --beta0, --beta1, --sigma or none");
    }
    if (a.chains < 1) throw ConfigError("--chains must be at least 1");
    sc.validate();

    const Graph g = load_graph(a.graph);
    Embedding tau0 = a.init == "spectral" ? spectral_embed(g) : read_embedding(a.init);
    check_size(tau0.size(), g.n(), "initial embedding");
    Partition part;
    if (sc.algo == Algo::exact) {
        part = Partition::singletons(g.n());
    } else if (a.partition.empty()) {
        part = build_partition(tau0, sc.b);
    } else {
        part = read_partition(a.partition);
        check_size(part.n(), g.n(), "partition");
    }

    const auto dir = make_run_dir(c.out, a.seed);
    const auto n_chains = static_cast<long>(a.chains);
    std::vector<json> results(a.chains);
    std::exception_ptr failure;
#pragma omp parallel for num_threads(std::max(1, std::min(threads, static_cast<int>(n_chains)))) schedule(dynamic, 1)
    for (long ci = 0; ci < n_chains; ++ci) {
        try {
            SamplerConfig chain_cfg = sc;
            chain_cfg.seed = sc.seed + static_cast<std::uint64_t>(ci);
            auto meta = csv_meta("sample", cfg);
            meta["chain"] = std::to_string(ci);
            meta["chain_seed"] = std::to_string(chain_cfg.seed);
            const std::string stem = "chain" + std::to_string(ci);
            SampleWriter writer(dir / (stem + "_embedding.csv"), dir / (stem + "_theta.csv"), meta);
            const auto r = run_chain(chain_cfg, g, part, tau0, [&](const Sample& s) { writer.write(s); });
            auto j = stats_json(r);
            j["seed"] = chain_cfg.seed;
            results[static_cast<std::size_t>(ci)] = j;
        } catch (...) {
#pragma omp critical(lpm_cli_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    write_metadata(dir, "sample", cfg, {{"n", g.n()}, {"K", part.K()}, {"chains", results}});
    out << dir.string() << ": algo=" << to_string(sc.algo) << " n=" << g.n() << " K=" << part.K();
    for (std::size_t ci = 0; ci < results.size(); ++ci)
        out << " chain" << ci << " acceptance=" << results[ci]["node_acceptance"].get<double>();
    out << "\n";
    return kOk;
}

int cmd_contour(const ContourArgs& a, const Common& c, const json& cfg, std::ostream& out) {
    const Graph g = load_graph(a.graph);
    if (a.embedding.empty()) throw ConfigError("--embedding is required");
    const Embedding tau = read_embedding(a.embedding);
    check_size(tau.size(), g.n(), "embedding");
    if (a.node < 0 || static_cast<std::size_t>(a.node) >= g.n()) throw ConfigError("--node must be a node id of the graph");
    const LinkParams theta{a.beta0, a.beta1, a.sigma};
    theta.validate();
    if (a.nx < 1 || a.ny < 1) throw ConfigError("--nx and --ny must be positive");
    GridSpec grid{a.x0, a.x1, a.y0, a.y1, a.nx, a.ny};
    ContourOptions opts;
    opts.evaluator = parse_evaluator(a.evaluator);
    opts.kappa = a.kappa;
    opts.b = a.b;
    opts.truncate = a.truncate;
    opts.prior.sd = a.prior_sd;
    const auto dir = make_run_dir(c.out, static_cast<std::uint64_t>(a.node));
    const auto res = single_node_contour(g, tau, static_cast<NodeId>(a.node), theta, grid, opts);
    write_contour(dir / "contour.csv", res, csv_meta("contour", cfg));
    write_metadata(dir, "contour", cfg, {{"cells", res.prob.size()}});
    out << dir.string() << ": " << a.nx << "x" << a.ny << " grid for node " << a.node << "\n";
    return kOk;
}

int cmd_distances(const DistancesArgs& a, const Common& c, const json& cfg, std::ostream& out) {
    if (a.samples.empty()) throw ConfigError("--samples is required");
    const auto samples = a.theta_samples.empty() ? read_embedding_samples(a.samples) : read_samples(a.samples, a.theta_samples);
    if (samples.empty()) throw ConfigError(a.samples + " holds no samples");
    const std::size_t n = samples.front().tau.size();

    NodeId center = 0;
    std::vector<NodeId> peers;
    if (a.center >= 0) {
        if (static_cast<std::size_t>(a.center) >= n) throw ConfigError("--center is not a node id");
        center = static_cast<NodeId>(a.center);
    }
    if (a.center < 0 || a.peers.empty()) {
        if (a.truth.empty()) throw ConfigError("--truth is required unless --center and --peers are given");
        const Embedding truth = read_embedding(a.truth);
        check_size(truth.size(), n, "truth embedding");
        const Peers sel = a.center >= 0 ? select_peers(truth, center) : select_peers_seeded(truth, a.seed);
        center = sel.center;
        peers.assign(sel.nodes.begin(), sel.nodes.end());
    }
    if (!a.peers.empty()) {
        peers.clear();
        for (long p : a.peers) {
            if (p < 0 || static_cast<std::size_t>(p) >= n) throw ConfigError("--peers holds an invalid node id");
            peers.push_back(static_cast<NodeId>(p));
        }
    }

    const auto dir = make_run_dir(c.out, a.seed);
    const auto meta = csv_meta("distances", cfg);
    const auto stats = distance_statistics(samples, center, peers, a.max_rank);
    write_distances(dir / "distances.csv", dir / "order_stats.csv", stats, meta);

    CsvTable kde;
    kde.meta = meta;
    kde.meta["center"] = std::to_string(center);
    kde.header = {"peer", "x", "density"};
    for (std::size_t k = 0; k < stats.peers.size(); ++k) {
        const auto& d = stats.distances[k];
        const double hi = 1.1 * *std::max_element(d.begin(), d.end());
        std::vector<double> at(a.kde_points);
        for (std::size_t i = 0; i < at.size(); ++i)
            at[i] = at.size() == 1 ? 0.0 : hi * static_cast<double>(i) / static_cast<double>(at.size() - 1);
        const auto dens = gaussian_kde(d, at);
        for (std::size_t i = 0; i < at.size(); ++i)
            kde.rows.push_back({std::to_string(stats.peers[k]), format_double(at[i]), format_double(dens[i])});
    }
    write_csv(dir / "distance_kde.csv", kde);

    json peer_ids = json::array();
    for (NodeId p : peers) peer_ids.push_back(p);
    json results{{"center", center}, {"peers", peer_ids}, {"samples", samples.size()}};
    out << dir.string() << ": center=" << center << " peers=" << peer_ids.dump();
    if (!a.truth.empty()) {
        const Embedding truth = read_embedding(a.truth);
        check_size(truth.size(), n, "truth embedding");
        const double mse = procrustes_align(posterior_mean(samples), truth, a.allow_scale).mse;
        results["posterior_mean_mse"] = mse;
        out << " posterior mean MSE=" << mse;
    }
    out << "\n";
    write_metadata(dir, "distances", cfg, results);
    return kOk;
}

int cmd_bound(const BoundArgs& a, std::ostream& out) {
    const auto r = taylor_error_bound(a.n, a.kappa, a.b, {a.mg, a.rho});
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", r.r);
    out << buf << "\n";
    if (a.tv) {
        std::snprintf(buf, sizeof buf, "%.15g", r.tv);
        out << "tv " << buf << "\n";
    }
    return kOk;
}

int cmd_bench(const BenchArgs& a, const Common& c, const json& cfg, std::ostream& out) {
    std::vector<BenchRow> rows;
    for (const auto& name : a.algos) {
        BenchSpec spec;
        spec.algo = parse_algo(name);
        spec.sizes = a.sizes;
        spec.density = a.density;
        spec.b = a.b;
        spec.kappa = spec.algo == Algo::faster ? 1 : a.kappa;
        spec.sweeps = a.sweeps;
        spec.warmup = a.warmup;
        spec.repeats = a.repeats;
        spec.seed = a.seed;
        for (auto& r : bench_sweep(spec)) rows.push_back(r);
    }
    const auto dir = make_run_dir(c.out, a.seed);
    write_bench(dir / "bench.csv", rows, csv_meta("bench", cfg));
    write_metadata(dir, "bench", cfg, {{"rows", rows.size()}});
    out << "algo,n,K,kappa,b,median_sweep_ms,reps\n";
    for (const auto& r : rows)
        out << to_string(r.algo) << "," << r.n << "," << r.K << "," << r.kappa << "," << r.b << "," << r.median_sweep_ms
            << "," << r.reps << "\n";
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Latent position network models: simulation, blocked Taylor-approximate MCMC and analysis", "lpm"};
    app.require_subcommand(1);

    Common common;
    GenerateArgs gen;
    PartitionArgs par;
    SampleArgs smp;
    ContourArgs con;
    DistancesArgs dis;
    BoundArgs bnd;
    BenchArgs ben;
    std::map<std::string, std::unique_ptr<Registry>> regs;

    auto sub = [&](const std::string& name, const std::string& desc) -> Registry& {
        auto* s = app.add_subcommand(name, desc);
        s->add_option("--config", common.config, "JSON file of option values; command-line flags take precedence");
        s->add_option("--out", common.out, "run directory (default runs/<timestamp>-seed<seed>)");
        return *regs.emplace(name, std::make_unique<Registry>(s)).first->second;
    };

    {
        auto& r = sub("generate", "sample a graph and latent positions from the model");
        r.add("n", gen.n, "number of nodes");
        r.add("beta0", gen.beta0, "link floor");
        r.add("beta1", gen.beta1, "link amplitude");
        r.add("sigma", gen.sigma, "link length scale");
        r.add("prior-sd", gen.prior_sd, "sd of the truncated Gaussian prior");
        r.add("seed", gen.seed, "random seed");
    }
    {
        auto& r = sub("partition", "build a box partition from an embedding file or a spectral embedding");
        r.add("graph", par.graph, "edge list");
        r.add("embedding", par.embedding, "embedding CSV (id,x,y)");
        r.flag("spectral", par.spectral, "embed the graph spectrally");
        r.add("b", par.b, "box side");
    }
    {
        auto& r = sub("sample", "run the MCMC sampler");
        r.add("graph", smp.graph, "edge list");
        r.add("init", smp.init, "initial embedding CSV, or 'spectral'");
        r.add("partition", smp.partition, "partition CSV (default: boxes of side b around the initial embedding)");
        r.add("algo", smp.algo, "exact, fast or faster");
        r.add("kappa", smp.kappa, "Taylor order (faster always uses 1)");
        r.add("b", smp.b, "box side");
        r.add("sweeps", smp.sweeps, "number of sweeps");
        r.add("burn-in", smp.burn_in, "sweeps discarded before sampling");
        r.add("thin", smp.thin, "keep every thin-th sweep after burn-in");
        r.add("seed", smp.seed, "random seed of chain 0; chain c uses seed + c");
        r.add("beta0", smp.beta0, "initial beta0 (negative: prior box center)");
        r.add("beta1", smp.beta1, "initial beta1 (negative: prior box center)");
        r.add("sigma", smp.sigma, "initial sigma (negative: prior box center)");
        r.flag("fix-theta", smp.fix_theta, "keep the link parameters fixed");
        r.add("embedding-sd", smp.embedding_sd, "random-walk sd of node moves (0: b/4)");
        r.add("beta-sd", smp.beta_sd, "random-walk sd of beta0 and beta1");
        r.add("sigma-sd", smp.sigma_sd, "random-walk sd of sigma");
        r.add("refresh", smp.refresh, "rebuild the moment store every this many sweeps (0: never)");
        r.add("drift-tol", smp.drift_tol, "largest allowed relative drift at a refresh");
        r.flag("no-truncate", smp.no_truncate, "do not restrict moves to b-good embeddings");
        r.flag("random-scan", smp.random_scan, "visit nodes in random order");
        r.add("prior-sd", smp.prior_sd, "sd of the truncated Gaussian prior");
        r.add("chains", smp.chains, "independent chains, run concurrently");
    }
    {
        auto& r = sub("contour", "conditional density of one node on a grid");
        r.add("graph", con.graph, "edge list");
        r.add("embedding", con.embedding, "positions of all other nodes (id,x,y)");
        r.add("node", con.node, "node to move");
        r.add("beta0", con.beta0, "link floor");
        r.add("beta1", con.beta1, "link amplitude");
        r.add("sigma", con.sigma, "link length scale");
        r.add("evaluator", con.evaluator, "exact, fast or faster");
        r.add("kappa", con.kappa, "Taylor order for fast");
        r.add("b", con.b, "box side");
        r.flag("truncate", con.truncate, "zero cells that break b-goodness");
        r.add("nx", con.nx, "grid columns");
        r.add("ny", con.ny, "grid rows");
        r.add("x0", con.x0, "grid left edge");
        r.add("x1", con.x1, "grid right edge");
        r.add("y0", con.y0, "grid bottom edge");
        r.add("y1", con.y1, "grid top edge");
        r.add("prior-sd", con.prior_sd, "sd of the truncated Gaussian prior");
    }
    {
        auto& r = sub("distances", "posterior distance distributions and nearest-neighbor order statistics");
        r.add("samples", dis.samples, "embedding samples CSV (sweep,node_id,x,y)");
        r.add("theta-samples", dis.theta_samples, "matching parameter samples CSV");
        r.add("truth", dis.truth, "reference embedding used to pick peers");
        r.add("center", dis.center, "center node (negative: drawn from the seed)");
        r.add_list("peers", dis.peers, "peer nodes (default: median node of each distance tercile)");
        r.add("seed", dis.seed, "seed for the center draw");
        r.add("max-rank", dis.max_rank, "number of order statistics");
        r.add("kde-points", dis.kde_points, "evaluation points of each density estimate");
        r.flag("allow-scale", dis.allow_scale, "fit a scale in the Procrustes alignment to --truth");
    }
    {
        auto& r = sub("bound", "deterministic bound on the Taylor approximation error");
        r.add("n", bnd.n, "number of nodes")->required();
        r.add("kappa", bnd.kappa, "Taylor order");
        r.add("b", bnd.b, "box side");
        r.add("mg", bnd.mg, "derivative bound constant M_g");
        r.add("rho", bnd.rho, "analyticity radius rho_g");
        r.flag("tv", bnd.tv, "also print the total-variation bound");
    }
    {
        auto& r = sub("bench", "median wall-clock time per sweep");
        r.add_list("algos", ben.algos, "algorithms to time");
        r.add_list("sizes", ben.sizes, "numbers of nodes");
        r.add("density", ben.density, "edge probability (<= 0: graph drawn from the model)");
        r.add("b", ben.b, "box side");
        r.add("kappa", ben.kappa, "Taylor order for fast");
        r.add("sweeps", ben.sweeps, "timed sweeps per repeat");
        r.add("warmup", ben.warmup, "untimed sweeps per repeat");
        r.add("repeats", ben.repeats, "repeats per size");
        r.add("seed", ben.seed, "random seed");
    }

    try {
        const int threads = apply_thread_cap();

        std::vector<std::string> full(args.begin(), args.end());
        if (full.empty()) full.emplace_back("lpm");
        if (full.size() >= 2 && regs.count(full[1])) {
            const std::vector<std::string> rest(full.begin() + 2, full.end());
            std::string config_path;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                if (rest[i] == "--config" && i + 1 < rest.size()) config_path = rest[i + 1];
                if (rest[i].rfind("--config=", 0) == 0) config_path = rest[i].substr(9);
            }
            if (!config_path.empty()) {
                auto pre = config_arguments(config_path, full[1], *regs.at(full[1]), rest);
                full.insert(full.begin() + 2, pre.begin(), pre.end());
            }
        }
        std::vector<std::string> reversed(full.rbegin(), full.rend() - 1);
        app.parse(reversed);

        const std::string name = app.get_subcommands().front()->get_name();
        const json cfg = regs.at(name)->values();
        if (name == "generate") return cmd_generate(gen, common, cfg, out);
        if (name == "partition") return cmd_partition(par, common, cfg, out);
        if (name == "sample") return cmd_sample(smp, common, cfg, out, threads);
        if (name == "contour") return cmd_contour(con, common, cfg, out);
        if (name == "distances") return cmd_distances(dis, common, cfg, out);
        if (name == "bound") return cmd_bound(bnd, out);
        return cmd_bench(ben, common, cfg, out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
}

}  // namespace lpm::cli
