#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "lpm/analysis.hpp"
#include "lpm/sampler.hpp"
#include "lpm/types.hpp"

namespace lpm {

using Metadata = std::map<std::string, std::string>;

/// A CSV table preceded by `# key=value` comment lines.
struct CsvTable {
    Metadata meta;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position by name; ConfigError if absent.
    std::size_t column(const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
/// ConfigError when the file is missing or a row has the wrong width.
CsvTable read_csv(const std::filesystem::path& path);

/// Numbers are written with 17 significant digits so they read back exactly.
std::string format_double(double v);
double parse_double(const std::string& s);

/// `id,x,y`
void write_embedding(const std::filesystem::path& path, const Embedding& tau, const Metadata& meta = {});
Embedding read_embedding(const std::filesystem::path& path);

/// `sweep,node_id,x,y` and `sweep,beta0,beta1,sigma`.
void write_samples(const std::filesystem::path& embedding_csv, const std::filesystem::path& theta_csv,
                   const std::vector<Sample>& samples, const Metadata& meta = {});
std::vector<Sample> read_samples(const std::filesystem::path& embedding_csv, const std::filesystem::path& theta_csv);
/// Embedding samples alone, in sweep order; theta is left at its default.
std::vector<Sample> read_embedding_samples(const std::filesystem::path& embedding_csv);

/// Streams samples as they are produced.
class SampleWriter {
public:
    SampleWriter(const std::filesystem::path& embedding_csv, const std::filesystem::path& theta_csv,
                 const Metadata& meta = {});
    void write(const Sample& s);

private:
    std::ofstream emb_, th_;
};

/// `ix,iy,x,y,log_density,prob`
void write_contour(const std::filesystem::path& path, const ContourGrid& grid, const Metadata& meta = {});

/// `algo,n,K,kappa,b,median_sweep_ms,reps`
void write_bench(const std::filesystem::path& path, const std::vector<BenchRow>& rows, const Metadata& meta = {});

/// `peer,sample,distance` and `rank,mean,q05,q50,q95`.
void write_distances(const std::filesystem::path& peers_csv, const std::filesystem::path& order_csv,
                     const DistanceStats& stats, const Metadata& meta = {});

}  // namespace lpm
