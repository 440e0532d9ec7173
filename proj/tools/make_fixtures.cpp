// Regenerates the bundled count fixtures under data/fixtures.
//
//   make_fixtures <output-dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "qkdsim/ingest.hpp"
#include "qkdsim/optics.hpp"

namespace fs = std::filesystem;
using namespace qkdsim;

namespace {

void save(const fs::path& path, const std::string& header, const CountRecordFile& file) {
  std::ofstream out(path, std::ios::binary);
  out << header << write_counts(file);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cout << path.string() << ": " << file.rows.size() << " rows\n";
}

TwoQubitState werner(double w) {
  return apply_channel(generate(SourceModel{}), ChannelModel::werner(w));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output-dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  const ChshSettings canon = ChshSettings::canonical(BellLabel::PhiPlus);

  SynthesisSpec ideal;
  ideal.state = generate(SourceModel{});
  ideal.det.efficiency = 1.0;
  ideal.n_pairs_per_setting = 1'000'000;
  ideal.mode = SynthesisMode::Expected;
  const auto ideal_file = synthesize_counts(ideal, canon, ProtocolKind::BBM92);
  save(dir / "phi_plus_ideal.counts", "# maximal Phi+, expected counts, 1e6 pairs per setting pair\n", ideal_file);

  // Werner visibility W = 2.64 / (2 sqrt 2). 157 pairs per setting pair puts
  // the propagated sigma_S near 0.12.
  SynthesisSpec point;
  point.state = werner(2.64 / kTsirelson);
  point.det.efficiency = 1.0;
  point.n_pairs_per_setting = 157;
  point.mode = SynthesisMode::Poisson;
  point.seed = 264;
  save(dir / "chsh_264.counts", "# Werner state with S = 2.64, Poisson rows, 157 pairs per setting pair\n",
       synthesize_counts(point, canon, ProtocolKind::BBM92));

  SynthesisSpec w78;
  w78.state = werner(0.78);
  w78.n_pairs_per_setting = 1'000'000;
  w78.mode = SynthesisMode::Expected;
  save(dir / "werner_078.counts", "# Werner W = 0.78 (QBER 0.11), expected counts, eta 0.6\n",
       synthesize_counts(w78, canon, ProtocolKind::BBM92));

  // Same as the ideal file with one coincidence field damaged.
  std::string text = write_counts(ideal_file);
  const auto row = text.find("\n0,0,");
  const auto end = text.find('\n', row + 1);
  text.replace(end - 3, 3, "1x2");
  std::ofstream bad(dir / "corrupted.counts", std::ios::binary);
  bad << "# damaged copy of phi_plus_ideal.counts\n" << text;
  std::cout << (dir / "corrupted.counts").string() << '\n';
  return 0;
}
