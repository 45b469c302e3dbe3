// Writes the bundled instance documents.  By default only the derived grid
// instance is generated (it is too large to commit); "all" regenerates every
// bundled document from its builder.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "invp/instances.hpp"
#include "invp/json_io.hpp"

namespace {

void write(const std::string& dir, const std::string& name, const invp::Instance& inst) {
  std::string path = dir + "/" + name + ".json";
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(1);
  }
  out << invp::serialize_instance(inst);
  std::cout << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: make_instances <output-dir> [grid|all]\n";
    return 1;
  }
  std::string dir = argv[1];
  std::string what = argc == 3 ? argv[2] : "grid";
  std::filesystem::create_directories(dir);

  write(dir, "kraft_grid", invp::instances::kraft_grid());
  if (what == "all") {
    write(dir, "stationarity", invp::instances::stationarity());
    write(dir, "dated_rewards", invp::instances::dated_rewards());
    write(dir, "ellsberg", invp::instances::ellsberg());
    write(dir, "reformulation_noncommuting", invp::instances::reformulation_noncommuting());
    write(dir, "reformulation_commuting", invp::instances::reformulation_commuting());
    write(dir, "random_seed42", invp::instances::random_seed42());
  }
  return 0;
}
