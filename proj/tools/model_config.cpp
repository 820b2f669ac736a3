// Writes the Sr2-like model description to stdout or a file.
#include <fstream>
#include <iostream>

#include "rovib/models.hpp"

int main(int argc, char** argv) {
  const std::string text = rovib::sr2_model_config();
  if (argc < 2) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(argv[1]);
  if (!out) {
    std::cerr << "cannot write " << argv[1] << "\n";
    return 1;
  }
  out << text;
  return 0;
}
