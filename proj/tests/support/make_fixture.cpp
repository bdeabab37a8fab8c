#include <iostream>
#include <map>
#include <string>

#include "synth.hpp"

int main(int argc, char** argv) {
  using namespace omr::synth;
  const std::map<std::string, PageSpec (*)()> scores = {
      {"melody", melody_score}, {"two_voice", two_voice_score}, {"chord", chord_score}, {"workload", workload_score}};
  if (argc != 3 || !scores.contains(argv[1])) {
    std::cerr << "usage: omr_make_fixture melody|two_voice|chord|workload <directory>\n";
    return 2;
  }
  write_fixture(render_page(scores.at(argv[1])()), argv[2]);
  return 0;
}
