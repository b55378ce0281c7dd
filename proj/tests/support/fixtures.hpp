#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "corridor/facts.hpp"

namespace testgen {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

inline std::string fixture_path(const std::string& name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

inline corridor::Instance load_fixture(const std::string& name) {
  return corridor::parse_instance(read_file(fixture_path(name))).instance;
}

}  // namespace testgen
