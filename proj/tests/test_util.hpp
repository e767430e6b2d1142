#pragma once

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "reqeq/error.hpp"
#include "reqeq/ir_text.hpp"

#define EXPECT_THROW_CODE(stmt, expected_code)                                          \
  do {                                                                                  \
    try {                                                                               \
      stmt;                                                                             \
      ADD_FAILURE() << "expected " << ::reqeq::error_code_name(expected_code);         \
    } catch (const ::reqeq::Error& e_) {                                                \
      EXPECT_EQ(::reqeq::error_code_name(e_.code()), ::reqeq::error_code_name(expected_code)) \
          << e_.what();                                                                 \
    }                                                                                   \
  } while (0)

namespace reqeq_test {

inline std::string data_path(const std::string& name) { return std::string(REQEQ_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string data(const std::string& name) { return slurp(data_path(name)); }

inline reqeq::Formalized load_ir(const std::string& name) { return reqeq::parse_ir(data(name), name); }

}  // namespace reqeq_test
