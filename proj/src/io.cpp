#include "adg2/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace adg2 {

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("", "cannot open file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON in ") + path + ": " + e.what());
  }
}

std::string pointer_join(const std::string& base, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~')
      escaped += "~0";
    else if (c == '/')
      escaped += "~1";
    else
      escaped += c;
  }
  return base + "/" + escaped;
}

std::string pointer_join(const std::string& base, std::size_t index) { return base + "/" + std::to_string(index); }

const Json& require(const Json& j, const std::string& key, const std::string& at) {
  if (!j.is_object()) throw SchemaError(at, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(pointer_join(at, key), "missing required field");
  return *it;
}

const Json& require_array(const Json& j, const std::string& at, std::size_t expected_size) {
  if (!j.is_array()) throw SchemaError(at, "expected an array");
  if (expected_size != std::size_t(-1) && j.size() != expected_size)
    throw SchemaError(at, "expected " + std::to_string(expected_size) + " entries, got " + std::to_string(j.size()));
  return j;
}

double require_number(const Json& j, const std::string& at) {
  if (!j.is_number()) throw SchemaError(at, "expected a number");
  return j.get<double>();
}

long long require_int(const Json& j, const std::string& at) {
  if (!j.is_number_integer()) throw SchemaError(at, "expected an integer");
  return j.get<long long>();
}

Json integer_to_json(const mpz_class& z) {
  if (z.fits_slong_p()) return Json(z.get_si());
  return Json(z.get_str());
}

mpz_class integer_from_json(const Json& j, const std::string& at) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) {
    mpz_class z;
    if (z.set_str(j.get<std::string>(), 10) != 0) throw SchemaError(at, "malformed integer string");
    return z;
  }
  throw SchemaError(at, "expected an integer or decimal string");
}

}  // namespace adg2
