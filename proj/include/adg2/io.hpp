#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>

#include "adg2/gaussian.hpp"

namespace adg2 {

using Json = nlohmann::json;

// Input document does not match the expected schema; `pointer` is an RFC 6901 path.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : std::runtime_error(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

// Writes to a sibling temp file, then renames over the target.
void atomic_write(const std::string& path, const std::string& content);
Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

std::string pointer_join(const std::string& base, const std::string& key);
std::string pointer_join(const std::string& base, std::size_t index);

const Json& require(const Json& j, const std::string& key, const std::string& at);
const Json& require_array(const Json& j, const std::string& at, std::size_t expected_size = std::size_t(-1));
double require_number(const Json& j, const std::string& at);
long long require_int(const Json& j, const std::string& at);

// Integers are written as JSON numbers when they fit, otherwise as decimal strings.
Json integer_to_json(const mpz_class& z);
mpz_class integer_from_json(const Json& j, const std::string& at);

}  // namespace adg2
