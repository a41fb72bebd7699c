#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "adg2/io.hpp"
#include "adg2/parallel.hpp"
#include "adg2/verify.hpp"

using namespace adg2;

namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "adg2_test_io";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("atomic_write replaces the target and leaves no temp file") {
  auto dir = scratch_dir();
  auto file = (dir / "out.txt").string();
  atomic_write(file, "first");
  atomic_write(file, "second\n");
  CHECK(read_text_file(file) == "second\n");
  int entries = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().filename().string().rfind("out.txt", 0) == 0) ++entries;
  CHECK(entries == 1);
  CHECK_THROWS(atomic_write((dir / "missing_dir" / "x.txt").string(), "x"));
}

TEST_CASE("read_json_file reports missing files and parse errors") {
  auto dir = scratch_dir();
  CHECK_THROWS_AS(read_json_file((dir / "nope.json").string()), SchemaError);
  auto bad = (dir / "bad.json").string();
  atomic_write(bad, "{\"a\": [1, 2,");
  CHECK_THROWS_AS(read_json_file(bad), SchemaError);
  auto good = (dir / "good.json").string();
  atomic_write(good, "{\"a\": [1, 2.5]}");
  CHECK(read_json_file(good)["a"][1].get<double>() == 2.5);
}

TEST_CASE("JSON pointer construction escapes per RFC 6901") {
  CHECK(pointer_join("", "dims") == "/dims");
  CHECK(pointer_join("/a", "b/c~d") == "/a/b~1c~0d");
  CHECK(pointer_join("/nodes", std::size_t(3)) == "/nodes/3");
  Json doc = Json::parse(R"({"b/c~d": 5})");
  CHECK(doc.at(Json::json_pointer(pointer_join("", "b/c~d"))) == 5);
}

TEST_CASE("require helpers report the offending pointer") {
  Json j = Json::parse(R"({"dims": [1, "x", 3], "n": 2.5, "k": 4})");
  auto pointer_of = [](auto&& fn) {
    try {
      fn();
    } catch (const SchemaError& e) {
      return e.pointer();
    }
    return std::string("<none>");
  };
  CHECK(pointer_of([&] { require(j, "spacing", ""); }) == "/spacing");
  CHECK(pointer_of([&] { require(j["dims"], "x", "/dims"); }) == "/dims");
  CHECK(pointer_of([&] { require_array(j["dims"], "/dims", 4); }) == "/dims");
  CHECK(pointer_of([&] { require_number(j["dims"][1], "/dims/1"); }) == "/dims/1");
  CHECK(pointer_of([&] { require_int(j["n"], "/n"); }) == "/n");
  CHECK(require_int(j["k"], "/k") == 4);
  CHECK(require_number(j["k"], "/k") == 4.0);
  CHECK(require_array(j["dims"], "/dims", 3).size() == 3);
}

TEST_CASE("integers round-trip through JSON at any size") {
  for (const char* s : {"0", "-17", "9223372036854775807", "123456789012345678901234567890", "-98765432109876543210"}) {
    mpz_class z(s);
    Json j = integer_to_json(z);
    CHECK(integer_from_json(Json::parse(j.dump()), "") == z);
  }
  CHECK(integer_to_json(mpz_class(42)).is_number_integer());
  CHECK(integer_to_json(mpz_class("123456789012345678901234567890")).is_string());
  CHECK_THROWS_AS(integer_from_json(Json("12a"), "/x"), SchemaError);
  CHECK_THROWS_AS(integer_from_json(Json(1.5), "/x"), SchemaError);
}

TEST_CASE("parallel_for visits each index once and honours ADG2_THREADS") {
  ::setenv("ADG2_THREADS", "3", 1);
  CHECK(thread_count() == 3);
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::set<int>(hits.begin(), hits.end()) == std::set<int>{1});
  ::setenv("ADG2_THREADS", "0", 1);
  CHECK(thread_count() >= 1);
  ::unsetenv("ADG2_THREADS");
  CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                    if (i == 70) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("verification report JSON shape") {
  Report r = run_suite("g2lin", {});
  Json j = r.to_json();
  CHECK(j["suite"] == "g2lin");
  REQUIRE(j["checks"].is_array());
  std::set<std::string> ids;
  for (const auto& c : j["checks"]) {
    for (const char* key : {"id", "paper_ref", "status", "max_residual", "runtime_ms"}) CHECK(c.contains(key));
    CHECK(c["status"] == "pass");
    CHECK(c["runtime_ms"].is_null());
    ids.insert(c["id"].get<std::string>());
  }
  CHECK(ids.size() == j["checks"].size());
  CHECK(r.to_json(true)["checks"][0]["runtime_ms"].is_number());
  CHECK(r.all_pass());
  CHECK_THROWS_AS(run_suite("nope", {}), std::invalid_argument);
}

TEST_CASE("hk suite is deterministic and the corrupted table fails the cyclic check") {
  VerifyOptions a;
  a.seed = 11;
  CHECK(run_suite("hk", a).to_json().dump() == run_suite("hk", a).to_json().dump());
  VerifyOptions corrupt = a;
  corrupt.corrupt_conventions = true;
  Report bad = run_suite("hk", corrupt);
  CHECK_FALSE(bad.all_pass());
  bool cyclic_failed = false;
  for (const auto& c : bad.checks)
    if (c.id == "hk.cyclic_symmetry") cyclic_failed = !c.pass;
  CHECK(cyclic_failed);
}
