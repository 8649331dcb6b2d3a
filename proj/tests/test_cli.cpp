#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "oscat/channel.hpp"
#include "oscat/chu.hpp"
#include "oscat/tensor.hpp"

using namespace oscat;
using nlohmann::json;

namespace {

std::filesystem::path tempFile(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("oscat_cli_" + name);
}

void writeJson(const std::filesystem::path& p, const json& j) {
  std::ofstream f(p);
  f << j.dump();
}

int runCli(const std::string& args, const std::filesystem::path& out) {
  const std::string cmd =
      std::string(OSCAT_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

json readJson(const std::filesystem::path& p) {
  std::ifstream f(p);
  return json::parse(f);
}

std::string readText(const std::filesystem::path& p) {
  std::ifstream f(p);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("switch demo reports the obstruction") {
  const auto out = tempFile("switch.json");
  const int code = runCli("switch demo --dim 2 --n 2 --no-timestamp", out);
  CHECK(code == 0);
  const json r = readJson(out);
  CHECK(r.at("command") == "switch demo");
  CHECK(r.at("report").at("mbWitness").at("mbLower").get<double>() ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.at("report").at("mbWitness").at("verdict") == "obstructed");
  CHECK(r.at("report").at("claimVerified").get<bool>());
  CHECK_FALSE(r.contains("timestamp"));
}

TEST_CASE("cbnorm certifies the transpose map") {
  const auto in = tempFile("cb_in.json");
  writeJson(in, {{"map", mapToJson(transposeMap(2))}});
  const auto out = tempFile("cb_out.json");
  const int code = runCli("cbnorm --input " + in.string() + " --max-level 2 --no-timestamp", out);
  CHECK(code == 0);
  const json r = readJson(out).at("report");
  CHECK(r.at("value").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.at("exact").get<bool>());
}

TEST_CASE("channel subcommands and exit codes") {
  Channel id = makeChannel(2, 2, CMatrix::Identity(4, 4), Picture::Schrodinger);
  const auto idIn = tempFile("id_in.json");
  writeJson(idIn, {{"channel", channelToJson(id)}});

  const auto out = tempFile("ch_out.json");
  CHECK(runCli("channel hs-suite --input " + idIn.string() + " --no-timestamp", out) == 0);
  CHECK(readJson(out).at("report").at("holds").get<bool>());

  CHECK(runCli("channel check --input " + idIn.string() + " --no-timestamp", out) == 0);
  CHECK(readJson(out).at("report").at("admissible") == "holds");

  Channel tr = makeChannel(2, 2, transposeMap(2).coeffs, Picture::Schrodinger);
  const auto trIn = tempFile("tr_in.json");
  writeJson(trIn, {{"channel", channelToJson(tr)}});
  CHECK(runCli("channel check --input " + trIn.string() + " --no-timestamp", out) == 1);
  CHECK(readJson(out).at("report").at("choiMinEigenvalue").get<double>() ==
        doctest::Approx(-1.0).epsilon(1e-9));

  CHECK(runCli("channel transpose --input " + trIn.string() + " --no-timestamp", out) == 0);
  CHECK(readJson(out).at("report").at("pairingMaxDeviation").get<double>() <= 1e-10);
}

TEST_CASE("norm and tensor-norm run end to end") {
  const auto in = tempFile("norm_in.json");
  ElementMatrix x = ElementMatrix::zero(1, 4);
  x.coords[0] << 1.0, 2.0, 3.0, 4.0;
  writeJson(in, {{"space", matrixSpace(2).describe()}, {"element", elementToJson(x)}});
  const auto out = tempFile("norm_out.json");
  CHECK(runCli("norm --input " + in.string() + " --no-timestamp", out) == 0);
  ElementMatrix lvl1 = ElementMatrix::zero(1, 4);
  lvl1.coords[0] << 1.0, 2.0, 3.0, 4.0;
  const double expect = matrixSpace(2).normValue(lvl1);
  CHECK(readJson(out).at("report").at("estimate").at("lower").get<double>() ==
        doctest::Approx(expect).epsilon(1e-12));

  ElementMatrix a = ElementMatrix::zero(1, 4), b = ElementMatrix::zero(1, 4);
  a.coords[0] << 1.0, 0.0, 0.0, 1.0;
  b.coords[0] << 0.0, 1.0, 1.0, 0.0;
  const TensorElement t = tensorOf(a, b);
  const auto tin = tempFile("tensor_in.json");
  writeJson(tin, {{"leftSpace", matrixSpace(2).describe()},
                  {"rightSpace", matrixSpace(2).describe()},
                  {"element", tensorToJson(t)}});
  CHECK(runCli("tensor-norm --kind proj --input " + tin.string() + " --no-timestamp", out) == 0);
  const json est = readJson(out).at("report").at("estimate");
  CHECK(est.at("lower").get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(runCli("tensor-norm --kind haag --input " + tin.string() + " --no-timestamp", out) == 0);
}

TEST_CASE("chu interpret emits the table row") {
  const auto out = tempFile("chu_out.json");
  CHECK(runCli("chu interpret --formula \"N:2 % M:2\" --no-timestamp", out) == 0);
  CHECK(readJson(out).at("report").at("interpretation").at("tableRow") == "B(H_N (x) H_M)");

  const auto chuIn = tempFile("chu_in.json");
  writeJson(chuIn, {{"object", chuToJson(hsObject(2))}});
  CHECK(runCli("chu check --input " + chuIn.string() + " --max-level 1 --restarts 8 --no-timestamp",
               out) == 0);
  CHECK(readJson(out).at("report").at("dualInvolutionDeviation").get<double>() == 0.0);

  CHECK(runCli("chu interpret --formula \"P:2 * N:2\" --no-timestamp", out) == 3);
}

TEST_CASE("reports are reproducible and timestamps optional") {
  const auto out1 = tempFile("det1.json"), out2 = tempFile("det2.json");
  const std::string args = "switch demo --dim 2 --n 1 --no-timestamp";
  CHECK(runCli(args, out1) == 0);
  CHECK(runCli(args, out2) == 0);
  CHECK(readText(out1) == readText(out2));
  CHECK(!readText(out1).empty());

  CHECK(runCli("switch demo --dim 2 --n 1", out1) == 0);
  CHECK(readJson(out1).contains("timestamp"));
}

TEST_CASE("malformed input exits with code 3") {
  const auto bad = tempFile("bad.json");
  std::ofstream(bad) << "{\"bad\": ";
  const auto out = tempFile("bad_out.json");
  CHECK(runCli("norm --input " + bad.string(), out) == 3);
  CHECK(runCli("norm", out) == 3);
  CHECK(runCli("bogus", out) == 3);
}
