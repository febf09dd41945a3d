// Protocol v1 child used by the tests. Behaves like the built-in "mean"
// forecaster unless a flag asks it to misbehave.
//
//   --protocol N        announce protocol N in the HELLO reply
//   --name NAME         announced name
//   --exit-immediately  exit before reading anything
//   --silent            read requests but never reply
//   --extra-value       FORECAST carries h + 1 values
//   --nonfinite         FORECAST carries a NaN token
//   --overflow          FORECAST carries 1e999
//   --fail-fit          reply ERROR to FIT
//   --crash-on-predict  exit(3) when PREDICT arrives
//   --hang-on-predict   stop replying once PREDICT arrives
//   --wrong-id          reply to PREDICT with id + 1
//   --garbage           reply to FIT with a line that is not JSON
//   --log FILE          append every received line to FILE
//   --script FILE       after HELLO, answer each request with the next line of FILE verbatim

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "fgym/protocol.hpp"

namespace proto = fgym::protocol;

int main(int argc, char** argv) {
  int version = 1;
  std::string name = "protocol-double";
  std::string log_path;
  std::vector<std::string> script;
  bool silent = false, extra = false, nonfinite = false, overflow = false, fail_fit = false;
  bool crash_predict = false, hang_predict = false, wrong_id = false, garbage = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--protocol" && i + 1 < argc) version = std::atoi(argv[++i]);
    else if (a == "--name" && i + 1 < argc) name = argv[++i];
    else if (a == "--log" && i + 1 < argc) log_path = argv[++i];
    else if (a == "--script" && i + 1 < argc) {
      std::ifstream in(argv[++i], std::ios::binary);
      for (std::string l; std::getline(in, l);) script.push_back(l);
    }
    else if (a == "--exit-immediately") return 0;
    else if (a == "--silent") silent = true;
    else if (a == "--extra-value") extra = true;
    else if (a == "--nonfinite") nonfinite = true;
    else if (a == "--overflow") overflow = true;
    else if (a == "--fail-fit") fail_fit = true;
    else if (a == "--crash-on-predict") crash_predict = true;
    else if (a == "--hang-on-predict") hang_predict = true;
    else if (a == "--wrong-id") wrong_id = true;
    else if (a == "--garbage") garbage = true;
  }

  std::ofstream log;
  if (!log_path.empty()) log.open(log_path, std::ios::app);

  std::size_t scripted = 0;
  bool fitted = false;
  double mean = 0.0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (log.is_open()) log << line << '\n' << std::flush;
    if (silent) continue;
    if (!script.empty() && line.find("\"HELLO\"") == std::string::npos) {
      std::cout << (scripted < script.size() ? script[scripted++] : std::string()) << std::endl;
      continue;
    }
    proto::Message request;
    try {
      request = proto::decode(line);
    } catch (const std::exception& e) {
      std::cout << proto::encode(proto::error(0, e.what())) << std::endl;
      continue;
    }
    const auto id = request.id;
    switch (request.kind) {
      case proto::Kind::kHello:
        std::cout << proto::encode({proto::Kind::kHello, id, proto::Hello{version, name}}) << std::endl;
        break;
      case proto::Kind::kFit: {
        if (garbage) {
          std::cout << "this is not json" << std::endl;
          break;
        }
        if (fail_fit) {
          std::cout << proto::encode(proto::error(id, "fit exploded")) << std::endl;
          break;
        }
        const auto& y = std::get<proto::Fit>(request.payload).y;
        double sum = 0.0;
        int count = 0;
        for (const auto& v : y)
          if (v) {
            sum += *v;
            ++count;
          }
        if (count == 0) {
          std::cout << proto::encode(proto::error(id, "no observed values")) << std::endl;
          break;
        }
        mean = sum / count;
        fitted = true;
        std::cout << proto::encode(proto::ok(id)) << std::endl;
        break;
      }
      case proto::Kind::kPredict: {
        if (crash_predict) return 3;
        if (hang_predict) {
          std::this_thread::sleep_for(std::chrono::hours(1));
          return 0;
        }
        if (!fitted) {
          std::cout << proto::encode(proto::error(id, "predict before fit")) << std::endl;
          break;
        }
        const int h = std::get<proto::Predict>(request.payload).h;
        if (nonfinite || overflow) {
          std::string yhat;
          for (int j = 0; j < h; ++j) yhat += (j ? "," : "") + std::string(j == 0 ? (nonfinite ? "NaN" : "1e999") : "1.0");
          std::cout << "{\"id\":" << id << ",\"kind\":\"FORECAST\",\"payload\":{\"yhat\":[" << yhat << "]}}"
                    << std::endl;
          break;
        }
        std::vector<double> yhat(static_cast<std::size_t>(h + (extra ? 1 : 0)), mean);
        std::cout << proto::encode(proto::forecast(wrong_id ? id + 1 : id, yhat)) << std::endl;
        break;
      }
      case proto::Kind::kReset:
        fitted = false;
        std::cout << proto::encode(proto::ok(id)) << std::endl;
        break;
      case proto::Kind::kShutdown:
        std::cout << proto::encode(proto::ok(id)) << std::endl;
        return 0;
      default:
        std::cout << proto::encode(proto::error(id, "unexpected request kind")) << std::endl;
    }
  }
  return 0;
}
