#include <CLI11.hpp>
#include <iostream>

#include "odoh/bench.hpp"
#include "odoh/target.hpp"
#include "tool_util.hpp"

using namespace odoh;

int main(int argc, char** argv) {
  CLI::App app{"Hermetic DoH resolver answering from a zone file", "odoh-mock-resolver"};
  std::string zone_path, listen = "127.0.0.1:8053", key_file;
  int delay_ms = 0;
  app.add_option("--zone", zone_path, "Zone file: name TYPE ttl rdata")->required();
  app.add_option("--delay", delay_ms, "Fixed service delay in ms")->check(CLI::NonNegativeNumber);
  app.add_option("--listen", listen, "host:port");
  app.add_option("--odoh-keys", key_file, "Publish these target keys as odoh.test HTTPS records");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    tools::SignalWaiter signals;
    Logger log;
    auto zone = std::make_shared<dns::Zone>(dns::Zone::load(zone_path));
    if (!key_file.empty()) {
      std::vector<TargetKeyConfig> configs;
      for (const auto& kp : target::load_key_file(key_file)) configs.push_back(kp.config);
      zone->add({std::string(client::kProbeName), dns::type::kHttps, dns::kClassIn, 300,
                 client::make_https_rdata(serialize_config_list(configs))});
    }
    auto [host, port] = tools::parse_listen(listen);
    bench::MockResolverServer server(zone, std::chrono::milliseconds(delay_ms));
    port = server.start(host, port);
    log.info("odoh-mock-resolver listening on " + host + ":" + std::to_string(port) + " with " +
             std::to_string(zone->size()) + " records");
    signals.wait();
    server.stop();
    return 0;
  } catch (const Error& e) {
    std::cerr << "odoh-mock-resolver: " << e.what() << "\n";
    return 1;
  }
}
