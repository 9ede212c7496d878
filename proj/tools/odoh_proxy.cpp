#include <CLI11.hpp>
#include <iostream>

#include "odoh/proxy.hpp"
#include "odoh/settings.hpp"
#include "tool_util.hpp"

using namespace odoh;

int main(int argc, char** argv) {
  CLI::App app{"Oblivious DoH proxy", "odoh-proxy"};
  std::string config_path, listen;
  bool insecure_http = false;
  app.add_option("-c,--config", config_path, "key=value config file (env ODOH_PROXY_* overrides)");
  app.add_option("--listen", listen, "host:port");
  app.add_flag("--insecure-http", insecure_http, "Forward to targets over plain HTTP");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    tools::SignalWaiter signals;
    Logger log;
    Settings s = config_path.empty() ? Settings{} : Settings::load(config_path);
    s.apply_env("ODOH_PROXY_",
                {"listen", "allowed_targets", "rate_limit", "burst", "forward_timeout_ms", "injected_delay_ms",
                 "insecure_http", "allow_plain_doh", "max_body"},
                process_env());

    proxy::ProxyConfig cfg;
    cfg.allowed_targets = s.get_list("allowed_targets");
    cfg.rate_limit_per_minute = s.get_double("rate_limit", 300);
    cfg.burst = s.get_double("burst", 50);
    cfg.forward_timeout = std::chrono::milliseconds(s.get_int("forward_timeout_ms", 5000));
    cfg.injected_delay = std::chrono::milliseconds(s.get_int("injected_delay_ms", 0));
    cfg.insecure_http = insecure_http || s.get_bool("insecure_http", false);
    cfg.allow_plain_doh = s.get_bool("allow_plain_doh", false);
    cfg.max_body = static_cast<std::size_t>(s.get_int("max_body", 8192));
    cfg.validate();

    auto [host, port] = tools::parse_listen(listen.empty() ? s.get_or("listen", "127.0.0.1:8081") : listen);
    proxy::ProxyServer server(std::make_shared<proxy::ProxyService>(cfg, std::make_shared<proxy::HttpForwarder>(), log));
    port = server.start(host, port);
    log.info("odoh-proxy listening on " + host + ":" + std::to_string(port) +
             (cfg.insecure_http ? " (plain HTTP to targets)" : ""));
    signals.wait();
    log.info("shutting down");
    server.stop();
    return 0;
  } catch (const Error& e) {
    std::cerr << "odoh-proxy: " << e.what() << "\n";
    return 1;
  }
}
