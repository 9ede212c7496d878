#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "odoh/settings.hpp"
#include "odoh/target.hpp"
#include "tool_util.hpp"

using namespace odoh;

namespace {

const std::vector<std::string> kKeys = {"listen",          "upstreams",      "cache_capacity", "timeout_ms",
                                        "key_file",        "injected_delay_ms", "allow_cleartext",
                                        "empty_answer_ttl"};

int keygen(const std::string& suite_name, const std::string& out_path) {
  auto suite = parse_suite_name(suite_name);
  if (!suite) {
    std::cerr << "odoh-target: unknown suite " << suite_name << "\n";
    return 2;
  }
  std::vector<TargetKeyPair> keys{generate_key_pair(*suite)};
  const auto text = target::format_key_file(keys);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out_path);
    f << text;
    if (!f) {
      std::cerr << "odoh-target: cannot write " << out_path << "\n";
      return 1;
    }
  }
  std::cerr << "key_id " << to_hex(derive_key_id(keys[0].config)) << "\n";
  return 0;
}

int serve(const std::string& config_path, const std::string& listen_override) {
  tools::SignalWaiter signals;
  Logger log;
  Settings s = config_path.empty() ? Settings{} : Settings::load(config_path);
  s.apply_env("ODOH_TARGET_", kKeys, process_env());

  target::TargetConfig cfg;
  cfg.upstream_resolvers = s.get_list("upstreams");
  cfg.cache_capacity = static_cast<std::size_t>(s.get_int("cache_capacity", 10000));
  cfg.upstream_timeout = std::chrono::milliseconds(s.get_int("timeout_ms", 2000));
  cfg.injected_delay = std::chrono::milliseconds(s.get_int("injected_delay_ms", 0));
  cfg.allow_cleartext = s.get_bool("allow_cleartext", false);
  cfg.empty_answer_ttl = static_cast<std::uint32_t>(s.get_int("empty_answer_ttl", dns::kDefaultEmptyTtl));
  if (auto key_file = s.get("key_file")) {
    cfg.key_pairs = target::load_key_file(*key_file);
  } else {
    log.warn("no key_file configured; using an ephemeral X25519 key");
    cfg.key_pairs = {generate_key_pair(CipherSuite::default_suite())};
  }
  cfg.validate();

  auto [host, port] = tools::parse_listen(listen_override.empty() ? s.get_or("listen", "127.0.0.1:8080") : listen_override);
  auto service = std::make_shared<target::TargetService>(cfg, std::vector<std::shared_ptr<target::Upstream>>{}, log);
  target::TargetServer server(service);
  port = server.start(host, port);
  log.info("odoh-target listening on " + host + ":" + std::to_string(port) + ", " +
           std::to_string(cfg.key_pairs.size()) + " key(s), " + std::to_string(cfg.upstream_resolvers.size()) +
           " upstream(s)");
  for (const auto& kp : cfg.key_pairs) {
    log.info("key " + kp.config.suite.name() + " key_id=" + to_hex(derive_key_id(kp.config)));
  }
  signals.wait();
  log.info("shutting down");
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oblivious DoH target", "odoh-target"};
  app.require_subcommand(1);

  std::string config_path, listen;
  auto* serve_cmd = app.add_subcommand("serve", "Run the target");
  serve_cmd->add_option("-c,--config", config_path, "key=value config file (env ODOH_TARGET_* overrides)");
  serve_cmd->add_option("--listen", listen, "host:port");

  std::string suite = "x25519-sha256-aes128gcm", out;
  auto* keygen_cmd = app.add_subcommand("keygen", "Generate a key file line");
  keygen_cmd->add_option("--suite", suite, "kem-kdf-aead, e.g. p256-sha256-aes128gcm");
  keygen_cmd->add_option("-o,--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (*keygen_cmd) return keygen(suite, out);
    return serve(config_path, listen);
  } catch (const Error& e) {
    std::cerr << "odoh-target: " << e.what() << "\n";
    return 1;
  }
}
