#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "odoh/bench.hpp"

using namespace odoh;
using namespace odoh::bench;

namespace {

struct LoadArgs {
  std::string modes = "odoh";
  int clients = 1;
  int queries = 10;
  double rate = 15;
  std::string domains_path;
  std::string proxy, target, resolver, coloc_target;
  bool no_reuse = false;
  bool insecure_http = false;
  int delay_proxy = 0, delay_target = 0, delay_resolver = 0;
  int connect_delay = 0;
  std::uint64_t seed = 1;
  std::string out = "bench-out";
};

std::vector<Mode> parse_modes(const std::string& list) {
  std::vector<Mode> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    auto m = parse_mode(item);
    if (!m) throw Error(ErrorCode::ConfigInvalid, "unknown mode " + item);
    out.push_back(*m);
  }
  if (out.empty()) throw Error(ErrorCode::ConfigInvalid, "no modes given");
  return out;
}

int run_load_cmd(const LoadArgs& a, bool local) {
  const auto modes = parse_modes(a.modes);
  std::vector<std::string> domains;
  if (!a.domains_path.empty()) {
    domains = load_domains(a.domains_path);
  } else if (local) {
    domains = {"example.com"};
  } else {
    throw Error(ErrorCode::ConfigInvalid, "--domains is required");
  }

  std::unique_ptr<LocalStack> stack;
  BenchConfig cfg;
  if (local) {
    LocalStackOptions o;
    o.proxy_delay = std::chrono::milliseconds(a.delay_proxy);
    o.target_delay = std::chrono::milliseconds(a.delay_target);
    o.resolver_delay = std::chrono::milliseconds(a.delay_resolver);
    o.domains = domains;
    stack = std::make_unique<LocalStack>(o);
    cfg.endpoints = stack->endpoints();
    cfg.insecure_http = true;
  } else {
    cfg.endpoints = {a.resolver, a.proxy, a.target, a.coloc_target};
    cfg.insecure_http = a.insecure_http;
  }
  cfg.clients = a.clients;
  cfg.queries = a.queries;
  cfg.rate_per_minute = a.rate;
  cfg.domains = domains;
  cfg.reuse_connections = !a.no_reuse;
  cfg.seed = a.seed;
  cfg.connect_delay = std::chrono::milliseconds(a.connect_delay);

  std::vector<LatencySample> all;
  for (auto m : modes) {
    cfg.mode = m;
    cfg.validate();
    std::cerr << "running " << mode_name(m) << ": " << cfg.clients << " clients x " << cfg.queries << " queries at "
              << cfg.rate_per_minute << "/min\n";
    auto samples = run_load(cfg);
    all.insert(all.end(), samples.begin(), samples.end());
  }
  auto report = emit_report(all, a.out);
  std::cout << format_summary(report);
  std::cerr << "wrote " << (std::filesystem::path(a.out) / "samples.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ODoH measurement harness", "odoh-bench"};

  LoadArgs a;
  bool local_stack = false;
  std::string micro;
  std::string suite_name = "x25519-sha256-aes128gcm";
  std::size_t iters = 10000;

  app.add_option("--mode", a.modes, "Comma list of doh, pdoh, odoh, cleartext-odoh, odoh-coloc");
  app.add_option("-C,--clients", a.clients, "Concurrent clients")->check(CLI::PositiveNumber);
  app.add_option("-N,--queries", a.queries, "Queries per client")->check(CLI::PositiveNumber);
  app.add_option("-R,--rate", a.rate, "Queries per minute per client")->check(CLI::PositiveNumber);
  app.add_option("--domains", a.domains_path, "Domain list, one per line");
  app.add_option("--proxy", a.proxy, "Proxy URL");
  app.add_option("--target", a.target, "Target host[:port]");
  app.add_option("--resolver", a.resolver, "DoH resolver URL");
  app.add_option("--coloc-target", a.coloc_target, "Target with a co-located resolver");
  app.add_flag("--no-reuse", a.no_reuse, "Fresh connection per request");
  app.add_flag("--insecure-http", a.insecure_http, "Plain HTTP everywhere");
  app.add_flag("--local-stack", local_stack, "Run against an in-process loopback deployment (default without endpoints)");
  app.add_option("--delay-proxy", a.delay_proxy, "ms per proxy transit (local stack)")->check(CLI::NonNegativeNumber);
  app.add_option("--delay-target", a.delay_target, "ms per target transit (local stack)")->check(CLI::NonNegativeNumber);
  app.add_option("--delay-resolver", a.delay_resolver, "ms per resolver request (local stack)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--connect-delay", a.connect_delay, "Extra ms per new client connection")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", a.seed, "RNG seed");
  app.add_option("--out", a.out, "Output directory");
  app.add_option("--micro", micro, "Micro benchmark instead of load: crypto | size")
      ->check(CLI::IsMember({"crypto", "size"}));
  app.add_option("--suite", suite_name, "kem-kdf-aead for --micro");
  app.add_option("--iters", iters, "Iterations for --micro crypto (>= 1000)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (micro.empty()) {
      const bool endpoints = !(a.proxy.empty() && a.target.empty() && a.resolver.empty() && a.coloc_target.empty());
      const bool delays = a.delay_proxy || a.delay_target || a.delay_resolver;
      if (endpoints && local_stack) throw Error(ErrorCode::ConfigInvalid, "--local-stack takes no endpoints");
      if (endpoints && delays) {
        throw Error(ErrorCode::ConfigInvalid, "delays apply to the local stack; set injected_delay_ms on the servers");
      }
      return run_load_cmd(a, !endpoints);
    }
    auto suite = parse_suite_name(suite_name);
    if (!suite) throw Error(ErrorCode::ConfigInvalid, "unknown suite " + suite_name);
    if (micro == "crypto") {
      auto r = micro_crypto_bench(*suite, iters);
      std::cout << "suite " << suite->name() << ", " << r.iterations << " iterations\n"
                << "seal      p50 " << r.seal_p50_us << " us  p99 " << r.seal_p99_us << " us\n"
                << "open      p50 " << r.open_p50_us << " us  p99 " << r.open_p99_us << " us\n"
                << "lifecycle p50 " << r.lifecycle_p50_us << " us  p99 " << r.lifecycle_p99_us << " us\n";
      return 0;
    }
    if (a.domains_path.empty()) throw Error(ErrorCode::ConfigInvalid, "--micro size needs --domains");
    auto r = micro_size_bench(load_domains(a.domains_path), *suite);
    std::cout << "suite " << suite->name() << ", " << r.count << " domains\n"
              << "mean dns query     " << r.mean_query_bytes << " B\n"
              << "mean odoh query    " << r.mean_odoh_query_bytes << " B\n"
              << "query overhead     " << r.query_overhead << " B\n"
              << "response overhead  " << r.response_overhead << " B\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "odoh-bench: " << e.what() << "\n";
    return 1;
  }
}
