#include <CLI11.hpp>
#include <cmath>
#include <json.hpp>
#include <ostream>

#include "odoh/client.hpp"

namespace odoh::client {

namespace {

struct DigArgs {
  std::string name;
  std::string qtype = "A";
  std::string proxy;
  std::string target;
  std::string routes;
  std::string strategy = "random-pair";
  int probes = 3;
  bool no_reuse = false;
  bool dns_discovery = false;
  std::string bootstrap;
  bool use_0x20 = false;
  bool json = false;
  bool insecure_http = false;
  int timeout_ms = 5000;
};

std::string fqdn(const std::string& name) { return name.empty() || name.back() != '.' ? name + "." : name; }

}  // namespace

int run_dig(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  DigArgs a;
  CLI::App app{"ODoH lookup through an oblivious proxy", "odoh-dig"};
  app.add_option("name", a.name, "Name to resolve")->required();
  app.add_option("qtype", a.qtype, "Record type (A, AAAA, HTTPS, TXT, ...)");
  app.add_option("--proxy", a.proxy, "Proxy URL, e.g. https://proxy.example/proxy");
  app.add_option("--target", a.target, "Target host[:port]");
  app.add_option("--routes", a.routes, "Route file with [proxies] and [targets] sections");
  app.add_option("--strategy", a.strategy, "random-pair | fastest-proxy | fastest-pair");
  app.add_option("--probes", a.probes, "Probe queries per candidate pair")->check(CLI::PositiveNumber);
  app.add_flag("--no-reuse", a.no_reuse, "Open a fresh connection per request");
  app.add_flag("--dnssec-less-discovery", a.dns_discovery,
               "Fetch the target config from odoh.test HTTPS records (unverified)");
  app.add_option("--bootstrap", a.bootstrap, "DoH resolver URL for --dnssec-less-discovery");
  app.add_flag("--use-0x20", a.use_0x20, "Randomize query name case and verify the echo");
  app.add_flag("--json", a.json, "Structured output");
  app.add_flag("--insecure-http", a.insecure_http, "Plain HTTP to proxies and targets");
  app.add_option("--timeout", a.timeout_ms, "Request timeout in ms")->check(CLI::PositiveNumber);

  auto usage = [&](const std::string& msg) {
    err << "odoh-dig: " << msg << "\n" << app.help();
    return 2;
  };

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return usage(e.what());
  }

  const auto qtype = dns::parse_type(a.qtype);
  if (!qtype) return usage("unknown record type " + a.qtype);
  const auto strategy = parse_strategy(a.strategy);
  if (!strategy) return usage("unknown strategy " + a.strategy);
  if (a.dns_discovery && a.bootstrap.empty()) return usage("--dnssec-less-discovery needs --bootstrap");

  std::vector<std::string> proxies;
  std::vector<std::string> targets;
  if (!a.routes.empty()) {
    try {
      auto list = RouteList::load(a.routes);
      proxies = std::move(list.proxies);
      targets = std::move(list.targets);
    } catch (const Error& e) {
      return usage(e.what());
    }
  }
  if (!a.proxy.empty()) proxies = {a.proxy};
  if (!a.target.empty()) targets = {a.target};
  if (proxies.empty()) return usage("no proxy: pass --proxy or --routes");
  if (targets.empty()) return usage("no target: pass --target or --routes");

  dns::Question question;
  try {
    question = dns::make_question(a.name, *qtype);
  } catch (const Error& e) {
    return usage(e.what());
  }

  ClientOptions options;
  options.reuse_connections = !a.no_reuse;
  options.insecure_http = a.insecure_http;
  options.use_0x20 = a.use_0x20;
  options.timeout = std::chrono::milliseconds(a.timeout_ms);
  Logger logger([&err](LogLevel, std::string_view line) { err << ";; " << line << "\n"; });
  ClientSession session(options, logger);

  try {
    if (a.dns_discovery) {
      auto config = session.discover_config_dns(a.bootstrap);
      for (const auto& t : targets) session.set_config(t, config);
    }

    std::mt19937_64 rng(std::random_device{}());
    auto probe = [&](const Route& r) { return probe_latency(session, r, a.probes); };
    auto selection = select_route(*strategy, proxies, targets, a.probes, probe, rng, logger);
    auto result = session.query(selection.chosen, question);
    const auto config = session.config_for(selection.chosen.target);
    const auto& s = result.summary;

    if (a.json) {
      nlohmann::json answers = nlohmann::json::array();
      for (const auto& rr : s.answers) {
        answers.push_back({{"name", rr.name},
                           {"type", dns::type_name(rr.type)},
                           {"ttl", rr.ttl},
                           {"data", dns::format_rdata(rr.type, rr.rdata)}});
      }
      nlohmann::json j = {
          {"name", question.qname},
          {"qtype", dns::type_name(question.qtype)},
          {"rcode", dns::rcode_name(s.rcode)},
          {"answers", answers},
          {"timings",
           {{"seal_us", result.timings.seal_us},
            {"rtt_ms", result.timings.rtt_ms},
            {"open_us", result.timings.open_us}}},
          {"route",
           {{"proxy", selection.chosen.proxy},
            {"target", selection.chosen.target},
            {"strategy", strategy_name(selection.strategy)}}},
      };
      if (!std::isinf(selection.median_rtt_ms)) j["route"]["probe_median_ms"] = selection.median_rtt_ms;
      if (config) j["suite"] = config->suite.name();
      if (a.dns_discovery) j["discovery"] = "dns-unverified";
      out << j.dump(2) << "\n";
    } else {
      out << ";; route: proxy=" << selection.chosen.proxy << " target=" << selection.chosen.target
          << " strategy=" << strategy_name(selection.strategy);
      if (!std::isinf(selection.median_rtt_ms)) out << " probe_median=" << selection.median_rtt_ms << "ms";
      out << "\n";
      if (config) {
        out << ";; config: " << config->suite.name() << " key_id=" << to_hex(derive_key_id(*config)).substr(0, 16)
            << (a.dns_discovery ? " (dns discovery, unverified)" : "") << "\n";
      }
      out << ";; status: " << dns::rcode_name(s.rcode) << ", id: " << s.id << ", answers: " << s.answers.size()
          << "\n\n;; QUESTION SECTION:\n;" << fqdn(question.qname) << "\t\tIN\t" << dns::type_name(question.qtype)
          << "\n";
      if (!s.answers.empty()) {
        out << "\n;; ANSWER SECTION:\n";
        for (const auto& rr : s.answers) {
          out << fqdn(rr.name) << "\t" << rr.ttl << "\tIN\t" << dns::type_name(rr.type) << "\t"
              << dns::format_rdata(rr.type, rr.rdata) << "\n";
        }
      }
      out << "\n;; timings: seal " << result.timings.seal_us << " us, network " << result.timings.rtt_ms
          << " ms, open " << result.timings.open_us << " us\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "odoh-dig: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace odoh::client
