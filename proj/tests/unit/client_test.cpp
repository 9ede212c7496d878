#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "net/server_runner.hpp"
#include "odoh/bench.hpp"
#include "odoh/client.hpp"
#include "odoh/error.hpp"
#include "odoh/target.hpp"

using namespace odoh;
using namespace std::chrono_literals;
using client::Route;
using client::Strategy;

namespace {

client::ClientOptions loopback() {
  client::ClientOptions o;
  o.insecure_http = true;
  o.timeout = 3000ms;
  return o;
}

std::string write_temp(const std::string& name, const std::string& text) {
  auto path = "/tmp/" + name;
  std::ofstream(path) << text;
  return path;
}

int dig(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
  std::ostringstream o, e;
  int code = client::run_dig(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

}  // namespace

TEST_SUITE("client") {

TEST_CASE("route file parsing") {
  auto list = client::RouteList::parse(
      "# routes\n[proxies]\nhttps://p1.example/proxy\n https://p2.example/proxy \n\n[targets]\nt1.example\n");
  CHECK(list.proxies == std::vector<std::string>{"https://p1.example/proxy", "https://p2.example/proxy"});
  CHECK(list.targets == std::vector<std::string>{"t1.example"});
  CHECK_THROWS_AS(client::RouteList::parse("p1\n[targets]\nt\n"), Error);
  CHECK_THROWS_AS(client::RouteList::parse("[proxies]\np\n"), Error);
  CHECK_THROWS_AS(client::RouteList::parse("[bogus]\n"), Error);
}

TEST_CASE("strategy names") {
  for (auto s : {Strategy::RandomPair, Strategy::FastestProxy, Strategy::FastestPair}) {
    CHECK(client::parse_strategy(client::strategy_name(s)) == s);
  }
  CHECK_FALSE(client::parse_strategy("slowest"));
}

TEST_CASE("select_route over synthetic costs") {
  std::vector<std::string> P{"p1", "p2"}, T{"t1", "t2"};
  // Per-hop costs; pair cost is their sum, so (p2,t1) is the argmin.
  std::map<std::string, double> cost{{"p1", 8}, {"p2", 2}, {"t1", 3}, {"t2", 12}};
  int probes = 0;
  client::ProbeFn probe = [&](const Route& r) {
    ++probes;
    return cost[r.proxy] + cost[r.target];
  };
  std::mt19937_64 rng(1);
  auto best = client::select_route(Strategy::FastestPair, P, T, 3, probe, rng, Logger::null());
  CHECK(best.chosen == Route{"p2", "t1"});
  CHECK(best.median_rtt_ms == 5);
  CHECK(probes == 4);

  probes = 0;
  auto fp = client::select_route(Strategy::FastestProxy, P, T, 3, probe, rng, Logger::null());
  CHECK(fp.chosen.proxy == "p2");
  CHECK(probes == 2);

  probes = 0;
  auto rp = client::select_route(Strategy::RandomPair, P, T, 3, probe, rng, Logger::null());
  CHECK(probes == 0);
  CHECK(std::find(P.begin(), P.end(), rp.chosen.proxy) != P.end());

  for (auto s : {Strategy::RandomPair, Strategy::FastestProxy, Strategy::FastestPair}) {
    auto one = client::select_route(s, {"p"}, {"t"}, 1, probe, rng, Logger::null());
    CHECK(one.chosen == Route{"p", "t"});
  }

  client::ProbeFn tie = [](const Route&) { return 7.0; };
  CHECK(client::select_route(Strategy::FastestPair, P, T, 1, tie, rng, Logger::null()).chosen == Route{"p1", "t1"});

  std::vector<std::string> warnings;
  Logger capture([&](LogLevel, std::string_view l) { warnings.emplace_back(l); });
  client::ProbeFn dead = [](const Route&) { return client::kUnreachable; };
  auto fb = client::select_route(Strategy::FastestPair, P, T, 1, dead, rng, capture);
  CHECK(fb.fell_back);
  CHECK(warnings.size() == 1);

  client::ProbeFn half_dead = [&](const Route& r) { return r.proxy == "p2" ? client::kUnreachable : 50.0; };
  CHECK(client::select_route(Strategy::FastestPair, P, T, 1, half_dead, rng, Logger::null()).chosen.proxy == "p1");
}

TEST_CASE("median") {
  CHECK(client::median_ms({5}) == 5);
  CHECK(client::median_ms({9, 1, 5}) == 5);
  CHECK(std::isinf(client::median_ms({})));
}

TEST_CASE("config choice and https rdata") {
  TargetKeyConfig unknown{{0x0099, 1, 1}, Bytes(5, 1)};
  CHECK_THROWS_WITH(client::choose_config({unknown}), doctest::Contains("no-supported-suite"));
  auto good = generate_key_pair(CipherSuite::default_suite()).config;
  CHECK(client::choose_config({unknown, good}) == good);

  auto list = serialize_config_list(std::vector{good});
  auto rdata = client::make_https_rdata(list);
  CHECK(client::extract_config_list(rdata) == list);
  CHECK_FALSE(client::extract_config_list(Bytes{0, 0, 0}));
  CHECK_FALSE(client::extract_config_list(Bytes{0, 1}));
}

TEST_CASE("discovery and queries over a loopback stack") {
  bench::LocalStack stack({});
  auto ep = stack.endpoints();
  client::ClientSession session(loopback(), Logger::null());

  auto config = session.discover_config(ep.target);
  CHECK(config == stack.key_pair().config);
  CHECK(derive_key_id(config).size() == 32);

  Route route{ep.proxy_url, ep.target};
  auto r = session.query(route, dns::make_question("example.com", dns::type::kA));
  CHECK(r.summary.rcode == 0);
  REQUIRE(r.summary.answers.size() == 1);
  CHECK(dns::format_rdata(dns::type::kA, r.summary.answers[0].rdata) == "93.184.216.34");
  CHECK(r.timings.seal_us > 0);
  CHECK(r.timings.open_us > 0);
  CHECK(r.timings.rtt_ms > 0);

  auto nx = session.query(route, dns::make_question("does-not-exist.example", dns::type::kA));
  CHECK(nx.summary.rcode == 3);

  auto o = loopback();
  o.use_0x20 = true;
  client::ClientSession casing(o, Logger::null());
  CHECK(casing.query(route, dns::make_question("abcdefgh.example.com", dns::type::kA)).summary.rcode == 3);

  CHECK_THROWS_WITH(session.discover_config("127.0.0.1:1"), doctest::Contains("discovery-failed"));
}

TEST_CASE("config rotation between fetches keeps the newer config") {
  // Serves a different key on every fetch.
  net::ServerRunner runner(4);
  std::atomic<int> fetches{0};
  std::vector<TargetKeyConfig> served;
  std::mutex mu;
  runner.server().Get(std::string(kConfigsPath), [&](const httplib::Request&, httplib::Response& res) {
    auto cfg = generate_key_pair(CipherSuite::default_suite()).config;
    {
      std::lock_guard lock(mu);
      served.push_back(cfg);
    }
    ++fetches;
    res.set_content(to_string(serialize_config_list(std::vector{cfg})), "application/octet-stream");
  });
  int port = runner.start("127.0.0.1", 0);
  std::vector<std::string> warnings;
  client::ClientSession session(loopback(), Logger([&](LogLevel, std::string_view l) { warnings.emplace_back(l); }));
  auto cfg = session.discover_config("127.0.0.1:" + std::to_string(port));
  CHECK(fetches == 2);
  CHECK(cfg == served.back());
  CHECK(warnings.size() == 1);
  runner.stop();
}

TEST_CASE("dns discovery path") {
  auto kp = generate_key_pair(CipherSuite::default_suite());
  auto zone = std::make_shared<dns::Zone>();
  zone->add({"odoh.test", dns::type::kHttps, dns::kClassIn, 300,
             client::make_https_rdata(serialize_config_list(std::vector{kp.config}))});
  bench::MockResolverServer resolver(zone, 0ms);
  resolver.start();
  client::ClientSession session(loopback(), Logger::null());
  CHECK(session.discover_config_dns(resolver.url()) == kp.config);

  bench::MockResolverServer empty(std::make_shared<dns::Zone>(), 0ms);
  empty.start();
  CHECK_THROWS_WITH(session.discover_config_dns(empty.url()), doctest::Contains("discovery-failed"));
}

TEST_CASE("probe_latency") {
  bench::LocalStackOptions opts;
  opts.proxy_delay = 10ms;
  opts.target_delay = 20ms;
  bench::LocalStack stack(opts);
  auto ep = stack.endpoints();
  client::ClientSession session(loopback(), Logger::null());
  session.discover_config(ep.target);
  double rtt = client::probe_latency(session, {ep.proxy_url, ep.target}, 3);
  CHECK(rtt >= 30);
  CHECK(client::probe_latency(session, {ep.proxy_url, ep.target}, 1) >= 30);
  CHECK(std::isinf(client::probe_latency(session, {"http://127.0.0.1:1/proxy", ep.target}, 2)));
  CHECK_THROWS_AS(client::probe_latency(session, {ep.proxy_url, ep.target}, 0), Error);
}

TEST_CASE("tampering middlebox yields decrypt-failure") {
  bench::LocalStack stack({});
  auto ep = stack.endpoints();
  net::Transport upstream;
  auto proxy_url = net::Url::parse(ep.proxy_url);
  net::ServerRunner middlebox(4);
  middlebox.server().Post("/proxy", [&](const httplib::Request& req, httplib::Response& res) {
    auto r = upstream.post(proxy_url, "/proxy?targethost=" + req.get_param_value("targethost") +
                                          "&targetpath=" + req.get_param_value("targetpath"),
                           req.get_header_value("Content-Type"), as_bytes(req.body));
    if (!r.body.empty()) r.body.back() ^= 0x01;
    net::reply(res, r);
  });
  int port = middlebox.start("127.0.0.1", 0);
  client::ClientSession session(loopback(), Logger::null());
  Route route{"http://127.0.0.1:" + std::to_string(port) + "/proxy", ep.target};
  CHECK_THROWS_WITH(session.query(route, dns::make_question("example.com", dns::type::kA)),
                    doctest::Contains("decrypt-failure"));
  middlebox.stop();
}

TEST_CASE("http errors surface with their status") {
  bench::LocalStack stack({});
  auto ep = stack.endpoints();
  client::ClientSession session(loopback(), Logger::null());
  session.set_config(ep.target, generate_key_pair(CipherSuite::default_suite()).config);  // stale key
  try {
    session.query({ep.proxy_url, ep.target}, dns::make_question("example.com", dns::type::kA));
    FAIL("expected an error");
  } catch (const client::HttpStatusError& e) {
    CHECK(e.status() == 401);
  }
}

TEST_CASE("run_dig") {
  CHECK(dig({}) == 2);
  CHECK(dig({"example.com", "--proxy", "http://127.0.0.1:1/proxy"}) == 2);
  CHECK(dig({"example.com", "BOGUS", "--proxy", "p", "--target", "t"}) == 2);
  CHECK(dig({"example.com", "--proxy", "p", "--target", "t", "--strategy", "nope"}) == 2);
  CHECK(dig({"example.com", "--proxy", "p", "--target", "t", "--dnssec-less-discovery"}) == 2);

  bench::LocalStack stack({});
  auto ep = stack.endpoints();
  std::string out, err;
  CHECK(dig({"example.com", "A", "--proxy", ep.proxy_url, "--target", ep.target, "--insecure-http"}, &out, &err) == 0);
  CHECK(out.find("93.184.216.34") != std::string::npos);
  CHECK(out.find("NOERROR") != std::string::npos);

  CHECK(dig({"nope.example", "--proxy", ep.proxy_url, "--target", ep.target, "--insecure-http", "--json",
             "--use-0x20"},
            &out) == 0);
  auto j = nlohmann::json::parse(out);
  CHECK(j["rcode"] == "NXDOMAIN");
  CHECK(j["name"] == "nope.example");
  CHECK(j["qtype"] == "A");
  CHECK(j["answers"].empty());
  CHECK(j["timings"].contains("seal_us"));
  CHECK(j["timings"].contains("rtt_ms"));
  CHECK(j["timings"].contains("open_us"));
  CHECK(j["route"]["strategy"] == "random-pair");

  CHECK(dig({"example.com", "--proxy", "http://127.0.0.1:1/proxy", "--target", ep.target, "--insecure-http"}, &out,
            &err) == 1);
}

TEST_CASE("run_dig fastest-pair over a 2x2 route file") {
  bench::LocalStack fast({});
  bench::LocalStackOptions slow_opts;
  slow_opts.proxy_delay = 15ms;
  slow_opts.target_delay = 15ms;
  bench::LocalStack slow(slow_opts);
  auto f = fast.endpoints();
  auto s = slow.endpoints();
  auto routes = write_temp("odoh_routes_test.txt", "[proxies]\n" + s.proxy_url + "\n" + f.proxy_url +
                                                       "\n[targets]\n" + s.target + "\n" + f.target + "\n");
  std::string out;
  CHECK(dig({"example.com", "--routes", routes, "--strategy", "fastest-pair", "--insecure-http", "--json"}, &out) ==
        0);
  auto j = nlohmann::json::parse(out);
  CHECK(j["route"]["proxy"] == f.proxy_url);
  CHECK(j["route"]["target"] == f.target);
  CHECK(j["route"]["strategy"] == "fastest-pair");
  std::remove(routes.c_str());
}

}  // TEST_SUITE
