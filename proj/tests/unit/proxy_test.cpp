#include <doctest.h>

#include <arpa/inet.h>

#include <cmath>
#include <random>

#include "odoh/error.hpp"
#include "odoh/protocol.hpp"
#include "odoh/proxy.hpp"
#include "test_util.hpp"

using namespace odoh;
using namespace std::chrono_literals;

namespace {

class RecordingForwarder final : public proxy::Forwarder {
 public:
  net::HttpResult forward(const net::Url& target, const proxy::HeaderList& headers, ByteView body,
                          std::chrono::milliseconds) override {
    last_url = target.str();
    last_headers = headers;
    last_body.assign(body.begin(), body.end());
    ++calls;
    if (fail) throw Error(*fail, "fake");
    return reply;
  }
  std::string last_url;
  proxy::HeaderList last_headers;
  Bytes last_body;
  int calls = 0;
  std::optional<ErrorCode> fail;
  net::HttpResult reply{200, std::string(kObliviousContentType), Bytes{0x02, 0x00, 0x00, 0x00, 0x01, 0xAA}, {}};
};

struct Fixture {
  proxy::Clock::time_point now{};
  std::shared_ptr<RecordingForwarder> fwd = std::make_shared<RecordingForwarder>();
  std::vector<std::string> log_lines;

  proxy::ProxyService make(proxy::ProxyConfig config = {}) {
    Logger logger([this](LogLevel, std::string_view line) { log_lines.emplace_back(line); }, LogLevel::Debug);
    return proxy::ProxyService(config, fwd, logger, [this] { return now; });
  }
};

proxy::ProxyRequest valid_request(Bytes body = Bytes(137, 0x11)) {
  proxy::ProxyRequest r;
  r.targethost = "target.example:8443";
  r.targetpath = "/dns-query";
  r.body = std::move(body);
  r.content_type = std::string(kObliviousContentType);
  r.client_addr = "198.51.100.23";
  r.headers = {{"Content-Type", std::string(kObliviousContentType)},
               {"X-Forwarded-For", "198.51.100.23"},
               {"Forwarded", "for=198.51.100.23"},
               {"X-Real-IP", "198.51.100.23"},
               {"Via", "1.1 client"},
               {"Cookie", "session=abc"},
               {"Authorization", "Bearer x"},
               {"Accept", std::string(kObliviousContentType)},
               {"User-Agent", "curl/8"}};
  return r;
}

/// Independent bucket model in integer micro-tokens.
struct OracleBucket {
  long long capacity_micro;
  long long refill_micro_per_ms;
  long long tokens;
  long long last_ms = 0;
  bool take(long long now_ms) {
    tokens = std::min(capacity_micro, tokens + (now_ms - last_ms) * refill_micro_per_ms);
    last_ms = now_ms;
    if (tokens >= 1'000'000) {
      tokens -= 1'000'000;
      return true;
    }
    return false;
  }
};

}  // namespace

TEST_SUITE("proxy") {

TEST_CASE("token bucket: burst, refill, independence") {
  proxy::RateLimiter limiter(300, 50);
  proxy::Clock::time_point t{};
  for (int i = 0; i < 50; ++i) CHECK(limiter.allow("a", t));
  CHECK_FALSE(limiter.allow("a", t));
  CHECK(limiter.allow("b", t));

  t += 1s;  // 300/60 = 5 tokens
  for (int i = 0; i < 5; ++i) CHECK(limiter.allow("a", t));
  CHECK_FALSE(limiter.allow("a", t));
  CHECK(proxy::rate_limit_check(limiter, "c", t) == proxy::Verdict::Allow);
}

TEST_CASE("token bucket matches an integer model") {
  // 300/min = 5 tokens/s = 5000 micro-tokens per ms.
  proxy::RateLimiter limiter(300, 50);
  OracleBucket oracle{50'000'000, 5000, 50'000'000};
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> gap(0, 400);
  long long now_ms = 0;
  int disagreements = 0;
  for (int i = 0; i < 5000; ++i) {
    now_ms += gap(rng);
    bool got = limiter.allow("x", proxy::Clock::time_point{} + std::chrono::milliseconds(now_ms));
    disagreements += got != oracle.take(now_ms);
  }
  CHECK(disagreements == 0);
}

TEST_CASE("sanitize_headers") {
  auto out = proxy::sanitize_headers(valid_request().headers, "target.example:8443");
  std::map<std::string, std::string> m(out.begin(), out.end());
  CHECK(m.size() == 4);
  CHECK(m.at("Content-Type") == kObliviousContentType);
  CHECK(m.at("Accept") == kObliviousContentType);
  CHECK(m.at("Host") == "target.example:8443");
  CHECK(m.at("User-Agent") == proxy::kUserAgent);
  CHECK_FALSE(m.count("X-Forwarded-For"));
  CHECK_FALSE(m.count("Cookie"));

  auto lower = proxy::sanitize_headers({{"content-type", "a/b"}, {"x-forwarded-for", "1.2.3.4"}}, "h");
  CHECK(std::count_if(lower.begin(), lower.end(), [](auto& h) { return h.second == "a/b"; }) == 1);
  CHECK(std::none_of(lower.begin(), lower.end(), [](auto& h) { return h.second == "1.2.3.4"; }));
}

TEST_CASE("forwarding and relay fidelity") {
  Fixture f;
  auto svc = f.make();
  auto res = svc.handle_proxy_request(valid_request());
  CHECK(res.status == 200);
  CHECK(res.body == f.fwd->reply.body);
  CHECK(res.content_type == kObliviousContentType);
  CHECK(f.fwd->last_url == "https://target.example:8443/dns-query");
  CHECK(f.fwd->last_body == Bytes(137, 0x11));

  f.fwd->reply = {401, "text/plain", to_bytes("nope"), {}};
  auto relayed = svc.handle_proxy_request(valid_request());
  CHECK(relayed.status == 401);
  CHECK(to_string(relayed.body) == "nope");
  CHECK(svc.metrics().forwards_total == 2);

  proxy::ProxyConfig plain;
  plain.insecure_http = true;
  Fixture g;
  g.make(plain).handle_proxy_request(valid_request());
  CHECK(g.fwd->last_url == "http://target.example:8443/dns-query");
}

TEST_CASE("status table") {
  Fixture f;
  proxy::ProxyConfig c;
  c.burst = 2;
  c.rate_limit_per_minute = 60;
  auto svc = f.make(c);

  auto r = valid_request();
  r.targethost.reset();
  CHECK(svc.handle_proxy_request(r).status == 400);
  r = valid_request();
  r.targetpath = "dns-query";
  CHECK(svc.handle_proxy_request(r).status == 400);
  r = valid_request(Bytes(8193, 0));
  CHECK(svc.handle_proxy_request(r).status == 413);
  r = valid_request();
  r.content_type = std::string(kDnsContentType);
  CHECK(svc.handle_proxy_request(r).status == 415);
  CHECK(f.fwd->calls == 0);

  CHECK(svc.handle_proxy_request(valid_request()).status == 200);
  CHECK(svc.handle_proxy_request(valid_request()).status == 200);
  CHECK(svc.handle_proxy_request(valid_request()).status == 429);
  CHECK(svc.metrics().rate_limited_total == 1);

  f.now += 10s;
  f.fwd->fail = ErrorCode::UpstreamUnreachable;
  CHECK(svc.handle_proxy_request(valid_request()).status == 502);
  f.fwd->fail = ErrorCode::UpstreamTimeout;
  CHECK(svc.handle_proxy_request(valid_request()).status == 504);
  CHECK(svc.metrics().upstream_errors_total == 2);
  CHECK(f.fwd->calls == 4);  // no retries

  proxy::ProxyConfig listed;
  listed.allowed_targets = {"good.example"};
  Fixture g;
  auto strict = g.make(listed);
  CHECK(strict.handle_proxy_request(valid_request()).status == 403);
  auto ok = valid_request();
  ok.targethost = "good.example";
  CHECK(strict.handle_proxy_request(ok).status == 200);

  proxy::ProxyConfig baseline;
  baseline.allow_plain_doh = true;
  Fixture h;
  auto doh = valid_request();
  doh.content_type = std::string(kDnsContentType);
  CHECK(h.make(baseline).handle_proxy_request(doh).status == 200);
}

TEST_CASE("51st instantaneous request is rate limited") {
  Fixture f;
  auto svc = f.make();
  for (int i = 0; i < 50; ++i) REQUIRE(svc.handle_proxy_request(valid_request()).status == 200);
  CHECK(svc.handle_proxy_request(valid_request()).status == 429);
}

TEST_CASE("opacity: body content never changes behavior") {
  std::mt19937_64 rng(11);
  Fixture ref;
  auto ref_svc = ref.make();
  auto baseline = ref_svc.handle_proxy_request(valid_request());
  auto baseline_headers = ref.fwd->last_headers;
  auto baseline_logs = ref.log_lines;

  for (int i = 0; i < 200; ++i) {
    Fixture f;
    auto svc = f.make();
    auto body = odoh::testing::random_payload(rng, 137, 137);
    auto res = svc.handle_proxy_request(valid_request(body));
    CHECK(res.status == baseline.status);
    CHECK(res.body == baseline.body);
    CHECK(f.fwd->last_headers == baseline_headers);
    CHECK(f.fwd->last_body == body);
    CHECK(f.log_lines == baseline_logs);
  }
}

TEST_CASE("identity stripping") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> octet(1, 254);
  for (int i = 0; i < 100; ++i) {
    std::string addr = std::to_string(octet(rng)) + "." + std::to_string(octet(rng)) + "." +
                       std::to_string(octet(rng)) + "." + std::to_string(octet(rng));
    std::uint8_t binary[4];
    REQUIRE(inet_pton(AF_INET, addr.c_str(), binary) == 1);

    Fixture f;
    auto svc = f.make();
    auto r = valid_request(Bytes(64, 0));
    r.client_addr = addr;
    for (auto& h : r.headers) {
      if (h.first != "Content-Type" && h.first != "Accept") h.second = addr;
    }
    svc.handle_proxy_request(r);
    std::string outbound = f.fwd->last_url;
    for (const auto& [k, v] : f.fwd->last_headers) outbound += k + ": " + v + "\n";
    for (const auto& line : f.log_lines) outbound += line;
    CHECK(outbound.find(addr) == std::string::npos);
    CHECK(outbound.find(std::string(reinterpret_cast<char*>(binary), 4)) == std::string::npos);
  }
}

TEST_CASE("config validation") {
  proxy::ProxyConfig c;
  CHECK_NOTHROW(c.validate());
  c.rate_limit_per_minute = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.rate_limit_per_minute = 10;
  c.burst = 0.5;
  CHECK_THROWS_AS(c.validate(), Error);
}

}  // TEST_SUITE
