#include "odoh/client.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "odoh/crypto/hpke.hpp"

namespace odoh::client {

namespace {

using Micros = std::chrono::duration<double, std::micro>;
using Millis = std::chrono::duration<double, std::milli>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint16_t random_id() {
  auto b = hpke::random_bytes(2);
  return static_cast<std::uint16_t>(b[0] << 8 | b[1]);
}

}  // namespace

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "random-pair") return Strategy::RandomPair;
  if (name == "fastest-proxy") return Strategy::FastestProxy;
  if (name == "fastest-pair") return Strategy::FastestPair;
  return std::nullopt;
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::RandomPair:
      return "random-pair";
    case Strategy::FastestProxy:
      return "fastest-proxy";
    case Strategy::FastestPair:
      return "fastest-pair";
  }
  return "unknown";
}

RouteList RouteList::parse(std::string_view text) {
  RouteList out;
  std::vector<std::string>* section = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line == "[proxies]") {
      section = &out.proxies;
    } else if (line == "[targets]") {
      section = &out.targets;
    } else if (line.front() == '[') {
      throw Error(ErrorCode::InvalidArgument, "route file line " + std::to_string(line_no) + ": unknown section");
    } else if (section == nullptr) {
      throw Error(ErrorCode::InvalidArgument,
                  "route file line " + std::to_string(line_no) + ": entry outside a section");
    } else {
      section->push_back(line);
    }
  }
  if (out.proxies.empty() || out.targets.empty()) {
    throw Error(ErrorCode::InvalidArgument, "route file needs at least one proxy and one target");
  }
  return out;
}

RouteList RouteList::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open route file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

HttpStatusError::HttpStatusError(int status, const std::string& detail)
    : Error(ErrorCode::HttpStatus, "status " + std::to_string(status) + (detail.empty() ? "" : ": " + detail)),
      status_(status) {}

TargetKeyConfig choose_config(const std::vector<TargetKeyConfig>& configs) {
  for (const auto& c : configs) {
    if (c.suite.is_registered()) return c;
  }
  throw Error(ErrorCode::NoSupportedSuite, "no config with a supported suite");
}

Bytes make_https_rdata(ByteView config_list) {
  ByteWriter w;
  w.u16(1);  // SvcPriority: service mode
  w.u8(0);   // TargetName: "." (the owner name)
  w.u16(kOdohConfigSvcParam);
  w.prefixed16(config_list);
  return std::move(w).take();
}

std::optional<Bytes> extract_config_list(ByteView rdata) {
  try {
    ByteReader r(rdata, ErrorCode::MalformedDns);
    if (r.u16() == 0) return std::nullopt;  // alias mode carries no params
    for (auto len = r.u8(); len != 0; len = r.u8()) r.take(len);
    while (!r.empty()) {
      const auto key = r.u16();
      auto value = r.prefixed16();
      if (key == kOdohConfigSvcParam) return Bytes(value.begin(), value.end());
    }
  } catch (const Error&) {
  }
  return std::nullopt;
}

ClientSession::ClientSession(ClientOptions options, Logger logger)
    : options_(std::move(options)), logger_(std::move(logger)) {
  net::TransportOptions t;
  t.reuse_connections = options_.reuse_connections;
  t.timeout = options_.timeout;
  t.connect_delay = options_.connect_delay;
  t.bind_address = options_.bind_address;
  t.insecure_tls = options_.insecure_tls;
  transport_ = std::make_unique<net::Transport>(t);
}

net::Url ClientSession::target_url(const std::string& target, std::string_view path) const {
  auto url = net::Url::parse(target, options_.insecure_http ? "http" : "https");
  url.path = std::string(path);
  return url;
}

TargetKeyConfig ClientSession::discover_config(const std::string& target) {
  const auto url = target_url(target, kConfigsPath);
  auto fetch = [&]() -> std::vector<TargetKeyConfig> {
    net::HttpResult res;
    try {
      res = transport_->get(url, url.path);
    } catch (const Error& e) {
      throw Error(ErrorCode::DiscoveryFailed, url.str() + ": " + e.what());
    }
    if (res.status != 200) {
      throw Error(ErrorCode::DiscoveryFailed, url.str() + ": status " + std::to_string(res.status));
    }
    try {
      return parse_config_list(res.body);
    } catch (const Error& e) {
      throw Error(ErrorCode::DiscoveryFailed, url.str() + ": " + e.what());
    }
  };
  auto first = choose_config(fetch());
  auto second = choose_config(fetch());
  if (derive_key_id(first) != derive_key_id(second)) {
    logger_.warn("target " + target + " changed keys between fetches; using the newer config");
  }
  set_config(target, second);
  return second;
}

TargetKeyConfig ClientSession::discover_config_dns(const std::string& bootstrap_doh_url) {
  const auto url = net::Url::parse(bootstrap_doh_url, options_.insecure_http ? "http" : "https");
  const auto query = dns::build_query(dns::make_question(kProbeName, dns::type::kHttps), random_id(), false);
  net::HttpResult res;
  try {
    res = transport_->post(url, url.path, kDnsContentType, query);
  } catch (const Error& e) {
    throw Error(ErrorCode::DiscoveryFailed, url.str() + ": " + e.what());
  }
  if (res.status != 200) {
    throw Error(ErrorCode::DiscoveryFailed, url.str() + ": status " + std::to_string(res.status));
  }
  dns::ResponseSummary summary;
  try {
    summary = dns::parse_response(res.body);
  } catch (const Error& e) {
    throw Error(ErrorCode::DiscoveryFailed, e.what());
  }
  std::vector<TargetKeyConfig> configs;
  for (const auto& rr : summary.answers) {
    if (rr.type != dns::type::kHttps) continue;
    if (auto blob = extract_config_list(rr.rdata)) {
      try {
        auto parsed = parse_config_list(*blob);
        configs.insert(configs.end(), parsed.begin(), parsed.end());
      } catch (const Error& e) {
        logger_.warn(std::string("ignoring malformed odoh config in HTTPS record: ") + e.what());
      }
    }
  }
  if (configs.empty()) throw Error(ErrorCode::DiscoveryFailed, "no odoh config in odoh.test HTTPS records");
  return choose_config(configs);
}

void ClientSession::set_config(const std::string& target, TargetKeyConfig config) {
  std::lock_guard lock(mu_);
  configs_[target] = std::move(config);
}

std::optional<TargetKeyConfig> ClientSession::config_for(const std::string& target) const {
  std::lock_guard lock(mu_);
  auto it = configs_.find(target);
  if (it == configs_.end()) return std::nullopt;
  return it->second;
}

TargetKeyConfig ClientSession::config_or_discover(const std::string& target) {
  if (auto c = config_for(target)) return *c;
  return discover_config(target);
}

net::HttpResult ClientSession::relay(const Route& route, std::string_view content_type, ByteView body,
                                     std::string_view target_path) {
  const auto proxy = net::Url::parse(route.proxy, options_.insecure_http ? "http" : "https");
  const auto path = proxy.path + "?targethost=" + net::url_encode(route.target) +
                    "&targetpath=" + net::url_encode(target_path.empty() ? options_.target_path : target_path);
  return transport_->post(proxy, path, content_type, body,
                          {{"Accept", std::string(content_type)}});
}

QueryResult ClientSession::query(const Route& route, const dns::Question& question) {
  const auto config = config_or_discover(route.target);
  QueryResult out;

  const auto t0 = std::chrono::steady_clock::now();
  const auto dns_query = dns::build_query(question, random_id(), options_.use_0x20);
  auto sealed = seal_query(config, dns_query, options_.padding);
  const auto body = serialize_message(sealed.message);
  const auto t1 = std::chrono::steady_clock::now();

  auto res = relay(route, kObliviousContentType, body);
  const auto t2 = std::chrono::steady_clock::now();
  if (res.status != 200) {
    throw HttpStatusError(res.status, to_string(ByteView(res.body).first(std::min<std::size_t>(res.body.size(), 200))));
  }

  out.response = open_response(sealed.context, parse_message(res.body));
  out.summary = dns::parse_response(out.response);
  const auto t3 = std::chrono::steady_clock::now();

  if (out.summary.id != dns::read_id(dns_query)) throw Error(ErrorCode::VerifyFailure, "response ID mismatch");
  if (options_.use_0x20 && !dns::verify_0x20(dns_query, out.response)) {
    throw Error(ErrorCode::VerifyFailure, "0x20 casing not echoed");
  }

  out.timings.seal_us = Micros(t1 - t0).count();
  out.timings.rtt_ms = Millis(t2 - t1).count();
  out.timings.open_us = Micros(t3 - t2).count();
  out.timings.total_ms = Millis(t3 - t0).count();
  return out;
}

double median_ms(std::vector<double> samples) {
  if (samples.empty()) return kUnreachable;
  std::sort(samples.begin(), samples.end());
  return samples[(samples.size() - 1) / 2];
}

double probe_latency(ClientSession& session, const Route& route, int count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "probe count must be at least 1");
  const auto question = dns::make_question(kProbeName, dns::type::kA);
  std::vector<double> ok;
  for (int i = 0; i < count; ++i) {
    const auto start = std::chrono::steady_clock::now();
    try {
      session.query(route, question);
      ok.push_back(Millis(std::chrono::steady_clock::now() - start).count());
    } catch (const Error&) {
    }
  }
  return median_ms(std::move(ok));
}

RouteSelection select_route(Strategy strategy, const std::vector<std::string>& proxies,
                            const std::vector<std::string>& targets, int probe_count, const ProbeFn& probe,
                            std::mt19937_64& rng, const Logger& logger) {
  if (proxies.empty() || targets.empty()) {
    throw Error(ErrorCode::InvalidArgument, "need at least one proxy and one target");
  }
  if (probe_count < 1) throw Error(ErrorCode::InvalidArgument, "probe count must be at least 1");

  RouteSelection sel{strategy, proxies, targets, probe_count, {}, kUnreachable, false};
  auto pick = [&rng](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto random_pair = [&] { return Route{proxies[pick(proxies.size())], targets[pick(targets.size())]}; };

  std::vector<Route> candidates;
  switch (strategy) {
    case Strategy::RandomPair:
      sel.chosen = random_pair();
      return sel;
    case Strategy::FastestProxy: {
      const auto& target = targets[pick(targets.size())];
      for (const auto& p : proxies) candidates.push_back({p, target});
      break;
    }
    case Strategy::FastestPair:
      for (const auto& p : proxies) {
        for (const auto& t : targets) candidates.push_back({p, t});
      }
      break;
  }

  for (const auto& c : candidates) {
    const double rtt = probe(c);
    if (rtt < sel.median_rtt_ms) {
      sel.median_rtt_ms = rtt;
      sel.chosen = c;
    }
  }
  if (std::isinf(sel.median_rtt_ms)) {
    logger.warn("all route probes failed; falling back to a random pair");
    sel.chosen = random_pair();
    sel.fell_back = true;
  }
  return sel;
}

}  // namespace odoh::client
