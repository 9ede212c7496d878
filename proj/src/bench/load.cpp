#include <algorithm>
#include <random>
#include <thread>

#include "odoh/bench.hpp"

namespace odoh::bench {

namespace {

using Clock = std::chrono::steady_clock;
using Millis = std::chrono::duration<double, std::milli>;

std::int64_t epoch_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

/// Plain DNS body exchanged over HTTP; status 0 unless the answer parses.
void plain_exchange(LatencySample& s, const std::function<net::HttpResult(ByteView)>& send, ByteView query) {
  const auto start = Clock::now();
  try {
    auto res = send(query);
    s.http_status = res.status;
    if (res.status == 200) {
      auto summary = dns::parse_response(res.body);
      if (summary.id != dns::read_id(query)) s.http_status = 0;
    }
  } catch (const Error&) {
    s.http_status = 0;
  }
  s.total_ms = Millis(Clock::now() - start).count();
}

void oblivious_exchange(LatencySample& s, client::ClientSession& session, const client::Route& route,
                        const dns::Question& question) {
  const auto start = Clock::now();
  try {
    auto result = session.query(route, question);
    s.http_status = 200;
    s.seal_us = result.timings.seal_us;
    s.open_us = result.timings.open_us;
  } catch (const client::HttpStatusError& e) {
    s.http_status = e.status();
  } catch (const Error&) {
    s.http_status = 0;
  }
  s.total_ms = Millis(Clock::now() - start).count();
}

void check_health(net::Transport& t, const std::string& url, std::string_view default_scheme) {
  const auto origin = net::Url::parse(url, default_scheme);
  try {
    auto res = t.get(origin, "/health");
    if (res.status == 200) return;
    throw Error(ErrorCode::EndpointUnreachable, origin.origin() + "/health returned " + std::to_string(res.status));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EndpointUnreachable) throw;
    throw Error(ErrorCode::EndpointUnreachable, origin.origin() + ": " + e.what());
  }
}

}  // namespace

void BenchConfig::validate() const {
  if (clients < 1 || queries < 1) throw Error(ErrorCode::ConfigInvalid, "C and N must be at least 1");
  if (!(rate_per_minute >= 1)) throw Error(ErrorCode::ConfigInvalid, "R must be at least 1 query per minute");
  if (jitter < 0 || jitter >= 1) throw Error(ErrorCode::ConfigInvalid, "jitter must be in [0, 1)");
  if (domains.empty()) throw Error(ErrorCode::ConfigInvalid, "no domains");
  for (const auto& d : domains) {
    try {
      dns::make_question(d, dns::type::kA);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigInvalid, "bad domain '" + d + "': " + e.what());
    }
  }
  auto need = [](const std::string& v, const char* what) {
    if (v.empty()) throw Error(ErrorCode::ConfigInvalid, std::string("mode needs ") + what);
  };
  switch (mode) {
    case Mode::Doh:
      need(endpoints.resolver_url, "a resolver URL");
      break;
    case Mode::Pdoh:
      need(endpoints.resolver_url, "a resolver URL");
      need(endpoints.proxy_url, "a proxy URL");
      break;
    case Mode::Odoh:
    case Mode::CleartextOdoh:
      need(endpoints.proxy_url, "a proxy URL");
      need(endpoints.target, "a target");
      break;
    case Mode::OdohColoc:
      need(endpoints.proxy_url, "a proxy URL");
      need(endpoints.coloc_target, "a co-located target");
      break;
  }
}

std::vector<LatencySample> run_load(const BenchConfig& config, const Logger& logger) {
  config.validate();
  const auto scheme = config.insecure_http ? "http" : "https";
  const auto& ep = config.endpoints;
  const std::string odoh_target = config.mode == Mode::OdohColoc ? ep.coloc_target : ep.target;

  {
    net::TransportOptions probe_opts;
    probe_opts.reuse_connections = false;
    probe_opts.timeout = std::chrono::milliseconds(2000);
    net::Transport probe(probe_opts);
    if (config.mode == Mode::Doh || config.mode == Mode::Pdoh) check_health(probe, ep.resolver_url, scheme);
    if (config.mode != Mode::Doh) check_health(probe, ep.proxy_url, scheme);
    if (config.mode != Mode::Doh && config.mode != Mode::Pdoh) check_health(probe, odoh_target, scheme);
  }

  const auto base = std::chrono::duration<double, std::milli>(60000.0 / config.rate_per_minute);
  std::vector<std::vector<LatencySample>> per_worker(static_cast<std::size_t>(config.clients));
  std::vector<std::thread> workers;
  const auto resolver = ep.resolver_url.empty() ? net::Url{} : net::Url::parse(ep.resolver_url, scheme);

  for (int w = 0; w < config.clients; ++w) {
    workers.emplace_back([&, w] {
      std::mt19937_64 rng(config.seed * 1000003 + static_cast<std::uint64_t>(w));
      std::uniform_int_distribution<std::size_t> pick(0, config.domains.size() - 1);
      std::uniform_real_distribution<double> spread(1.0 - config.jitter, 1.0 + config.jitter);
      std::uniform_real_distribution<double> stagger(0.0, 1.0);

      client::ClientOptions opts;
      opts.reuse_connections = config.reuse_connections;
      opts.insecure_http = config.insecure_http;
      opts.timeout = config.timeout;
      opts.connect_delay = config.connect_delay;
      client::ClientSession session(opts, logger);
      const client::Route route{ep.proxy_url, odoh_target};
      if (config.mode == Mode::Odoh || config.mode == Mode::OdohColoc) {
        try {
          session.discover_config(odoh_target);
        } catch (const Error& e) {
          logger.warn(std::string("worker discovery failed: ") + e.what());
        }
      }

      auto& out = per_worker[static_cast<std::size_t>(w)];
      out.reserve(static_cast<std::size_t>(config.queries));
      auto next = Clock::now() + std::chrono::duration_cast<Clock::duration>(base * stagger(rng));
      for (int i = 0; i < config.queries; ++i) {
        std::this_thread::sleep_until(next);
        next += std::chrono::duration_cast<Clock::duration>(base * spread(rng));

        LatencySample s;
        s.timestamp_ms = epoch_ms();
        s.mode = config.mode;
        s.domain = config.domains[pick(rng)];
        const auto question = dns::make_question(s.domain, dns::type::kA);
        const auto query = dns::build_query(question, static_cast<std::uint16_t>(rng()), false);
        switch (config.mode) {
          case Mode::Doh:
            plain_exchange(s, [&](ByteView q) { return session.transport().post(resolver, resolver.path, kDnsContentType, q); },
                           query);
            break;
          case Mode::Pdoh:
            plain_exchange(
                s,
                [&](ByteView q) {
                  return session.relay({ep.proxy_url, resolver.authority()}, kDnsContentType, q, resolver.path);
                },
                query);
            break;
          case Mode::CleartextOdoh:
            plain_exchange(s, [&](ByteView q) { return session.relay(route, kDnsContentType, q); }, query);
            break;
          case Mode::Odoh:
          case Mode::OdohColoc:
            oblivious_exchange(s, session, route, question);
            break;
        }
        out.push_back(std::move(s));
      }
    });
  }
  for (auto& t : workers) t.join();

  std::vector<LatencySample> samples;
  samples.reserve(static_cast<std::size_t>(config.clients) * static_cast<std::size_t>(config.queries));
  for (auto& v : per_worker) std::move(v.begin(), v.end(), std::back_inserter(samples));
  std::stable_sort(samples.begin(), samples.end(),
                   [](const LatencySample& a, const LatencySample& b) { return a.timestamp_ms < b.timestamp_ms; });
  return samples;
}

}  // namespace odoh::bench
