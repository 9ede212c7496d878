#include <chrono>

#include "odoh/bench.hpp"
#include "odoh/crypto/hpke.hpp"

namespace odoh::bench {

namespace {

using Micros = std::chrono::duration<double, std::micro>;

dns::ResourceRecord synthetic_answer(const std::string& name) {
  return {name, dns::type::kA, dns::kClassIn, 300, Bytes{192, 0, 2, 1}};
}

}  // namespace

CryptoBenchResult micro_crypto_bench(const CipherSuite& suite, std::size_t iterations) {
  if (iterations < kMinCryptoIterations) {
    throw Error(ErrorCode::InvalidArgument,
                "need at least " + std::to_string(kMinCryptoIterations) + " iterations, got " +
                    std::to_string(iterations));
  }
  suite.require_registered();
  std::vector<double> seal, open, lifecycle;
  seal.reserve(iterations);
  open.reserve(iterations);
  lifecycle.reserve(iterations);

  for (std::size_t i = 0; i < iterations; ++i) {
    const auto kp = generate_key_pair(suite);
    const auto name = "d" + std::to_string(i) + "-" + to_hex(hpke::random_bytes(3)) + ".example";
    const auto query = dns::build_query(dns::make_question(name, dns::type::kA), static_cast<std::uint16_t>(i), false);
    const auto response = dns::build_response(query, dns::rcode::kNoError, {synthetic_answer(name)});

    const auto t0 = std::chrono::steady_clock::now();
    auto sealed = seal_query(kp.config, query);
    const auto wire = serialize_message(sealed.message);
    const auto t1 = std::chrono::steady_clock::now();
    auto opened = open_query(kp, parse_message(wire));
    const auto t2 = std::chrono::steady_clock::now();
    const auto answer = serialize_message(seal_response(opened.response_key.view(), suite, response));
    const auto back = open_response(sealed.context, parse_message(answer));
    const auto t3 = std::chrono::steady_clock::now();

    if (opened.dns_query != query || back != response) throw Error(ErrorCode::CryptoFailure, "roundtrip mismatch");
    seal.push_back(Micros(t1 - t0).count());
    open.push_back(Micros(t2 - t1).count());
    lifecycle.push_back(Micros(t3 - t0).count());
  }

  CryptoBenchResult r;
  r.iterations = iterations;
  r.seal_p50_us = percentile(seal, 50);
  r.seal_p99_us = percentile(seal, 99);
  r.open_p50_us = percentile(open, 50);
  r.open_p99_us = percentile(open, 99);
  r.lifecycle_p50_us = percentile(lifecycle, 50);
  r.lifecycle_p99_us = percentile(lifecycle, 99);
  return r;
}

SizeBenchResult micro_size_bench(const std::vector<std::string>& domains, const CipherSuite& suite) {
  if (domains.empty()) throw Error(ErrorCode::ConfigInvalid, "no domains");
  const auto kp = generate_key_pair(suite);
  SizeBenchResult r;
  double clear_total = 0;
  double sealed_total = 0;
  bool first = true;
  for (const auto& name : domains) {
    const auto query = dns::build_query(dns::make_question(name, dns::type::kA), 0, false);
    auto sealed = seal_query(kp.config, query);
    const auto wire = serialize_message(sealed.message);
    const auto response = dns::build_response(query, dns::rcode::kNoError, {synthetic_answer(name)});
    const auto answer = seal_response(sealed.context.response_key(), suite, response);

    const std::size_t q_over = wire.size() - query.size();
    const std::size_t r_over = answer.encrypted_message.size() - response.size();
    if (first) {
      r.query_overhead = q_over;
      r.response_overhead = r_over;
      first = false;
    } else if (q_over != r.query_overhead || r_over != r.response_overhead) {
      throw Error(ErrorCode::CryptoFailure, "overhead varies across domains");
    }
    clear_total += static_cast<double>(query.size());
    sealed_total += static_cast<double>(wire.size());
    ++r.count;
  }
  r.mean_query_bytes = clear_total / static_cast<double>(r.count);
  r.mean_odoh_query_bytes = sealed_total / static_cast<double>(r.count);
  return r;
}

}  // namespace odoh::bench
