#include "odoh/zone.hpp"

#include <arpa/inet.h>

#include <fstream>
#include <sstream>

#include "odoh/error.hpp"

namespace odoh::dns {

namespace {

Bytes encode_name(std::string_view name) {
  auto q = make_question(name, type::kA);
  ByteWriter w;
  std::size_t start = 0;
  const std::string& n = q.qname;
  while (start < n.size()) {
    auto dot = n.find('.', start);
    auto label = n.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    w.u8(static_cast<std::uint8_t>(label.size())).raw(as_bytes(label));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  w.u8(0);
  return std::move(w).take();
}

Bytes parse_rdata(std::uint16_t t, const std::string& text) {
  if (t == type::kA) {
    Bytes out(4);
    if (inet_pton(AF_INET, text.c_str(), out.data()) != 1) throw std::invalid_argument("bad IPv4 address");
    return out;
  }
  if (t == type::kAaaa) {
    Bytes out(16);
    if (inet_pton(AF_INET6, text.c_str(), out.data()) != 1) throw std::invalid_argument("bad IPv6 address");
    return out;
  }
  if (t == type::kCname || t == type::kNs) return encode_name(text);
  if (t == type::kTxt) {
    std::string s = text;
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    if (s.size() > 255) throw std::invalid_argument("TXT string longer than 255 bytes");
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(s.size())).raw(as_bytes(s));
    return std::move(w).take();
  }
  return from_hex(text);
}

}  // namespace

Zone Zone::parse(std::string_view text) {
  Zone zone;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string name, type_text, ttl_text;
    if (!(fields >> name)) continue;
    try {
      if (!(fields >> type_text >> ttl_text)) throw std::invalid_argument("expected: name TYPE ttl rdata");
      std::string rdata;
      std::getline(fields >> std::ws, rdata);
      while (!rdata.empty() && std::isspace(static_cast<unsigned char>(rdata.back()))) rdata.pop_back();
      if (rdata.empty()) throw std::invalid_argument("missing rdata");
      auto t = parse_type(type_text);
      if (!t) throw std::invalid_argument("unknown type " + type_text);
      ResourceRecord rr;
      rr.name = make_question(name, *t).qname;
      rr.type = *t;
      rr.ttl = static_cast<std::uint32_t>(std::stoul(ttl_text));
      rr.rdata = parse_rdata(*t, rdata);
      zone.add(std::move(rr));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::InvalidArgument, "zone line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return zone;
}

Zone Zone::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open zone file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Zone::add(ResourceRecord record) {
  record.name = to_lower(record.name);
  records_[record.name].push_back(std::move(record));
  ++count_;
}

Bytes Zone::answer(ByteView query) const {
  auto msg = parse_message(query);
  if (msg.header.is_response() || msg.questions.size() != 1) {
    throw Error(ErrorCode::MalformedDns, "expected a single-question query");
  }
  const auto& q = msg.questions.front();
  auto it = records_.find(q.qname);
  if (it == records_.end()) return build_response(query, rcode::kNxDomain, {});
  std::vector<ResourceRecord> answers;
  for (const auto& rr : it->second) {
    if (rr.type == q.qtype && rr.klass == q.qclass) answers.push_back(rr);
  }
  return build_response(query, rcode::kNoError, answers);
}

std::vector<std::string> Zone::names() const {
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const auto& [name, _] : records_) out.push_back(name);
  return out;
}

}  // namespace odoh::dns
