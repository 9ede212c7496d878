#include "odoh/dns.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <charconv>

#include "odoh/crypto/hpke.hpp"
#include "odoh/error.hpp"

namespace odoh::dns {

namespace {

constexpr std::uint16_t kFlagQr = 0x8000;
constexpr std::uint16_t kFlagRd = 0x0100;
constexpr std::uint16_t kFlagRa = 0x0080;
constexpr int kMaxPointerJumps = 64;

[[noreturn]] void malformed(const char* what) { throw Error(ErrorCode::MalformedDns, what); }

std::vector<std::string_view> split_labels(std::string_view name) {
  std::vector<std::string_view> labels;
  if (name.empty()) return labels;
  std::size_t start = 0;
  while (true) {
    auto dot = name.find('.', start);
    labels.push_back(name.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return labels;
}

void write_name(ByteWriter& w, std::string_view name) {
  for (auto label : split_labels(name)) {
    w.u8(static_cast<std::uint8_t>(label.size())).raw(as_bytes(label));
  }
  w.u8(0);
}

// Reads a possibly-compressed name starting at r's position and leaves r just
// past the name's in-place encoding. Pointers must point strictly backwards
// from the label that contains them, which rules out loops.
std::string read_name(ByteReader& r) {
  const ByteView data = r.data();
  std::string name;
  std::size_t pos = r.position();
  std::size_t resume = 0;
  bool jumped = false;
  int jumps = 0;
  std::size_t wire_length = 0;

  while (true) {
    if (pos >= data.size()) malformed("name runs past end of message");
    const std::uint8_t len = data[pos];
    if ((len & 0xC0) == 0xC0) {
      if (pos + 1 >= data.size()) malformed("truncated compression pointer");
      const std::size_t target = static_cast<std::size_t>(((len & 0x3F) << 8) | data[pos + 1]);
      if (target >= pos) malformed("compression pointer does not point backwards");
      if (++jumps > kMaxPointerJumps) malformed("too many compression pointers");
      if (!jumped) {
        resume = pos + 2;
        jumped = true;
      }
      pos = target;
      continue;
    }
    if ((len & 0xC0) != 0) malformed("reserved label type");
    if (len == 0) {
      ++pos;
      break;
    }
    if (pos + 1 + len > data.size()) malformed("label runs past end of message");
    wire_length += 1 + len;
    if (wire_length + 1 > kMaxNameLength + 2) malformed("name exceeds 255 octets");
    if (!name.empty()) name.push_back('.');
    name.append(reinterpret_cast<const char*>(data.data() + pos + 1), len);
    pos += 1 + len;
  }
  r.seek(jumped ? resume : pos);
  return name;
}

Question read_question(ByteReader& r) {
  Question q;
  auto wire = read_name(r);
  q.qname = to_lower(wire);
  if (wire != q.qname) q.display_name = wire;
  q.qtype = r.u16();
  q.qclass = r.u16();
  return q;
}

ResourceRecord read_record(ByteReader& r) {
  ResourceRecord rr;
  rr.name = read_name(r);
  rr.type = r.u16();
  rr.klass = r.u16();
  rr.ttl = r.u32();
  auto rdata = r.prefixed16();
  rr.rdata.assign(rdata.begin(), rdata.end());
  return rr;
}

Header read_header(ByteReader& r) {
  Header h;
  h.id = r.u16();
  h.flags = r.u16();
  h.qdcount = r.u16();
  h.ancount = r.u16();
  h.nscount = r.u16();
  h.arcount = r.u16();
  return h;
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<std::uint16_t> parse_type(std::string_view name) {
  auto upper = to_lower(name);
  if (upper == "a") return type::kA;
  if (upper == "ns") return type::kNs;
  if (upper == "cname") return type::kCname;
  if (upper == "txt") return type::kTxt;
  if (upper == "aaaa") return type::kAaaa;
  if (upper == "https") return type::kHttps;
  if (upper.starts_with("type")) upper = upper.substr(4);
  std::uint16_t value = 0;
  auto [ptr, ec] = std::from_chars(upper.data(), upper.data() + upper.size(), value);
  if (ec != std::errc() || ptr != upper.data() + upper.size() || upper.empty()) return std::nullopt;
  return value;
}

std::string type_name(std::uint16_t t) {
  switch (t) {
    case type::kA: return "A";
    case type::kNs: return "NS";
    case type::kCname: return "CNAME";
    case type::kTxt: return "TXT";
    case type::kAaaa: return "AAAA";
    case type::kHttps: return "HTTPS";
  }
  return "TYPE" + std::to_string(t);
}

std::string rcode_name(std::uint8_t rc) {
  switch (rc) {
    case rcode::kNoError: return "NOERROR";
    case rcode::kFormErr: return "FORMERR";
    case rcode::kServFail: return "SERVFAIL";
    case rcode::kNxDomain: return "NXDOMAIN";
    case 4: return "NOTIMP";
    case 5: return "REFUSED";
  }
  return "RCODE" + std::to_string(rc);
}

Question make_question(std::string_view name, std::uint16_t qtype, std::uint16_t qclass) {
  if (!name.empty() && name.back() == '.') name.remove_suffix(1);
  if (name.size() > kMaxNameLength) throw Error(ErrorCode::NameTooLong, std::string(name));
  for (auto label : split_labels(name)) {
    if (label.empty()) throw Error(ErrorCode::InvalidArgument, "empty label in name");
    if (label.size() > kMaxLabelLength) throw Error(ErrorCode::LabelTooLong, std::string(label));
  }
  Question q;
  q.qname = to_lower(name);
  if (q.qname != name) q.display_name = std::string(name);
  q.qtype = qtype;
  q.qclass = qclass;
  return q;
}

std::size_t encoded_name_length(std::string_view name) {
  std::size_t n = 1;
  for (auto label : split_labels(name)) n += 1 + label.size();
  return n;
}

Bytes build_query(const Question& q, std::uint16_t id, bool use_0x20) {
  // Revalidate: callers may have filled the struct by hand.
  make_question(q.wire_name(), q.qtype, q.qclass);
  std::string wire = q.wire_name();
  if (use_0x20) {
    auto bits = hpke::random_bytes(wire.size());
    for (std::size_t i = 0; i < wire.size(); ++i) {
      auto c = static_cast<unsigned char>(wire[i]);
      if (std::isalpha(c)) {
        wire[i] = static_cast<char>((bits[i] & 1) ? std::toupper(c) : std::tolower(c));
      }
    }
  }
  ByteWriter w;
  w.u16(id).u16(kFlagRd).u16(1).u16(0).u16(0).u16(0);
  write_name(w, wire);
  w.u16(q.qtype).u16(q.qclass);
  return std::move(w).take();
}

Message parse_message(ByteView bytes) {
  if (bytes.size() < kHeaderSize) malformed("message shorter than header");
  if (bytes.size() > kMaxMessageSize) malformed("message exceeds size cap");
  ByteReader r(bytes, ErrorCode::MalformedDns);
  Message m;
  m.header = read_header(r);
  for (int i = 0; i < m.header.qdcount; ++i) m.questions.push_back(read_question(r));
  for (int i = 0; i < m.header.ancount; ++i) m.answers.push_back(read_record(r));
  for (int i = 0; i < m.header.nscount; ++i) m.authorities.push_back(read_record(r));
  for (int i = 0; i < m.header.arcount; ++i) m.additionals.push_back(read_record(r));
  return m;
}

ResponseSummary parse_response(ByteView bytes, std::uint32_t empty_answer_ttl) {
  auto m = parse_message(bytes);
  ResponseSummary s;
  s.id = m.header.id;
  s.rcode = m.header.rcode();
  s.answers = std::move(m.answers);
  if (s.answers.empty()) {
    s.min_ttl = empty_answer_ttl;
  } else {
    s.min_ttl = std::min_element(s.answers.begin(), s.answers.end(), [](const auto& a, const auto& b) {
                  return a.ttl < b.ttl;
                })->ttl;
  }
  return s;
}

bool verify_0x20(ByteView query_sent, ByteView response) {
  auto sent = parse_message(query_sent);
  auto got = parse_message(response);
  if (sent.questions.size() != 1 || got.questions.size() != 1) return false;
  const auto& a = sent.questions.front();
  const auto& b = got.questions.front();
  return a.wire_name() == b.wire_name() && a.qtype == b.qtype && a.qclass == b.qclass;
}

Bytes build_response(ByteView query, std::uint8_t rc, const std::vector<ResourceRecord>& answers) {
  ByteReader r(query, ErrorCode::MalformedDns);
  if (query.size() < kHeaderSize) malformed("query shorter than header");
  auto header = read_header(r);
  if (header.qdcount != 1) malformed("query must carry exactly one question");
  auto question = read_question(r);
  const std::size_t question_end = r.position();

  const std::uint16_t flags = static_cast<std::uint16_t>(kFlagQr | (header.flags & 0x7800) |
                                                         (header.flags & kFlagRd) | kFlagRa | (rc & 0x0F));
  ByteWriter w;
  w.u16(header.id).u16(flags).u16(1).u16(static_cast<std::uint16_t>(answers.size())).u16(0).u16(0);
  w.raw(query.subspan(kHeaderSize, question_end - kHeaderSize));
  for (const auto& rr : answers) {
    if (to_lower(rr.name) == question.qname) {
      w.u16(0xC000 | kHeaderSize);
    } else {
      write_name(w, rr.name);
    }
    w.u16(rr.type).u16(rr.klass).u32(rr.ttl).prefixed16(rr.rdata);
  }
  return std::move(w).take();
}

bool copy_question_section(Bytes& response, ByteView query) {
  ByteReader qr(query, ErrorCode::MalformedDns);
  ByteReader rr(response, ErrorCode::MalformedDns);
  auto qh = read_header(qr);
  auto rh = read_header(rr);
  if (qh.qdcount != 1 || rh.qdcount != 1) return false;
  auto qq = read_question(qr);
  auto rq = read_question(rr);
  const std::size_t len = qr.position() - kHeaderSize;
  if (qq.qname != rq.qname || qq.qtype != rq.qtype || qq.qclass != rq.qclass ||
      rr.position() - kHeaderSize != len) {
    return false;
  }
  std::copy_n(query.begin() + kHeaderSize, len, response.begin() + kHeaderSize);
  return true;
}

std::uint16_t read_id(ByteView message) {
  if (message.size() < 2) malformed("message shorter than ID");
  return static_cast<std::uint16_t>((message[0] << 8) | message[1]);
}

void write_id(Bytes& message, std::uint16_t id) {
  if (message.size() < 2) malformed("message shorter than ID");
  message[0] = static_cast<std::uint8_t>(id >> 8);
  message[1] = static_cast<std::uint8_t>(id);
}

std::string format_rdata(std::uint16_t t, ByteView rdata) {
  char buf[INET6_ADDRSTRLEN] = {};
  if (t == type::kA && rdata.size() == 4) {
    inet_ntop(AF_INET, rdata.data(), buf, sizeof buf);
    return buf;
  }
  if (t == type::kAaaa && rdata.size() == 16) {
    inet_ntop(AF_INET6, rdata.data(), buf, sizeof buf);
    return buf;
  }
  if (t == type::kTxt) {
    std::string out;
    std::size_t pos = 0;
    while (pos < rdata.size()) {
      std::size_t len = rdata[pos++];
      len = std::min(len, rdata.size() - pos);
      if (!out.empty()) out.push_back(' ');
      out += '"' + to_string(rdata.subspan(pos, len)) + '"';
      pos += len;
    }
    return out;
  }
  return "\\# " + std::to_string(rdata.size()) + " " + to_hex(rdata);
}

}  // namespace odoh::dns
