#include "odoh/settings.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "odoh/error.hpp"

namespace odoh {

namespace {

std::string normalize_key(std::string_view key) {
  std::string out;
  for (unsigned char c : key) out.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(c)));
  return out;
}

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

}  // namespace

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

Settings Settings::parse(std::string_view text) {
  Settings s;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigInvalid, "line " + std::to_string(line_no) + ": expected key = value");
    }
    s.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
  return s;
}

Settings Settings::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Settings::apply_env(std::string_view prefix, const std::vector<std::string>& keys, const EnvLookup& env) {
  for (const auto& key : keys) {
    std::string name(prefix);
    for (unsigned char c : normalize_key(key)) name.push_back(static_cast<char>(std::toupper(c)));
    if (auto v = env(name)) set(key, *v);
  }
}

void Settings::set(const std::string& key, std::string value) { values_[normalize_key(key)] = std::move(value); }

std::optional<std::string> Settings::get(const std::string& key) const {
  auto it = values_.find(normalize_key(key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Settings::get_or(const std::string& key, std::string fallback) const {
  return get(key).value_or(std::move(fallback));
}

long long Settings::get_int(const std::string& key, long long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    auto n = std::stoll(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return n;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigInvalid, key + ": expected an integer, got '" + *v + "'");
  }
}

double Settings::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    auto n = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return n;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigInvalid, key + ": expected a number, got '" + *v + "'");
  }
}

bool Settings::get_bool(const std::string& key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  auto s = normalize_key(*v);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw Error(ErrorCode::ConfigInvalid, key + ": expected a boolean, got '" + *v + "'");
}

std::vector<std::string> Settings::get_list(const std::string& key) const {
  std::vector<std::string> out;
  auto v = get(key);
  if (!v) return out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

}  // namespace odoh
