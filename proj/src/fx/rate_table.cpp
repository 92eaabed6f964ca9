#include "sheriff/fx/rate_table.hpp"

#include "sheriff/core/money.hpp"

#include <fstream>
#include <sstream>

namespace sheriff::fx {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

RateWindow RateWindow::inverse() const { return RateWindow{date, quote, base, 1 / high, 1 / low}; }

RateWindow parse_rate_record(std::string_view line) {
  std::vector<std::string> fields;
  std::stringstream ss{std::string(line)};
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (fields.size() != 5) {
    throw MalformedRecord("expected date,base,quote,low,high: '" + std::string(line) + "'");
  }
  try {
    RateWindow w{parse_date(fields[0]), fields[1], fields[2], parse_rational(fields[3]), parse_rational(fields[4])};
    if (!is_iso_code_shape(w.base) || !is_iso_code_shape(w.quote) || w.base == w.quote) {
      throw MalformedRecord("bad currency pair in '" + std::string(line) + "'");
    }
    if (!(w.low > 0) || w.low > w.high) {
      throw MalformedRecord("rates must satisfy 0 < low <= high in '" + std::string(line) + "'");
    }
    return w;
  } catch (const InvalidArgument& e) {
    throw MalformedRecord(std::string(e.what()) + " in '" + std::string(line) + "'");
  }
}

std::string format_rate_record(const RateWindow& w) {
  auto render = [](const Rational& r) {
    // Exact when the rate is a terminating decimal, else 10 digits.
    for (int digits = 0; digits <= 10; ++digits) {
      if (round_to(r, digits) == r) return format_fixed(r, digits);
    }
    return format_fixed(r, 10);
  };
  return format_date(w.date) + "," + w.base + "," + w.quote + "," + render(w.low) + "," + render(w.high);
}

bool RateTable::KeyLess::operator()(const Key& a, const Key& b) const {
  const auto& [da, ba, qa] = a;
  const auto& [db, bb, qb] = b;
  if (da != db) return da < db;
  if (ba != bb) return ba < bb;
  return qa < qb;
}

RateTable RateTable::from_records(std::vector<RateWindow> records, std::string reference) {
  RateTable table;
  table.reference_ = std::move(reference);
  bool has_reference = false;
  for (auto& w : records) {
    has_reference = has_reference || w.base == table.reference_ || w.quote == table.reference_;
    Key key{w.date, w.base, w.quote};
    if (table.records_.count(key)) {
      throw DuplicateRecord("duplicate rate for " + w.base + "/" + w.quote + " on " + format_date(w.date));
    }
    table.records_.emplace(std::move(key), std::move(w));
  }
  if (!has_reference) {
    throw MissingReferenceCurrency("no rate record involves reference currency " + table.reference_);
  }
  return table;
}

RateTable RateTable::load(std::istream& in, std::string reference) {
  std::vector<RateWindow> records;
  std::string line;
  while (std::getline(in, line)) {
    std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    records.push_back(parse_rate_record(stripped));
  }
  return from_records(std::move(records), std::move(reference));
}

RateTable RateTable::load_file(const std::string& path, std::string reference) {
  std::ifstream in(path);
  if (!in) throw MalformedRecord("cannot open rate table '" + path + "'");
  return load(in, std::move(reference));
}

std::optional<RateWindow> RateTable::direct(std::string_view base, std::string_view quote, Date date) const {
  auto it = records_.find(Key{date, std::string(base), std::string(quote)});
  if (it != records_.end()) return it->second;
  it = records_.find(Key{date, std::string(quote), std::string(base)});
  if (it != records_.end()) return it->second.inverse();
  return std::nullopt;
}

std::optional<RateWindow> RateTable::lookup(std::string_view base, std::string_view quote, Date date) const {
  if (base == quote) return RateWindow{date, std::string(base), std::string(quote), Rational(1), Rational(1)};
  if (auto w = direct(base, quote, date)) return w;
  if (base == reference_ || quote == reference_) return std::nullopt;
  auto to_ref = direct(base, reference_, date);
  auto from_ref = direct(reference_, quote, date);
  if (!to_ref || !from_ref) return std::nullopt;
  return RateWindow{date, std::string(base), std::string(quote), to_ref->low * from_ref->low,
                    to_ref->high * from_ref->high};
}

RateWindow RateTable::to_reference(std::string_view currency, Date date) const {
  auto w = lookup(currency, reference_, date);
  if (!w) {
    throw MissingRate("no " + std::string(currency) + "->" + reference_ + " rate on " + format_date(date));
  }
  return *w;
}

std::vector<RateWindow> RateTable::records() const {
  std::vector<RateWindow> out;
  out.reserve(records_.size());
  for (const auto& [key, w] : records_) out.push_back(w);
  return out;
}

}  // namespace sheriff::fx
