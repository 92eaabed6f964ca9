#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/core/rational.hpp"
#include "sheriff/core/time.hpp"

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace sheriff::fx {

class DuplicateRecord : public Error {
 public:
  using Error::Error;
};

class MissingReferenceCurrency : public Error {
 public:
  using Error::Error;
};

class MissingRate : public Error {
 public:
  using Error::Error;
};

class MalformedRecord : public Error {
 public:
  using Error::Error;
};

// Daily extreme quotes: one unit of `base` bought between `low` and `high`
// units of `quote` on `date`.
struct RateWindow {
  Date date;
  std::string base;
  std::string quote;
  Rational low;
  Rational high;

  RateWindow inverse() const;
  bool contains(const Rational& rate) const { return low <= rate && rate <= high; }
};

// "2013-02-01,EUR,USD,1.30,1.32"
RateWindow parse_rate_record(std::string_view line);
std::string format_rate_record(const RateWindow& w);

// Immutable after construction. Lookups fall back to the inverse of a
// stored pair, then to composition through the reference currency.
class RateTable {
 public:
  // Throws DuplicateRecord for a repeated (date, base, quote) and
  // MissingReferenceCurrency when no record involves `reference`.
  static RateTable from_records(std::vector<RateWindow> records, std::string reference);
  static RateTable load(std::istream& in, std::string reference);
  static RateTable load_file(const std::string& path, std::string reference);

  const std::string& reference() const { return reference_; }

  std::optional<RateWindow> lookup(std::string_view base, std::string_view quote, Date date) const;

  // Window converting `currency` into the reference currency; identity for
  // the reference itself. Throws MissingRate.
  RateWindow to_reference(std::string_view currency, Date date) const;

  std::size_t size() const { return records_.size(); }
  std::vector<RateWindow> records() const;

 private:
  using Key = std::tuple<Date, std::string, std::string>;
  struct KeyLess {
    bool operator()(const Key& a, const Key& b) const;
  };

  std::optional<RateWindow> direct(std::string_view base, std::string_view quote, Date date) const;

  std::string reference_;
  std::map<Key, RateWindow, KeyLess> records_;
};

}  // namespace sheriff::fx
