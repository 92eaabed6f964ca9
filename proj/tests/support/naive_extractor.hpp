#pragma once

#include "sheriff/extract/html.hpp"
#include "sheriff/extract/price_parser.hpp"

#include <optional>
#include <string>

namespace sheriff::testsupport {

// Reference strawman: grep the rendered text for the first currency symbol
// and read the number next to it. Ignores page structure entirely.
inline std::optional<Money> naive_extract(std::string_view page, const extract::CurrencyTable& table) {
  auto doc = extract::Document::parse(page);
  const extract::Node* body = doc.body();
  if (!body) return std::nullopt;
  std::string text = body->text_content();
  std::size_t best = std::string::npos;
  for (const auto& r : table.records()) {
    std::size_t pos = text.find(r.symbol);
    if (pos < best) best = pos;
  }
  if (best == std::string::npos) return std::nullopt;
  std::size_t begin = best >= 12 ? best - 12 : 0;
  std::string window = text.substr(begin, 32);
  try {
    return extract::parse_price({window, std::nullopt}, table);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace sheriff::testsupport
