#pragma once

#include "sheriff/core/errors.hpp"
#include "sheriff/core/time.hpp"
#include "sheriff/extract/html.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sheriff::extract {

class SelectorMiss : public Error {
 public:
  using Error::Error;
};

class SelectorAmbiguous : public Error {
 public:
  using Error::Error;
};

class InvalidSelector : public Error {
 public:
  using Error::Error;
};

enum class LocaleHint { ContinentalEuropean, Anglophone, Swiss };

std::string to_string(LocaleHint hint);
LocaleHint locale_hint_from_string(std::string_view text);

// A price locator recorded from a user's highlight.
//
// dom-path expressions are element paths from <html>, e.g.
// "body/div[2]/span[1]". Each step is a tag name with an optional 1-based
// index among same-name siblings ([1] when omitted). A leading "html/" step
// is accepted and ignored.
//
// text-anchor expressions have the form "<offset>:<anchor text>". The
// anchor matches a text region whose whitespace-normalized content equals
// the anchor exactly; the result is the region `offset` positions later in
// document order (0 selects the anchor region itself).
struct PriceSelector {
  enum class Kind { DomPath, TextAnchor };

  Kind kind = Kind::DomPath;
  std::string expression;
  Timestamp recorded_at{};

  // Throws InvalidSelector when the expression violates its grammar.
  static PriceSelector dom_path(std::string expression, Timestamp recorded_at = {});
  static PriceSelector text_anchor(std::string anchor, int offset, Timestamp recorded_at = {});

  void validate() const;

  friend bool operator==(const PriceSelector& a, const PriceSelector& b) {
    return a.kind == b.kind && a.expression == b.expression;
  }
};

struct PathStep {
  std::string name;
  int index = 1;
};

std::vector<PathStep> parse_dom_path(std::string_view expression);

nlohmann::json to_json(const PriceSelector& sel);
PriceSelector selector_from_json(const nlohmann::json& j);

struct RawPriceText {
  std::string text;
  std::optional<LocaleHint> locale_hint;
};

// Evaluates the selector against a parsed page. Throws SelectorMiss when the
// addressed node is absent and SelectorAmbiguous when a text anchor matches
// more than one region.
RawPriceText apply_selector(const Document& page, const PriceSelector& sel);
RawPriceText apply_selector(std::string_view page, const PriceSelector& sel);

// The element a dom-path addresses, or nullptr.
const Node* resolve_dom_path(const Document& page, std::string_view expression);

}  // namespace sheriff::extract
