#include "sheriff/extract/selector.hpp"

#include <cctype>
#include <charconv>

namespace sheriff::extract {

namespace {

bool valid_tag_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':';
}

struct Anchor {
  int offset = 0;
  std::string text;
};

Anchor parse_anchor(std::string_view expression) {
  auto colon = expression.find(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw InvalidSelector("text-anchor expression must be '<offset>:<anchor>': '" +
                          std::string(expression) + "'");
  }
  Anchor a;
  std::string_view number = expression.substr(0, colon);
  if (number.front() == '+') number.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), a.offset);
  if (ec != std::errc() || ptr != number.data() + number.size()) {
    throw InvalidSelector("bad text-anchor offset in '" + std::string(expression) + "'");
  }
  a.text = normalize_whitespace(expression.substr(colon + 1));
  if (a.text.empty()) throw InvalidSelector("empty text anchor");
  return a;
}

void collect_text_regions(const Node& node, std::vector<std::string>& regions) {
  if (node.is_element("script") || node.is_element("style")) return;
  if (node.kind() == Node::Kind::Text) {
    std::string normalized = normalize_whitespace(node.text());
    if (!normalized.empty()) regions.push_back(std::move(normalized));
    return;
  }
  for (const auto& child : node.children()) collect_text_regions(*child, regions);
}

}  // namespace

std::string to_string(LocaleHint hint) {
  switch (hint) {
    case LocaleHint::ContinentalEuropean: return "continental";
    case LocaleHint::Anglophone: return "anglophone";
    case LocaleHint::Swiss: return "swiss";
  }
  return "?";
}

LocaleHint locale_hint_from_string(std::string_view text) {
  if (text == "continental") return LocaleHint::ContinentalEuropean;
  if (text == "anglophone") return LocaleHint::Anglophone;
  if (text == "swiss") return LocaleHint::Swiss;
  throw InvalidArgument("unknown locale '" + std::string(text) + "'");
}

std::vector<PathStep> parse_dom_path(std::string_view expression) {
  std::vector<PathStep> steps;
  std::size_t i = 0;
  if (!expression.empty() && expression.front() == '/') ++i;
  while (i <= expression.size()) {
    auto slash = expression.find('/', i);
    std::string_view step = expression.substr(i, slash == std::string_view::npos ? std::string_view::npos : slash - i);
    if (step.empty()) throw InvalidSelector("empty step in dom path '" + std::string(expression) + "'");
    PathStep parsed;
    auto bracket = step.find('[');
    std::string_view name = step.substr(0, bracket);
    if (name.empty()) throw InvalidSelector("missing element name in '" + std::string(expression) + "'");
    for (char c : name) {
      if (!valid_tag_char(c)) throw InvalidSelector("bad element name in '" + std::string(expression) + "'");
      parsed.name += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (bracket != std::string_view::npos) {
      if (step.back() != ']') throw InvalidSelector("unterminated index in '" + std::string(expression) + "'");
      std::string_view digits = step.substr(bracket + 1, step.size() - bracket - 2);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), parsed.index);
      if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size() || parsed.index < 1) {
        throw InvalidSelector("index must be a positive integer in '" + std::string(expression) + "'");
      }
    }
    steps.push_back(std::move(parsed));
    if (slash == std::string_view::npos) break;
    i = slash + 1;
  }
  if (!steps.empty() && steps.front().name == "html") {
    if (steps.front().index != 1) throw InvalidSelector("html step cannot carry an index > 1");
    steps.erase(steps.begin());
  }
  if (steps.empty()) throw InvalidSelector("dom path addresses no element: '" + std::string(expression) + "'");
  return steps;
}

PriceSelector PriceSelector::dom_path(std::string expression, Timestamp recorded_at) {
  PriceSelector sel{Kind::DomPath, std::move(expression), recorded_at};
  sel.validate();
  return sel;
}

PriceSelector PriceSelector::text_anchor(std::string anchor, int offset, Timestamp recorded_at) {
  PriceSelector sel{Kind::TextAnchor, std::to_string(offset) + ":" + anchor, recorded_at};
  sel.validate();
  return sel;
}

void PriceSelector::validate() const {
  if (expression.empty()) throw InvalidSelector("selector expression is empty");
  if (kind == Kind::DomPath) {
    parse_dom_path(expression);
  } else {
    parse_anchor(expression);
  }
}

nlohmann::json to_json(const PriceSelector& sel) {
  nlohmann::json j = {{"kind", sel.kind == PriceSelector::Kind::DomPath ? "dom-path" : "text-anchor"},
                      {"expression", sel.expression}};
  if (sel.recorded_at != Timestamp{}) j["recorded_at"] = format_timestamp(sel.recorded_at);
  return j;
}

PriceSelector selector_from_json(const nlohmann::json& j) {
  PriceSelector sel;
  std::string kind = j.value("kind", "dom-path");
  if (kind == "dom-path") {
    sel.kind = PriceSelector::Kind::DomPath;
  } else if (kind == "text-anchor") {
    sel.kind = PriceSelector::Kind::TextAnchor;
  } else {
    throw InvalidSelector("unknown selector kind '" + kind + "'");
  }
  sel.expression = j.at("expression").get<std::string>();
  if (j.contains("recorded_at")) sel.recorded_at = parse_timestamp(j["recorded_at"].get<std::string>());
  sel.validate();
  return sel;
}

const Node* resolve_dom_path(const Document& page, std::string_view expression) {
  const Node* node = &page.html();
  for (const PathStep& step : parse_dom_path(expression)) {
    const Node* next = nullptr;
    int seen = 0;
    for (const auto& child : node->children()) {
      if (child->is_element(step.name) && ++seen == step.index) {
        next = child.get();
        break;
      }
    }
    if (!next) return nullptr;
    node = next;
  }
  return node;
}

RawPriceText apply_selector(const Document& page, const PriceSelector& sel) {
  if (sel.kind == PriceSelector::Kind::DomPath) {
    const Node* node = resolve_dom_path(page, sel.expression);
    if (!node) throw SelectorMiss("no element at '" + sel.expression + "'");
    std::string text = node->text_content();
    if (text.empty()) throw SelectorMiss("element at '" + sel.expression + "' has no text");
    return RawPriceText{std::move(text), std::nullopt};
  }
  Anchor anchor = parse_anchor(sel.expression);
  std::vector<std::string> regions;
  collect_text_regions(page.root(), regions);
  std::optional<std::size_t> match;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i] != anchor.text) continue;
    if (match) throw SelectorAmbiguous("anchor '" + anchor.text + "' matches more than one region");
    match = i;
  }
  if (!match) throw SelectorMiss("anchor '" + anchor.text + "' not found");
  auto target = static_cast<std::ptrdiff_t>(*match) + anchor.offset;
  if (target < 0 || target >= static_cast<std::ptrdiff_t>(regions.size())) {
    throw SelectorMiss("anchor offset " + std::to_string(anchor.offset) + " runs off the page");
  }
  return RawPriceText{regions[static_cast<std::size_t>(target)], std::nullopt};
}

RawPriceText apply_selector(std::string_view page, const PriceSelector& sel) {
  return apply_selector(Document::parse(page), sel);
}

}  // namespace sheriff::extract
