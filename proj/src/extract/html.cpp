#include "sheriff/extract/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

namespace sheriff::extract {

namespace {

const std::unordered_set<std::string_view> kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr"};

const std::unordered_set<std::string_view> kRawTextElements = {"script", "style", "textarea", "title",
                                                               "xmp", "noscript"};

const std::unordered_set<std::string_view> kHeadElements = {"base", "link", "meta", "title", "style",
                                                            "script", "noscript"};

// Start tags that implicitly close an open <p>.
const std::unordered_set<std::string_view> kClosesParagraph = {
    "address", "article", "aside", "blockquote", "details", "div", "dl", "fieldset",
    "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6",
    "header", "hr", "main", "menu", "nav", "ol", "p", "pre", "section", "table", "ul"};

// Elements that bound the search for an implied end tag.
const std::unordered_set<std::string_view> kScopeBoundaries = {"html", "body", "table", "td", "th",
                                                               "ul", "ol", "div", "section"};

const std::unordered_map<std::string_view, std::string_view> kNamedEntities = {
    {"amp", "&"},        {"lt", "<"},           {"gt", ">"},          {"quot", "\""},
    {"apos", "'"},       {"nbsp", "\xC2\xA0"},  {"euro", "\xE2\x82\xAC"}, {"pound", "\xC2\xA3"},
    {"yen", "\xC2\xA5"}, {"cent", "\xC2\xA2"},  {"copy", "\xC2\xA9"}, {"reg", "\xC2\xAE"},
    {"trade", "\xE2\x84\xA2"}, {"thinsp", "\xE2\x80\x89"}, {"ndash", "\xE2\x80\x93"},
    {"mdash", "\xE2\x80\x94"}, {"hellip", "\xE2\x80\xA6"}, {"laquo", "\xC2\xAB"},
    {"raquo", "\xC2\xBB"}, {"middot", "\xC2\xB7"}, {"times", "\xC3\x97"}, {"curren", "\xC2\xA4"}};

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

struct Token {
  enum class Type { Text, StartTag, EndTag, Comment };
  Type type;
  std::string name;  // tag name or raw text
  std::vector<std::pair<std::string, std::string>> attributes;
  bool self_closing = false;
};

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view input) : in_(input) {}

  bool next(Token& tok) {
    if (!raw_text_end_.empty()) return raw_text(tok);
    if (pos_ >= in_.size()) return false;
    if (in_[pos_] == '<' && pos_ + 1 < in_.size()) {
      char c = in_[pos_ + 1];
      if (c == '!' || c == '?') return markup_declaration(tok);
      if (c == '/' && pos_ + 2 < in_.size() && std::isalpha(static_cast<unsigned char>(in_[pos_ + 2]))) {
        return end_tag(tok);
      }
      if (std::isalpha(static_cast<unsigned char>(c))) return start_tag(tok);
    }
    auto end = in_.find('<', pos_ + 1);
    if (end == std::string_view::npos) end = in_.size();
    tok = Token{Token::Type::Text, decode_entities(in_.substr(pos_, end - pos_)), {}, false};
    pos_ = end;
    return true;
  }

 private:
  bool raw_text(Token& tok) {
    std::string closing = "</" + raw_text_end_;
    std::size_t end = pos_;
    while (true) {
      end = in_.find("</", end);
      if (end == std::string_view::npos) {
        end = in_.size();
        break;
      }
      if (to_lower(in_.substr(end, closing.size())) == closing) break;
      end += 2;
    }
    std::string_view body = in_.substr(pos_, end - pos_);
    bool decode = raw_text_end_ == "title" || raw_text_end_ == "textarea";
    tok = Token{Token::Type::Text, decode ? decode_entities(body) : std::string(body), {}, false};
    pos_ = end;
    raw_text_end_.clear();
    if (body.empty()) return next(tok);
    return true;
  }

  bool markup_declaration(Token& tok) {
    if (in_.substr(pos_, 4) == "<!--") {
      auto end = in_.find("-->", pos_ + 4);
      std::size_t stop = end == std::string_view::npos ? in_.size() : end;
      tok = Token{Token::Type::Comment, std::string(in_.substr(pos_ + 4, stop - pos_ - 4)), {}, false};
      pos_ = end == std::string_view::npos ? in_.size() : end + 3;
      return true;
    }
    // Doctype, CDATA or processing instruction: skip to the next '>'.
    auto end = in_.find('>', pos_);
    pos_ = end == std::string_view::npos ? in_.size() : end + 1;
    return next(tok);
  }

  bool end_tag(Token& tok) {
    std::size_t i = pos_ + 2;
    std::size_t start = i;
    while (i < in_.size() && !is_space(in_[i]) && in_[i] != '>' && in_[i] != '/') ++i;
    tok = Token{Token::Type::EndTag, to_lower(in_.substr(start, i - start)), {}, false};
    auto end = in_.find('>', i);
    pos_ = end == std::string_view::npos ? in_.size() : end + 1;
    return true;
  }

  bool start_tag(Token& tok) {
    std::size_t i = pos_ + 1;
    std::size_t start = i;
    while (i < in_.size() && !is_space(in_[i]) && in_[i] != '>' && in_[i] != '/') ++i;
    tok = Token{Token::Type::StartTag, to_lower(in_.substr(start, i - start)), {}, false};
    while (i < in_.size()) {
      while (i < in_.size() && (is_space(in_[i]) || in_[i] == '/')) {
        if (in_[i] == '/' && i + 1 < in_.size() && in_[i + 1] == '>') tok.self_closing = true;
        ++i;
      }
      if (i >= in_.size() || in_[i] == '>') break;
      std::size_t name_start = i;
      while (i < in_.size() && !is_space(in_[i]) && in_[i] != '>' && in_[i] != '=' &&
             !(in_[i] == '/' && i + 1 < in_.size() && in_[i + 1] == '>')) {
        ++i;
      }
      std::string attr_name = to_lower(in_.substr(name_start, i - name_start));
      std::string value;
      while (i < in_.size() && is_space(in_[i])) ++i;
      if (i < in_.size() && in_[i] == '=') {
        ++i;
        while (i < in_.size() && is_space(in_[i])) ++i;
        if (i < in_.size() && (in_[i] == '"' || in_[i] == '\'')) {
          char quote = in_[i++];
          auto close = in_.find(quote, i);
          if (close == std::string_view::npos) close = in_.size();
          value = decode_entities(in_.substr(i, close - i));
          i = close < in_.size() ? close + 1 : close;
        } else {
          std::size_t v = i;
          while (i < in_.size() && !is_space(in_[i]) && in_[i] != '>') ++i;
          value = decode_entities(in_.substr(v, i - v));
        }
      }
      if (!attr_name.empty()) {
        bool duplicate = std::any_of(tok.attributes.begin(), tok.attributes.end(),
                                     [&](const auto& a) { return a.first == attr_name; });
        if (!duplicate) tok.attributes.emplace_back(std::move(attr_name), std::move(value));
      }
    }
    pos_ = i < in_.size() ? i + 1 : in_.size();
    if (kRawTextElements.count(tok.name) && !tok.self_closing) raw_text_end_ = tok.name;
    return true;
  }

  std::string_view in_;
  std::size_t pos_ = 0;
  std::string raw_text_end_;
};

class TreeBuilder {
 public:
  explicit TreeBuilder(Node& document) : document_(document) {
    html_ = document_.append(std::make_unique<Node>(Node::Kind::Element, "html"));
    stack_.push_back(html_);
  }

  void feed(Token& tok) {
    switch (tok.type) {
      case Token::Type::Text: text(tok.name); break;
      case Token::Type::Comment:
        current()->append(std::make_unique<Node>(Node::Kind::Comment, std::move(tok.name)));
        break;
      case Token::Type::StartTag: start(tok); break;
      case Token::Type::EndTag: end(tok.name); break;
    }
  }

 private:
  Node* current() { return stack_.back(); }

  void ensure_body() {
    if (body_) return;
    pop_until_html();
    body_ = html_->append(std::make_unique<Node>(Node::Kind::Element, "body"));
    stack_.push_back(body_);
  }

  void ensure_head() {
    if (!head_) head_ = html_->append(std::make_unique<Node>(Node::Kind::Element, "head"));
  }

  void pop_until_html() { stack_.resize(1); }

  bool in_head() const { return stack_.size() >= 2 && stack_[1] == head_ && head_ != nullptr; }

  void text(std::string& data) {
    bool blank = std::all_of(data.begin(), data.end(), [](char c) { return is_space(c); });
    if (!body_) {
      if (blank) return;
      if (!in_head() || stack_.size() == 2) ensure_body();
    }
    current()->append_text(data);
  }

  void start(Token& tok) {
    const std::string& name = tok.name;
    if (name == "html") {
      for (auto& [k, v] : tok.attributes) {
        if (!html_->attribute(k)) html_->set_attribute(k, v);
      }
      return;
    }
    if (name == "head") {
      if (body_ || head_) return;
      ensure_head();
      pop_until_html();
      stack_.push_back(head_);
      return;
    }
    if (name == "body") {
      if (body_) {
        for (auto& [k, v] : tok.attributes) {
          if (!body_->attribute(k)) body_->set_attribute(k, v);
        }
        return;
      }
      ensure_body();
      for (auto& [k, v] : tok.attributes) body_->set_attribute(k, v);
      return;
    }
    if (!body_) {
      if (kHeadElements.count(name)) {
        ensure_head();
        if (!in_head()) {
          pop_until_html();
          stack_.push_back(head_);
        }
      } else {
        ensure_body();
      }
    }
    implied_end_tags(name);
    auto element = std::make_unique<Node>(Node::Kind::Element, name);
    for (auto& [k, v] : tok.attributes) element->set_attribute(std::move(k), std::move(v));
    Node* inserted = current()->append(std::move(element));
    if (!tok.self_closing && !kVoidElements.count(name)) stack_.push_back(inserted);
  }

  void close_if_open(std::initializer_list<std::string_view> names,
                     std::initializer_list<std::string_view> boundaries) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const std::string& open = stack_[i]->name();
      if (std::find(names.begin(), names.end(), open) != names.end()) {
        stack_.resize(i);
        return;
      }
      if (std::find(boundaries.begin(), boundaries.end(), open) != boundaries.end() ||
          kScopeBoundaries.count(open)) {
        return;
      }
    }
  }

  void implied_end_tags(const std::string& name) {
    if (kClosesParagraph.count(name)) close_if_open({"p"}, {});
    if (name == "li") close_if_open({"li"}, {"ul", "ol"});
    if (name == "dt" || name == "dd") close_if_open({"dt", "dd"}, {"dl"});
    if (name == "option") close_if_open({"option"}, {"select"});
    if (name == "tr") close_if_open({"tr"}, {"table", "tbody", "thead", "tfoot"});
    if (name == "td" || name == "th") close_if_open({"td", "th"}, {"tr"});
    if (name == "a") close_if_open({"a"}, {});
  }

  void end(const std::string& name) {
    if (name == "html") return;
    if (name == "head") {
      if (in_head()) pop_until_html();
      return;
    }
    if (name == "body") return;
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->name() == name) {
        stack_.resize(i);
        return;
      }
    }
    // Stray end tag with nothing to close: ignored, as browsers do. A
    // stray </p> creates an empty paragraph in browsers; we skip that.
  }

  Node& document_;
  Node* html_ = nullptr;
  Node* head_ = nullptr;
  Node* body_ = nullptr;
  std::vector<Node*> stack_;
};

}  // namespace

Node::Node(Kind kind, std::string name_or_text) : kind_(kind) {
  if (kind == Kind::Element) {
    name_ = std::move(name_or_text);
  } else {
    text_ = std::move(name_or_text);
  }
}

const std::string* Node::attribute(std::string_view name) const {
  for (const auto& [k, v] : attributes_) {
    if (k == name) return &v;
  }
  return nullptr;
}

Node* Node::append(std::unique_ptr<Node> child) {
  child->parent_ = this;
  children_.push_back(std::move(child));
  return children_.back().get();
}

void Node::append_text(std::string_view data) {
  // Adjacent text tokens (e.g. split around a stray '<') share one node.
  if (!children_.empty() && children_.back()->kind_ == Kind::Text) {
    children_.back()->text_ += data;
    return;
  }
  append(std::make_unique<Node>(Kind::Text, std::string(data)));
}

void Node::set_attribute(std::string name, std::string value) {
  for (auto& [k, v] : attributes_) {
    if (k == name) {
      v = std::move(value);
      return;
    }
  }
  attributes_.emplace_back(std::move(name), std::move(value));
}

void Node::collect_text(std::string& out) const {
  if (kind_ == Kind::Text) {
    out += text_;
    return;
  }
  if (kind_ == Kind::Element && (name_ == "script" || name_ == "style")) return;
  if (kind_ == Kind::Element && name_ == "br") out += ' ';
  for (const auto& child : children_) child->collect_text(out);
}

std::string Node::text_content() const {
  std::string raw;
  collect_text(raw);
  return normalize_whitespace(raw);
}

int Node::same_name_index() const {
  if (!parent_) return 1;
  int index = 0;
  for (const auto& sibling : parent_->children_) {
    if (sibling->is_element(name_)) ++index;
    if (sibling.get() == this) return index;
  }
  return index;
}

Document Document::parse(std::string_view markup) {
  Document doc;
  doc.root_ = std::make_unique<Node>(Node::Kind::Document, "");
  TreeBuilder builder(*doc.root_);
  Tokenizer tokenizer(markup);
  Token tok;
  while (tokenizer.next(tok)) builder.feed(tok);
  return doc;
}

const Node& Document::html() const { return *root_->children().front(); }

const Node* Document::body() const {
  for (const auto& c : html().children()) {
    if (c->is_element("body")) return c.get();
  }
  return nullptr;
}

const Node* Document::head() const {
  for (const auto& c : html().children()) {
    if (c->is_element("head")) return c.get();
  }
  return nullptr;
}

std::string Document::language() const {
  const std::string* lang = html().attribute("lang");
  return lang ? *lang : std::string();
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size();) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t width = 0;
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      width = 1;
    } else if (c == 0xC2 && i + 1 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0xA0) {
      width = 2;
    } else if (c == 0xE2 && i + 2 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0x80) {
      unsigned char c2 = static_cast<unsigned char>(text[i + 2]);
      if ((c2 >= 0x80 && c2 <= 0x8A) || c2 == 0xAF) width = 3;
    }
    if (width) {
      pending_space = true;
      i += width;
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += text[i++];
  }
  return out;
}

std::string decode_entities(std::string_view text) {
  if (text.find('&') == std::string_view::npos) return std::string(text);
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += text[i++];
      continue;
    }
    std::string_view ref = text.substr(i + 1, semi - i - 1);
    if (!ref.empty() && ref[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
      std::string_view digits = ref.substr(hex ? 2 : 1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) {
        append_utf8(out, cp);
        i = semi + 1;
        continue;
      }
    } else if (auto it = kNamedEntities.find(ref); it != kNamedEntities.end()) {
      out += it->second;
      i = semi + 1;
      continue;
    }
    out += text[i++];
  }
  return out;
}

std::string element_path(const Node& element) {
  std::vector<std::string> steps;
  for (const Node* n = &element; n && n->is_element() && !n->is_element("html"); n = n->parent()) {
    if (n->is_element("body") || n->is_element("head")) {
      steps.push_back(n->name());
    } else {
      steps.push_back(n->name() + "[" + std::to_string(n->same_name_index()) + "]");
    }
  }
  std::string path;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    if (!path.empty()) path += '/';
    path += *it;
  }
  return path;
}

}  // namespace sheriff::extract
