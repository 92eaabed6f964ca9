#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sheriff::extract {

// Minimal DOM produced by a forgiving HTML parser. The tree always has the
// shape document -> html -> (head?, body?) regardless of what the markup
// spelled out, mirroring the implicit elements a browser inserts.
class Node {
 public:
  enum class Kind { Document, Element, Text, Comment };

  Node(Kind kind, std::string name_or_text);

  Kind kind() const { return kind_; }
  bool is_element() const { return kind_ == Kind::Element; }
  bool is_element(std::string_view tag) const { return kind_ == Kind::Element && name_ == tag; }

  // Lower-cased tag name for elements; empty otherwise.
  const std::string& name() const { return name_; }
  // Decoded character data for text and comment nodes.
  const std::string& text() const { return text_; }

  const std::vector<std::pair<std::string, std::string>>& attributes() const { return attributes_; }
  const std::string* attribute(std::string_view name) const;

  Node* parent() const { return parent_; }
  const std::vector<std::unique_ptr<Node>>& children() const { return children_; }

  Node* append(std::unique_ptr<Node> child);
  void append_text(std::string_view data);
  void set_attribute(std::string name, std::string value);

  // Concatenated descendant text (scripts and styles skipped), whitespace
  // collapsed and trimmed.
  std::string text_content() const;

  // 1-based position among element siblings sharing this tag name.
  int same_name_index() const;

 private:
  void collect_text(std::string& out) const;

  Kind kind_;
  std::string name_;
  std::string text_;
  std::vector<std::pair<std::string, std::string>> attributes_;
  Node* parent_ = nullptr;
  std::vector<std::unique_ptr<Node>> children_;
};

class Document {
 public:
  static Document parse(std::string_view markup);

  const Node& root() const { return *root_; }
  // The <html> element; always present.
  const Node& html() const;
  const Node* body() const;
  const Node* head() const;

  // Value of <html lang>, if any.
  std::string language() const;

 private:
  std::unique_ptr<Node> root_;
};

// Collapses runs of ASCII whitespace, NBSP and the Unicode thin/narrow
// spaces into one ASCII space and trims both ends.
std::string normalize_whitespace(std::string_view text);

// Replaces character references (&amp; &#8364; &#x20AC; ...) with UTF-8.
std::string decode_entities(std::string_view text);

// Element path from the html element, e.g. "body/div[2]/span[1]".
std::string element_path(const Node& element);

// Pre-order walk over all nodes.
template <typename Fn>
void for_each_node(const Node& node, Fn&& fn) {
  fn(node);
  for (const auto& child : node.children()) for_each_node(*child, fn);
}

}  // namespace sheriff::extract
