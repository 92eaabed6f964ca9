#include "sheriff/sim/pages.hpp"

#include <algorithm>

namespace sheriff::sim {

namespace {

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string grouped(const Decimal& amount, std::string_view group, std::string_view decimal_mark) {
  std::string plain = amount.to_string(2);
  std::size_t dot = plain.find('.');
  std::string whole = plain.substr(0, dot);
  std::string out;
  int lead = static_cast<int>(whole.size() % 3);
  if (lead == 0) lead = 3;
  out += whole.substr(0, static_cast<std::size_t>(lead));
  for (std::size_t i = static_cast<std::size_t>(lead); i < whole.size(); i += 3) {
    out += group;
    out += whole.substr(i, 3);
  }
  out += decimal_mark;
  out += plain.substr(dot + 1);
  return out;
}

Money list_price(const Money& price) {
  Rational was = round_to(price.amount.to_rational() * Rational(6, 5), 2);
  return Money{Decimal::from_rational(was), price.currency};
}

void append_head(std::string& out, const PricingPolicy& policy, const std::string& title) {
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>";
  out += html_escape(title);
  out += "</title>\n";
  for (const auto& host : policy.third_parties) {
    out += "<script async src=\"https://" + html_escape(host) + "/tag.js\"></script>\n";
  }
  out += "<link rel=\"stylesheet\" href=\"/static/site.css\">\n</head>\n";
}

void append_footer(std::string& out, const Money& price) {
  out += "<div class=\"footer\"><p>All prices in " + price.currency +
         ". Shipping calculated at checkout.</p></div>\n</body>\n</html>\n";
}

std::string product_href(const std::string& id) { return "/product/" + id; }

std::string render_template0(const PricingPolicy& policy, const CatalogItem& item, const Money& price,
                             const std::vector<Recommendation>& recs) {
  std::string out;
  append_head(out, policy, item.name + " | " + policy.domain);
  out += "<body>\n<div class=\"header\"><a href=\"/catalog\">" + html_escape(policy.domain) +
         "</a> <span class=\"cart\">Cart (0)</span></div>\n";
  out += "<div class=\"recommended\"><h3>Customers also viewed</h3>\n<ul>\n";
  for (const auto& r : recs) {
    out += "<li><a href=\"" + product_href(r.product_id) + "\">" + html_escape(r.name) +
           "</a> <span class=\"price\">" + html_escape(format_display_price(r.price)) + "</span>\n";
  }
  out += "</ul>\n</div>\n";
  out += "<div class=\"product\">\n<h1>" + html_escape(item.name) + "</h1>\n<p class=\"sku\">SKU " +
         html_escape(item.id) + "</p>\n<span class=\"label\">Price</span>\n<span class=\"price\">" +
         html_escape(format_display_price(price)) + "</span>\n<button>Add to cart</button>\n</div>\n";
  append_footer(out, price);
  return out;
}

std::string render_template1(const PricingPolicy& policy, const CatalogItem& item, const Money& price,
                             const std::vector<Recommendation>& recs) {
  std::string out;
  append_head(out, policy, policy.domain + " - " + item.name);
  out += "<body>\n<table class=\"layout\">\n<tr>\n<td class=\"sidebar\">\n";
  if (!recs.empty()) {
    out += "<div class=\"deal\"><b>Deal of the day</b><br><a href=\"" + product_href(recs.front().product_id) +
           "\">" + html_escape(recs.front().name) + "</a> " + html_escape(format_display_price(recs.front().price)) +
           "</div>\n";
  }
  for (std::size_t i = 1; i < recs.size(); ++i) {
    out += "<p><a href=\"" + product_href(recs[i].product_id) + "\">" + html_escape(recs[i].name) + "</a><br>" +
           html_escape(format_display_price(recs[i].price)) + "\n";
  }
  out += "</td>\n<td class=\"main\">\n<h1>" + html_escape(item.name) + "</h1>\n<div class=\"buy\">List price <del>" +
         html_escape(format_display_price(list_price(price))) + "</del> Now <strong>" +
         html_escape(format_display_price(price)) + "</strong></div>\n</td>\n</tr>\n</table>\n";
  append_footer(out, price);
  return out;
}

std::string render_template2(const PricingPolicy& policy, const CatalogItem& item, const Money& price,
                             const std::vector<Recommendation>& recs) {
  std::string out;
  append_head(out, policy, item.name);
  out += "<body>\n<div id=\"page\">\n<div class=\"promo\">Free delivery on orders over " +
         html_escape(format_display_price(list_price(price))) + "</div>\n";
  out += "<div class=\"carousel\">\n";
  for (const auto& r : recs) {
    out += "<div class=\"tile\"><a href=\"" + product_href(r.product_id) + "\">" + html_escape(r.name) +
           "</a><span>" + html_escape(format_display_price(r.price)) + "</span></div>\n";
  }
  out += "</div>\n<div class=\"detail\">\n<h2>" + html_escape(item.name) +
         "</h2>\n<p>In stock</p>\n<div class=\"offer\"><span>Our price:</span> <em>" +
         html_escape(format_display_price(price)) + "</em></div>\n</div>\n</div>\n";
  append_footer(out, price);
  return out;
}

}  // namespace

std::string format_display_price(const Money& m) {
  const std::string& c = m.currency;
  if (c == "USD") return "$" + grouped(m.amount, ",", ".");
  if (c == "CAD") return "$" + grouped(m.amount, ",", ".") + " CAD";
  if (c == "AUD") return "A$" + grouped(m.amount, ",", ".");
  if (c == "GBP") return "£" + grouped(m.amount, ",", ".");
  if (c == "EUR") return grouped(m.amount, ".", ",") + " €";
  if (c == "BRL") return "R$ " + grouped(m.amount, ".", ",");
  if (c == "CHF") return "CHF " + grouped(m.amount, "'", ".");
  if (c == "SEK" || c == "NOK" || c == "DKK") return grouped(m.amount, " ", ",") + " kr";
  return c + " " + grouped(m.amount, ",", ".");
}

std::string render_product_page(const PricingPolicy& policy, const CatalogItem& item, const Money& price,
                                const std::vector<Recommendation>& recommendations) {
  switch (policy.template_id % kTemplateCount) {
    case 0:
      return render_template0(policy, item, price, recommendations);
    case 1:
      return render_template1(policy, item, price, recommendations);
    default:
      return render_template2(policy, item, price, recommendations);
  }
}

extract::PriceSelector template_selector(int template_id) {
  switch (template_id % kTemplateCount) {
    case 0:
      return extract::PriceSelector::dom_path("body/div[3]/span[2]");
    case 1:
      return extract::PriceSelector::dom_path("body/table[1]/tr[1]/td[2]/div[1]/strong[1]");
    default:
      return extract::PriceSelector::text_anchor("Our price:", 1);
  }
}

int listing_page_count(const PricingPolicy& policy) {
  auto n = static_cast<int>(policy.catalog.size());
  return std::max(1, (n + policy.listing_page_size - 1) / policy.listing_page_size);
}

std::string render_listing_page(const PricingPolicy& policy, int page) {
  int pages = listing_page_count(policy);
  std::string out = "<!DOCTYPE html>\n<html lang=\"en\">\n<head><title>Catalog page " + std::to_string(page) +
                    "</title></head>\n<body>\n<h1>" + html_escape(policy.domain) + " catalog</h1>\n<ul class=\"items\">\n";
  if (page >= 1 && page <= pages) {
    auto begin = static_cast<std::size_t>((page - 1) * policy.listing_page_size);
    auto end = std::min(policy.catalog.size(), begin + static_cast<std::size_t>(policy.listing_page_size));
    for (std::size_t i = begin; i < end; ++i) {
      const auto& item = policy.catalog[i];
      out += "<li><a href=\"" + product_href(item.id) + "\">" + html_escape(item.name) + "</a></li>\n";
    }
  }
  out += "</ul>\n<div class=\"pager\">";
  for (int p = 1; p <= pages; ++p) {
    out += " <a href=\"/catalog?page=" + std::to_string(p) + "\">" + std::to_string(p) + "</a>";
  }
  out += "</div>\n<p><a href=\"/help\">Help</a> <a href=\"https://social.example.net/share\">Share</a></p>\n</body>\n</html>\n";
  return out;
}

}  // namespace sheriff::sim
