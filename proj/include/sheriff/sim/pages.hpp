#pragma once

#include "sheriff/core/money.hpp"
#include "sheriff/extract/selector.hpp"
#include "sheriff/sim/policy.hpp"

#include <string>
#include <vector>

namespace sheriff::sim {

inline constexpr int kTemplateCount = 3;

// Retail-style display string: "$1,234.56", "1.234,56 €", "CHF 1'234.56",
// "$12.00 CAD", ...
std::string format_display_price(const Money& m);

struct Recommendation {
  std::string product_id;
  std::string name;
  Money price;
};

// Product page. The main price always sits at template_selector(template)
// while recommended-product prices appear earlier in document order.
std::string render_product_page(const PricingPolicy& policy, const CatalogItem& item, const Money& price,
                                const std::vector<Recommendation>& recommendations);

extract::PriceSelector template_selector(int template_id);

// Paginated catalog listing with links to /product/<id>.
std::string render_listing_page(const PricingPolicy& policy, int page);
int listing_page_count(const PricingPolicy& policy);

}  // namespace sheriff::sim
