#include "sheriff/net/pipeline.hpp"

#include "sheriff/core/uri.hpp"
#include "sheriff/extract/html.hpp"
#include "sheriff/extract/price_parser.hpp"

#include <regex>

namespace sheriff::net {

namespace {

const std::regex& tax_pattern() {
  static const std::regex re(R"(\b(tax|taxes|vat|mwst|iva|tva|moms)\b)", std::regex::icase);
  return re;
}

const std::regex& shipping_pattern() {
  static const std::regex re(R"(\b(shipping|delivery|postage|frete|versand)\b)", std::regex::icase);
  return re;
}

}  // namespace

std::set<GateFlag> page_flags(std::string_view page_text) {
  std::set<GateFlag> flags;
  std::string text(page_text);
  if (!std::regex_search(text, tax_pattern())) flags.insert(GateFlag::TaxIncludedUnknown);
  if (!std::regex_search(text, shipping_pattern())) flags.insert(GateFlag::ShippingIncludedUnknown);
  return flags;
}

CollectResult collect_and_extract(const WaveContext& wave, const std::vector<FetchResult>& results,
                                  const extract::CurrencyTable& currencies, SnapshotStore& snapshots,
                                  ObservationStore& store, const std::vector<PriceObservation>& earlier) {
  CollectResult out;
  std::string host = parse_uri(wave.product_uri).host;
  for (const auto& r : results) {
    if (r.status != FetchStatus::Ok || !r.page) {
      out.failures.push_back({r.vantage, to_string(r.status), r.error});
      continue;
    }
    std::string ref = snapshots.put(*r.page);
    auto doc = extract::Document::parse(*r.page);
    PriceObservation obs;
    try {
      obs.money = extract::extract_price(doc, wave.selector, currencies, host);
    } catch (const extract::SelectorMiss& e) {
      out.failures.push_back({r.vantage, "selector-miss", e.what()});
      continue;
    } catch (const extract::UnknownCurrency& e) {
      out.failures.push_back({r.vantage, "unknown-currency", e.what()});
      continue;
    } catch (const Error& e) {
      out.failures.push_back({r.vantage, "unparseable-price", e.what()});
      continue;
    }
    obs.check_id = wave.check_id;
    obs.repetition = wave.repetition;
    obs.vantage = r.vantage;
    obs.persona = wave.persona;
    obs.product_uri = wave.product_uri;
    obs.domain = host;
    obs.fetched_at = r.started_at;
    obs.fetch_latency = r.latency;
    obs.snapshot_ref = ref;
    const auto* body = doc.body();
    obs.gate_flags = page_flags(body ? body->text_content() : std::string());
    for (const auto& prior : earlier) {
      if (prior.vantage == r.vantage && prior.persona == wave.persona && prior.repetition < wave.repetition &&
          !(prior.money == obs.money)) {
        obs.gate_flags.insert(GateFlag::NoiseSuspect);
      }
    }
    store.append(obs);
    out.observations.push_back(std::move(obs));
  }
  return out;
}

Money reextract(const PriceObservation& obs, const extract::PriceSelector& selector,
                const extract::CurrencyTable& currencies, const SnapshotStore& snapshots) {
  auto page = snapshots.get(obs.snapshot_ref);
  if (!page) throw StoreError("snapshot " + obs.snapshot_ref + " is missing");
  return extract::extract_price(*page, selector, currencies, parse_uri(obs.product_uri).host);
}

}  // namespace sheriff::net
