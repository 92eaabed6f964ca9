#pragma once

#include "sheriff/core/observation.hpp"
#include "sheriff/extract/currency.hpp"
#include "sheriff/extract/selector.hpp"
#include "sheriff/net/fetch.hpp"
#include "sheriff/net/store.hpp"

#include <set>
#include <string>
#include <vector>

namespace sheriff::net {

struct WaveContext {
  std::string check_id;
  int repetition = 0;
  std::string persona;
  std::string product_uri;
  extract::PriceSelector selector;
};

struct ExtractionFailure {
  std::string vantage;
  // selector-miss, unparseable-price, unknown-currency, http-error, timeout
  std::string reason;
  std::string detail;
};

struct CollectResult {
  std::vector<PriceObservation> observations;
  std::vector<ExtractionFailure> failures;
};

// TaxIncludedUnknown unless the page text mentions tax, and
// ShippingIncludedUnknown unless it mentions shipping.
std::set<GateFlag> page_flags(std::string_view page_text);

// Snapshots every page, extracts each ok result and appends the
// observations. `earlier` holds observations of previous repetitions of the
// same check; a vantage whose price differs from an earlier one is flagged
// NoiseSuspect.
CollectResult collect_and_extract(const WaveContext& wave, const std::vector<FetchResult>& results,
                                  const extract::CurrencyTable& currencies, SnapshotStore& snapshots,
                                  ObservationStore& store, const std::vector<PriceObservation>& earlier = {});

// Re-runs extraction on a stored observation's snapshot.
Money reextract(const PriceObservation& obs, const extract::PriceSelector& selector,
                const extract::CurrencyTable& currencies, const SnapshotStore& snapshots);

}  // namespace sheriff::net
