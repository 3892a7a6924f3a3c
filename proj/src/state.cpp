#include "hftkin/state.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "hftkin/errors.hpp"

namespace hftkin {

void TickSeries::reserve(std::size_t n) {
  T.reserve(n);
  t.reserve(n);
  p.reserve(n);
  dp.reserve(n);
  tau.reserve(n);
  buyer.reserve(n);
  seller.reserve(n);
}

void TickSeries::push_back(const TickRow& r) {
  T.push_back(r.T);
  t.push_back(r.t);
  p.push_back(r.p);
  dp.push_back(r.dp);
  tau.push_back(r.tau);
  buyer.push_back(r.buyer);
  seller.push_back(r.seller);
}

TickRow TickSeries::row(std::size_t k) const {
  return {T[k], t[k], p[k], dp[k], tau[k], buyer[k], seller[k]};
}

void TickRecorder::merge(const Collector& other) {
  const auto& o = dynamic_cast<const TickRecorder&>(other);
  series.reserve(series.size() + o.series.size());
  for (std::size_t k = 0; k < o.series.size(); ++k) series.push_back(o.series.row(k));
}

void run_replicated(int replicas, int workers, const std::vector<Collector*>& prototypes,
                    const std::function<void(int, const std::vector<Collector*>&)>& body) {
  if (replicas < 1) throw ConfigError("run_replicated: replicas must be >= 1");
  workers = std::clamp(workers, 1, replicas);
  std::vector<std::vector<std::unique_ptr<Collector>>> per_replica(replicas);
  for (auto& slot : per_replica)
    for (auto* p : prototypes) slot.push_back(p->clone_empty());

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(replicas);
  auto work = [&] {
    for (int r = next++; r < replicas; r = next++) {
      try {
        std::vector<Collector*> sinks;
        for (auto& c : per_replica[r]) sinks.push_back(c.get());
        body(r, sinks);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (int r = 0; r < replicas; ++r)
    for (std::size_t k = 0; k < prototypes.size(); ++k) prototypes[k]->merge(*per_replica[r][k]);
}

}  // namespace hftkin
