#include "mg2v/pair_table.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <queue>

namespace mg2v {

uint32_t PairFrequencyTable::count(NodeId center, NodeId context) const {
  uint64_t k = key(center, context);
  auto it = std::lower_bound(keys.begin(), keys.end(), k);
  if (it == keys.end() || *it != k) return 0;
  return counts[it - keys.begin()];
}

std::vector<uint64_t> PairFrequencyTable::context_count_by_type(const std::vector<TypeId>& types,
                                                                size_t num_types) const {
  std::vector<uint64_t> out(num_types, 0);
  for (size_t v = 0; v < context_count.size(); ++v) {
    if (context_count[v]) out.at(types.at(v)) += context_count[v];
  }
  return out;
}

namespace {

struct Run {
  std::vector<uint64_t> keys;
  std::vector<uint32_t> counts;
};

Run aggregate_chunk(std::vector<uint64_t>& buf) {
  std::sort(buf.begin(), buf.end());
  Run run;
  run.keys.reserve(buf.size() / 4 + 1);
  run.counts.reserve(buf.size() / 4 + 1);
  for (size_t i = 0; i < buf.size();) {
    size_t j = i;
    while (j < buf.size() && buf[j] == buf[i]) ++j;
    run.keys.push_back(buf[i]);
    run.counts.push_back(static_cast<uint32_t>(j - i));
    i = j;
  }
  buf.clear();
  return run;
}

void merge_runs(std::vector<Run>& runs, PairFrequencyTable& table) {
  if (runs.size() == 1) {
    table.keys = std::move(runs[0].keys);
    table.counts = std::move(runs[0].counts);
    return;
  }
  using HeapItem = std::pair<uint64_t, size_t>;  // (key, run index)
  std::vector<size_t> pos(runs.size(), 0);
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;
  for (size_t r = 0; r < runs.size(); ++r) {
    if (!runs[r].keys.empty()) heap.emplace(runs[r].keys[0], r);
  }
  while (!heap.empty()) {
    auto [k, r] = heap.top();
    heap.pop();
    uint32_t c = runs[r].counts[pos[r]];
    if (!table.keys.empty() && table.keys.back() == k) {
      table.counts.back() += c;
    } else {
      table.keys.push_back(k);
      table.counts.push_back(c);
    }
    if (++pos[r] < runs[r].keys.size()) heap.emplace(runs[r].keys[pos[r]], r);
  }
}

}  // namespace

PairFrequencyTable count_pairs(const WalkCorpus& corpus, int window, NodeId num_nodes,
                               size_t chunk_hint) {
  if (window < 1) throw Error("window size must be >= 1");
  PairFrequencyTable table;
  table.window = window;
  table.num_nodes = num_nodes;
  table.context_count.assign(static_cast<size_t>(num_nodes), 0);

  const size_t chunk = std::max<size_t>(chunk_hint, 16);
  std::vector<uint64_t> buf;
  buf.reserve(std::min(chunk, size_t(1) << 20));
  std::vector<Run> runs;

  for (const auto& walk : corpus.walks) {
    const int n = static_cast<int>(walk.size());
    for (NodeId v : walk) {
      if (v < 0 || v >= num_nodes) {
        throw Error("corpus node id " + std::to_string(v) + " outside [0, " +
                    std::to_string(num_nodes) + ")");
      }
    }
    for (int i = 0; i < n; ++i) {
      int lo = std::max(0, i - window);
      int hi = std::min(n - 1, i + window);
      for (int j = lo; j <= hi; ++j) {
        if (j == i) continue;
        buf.push_back(PairFrequencyTable::key(walk[i], walk[j]));
        table.context_count[walk[j]] += 1;
        if (buf.size() >= chunk) runs.push_back(aggregate_chunk(buf));
      }
    }
  }
  if (!buf.empty()) runs.push_back(aggregate_chunk(buf));

  if (!runs.empty()) merge_runs(runs, table);
  table.total = 0;
  for (uint32_t c : table.counts) table.total += c;
  return table;
}

namespace {
constexpr char kPairMagic[8] = {'M', 'G', '2', 'V', 'P', 'R', 'S', '1'};
}

void save_pair_table(const PairFrequencyTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write pair table: " + path);
  out.write(kPairMagic, sizeof(kPairMagic));
  uint32_t window = static_cast<uint32_t>(table.window);
  uint32_t nodes = static_cast<uint32_t>(table.num_nodes);
  uint64_t entries = table.size();
  out.write(reinterpret_cast<const char*>(&window), sizeof(window));
  out.write(reinterpret_cast<const char*>(&nodes), sizeof(nodes));
  out.write(reinterpret_cast<const char*>(&entries), sizeof(entries));
  for (size_t i = 0; i < entries; ++i) {
    uint32_t center = static_cast<uint32_t>(table.keys[i] >> 32);
    uint32_t context = static_cast<uint32_t>(table.keys[i]);
    out.write(reinterpret_cast<const char*>(&center), sizeof(center));
    out.write(reinterpret_cast<const char*>(&context), sizeof(context));
    out.write(reinterpret_cast<const char*>(&table.counts[i]), sizeof(uint32_t));
  }
  if (!out) throw Error("short write to pair table: " + path);
}

PairFrequencyTable load_pair_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open pair table: " + path);
  char magic[sizeof(kPairMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kPairMagic, sizeof(magic)) != 0) {
    throw Error("not a pair table cache (bad magic): " + path);
  }
  uint32_t window = 0, nodes = 0;
  uint64_t entries = 0;
  in.read(reinterpret_cast<char*>(&window), sizeof(window));
  in.read(reinterpret_cast<char*>(&nodes), sizeof(nodes));
  in.read(reinterpret_cast<char*>(&entries), sizeof(entries));
  if (!in) throw Error("truncated pair table header: " + path);
  PairFrequencyTable table;
  table.window = static_cast<int>(window);
  table.num_nodes = static_cast<NodeId>(nodes);
  table.keys.resize(entries);
  table.counts.resize(entries);
  table.context_count.assign(nodes, 0);
  for (size_t i = 0; i < entries; ++i) {
    uint32_t center = 0, context = 0, count = 0;
    in.read(reinterpret_cast<char*>(&center), sizeof(center));
    in.read(reinterpret_cast<char*>(&context), sizeof(context));
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in) throw Error("truncated pair table body: " + path);
    if (count == 0) throw Error("pair table has zero count entry: " + path);
    table.keys[i] = (static_cast<uint64_t>(center) << 32) | context;
    if (i > 0 && table.keys[i] <= table.keys[i - 1]) {
      throw Error("pair table keys not strictly ascending: " + path);
    }
    if (context >= nodes || center >= nodes) throw Error("pair table node out of range: " + path);
    table.counts[i] = count;
    table.context_count[context] += count;
    table.total += count;
  }
  return table;
}

}  // namespace mg2v
