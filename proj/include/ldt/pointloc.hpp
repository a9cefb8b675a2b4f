#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "instance.hpp"
#include "prism.hpp"
#include "transform.hpp"

namespace ldt {

// ---------------------------------------------------------------------------
// Point location in an explicit arrangement by a tree of cuttings. Each tree node holds
// a random sample R of its hyperplanes and a secondary structure over the vertical
// decomposition of R; each prism of that decomposition stores the signs of the node's
// hyperplanes that miss it and a child node for those that cross it.

using PositionVector = std::vector<Sign>;

class CapError : public Error {
 public:
  using Error::Error;
};

struct PLConfig {
  std::optional<Rat> epsilon;     // default 1/d (1/2 when d = 1)
  Rat sample_const{1};
  std::optional<std::size_t> r;   // overrides the sample size formula
  std::size_t max_d = 4;
  std::size_t max_n = 64;
  std::size_t max_r = 24;
  bool eager = false;
  std::uint64_t seed = 0;
};

struct PLStats {
  std::size_t nodes = 0;            // tree nodes, leaves included
  std::size_t leaves = 0;           // tree nodes answered by direct evaluation
  std::size_t secondary = 0;        // secondary nodes (one per level of an undecomposed prism)
  std::size_t pairs = 0;            // (ceiling, floor) entries
  std::size_t trie_leaves = 0;      // stored sign vectors
  std::size_t prisms = 0;           // prism records
  std::size_t root_prisms = 0;      // prism records of the root's decomposition
  std::size_t flagged = 0;          // nodes whose conflict list exceeds eps times their set
  std::size_t late = 0;             // records created by a query after an eager build
  std::size_t transform_draws = 0;
};

struct Arrangement {
  std::size_t d = 0;
  std::vector<AffineForm> forms;    // coefficients of x_1..x_d plus constant
};

inline PositionVector brute_position_vector(const Arrangement& arr, std::span<const Rat> q) {
  PositionVector pv;
  for (const auto& f : arr.forms) pv.push_back(sign_of_value(f.evaluate(q)));
  return pv;
}

inline std::string to_string(const PositionVector& pv) {
  std::string s;
  for (Sign x : pv) s += to_char(x);
  return s;
}

namespace detail {

// Radix tree over strings of sign characters; runs of single children share one edge.
template <class T>
class SignTrie {
 public:
  T* find(std::string_view key) {
    Node* n = &root_;
    while (true) {
      if (key.empty()) return n->value.get();
      auto it = n->kids.find(key[0]);
      if (it == n->kids.end()) return nullptr;
      Node* c = it->second.get();
      if (key.substr(0, c->label.size()) != c->label) return nullptr;
      key.remove_prefix(c->label.size());
      n = c;
    }
  }

  T& insert(std::string_view key) {
    Node* n = &root_;
    while (!key.empty()) {
      auto it = n->kids.find(key[0]);
      if (it == n->kids.end()) {
        auto leaf = std::make_unique<Node>();
        leaf->label = std::string(key);
        Node* raw = leaf.get();
        n->kids.emplace(key[0], std::move(leaf));
        ++edges_;
        n = raw;
        key = {};
        break;
      }
      Node* c = it->second.get();
      std::size_t common = 0;
      while (common < c->label.size() && common < key.size() && c->label[common] == key[common]) ++common;
      if (common < c->label.size()) {
        auto mid = std::make_unique<Node>();
        mid->label = c->label.substr(0, common);
        c->label.erase(0, common);
        mid->kids.emplace(c->label[0], std::move(it->second));
        it->second = std::move(mid);
        ++edges_;
        c = it->second.get();
      }
      key.remove_prefix(common);
      n = c;
    }
    if (!n->value) {
      n->value = std::make_unique<T>();
      ++values_;
    }
    return *n->value;
  }

  std::size_t size() const { return values_; }
  std::size_t edges() const { return edges_; }

 private:
  struct Node {
    std::string label;
    std::map<char, std::unique_ptr<Node>> kids;
    std::unique_ptr<T> value;
  };
  Node root_;
  std::size_t values_ = 0;
  std::size_t edges_ = 0;
};

}  // namespace detail

class PointLocator {
 public:
  PointLocator(Arrangement arr, PLConfig cfg = {}) : arr_(std::move(arr)), cfg_(std::move(cfg)) {
    const std::size_t d = arr_.d, n = arr_.forms.size();
    if (d < 1 || d > cfg_.max_d) throw CapError("pointloc: dimension " + std::to_string(d) + " outside 1.." + std::to_string(cfg_.max_d));
    if (n > cfg_.max_n) throw CapError("pointloc: " + std::to_string(n) + " hyperplanes exceed the cap " + std::to_string(cfg_.max_n));
    for (const auto& f : arr_.forms) {
      if (f.dim() != d) throw DimensionError("pointloc: hyperplane dimension differs from d");
      if (f.is_constant()) throw Error("pointloc: hyperplane " + f.to_string() + " has no variable");
    }
    eps_ = cfg_.epsilon ? *cfg_.epsilon : (d == 1 ? Rat(1, 2) : Rat(1, static_cast<long>(d)));
    if (eps_ <= 0 || eps_ >= 1) throw Error("pointloc: epsilon must lie in (0, 1)");
    if (cfg_.r) {
      r_ = *cfg_.r;
    } else {
      const double ratio = static_cast<double>(d) / eps_.get_d();
      r_ = static_cast<std::size_t>(std::ceil(cfg_.sample_const.get_d() * ratio * std::log(ratio)));
      r_ = std::min(r_, cfg_.max_r);
    }
    if (r_ > cfg_.max_r) throw CapError("pointloc: sample size " + std::to_string(r_) + " exceeds the cap " + std::to_string(cfg_.max_r));
    r_ = std::max<std::size_t>(r_, 1);
    rebuild();
  }

  std::size_t sample_size() const { return r_; }
  const Rat& epsilon() const { return eps_; }
  const PLStats& stats() const { return stats_; }
  const Arrangement& arrangement() const { return arr_; }
  const TransformMatrix& transform() const { return t_; }

  // Signs of q against every hyperplane; `cost` receives the number of sign evaluations
  // and height comparisons spent.
  PositionVector query(std::span<const Rat> q, std::size_t* cost = nullptr) {
    if (q.size() != arr_.d) throw DimensionError("pointloc: query dimension differs from d");
    for (;;) {
      try {
        return locate(q, cost);
      } catch (const GenericityError&) {
        next_transform();
      } catch (const DegenerateSampleError&) {
        next_transform();
      }
    }
  }

  std::size_t query_cost(std::span<const Rat> q) {
    std::size_t c = 0;
    query(q, &c);
    return c;
  }

  // The stored prisms a query for q passes through, in working coordinates.
  std::vector<const Prism*> route(std::span<const Rat> q) {
    std::vector<const Prism*> out;
    route_ = &out;
    try {
      query(q);
    } catch (...) {
      route_ = nullptr;
      throw;
    }
    route_ = nullptr;
    return out;
  }

 private:
  struct Node;

  struct Record {
    Prism prism;
    std::vector<std::size_t> crossing;
    std::vector<std::pair<std::size_t, Sign>> fixed;  // miss the closed prism
    std::vector<std::size_t> touching;                // meet only its boundary
    std::unique_ptr<Node> child;
  };

  struct Secondary;

  struct Leaf {
    std::vector<AffineForm> walls;
    std::unique_ptr<Secondary> next;
    std::unique_ptr<Record> record;
  };

  struct Secondary {
    std::size_t dim = 0;
    std::vector<AffineForm> forms;
    std::map<std::pair<long, long>, detail::SignTrie<Leaf>> pairs;
  };

  struct Node {
    std::vector<std::size_t> set;
    std::vector<std::size_t> sample;
    bool leaf = false;
    std::unique_ptr<Secondary> root;
  };

  struct Step {
    std::size_t dim;
    std::vector<AffineForm> forms;
    LevelSplit split;
  };

  void next_transform() {
    ++draw_;
    if (draw_ > 64) throw Error("pointloc: no generic transform found");
    rebuild();
  }

  void rebuild() {
    const std::size_t d = arr_.d;
    for (;; ++draw_) {
      if (draw_ > 64) throw Error("pointloc: no generic transform found");
      t_ = d == 1 ? TransformMatrix::identity(1) : random_generic_transform(d, derive_seed(cfg_.seed, 7000 + draw_));
      working_.clear();
      bool ok = true;
      for (const auto& f : arr_.forms) {
        working_.push_back(transform_form(f, t_).primitive());
        ok = ok && working_.back().last() != 0;
      }
      if (ok) break;
    }
    stats_ = {};
    stats_.transform_draws = draw_ + 1;
    std::vector<std::size_t> all(working_.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    root_ = make_node(std::move(all));
    if (cfg_.eager) {
      try {
        expand(*root_, {});
      } catch (const GenericityError&) {
        next_transform();
      } catch (const DegenerateSampleError&) {
        next_transform();
      }
    }
  }

  std::unique_ptr<Node> make_node(std::vector<std::size_t> set) {
    auto node = std::make_unique<Node>();
    ++stats_.nodes;
    node->set = std::move(set);
    if (node->set.size() < r_) {
      node->leaf = true;
      ++stats_.leaves;
      return node;
    }
    // The sample depends only on the node's set, so lazy and eager trees agree.
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i : node->set) h = (h ^ i) * 1099511628211ULL;
    Rng rng(derive_seed(cfg_.seed, h));
    std::vector<std::size_t> pool = node->set;
    rng.partial_shuffle(pool, r_);
    node->sample.assign(pool.begin(), pool.begin() + static_cast<long>(r_));
    std::sort(node->sample.begin(), node->sample.end());
    node->root = make_secondary(arr_.d, sample_forms(*node));
    return node;
  }

  std::vector<AffineForm> sample_forms(const Node& node) const {
    std::vector<AffineForm> fs;
    for (std::size_t i : node.sample) fs.push_back(working_[i]);
    return fs;
  }

  std::unique_ptr<Secondary> make_secondary(std::size_t dim, std::vector<AffineForm> forms) {
    for (const auto& f : forms) require_non_vertical(f);
    auto s = std::make_unique<Secondary>();
    ++stats_.secondary;
    s->dim = dim;
    s->forms = std::move(forms);
    return s;
  }

  static std::string key_of(const LevelSplit& split) {
    std::string k;
    for (Sign s : split.effective) k += to_char(s);
    return k;
  }

  static std::pair<long, long> pair_of(const LevelSplit& split) {
    return {split.ceiling ? static_cast<long>(*split.ceiling) : -1L, split.floor ? static_cast<long>(*split.floor) : -1L};
  }

  Leaf& leaf_for(Secondary& sec, const LevelSplit& split, bool& created) {
    auto [it, fresh_pair] = sec.pairs.try_emplace(pair_of(split));
    if (fresh_pair) ++stats_.pairs;
    const std::string key = key_of(split);
    if (Leaf* l = it->second.find(key)) {
      created = false;
      return *l;
    }
    created = true;
    Leaf& l = it->second.insert(key);
    ++stats_.trie_leaves;
    if (sec.dim > 1) {
      auto cands = wall_candidates(sec.forms, split);
      const std::size_t extremes = (split.ceiling ? 1 : 0) + (split.floor ? 1 : 0);
      for (std::size_t i : prune_walls(cands, sec.dim - 1, sec.forms.size(), extremes, nullptr))
        l.walls.push_back(cands[i].form);
      if (!l.walls.empty()) l.next = make_secondary(sec.dim - 1, l.walls);
    }
    return l;
  }

  Prism assemble(const std::vector<Step>& path) const {
    Prism p;
    p.n = arr_.d;
    for (const auto& st : path) {
      PrismLevel lv;
      lv.dim = st.dim;
      lv.form_count = st.forms.size();
      if (st.split.ceiling) {
        lv.ceiling = st.forms[*st.split.ceiling];
        lv.ceiling_sign = st.split.effective[*st.split.ceiling];
        p.constraints.push_back(lift(*lv.ceiling * Rat(to_int(lv.ceiling_sign)), p.n).primitive());
      }
      if (st.split.floor) {
        lv.floor = st.forms[*st.split.floor];
        lv.floor_sign = st.split.effective[*st.split.floor];
        p.constraints.push_back(lift(*lv.floor * Rat(to_int(lv.floor_sign)), p.n).primitive());
      }
      if (std::count(st.split.raw.begin(), st.split.raw.end(), Sign::zero) || st.split.ties) p.degenerate = true;
      p.levels.push_back(std::move(lv));
    }
    p.index_bounds();
    return p;
  }

  std::unique_ptr<Record> make_record(const Node& node, const std::vector<Step>& path) {
    auto rec = std::make_unique<Record>();
    ++stats_.prisms;
    if (&node == root_.get()) ++stats_.root_prisms;
    rec->prism = assemble(path);
    const Prism& p = rec->prism;
    for (std::size_t i : node.set) {
      if (std::binary_search(node.sample.begin(), node.sample.end(), i)) continue;
      const AffineForm& f = working_[i];
      if (p.crosses(f)) {
        rec->crossing.push_back(i);
      } else if (p.meets(f)) {
        rec->touching.push_back(i);
      } else {
        auto hi = p.sup(f);
        rec->fixed.emplace_back(i, hi && *hi < 0 ? Sign::negative : Sign::positive);
      }
    }
    if (!rec->crossing.empty()) {
      if (Rat(static_cast<long>(rec->crossing.size())) > eps_ * Rat(static_cast<long>(node.set.size()))) ++stats_.flagged;
      rec->child = make_node(rec->crossing);
    }
    return rec;
  }

  // Builds every prism of the node's decomposition that meets `region` (dimension d).
  void expand(Node& node, const std::vector<LinConstraint>& region) {
    if (node.leaf) return;
    std::vector<Step> path;
    expand_level(node, *node.root, region, path, true);
  }

  void expand_level(Node& node, Secondary& sec, const std::vector<LinConstraint>& region, std::vector<Step>& path,
                    bool top) {
    const std::size_t m = sec.dim, k = sec.forms.size();
    std::vector<std::vector<Sign>> cells;
    if (top) {
      std::vector<Sign> signs;
      std::vector<LinConstraint> cs = region;
      auto dfs = [&](auto&& self, std::size_t i) -> void {
        if (i == k) {
          cells.push_back(signs);
          return;
        }
        for (Sign s : {Sign::negative, Sign::positive}) {
          cs.push_back(sec.forms[i] * Rat(to_int(s)));
          if (interior_point(cs, m)) {
            signs.push_back(s);
            self(self, i + 1);
            signs.pop_back();
          }
          cs.pop_back();
        }
      };
      dfs(dfs, 0);
    } else {
      cells.emplace_back(k, Sign::positive);  // the walls bound the projected prism
    }
    for (const auto& cell : cells) {
      std::vector<std::size_t> above, below;
      for (std::size_t i = 0; i < k; ++i) (lies_above(sec.forms[i], cell[i]) ? above : below).push_back(i);
      std::vector<std::optional<std::size_t>> ceilings, floors;
      if (above.empty()) ceilings.push_back(std::nullopt);
      for (std::size_t i : above) ceilings.push_back(i);
      if (below.empty()) floors.push_back(std::nullopt);
      for (std::size_t i : below) floors.push_back(i);
      for (const auto& c : ceilings)
        for (const auto& f : floors) {
          std::vector<LinConstraint> cs = top ? region : std::vector<LinConstraint>{};
          for (std::size_t i = 0; i < k; ++i) cs.push_back(sec.forms[i] * Rat(to_int(cell[i])));
          bool feasible = true;
          // `best` stays closer than every other form on its side; identical heights
          // follow the tie rule of choose_extremes.
          auto closer = [&](std::size_t best, std::size_t other, bool up) {
            AffineForm gap = height_form(sec.forms[other]) - height_form(sec.forms[best]);
            if (gap.is_zero()) {
              const AffineForm a = sec.forms[best].canonical(), b = sec.forms[other].canonical();
              feasible = feasible && (a < b || (a == b && best < other));
              return;
            }
            cs.push_back(lift(up ? gap : -gap, m));
          };
          if (c)
            for (std::size_t i : above)
              if (i != *c) closer(*c, i, true);
          if (f)
            for (std::size_t i : below)
              if (i != *f) closer(*f, i, false);
          if (!feasible || !interior_point(cs, m)) continue;
          LevelSplit split;
          split.raw = cell;
          split.effective = cell;
          split.ceiling = c;
          split.floor = f;
          bool created;
          Leaf& leaf = leaf_for(sec, split, created);
          path.push_back({m, sec.forms, split});
          if (leaf.next) {
            expand_level(node, *leaf.next, region, path, false);
          } else if (!leaf.record) {
            Prism p = assemble(path);
            std::vector<LinConstraint> both = region;
            both.insert(both.end(), p.constraints.begin(), p.constraints.end());
            if (interior_point(both, arr_.d)) {
              leaf.record = make_record(node, path);
              if (leaf.record->child) expand(*leaf.record->child, both);
            }
          }
          path.pop_back();
        }
    }
  }

  PositionVector locate(std::span<const Rat> q, std::size_t* cost) {
    const std::vector<Rat> y = t_.apply(q);
    PositionVector pv(working_.size(), Sign::zero);
    std::size_t spent = 0;
    auto eval = [&](const AffineForm& f) {
      ++spent;
      Rat v = f.constant();
      for (std::size_t i = 0; i < f.dim(); ++i) v += f.coeff(i) * y[i];
      return sign_of_value(v);
    };
    Node* node = root_.get();
    while (node) {
      if (node->leaf) {
        for (std::size_t i : node->set) pv[i] = eval(working_[i]);
        break;
      }
      std::vector<Step> path;
      Secondary* sec = node->root.get();
      Leaf* leaf = nullptr;
      while (sec) {
        LevelSplit split;
        for (std::size_t i = 0; i < sec->forms.size(); ++i) {
          Sign s = eval(sec->forms[i]);
          if (sec->dim == arr_.d) pv[node->sample[i]] = s;
          split.raw.push_back(s);
          split.effective.push_back(resolve_zero(s, sec->forms[i]));
        }
        choose_extremes(std::span<const AffineForm>(sec->forms), split,
                        [&](const AffineForm& a, const AffineForm& b) { return eval(a - b); });
        bool created;
        leaf = &leaf_for(*sec, split, created);
        path.push_back({sec->dim, sec->forms, std::move(split)});
        sec = leaf->next.get();
      }
      if (!leaf->record) {
        if (cfg_.eager) ++stats_.late;
        leaf->record = make_record(*node, path);
      }
      Record& rec = *leaf->record;
      if (route_) route_->push_back(&rec.prism);
      for (const auto& [i, s] : rec.fixed) pv[i] = s;
      for (std::size_t i : rec.touching) pv[i] = eval(working_[i]);
      node = rec.child.get();
    }
    if (cost) *cost = spent;
    return pv;
  }

  Arrangement arr_;
  PLConfig cfg_;
  Rat eps_;
  std::size_t r_ = 0;
  std::uint64_t draw_ = 0;
  TransformMatrix t_;
  std::vector<AffineForm> working_;
  std::unique_ptr<Node> root_;
  PLStats stats_;
  std::vector<const Prism*>* route_ = nullptr;
};

// Format:
//   arr d n
//   a_1 ... a_d c      (n lines: the hyperplane a . x + c = 0)
inline Arrangement parse_arrangement(std::string_view text) {
  auto lines = detail::tokenize(text);
  if (lines.empty()) throw ParseError(1, 1, "empty input");
  const auto& head = lines[0];
  if (head[0].text != "arr") throw ParseError(head[0].line, head[0].column, "expected 'arr', got '" + std::string(head[0].text) + "'");
  if (head.size() != 3) {
    const auto& at = head.size() > 3 ? head[3] : head.back();
    throw ParseError(at.line, head.size() > 3 ? at.column : at.column + at.text.size(), "header must be 'arr d n'");
  }
  Arrangement arr;
  arr.d = detail::count_token(head[1], "d");
  const std::size_t n = detail::count_token(head[2], "n");
  if (arr.d < 1) throw ParseError(head[1].line, head[1].column, "need d >= 1");
  if (lines.size() != n + 1) {
    if (lines.size() > n + 1) throw ParseError(lines[n + 1][0].line, lines[n + 1][0].column, "unexpected trailing data");
    const auto& last = lines.back().back();
    throw ParseError(last.line + 1, 1, "expected " + std::to_string(n) + " hyperplane lines, got " + std::to_string(lines.size() - 1));
  }
  for (std::size_t j = 1; j <= n; ++j) {
    auto v = detail::rational_line(lines[j], arr.d + 1, "rationals");
    Rat c = v.back();
    v.pop_back();
    AffineForm f(c, std::move(v));
    if (f.is_constant()) throw ParseError(lines[j][0].line, lines[j][0].column, "hyperplane has no variable");
    arr.forms.push_back(std::move(f));
  }
  return arr;
}

inline std::vector<std::vector<Rat>> parse_points(std::string_view text, std::size_t d) {
  std::vector<std::vector<Rat>> pts;
  for (const auto& line : detail::tokenize(text)) pts.push_back(detail::rational_line(line, d, "coordinates"));
  return pts;
}

}  // namespace ldt
