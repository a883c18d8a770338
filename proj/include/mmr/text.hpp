#pragma once

// Hierarchical textual structure: a tree of described nodes, each scoped by
// a predicate. With visual units present the tree mirrors the chart (facets,
// axes, legends); otherwise it groups by each field.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mmr/dataset.hpp"
#include "mmr/predicate.hpp"
#include "mmr/scale.hpp"
#include "mmr/spec.hpp"

namespace mmr {

enum class NodeRole { root, facet_level, axis_level, legend_level, field_group, interval, category, datum_summary };

inline std::string_view to_string(NodeRole r) {
  switch (r) {
    case NodeRole::root: return "root";
    case NodeRole::facet_level: return "facet-level";
    case NodeRole::axis_level: return "axis-level";
    case NodeRole::legend_level: return "legend-level";
    case NodeRole::field_group: return "field-group";
    case NodeRole::interval: return "interval";
    case NodeRole::category: return "category";
    case NodeRole::datum_summary: return "datum-summary";
  }
  return "root";
}

struct Summary {
  std::string field;
  std::size_t count = 0;  // non-null values of `field`
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;

  bool operator==(const Summary&) const = default;
};

struct TextNode {
  std::string id;
  NodeRole role = NodeRole::root;
  std::optional<std::string> groupby;
  std::optional<Channel> channel;
  Predicate predicate;
  std::size_t count = 0;
  std::optional<Summary> summary;
  std::optional<int> quartile;  // 1-4, legend categories only
  std::string description;
  std::vector<TextNode> children;

  bool operator==(const TextNode&) const = default;
};

// ---------------------------------------------------------------------------
// Grouping plan

struct Branch {
  std::string field;
  std::optional<Channel> channel;

  bool operator==(const Branch&) const = default;
};

struct GroupingPlan {
  std::optional<Branch> outer;
  std::vector<Branch> branches;

  bool operator==(const GroupingPlan&) const = default;
};

// The outer level is the facet field, or the color field of a line/area
// unit (one node per series). Branches follow x, y, color, size, order.
inline GroupingPlan grouping_plan(const Spec& spec) {
  GroupingPlan plan;
  if (spec.visual_units.empty()) {
    for (const auto& f : spec.fields) plan.branches.push_back({f.name, std::nullopt});
    return plan;
  }
  const auto& first = spec.visual_units.front();
  if (const auto* facet = find_encoding(first.encoding, Channel::facet)) {
    plan.outer = Branch{facet->field, Channel::facet};
  } else if (const auto* color = find_encoding(first.encoding, Channel::color);
             color && (first.mark == Mark::line || first.mark == Mark::area)) {
    plan.outer = Branch{color->field, Channel::color};
  }
  auto seen = [&](const std::string& f) {
    if (plan.outer && plan.outer->field == f) return true;
    return std::any_of(plan.branches.begin(), plan.branches.end(), [&](const Branch& b) { return b.field == f; });
  };
  static constexpr Channel kOrder[] = {Channel::x, Channel::y, Channel::color, Channel::size, Channel::order};
  for (const auto& unit : spec.visual_units) {
    for (auto c : kOrder) {
      const auto* e = find_encoding(unit.encoding, c);
      if (e && !seen(e->field)) plan.branches.push_back({e->field, c});
    }
  }
  if (!plan.outer) {
    std::stable_partition(plan.branches.begin(), plan.branches.end(), [&](const Branch& b) {
      return std::find(spec.key.begin(), spec.key.end(), b.field) != spec.key.end();
    });
  }
  return plan;
}

// The plan in the nested `groupby` / `children` shape.
inline Json grouping_fragment(const GroupingPlan& plan) {
  Json list = Json::array();
  for (const auto& b : plan.branches) list.push_back({{"groupby", b.field}});
  if (!plan.outer) return list;
  return Json{{"groupby", plan.outer->field}, {"children", list}};
}

// ---------------------------------------------------------------------------
// Context

struct TreeContext {
  Spec spec;
  GroupingPlan plan;
  std::optional<std::string> measure;  // quantitative field summarised by default

  bool visual_present() const { return !spec.visual_units.empty(); }
};

struct TextTree {
  TextNode root;
  TreeContext context;
};

inline constexpr std::size_t kTextBins = 5;
inline constexpr std::size_t kRescopeMinBins = 4;
inline constexpr std::size_t kMaxTemporalCategories = 20;
inline constexpr std::size_t kMaxLeafRows = 20;

inline std::optional<std::string> measure_field(const Spec& spec) {
  auto quantitative = [&](const std::string& f) { return field_type(spec, f) == MeasureType::quantitative; };
  for (const auto& u : spec.visual_units) {
    for (auto c : {Channel::x, Channel::y, Channel::size}) {
      const auto* e = find_encoding(u.encoding, c);
      if (e && quantitative(e->field)) return e->field;
    }
  }
  for (const auto& u : spec.audio_units) {
    const auto* e = find_encoding(u.encoding, Channel::pitch);
    if (e && quantitative(e->field)) return e->field;
  }
  for (const auto& f : spec.fields) {
    if (f.type == MeasureType::quantitative) return f.name;
  }
  return std::nullopt;
}

inline TreeContext make_context(const Spec& spec) { return {spec, grouping_plan(spec), measure_field(spec)}; }

// ---------------------------------------------------------------------------
// Descriptions

namespace detail {

inline std::optional<Summary> summarize(const Dataset& data, const std::vector<std::size_t>& rows,
                                        const std::string& field) {
  const auto col = data.column_index(field);
  if (!col) return std::nullopt;
  Summary s{field, 0, 0.0, 0.0, 0.0};
  double sum = 0.0;
  for (auto r : rows) {
    const Value& v = data.rows()[r][*col];
    if (!std::holds_alternative<double>(v)) continue;
    const double d = std::get<double>(v);
    if (s.count == 0) s.min = s.max = d;
    s.min = std::min(s.min, d);
    s.max = std::max(s.max, d);
    sum += d;
    ++s.count;
  }
  if (s.count > 0) s.mean = sum / static_cast<double>(s.count);
  return s;
}

// Percentile with linear interpolation between closest ranks (R type 7).
inline double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  if (v.empty()) return 0.0;
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline int quartile_of(double x, const std::vector<double>& all) {
  if (x < percentile(all, 0.25)) return 1;
  if (x < percentile(all, 0.5)) return 2;
  if (x < percentile(all, 0.75)) return 3;
  return 4;
}

inline std::string ordinal(int q) {
  switch (q) {
    case 1: return "1st";
    case 2: return "2nd";
    case 3: return "3rd";
    default: return std::to_string(q) + "th";
  }
}

inline std::string summary_sentence(const std::optional<Summary>& s) {
  if (!s || s->count == 0) return "";
  return " Average " + s->field + " " + format_number(s->mean) + ", min " + format_number(s->min) + ", max " +
         format_number(s->max) + ".";
}

inline std::string rows_phrase(std::size_t n) { return std::to_string(n) + (n == 1 ? " row." : " rows."); }

inline std::string capitalized(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

inline std::string channel_phrase(Channel c) {
  switch (c) {
    case Channel::x: return "x-axis";
    case Channel::y: return "y-axis";
    case Channel::color: return "color legend";
    case Channel::size: return "size legend";
    case Channel::facet: return "facet";
    case Channel::order: return "order";
    default: return std::string(to_string(c));
  }
}

inline std::string value_label(const Value& v, const Dataset& data, const std::string& field) {
  const auto col = data.column_index(field);
  if (!col) return "null";
  return display(v, data.columns()[*col]);
}

// Label of the value or interval a node fixes for its groupby field.
inline std::string scope_label(const TextNode& node, const Dataset& data) {
  if (!node.groupby) return "";
  const auto& f = *node.groupby;
  const auto col = data.column_index(f);
  if (!col) return "";
  const Column& column = data.columns()[*col];
  std::optional<std::string> out;
  auto visit = [&](const Predicate& p, auto&& self) -> void {
    if (const auto* a = std::get_if<AndPredicate>(&p.node)) {
      for (const auto& t : a->terms) self(t, self);
    } else if (const auto* e = std::get_if<FieldEqual>(&p.node); e && e->field == f) {
      out = display(coerce_to_column(e->value, column), column);
    } else if (const auto* r = std::get_if<FieldRange>(&p.node); r && r->field == f) {
      out = display(coerce_to_column(r->lo, column), column) + " to " + display(coerce_to_column(r->hi, column), column);
    }
  };
  visit(node.predicate, visit);
  return out.value_or("");
}

inline std::string domain_phrase(const TextNode& branch, const Dataset& data) {
  if (branch.children.empty()) return "";
  const bool intervals = branch.children.front().role == NodeRole::interval;
  const auto n = branch.children.size();
  if (intervals) {
    const auto first = scope_label(branch.children.front(), data);
    const auto last = scope_label(branch.children.back(), data);
    const auto lo = first.substr(0, first.find(" to "));
    const auto hi_pos = last.find(" to ");
    const auto hi = hi_pos == std::string::npos ? last : last.substr(hi_pos + 4);
    return " from " + lo + " to " + hi + ", " + std::to_string(n) + (n == 1 ? " interval" : " intervals");
  }
  const bool temporal = branch.groupby && data.column_index(*branch.groupby) &&
                        data.type_of(*branch.groupby) == MeasureType::temporal;
  return ", " + std::to_string(n) + (temporal ? (n == 1 ? " value" : " values") : (n == 1 ? " category" : " categories"));
}

inline std::string datum_text(const TextNode& node, const TreeContext& ctx, const Dataset& data,
                              const std::vector<std::size_t>& rows) {
  if (rows.empty()) return "No matching row.";
  const auto& row = data.rows()[rows.front()];
  std::string out;
  for (const auto& f : ctx.spec.fields) {
    const auto col = data.column_index(f.name);
    if (!col) continue;
    if (!out.empty()) out += ", ";
    out += f.name + ": " + display(row[*col], data.columns()[*col]);
  }
  if (rows.size() > 1) out += " (" + std::to_string(rows.size()) + " identical rows)";
  (void)node;
  return out + ".";
}

inline std::string describe(const TextNode& node, const TreeContext& ctx, const Dataset& data,
                            const std::vector<std::size_t>& rows) {
  const auto sum = summary_sentence(node.summary);
  switch (node.role) {
    case NodeRole::root: {
      std::string out;
      if (ctx.visual_present()) {
        const auto& units = ctx.spec.visual_units;
        out = capitalized(to_string(units.front().mark)) + " chart";
        if (units.size() > 1) {
          out += " " + std::string(ctx.spec.composition.visual.op == CompositionOp::layer ? "layered" : "concatenated") +
                 " with " + std::to_string(units.size() - 1) + (units.size() == 2 ? " more unit" : " more units");
        }
        out += ".";
        for (const auto& e : units.front().encoding) out += " " + capitalized(channel_phrase(e.channel)) + ": " + e.field + ".";
        out += " " + rows_phrase(node.count);
      } else {
        out = "Data with " + std::to_string(node.count) + (node.count == 1 ? " row" : " rows") + " and " +
              std::to_string(ctx.spec.fields.size()) + " fields";
        std::string names;
        for (const auto& f : ctx.spec.fields) names += (names.empty() ? ": " : ", ") + f.name;
        out += names + ".";
      }
      if (node.count == 0) out += " Empty selection: no rows match.";
      return out + sum;
    }
    case NodeRole::facet_level:
      return *node.groupby + " " + scope_label(node, data) + ". " + rows_phrase(node.count) + sum;
    case NodeRole::axis_level:
    case NodeRole::legend_level: {
      const std::string head = capitalized(channel_phrase(node.channel.value_or(Channel::x)));
      return head + ": " + node.groupby.value_or("") + domain_phrase(node, data) + "." + sum;
    }
    case NodeRole::field_group: {
      std::string head;
      if (ctx.visual_present()) {
        head = "Order: " + node.groupby.value_or("");
      } else {
        head = "Field " + node.groupby.value_or("") + " (" +
               std::string(to_string(field_type(ctx.spec, node.groupby.value_or("")))) + ")";
      }
      return head + domain_phrase(node, data) + "." + sum;
    }
    case NodeRole::interval:
      return node.groupby.value_or("") + " from " + scope_label(node, data) + ". " + rows_phrase(node.count) + sum;
    case NodeRole::category: {
      std::string out = scope_label(node, data) + ". " + rows_phrase(node.count) + sum;
      if (node.quartile && node.summary) {
        out += " This average is in the " + ordinal(*node.quartile) + " quartile of " + node.groupby.value_or("") +
               " averages.";
      }
      return out;
    }
    case NodeRole::datum_summary: return datum_text(node, ctx, data, rows);
  }
  return "";
}

}  // namespace detail

// Recomputes a node's description from the rows its predicate matches.
inline std::string describe_node(const TextNode& node, const TreeContext& ctx, const Dataset& data) {
  return detail::describe(node, ctx, data, matching_rows(node.predicate, data));
}

// ---------------------------------------------------------------------------
// Construction

namespace detail {

inline const FieldRange* find_range(const Predicate& p, const std::string& field) {
  if (const auto* r = std::get_if<FieldRange>(&p.node); r && r->field == field) return r;
  if (const auto* a = std::get_if<AndPredicate>(&p.node)) {
    for (const auto& t : a->terms) {
      if (const auto* r = find_range(t, field)) return r;
    }
  }
  return nullptr;
}

class TreeBuilder {
 public:
  TreeBuilder(const TreeContext& ctx, const Dataset& data, Predicate filter)
      : ctx_(ctx), data_(data), filter_(std::move(filter)), rescoping_(!filter_.is_true()) {}

  TextNode build() {
    TextNode root;
    root.id = "0";
    root.role = NodeRole::root;
    root.predicate = filter_;
    std::vector<std::size_t> all(data_.row_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto rows = restrict(all, filter_);
    root.count = rows.size();
    if (ctx_.measure) root.summary = summarize(data_, rows, *ctx_.measure);
    if (!rows.empty()) {
      if (ctx_.plan.outer) {
        root.children = value_children(*ctx_.plan.outer, always(), all, rows, root.id, true);
      } else {
        root.children = branches(always(), all, rows, root.id);
      }
    }
    root.description = describe(root, ctx_, data_, rows);
    return root;
  }

 private:
  struct Scoped {
    Predicate path;
    std::vector<std::size_t> path_rows;
    std::vector<std::size_t> rows;
  };

  std::vector<std::size_t> restrict(const std::vector<std::size_t>& within, const Predicate& local) const {
    if (local.is_true()) return within;
    BoundPredicate bound(local, data_);
    std::vector<std::size_t> out;
    for (auto r : within) {
      if (bound(data_.rows()[r])) out.push_back(r);
    }
    return out;
  }

  Predicate scoped(const Predicate& path) const { return conjoin(path, filter_); }

  std::optional<Summary> summary_for(const std::optional<std::string>& groupby, const std::vector<std::size_t>& rows,
                                     bool own_field) const {
    if (own_field && groupby && field_type(ctx_.spec, *groupby) == MeasureType::quantitative) {
      return summarize(data_, rows, *groupby);
    }
    if (ctx_.measure) return summarize(data_, rows, *ctx_.measure);
    return std::nullopt;
  }

  static NodeRole branch_role(const std::optional<Channel>& c) {
    if (!c) return NodeRole::field_group;
    switch (*c) {
      case Channel::x:
      case Channel::y: return NodeRole::axis_level;
      case Channel::color:
      case Channel::size: return NodeRole::legend_level;
      default: return NodeRole::field_group;
    }
  }

  std::vector<TextNode> branches(const Predicate& path, const std::vector<std::size_t>& path_rows,
                                 const std::vector<std::size_t>& rows, const std::string& parent_id) {
    std::vector<TextNode> out;
    for (const auto& b : ctx_.plan.branches) {
      TextNode node;
      node.id = parent_id + "." + std::to_string(out.size());
      node.role = branch_role(b.channel);
      node.groupby = b.field;
      node.channel = b.channel;
      node.predicate = scoped(path);
      node.count = rows.size();
      node.summary = summary_for(node.groupby, rows, true);
      node.children = value_children(b, path, path_rows, rows, node.id, false);
      if (node.role == NodeRole::legend_level) assign_quartiles(node);
      node.description = describe(node, ctx_, data_, rows);
      out.push_back(std::move(node));
    }
    return out;
  }

  void assign_quartiles(TextNode& legend) const {
    std::vector<double> means;
    for (const auto& c : legend.children) {
      if (c.role != NodeRole::interval && c.summary && c.summary->count > 0) means.push_back(c.summary->mean);
    }
    if (means.empty()) return;
    for (auto& c : legend.children) {
      if (c.role == NodeRole::category && c.summary && c.summary->count > 0) {
        c.quartile = quartile_of(c.summary->mean, means);
        c.description = describe(c, ctx_, data_, {});
      }
    }
  }

  // Interval or category children of one grouping field. `outer` marks the
  // facet/series level, whose children are the branches.
  std::vector<TextNode> value_children(const Branch& b, const Predicate& path, const std::vector<std::size_t>& path_rows,
                                       const std::vector<std::size_t>& rows, const std::string& parent_id, bool outer) {
    std::vector<TextNode> out;
    const auto col_idx = data_.column_index(b.field);
    if (!col_idx) return out;
    const std::size_t col = *col_idx;
    const Column& column = data_.columns()[col];
    const MeasureType type = column.type.value_or(MeasureType::nominal);

    std::vector<Value> path_values;
    for (auto r : path_rows) {
      if (!is_null(data_.rows()[r][col])) path_values.push_back(data_.rows()[r][col]);
    }
    std::vector<Value> distinct;
    {
      std::set<Value> seen;
      for (const auto& v : path_values) {
        if (seen.insert(v).second) distinct.push_back(v);
      }
    }
    const bool intervals = type == MeasureType::quantitative ||
                           (type == MeasureType::temporal && distinct.size() > kMaxTemporalCategories);

    std::vector<std::pair<Predicate, NodeRole>> locals;
    if (intervals) {
      double lo = 0, hi = 0;
      bool any = false;
      auto extent = [&](const std::vector<std::size_t>& rs) {
        any = false;
        for (auto r : rs) {
          const Value& v = data_.rows()[r][col];
          if (!std::holds_alternative<double>(v)) continue;
          const double d = std::get<double>(v);
          if (!any) lo = hi = d;
          lo = std::min(lo, d);
          hi = std::max(hi, d);
          any = true;
        }
      };
      std::vector<scale::Interval> bins;
      std::size_t in_scope = 0;
      for (auto r : rows) in_scope += is_null(data_.rows()[r][col]) ? 0 : 1;
      if (!rescoping_ || in_scope == path_values.size()) {
        extent(path_rows);
        if (any) {
          bins = type == MeasureType::temporal ? scale::temporal_bins(lo, hi, kTextBins, scale::BinMode::at_most)
                                               : scale::nice_bins(lo, hi, kTextBins);
        }
      } else {
        extent(rows);
        if (const auto* r = find_range(filter_, b.field)) {
          const Value a = coerce_to_column(r->lo, column), z = coerce_to_column(r->hi, column);
          if (std::holds_alternative<double>(a) && std::holds_alternative<double>(z)) {
            lo = std::get<double>(a);
            hi = std::get<double>(z);
            any = true;
          }
        }
        if (any) {
          bins = type == MeasureType::temporal ? scale::temporal_bins(lo, hi, kRescopeMinBins, scale::BinMode::at_least)
                                               : scale::rescope_bins(lo, hi, kRescopeMinBins);
        }
      }
      for (const auto& bin : bins) {
        if (bin.lo == bin.hi) {
          locals.push_back({equal(b.field, wire_value(bin.lo, column)), NodeRole::interval});
          continue;
        }
        locals.push_back({in_range(b.field, wire_value(bin.lo, column), wire_value(bin.hi, column), bin.closed),
                          NodeRole::interval});
      }
    } else {
      if (type == MeasureType::temporal) {
        std::sort(distinct.begin(), distinct.end(), [](const Value& a, const Value& c) {
          return std::get<double>(a) < std::get<double>(c);
        });
      }
      for (const auto& v : distinct) locals.push_back({equal(b.field, wire_value(v, column)), NodeRole::category});
    }

    for (const auto& [local, role] : locals) {
      Scoped s{conjoin(path, local), restrict(path_rows, local), restrict(rows, local)};
      if (role == NodeRole::category && s.rows.empty()) continue;  // zoom drops empty categories
      TextNode node;
      node.id = parent_id + "." + std::to_string(out.size());
      node.role = outer ? NodeRole::facet_level : role;
      node.groupby = b.field;
      node.predicate = scoped(s.path);
      node.count = s.rows.size();
      if (outer) {
        node.summary = summary_for(node.groupby, s.rows, false);
        node.children = branches(s.path, s.path_rows, s.rows, node.id);
      } else if (role == NodeRole::category && s.rows.size() == 1 && branch_role(b.channel) != NodeRole::legend_level) {
        node.role = NodeRole::datum_summary;
      } else {
        node.summary = summary_for(node.groupby, s.rows, false);
        if (!s.rows.empty() && s.rows.size() <= kMaxLeafRows) node.children = leaves(s, node.id);
      }
      node.description = describe(node, ctx_, data_, s.rows);
      out.push_back(std::move(node));
    }
    return out;
  }

  // One node per row, identified by the key (or every field when keyless).
  std::vector<TextNode> leaves(const Scoped& s, const std::string& parent_id) {
    std::vector<TextNode> out;
    std::vector<std::string> id_fields = ctx_.spec.key;
    if (id_fields.empty()) {
      for (const auto& f : ctx_.spec.fields) id_fields.push_back(f.name);
    }
    std::set<std::vector<Value>> seen;
    for (auto r : s.rows) {
      const auto& row = data_.rows()[r];
      std::vector<Predicate> terms{s.path};
      std::vector<Value> ident;
      for (const auto& f : id_fields) {
        const auto col = data_.column_index(f);
        if (!col || is_null(row[*col])) continue;
        terms.push_back(equal(f, wire_value(row[*col], data_.columns()[*col])));
        ident.push_back(row[*col]);
      }
      if (!seen.insert(ident).second) continue;
      const Predicate path = conjoin(terms);
      TextNode node;
      node.id = parent_id + "." + std::to_string(out.size());
      node.role = NodeRole::datum_summary;
      node.predicate = scoped(path);
      const auto rows = restrict(s.rows, path);
      node.count = rows.size();
      node.description = describe(node, ctx_, data_, rows);
      out.push_back(std::move(node));
    }
    return out;
  }

  const TreeContext& ctx_;
  const Dataset& data_;
  Predicate filter_;
  bool rescoping_;
};

}  // namespace detail

inline TextTree build_tree(const Spec& spec, const Dataset& data) {
  TextTree tree{{}, make_context(spec)};
  tree.root = detail::TreeBuilder(tree.context, data, always()).build();
  return tree;
}

// Zoom: the tree is rebuilt under the filter. Node predicates gain the
// filter, empty categories disappear, and interval levels whose domain
// shrank are re-binned over the filtered range.
inline TextTree rescope_tree(const TextTree& tree, const Predicate& filter, const Dataset& data) {
  if (filter.is_true()) return tree;
  check_predicate(filter, data);
  TextTree out{{}, tree.context};
  out.root = detail::TreeBuilder(out.context, data, filter).build();
  return out;
}

inline Predicate from_text_node(const TextNode& node) { return node.predicate; }

inline const TextNode* find_node(const TextNode& root, std::string_view id) {
  if (root.id == id) return &root;
  for (const auto& c : root.children) {
    if (const auto* n = find_node(c, id)) return n;
  }
  return nullptr;
}

template <typename Fn>
void for_each_node(const TextNode& node, Fn&& fn, const TextNode* parent = nullptr) {
  fn(node, parent);
  for (const auto& c : node.children) for_each_node(c, fn, &node);
}

inline Json to_json(const TextNode& node) {
  Json j{{"node_id", node.id}, {"role", to_string(node.role)}};
  if (node.groupby) j["groupby"] = *node.groupby;
  if (node.channel) j["channel"] = to_string(*node.channel);
  j["predicate"] = to_json(node.predicate);
  j["count"] = node.count;
  if (node.summary) {
    j["summary"] = {{"field", node.summary->field}, {"count", node.summary->count}};
    if (node.summary->count > 0) {
      j["summary"]["mean"] = node.summary->mean;
      j["summary"]["min"] = node.summary->min;
      j["summary"]["max"] = node.summary->max;
    }
  }
  if (node.quartile) j["quartile"] = *node.quartile;
  j["description"] = node.description;
  Json kids = Json::array();
  for (const auto& c : node.children) kids.push_back(to_json(c));
  j["children"] = kids;
  return j;
}

inline Json to_json(const TextTree& tree) { return to_json(tree.root); }

inline std::string render_text(const TextNode& root) {
  std::string out;
  auto walk = [&](const TextNode& n, int depth, auto&& self) -> void {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += n.description;
    out += '\n';
    for (const auto& c : n.children) self(c, depth + 1, self);
  };
  walk(root, 0, walk);
  return out;
}

}  // namespace mmr
