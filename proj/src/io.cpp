#include "vigil/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "vigil/errors.hpp"

namespace vigil::io {
namespace {

int index_of(const std::vector<std::string>& ids, const std::string& id, const char* what) {
  for (size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] == id) return static_cast<int>(k);
  }
  throw InputError(std::string("unknown ") + what + " '" + id + "'");
}

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw InputError("ids must be strings or integers");
}

// A class list: [["a","b"],["c"]], where a bare id counts as a singleton class.
WeakOrder parse_order_classes(const json& v, const std::vector<std::string>& ids, const char* what) {
  if (!v.is_array()) throw InputError(std::string(what) + " must be a list of classes");
  std::vector<std::vector<int>> classes;
  for (const auto& cls : v) {
    std::vector<int> members;
    if (cls.is_array()) {
      for (const auto& x : cls) members.push_back(index_of(ids, id_string(x), what));
    } else {
      members.push_back(index_of(ids, id_string(cls), what));
    }
    classes.push_back(std::move(members));
  }
  return WeakOrder(std::move(classes), static_cast<int>(ids.size()));
}

json order_to_json(const WeakOrder& w, const std::vector<std::string>& ids) {
  json out = json::array();
  for (const auto& cls : w.classes()) {
    json c = json::array();
    for (int x : cls) c.push_back(ids[x]);
    out.push_back(c);
  }
  return out;
}

// Per-entity values given either as an array in declaration order or as a
// map keyed by id.
template <typename F>
void for_each_keyed(const json& v, const std::vector<std::string>& ids, const char* what, F f) {
  if (v.is_array()) {
    if (v.size() != ids.size()) throw InputError(std::string(what) + " must list one entry per id");
    for (size_t k = 0; k < ids.size(); ++k) f(static_cast<int>(k), v[k]);
  } else if (v.is_object()) {
    std::vector<char> seen(ids.size(), 0);
    for (auto it = v.begin(); it != v.end(); ++it) {
      const int k = index_of(ids, it.key(), what);
      seen[k] = 1;
      f(k, it.value());
    }
    for (size_t k = 0; k < ids.size(); ++k) {
      if (!seen[k]) throw InputError(std::string(what) + " missing for '" + ids[k] + "'");
    }
  } else {
    throw InputError(std::string(what) + " must be an array or an object");
  }
}

lp::Relation parse_relation(const std::string& s) {
  if (s == "<=") return lp::Relation::LessEqual;
  if (s == ">=") return lp::Relation::GreaterEqual;
  if (s == "=" || s == "==") return lp::Relation::Equal;
  throw InputError("unknown relation '" + s + "'");
}

std::string relation_string(lp::Relation r) {
  switch (r) {
  case lp::Relation::LessEqual:
    return "<=";
  case lp::Relation::GreaterEqual:
    return ">=";
  case lp::Relation::Equal:
    return "=";
  }
  return "?";
}

json allocation_matrix(const Allocation& p) {
  json rows = json::array();
  for (int i = 0; i < p.n(); ++i) {
    json row = json::array();
    for (int o = 0; o < p.m(); ++o) row.push_back(p(i, o).str());
    rows.push_back(row);
  }
  return rows;
}

} // namespace

Rational parse_rational(const json& value) {
  if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
  if (value.is_string()) {
    try {
      return Rational::parse(value.get<std::string>());
    } catch (const std::exception& e) {
      throw InputError(e.what());
    }
  }
  if (value.is_number_float()) throw InputError("floating-point number " + value.dump() + " where an exact rational is required");
  throw InputError("expected a rational, got " + value.dump());
}

json to_json(const Rational& value) { return value.str(); }

ConstraintSpec parse_spec(const json& doc, const Instance& inst) {
  if (doc.is_null()) return {};
  if (!doc.is_object() || !doc.contains("type")) throw InputError("constraints need a \"type\"");
  const std::string type = doc.at("type").get<std::string>();
  ConstraintSpec spec;
  using K = ConstraintSpec::Kind;
  if (type == "unconstrained") {
    spec.kind = K::Unconstrained;
  } else if (type == "linear") {
    spec.kind = K::CustomLinear;
    for (const auto& row : doc.at("rows")) {
      lp::LinearExpr terms;
      for (const auto& t : row.at("terms")) {
        if (!t.is_array() || t.size() != 3) throw InputError("linear terms are [agent, object, coefficient]");
        const int i = index_of(inst.agent_ids, id_string(t[0]), "agent");
        const int o = index_of(inst.object_ids, id_string(t[1]), "object");
        terms.push_back({inst.var(i, o), parse_rational(t[2])});
      }
      spec.linear.push_back(lp::make_constraint(terms, parse_relation(row.at("rel").get<std::string>()),
                                                parse_rational(row.at("rhs")), row.value("label", std::string())));
    }
  } else if (type == "quotas") {
    spec.kind = K::Quotas;
    for (const auto& item : doc.at("items")) {
      Quota q;
      for (const auto& a : item.at("agents")) q.agents.push_back(index_of(inst.agent_ids, id_string(a), "agent"));
      for (const auto& o : item.at("objects")) q.objects.push_back(index_of(inst.object_ids, id_string(o), "object"));
      q.lower = item.contains("lower") ? parse_rational(item.at("lower")) : Rational(0);
      q.upper = parse_rational(item.at("upper"));
      if (q.lower.sign() < 0 || q.lower > q.upper) throw InputError("quota bounds must satisfy 0 <= lower <= upper");
      spec.quotas.push_back(std::move(q));
    }
  } else if (type == "ir") {
    spec.kind = K::IndividualRationality;
    spec.endowment = allocation_from_json(doc.at("endowment"), inst);
  } else if (type == "claimwise") {
    spec.kind = K::Claimwise;
  } else if (type == "fractional") {
    spec.kind = K::Fractional;
  } else if (type == "expost") {
    spec.kind = K::ExPost;
  } else if (type == "exante") {
    spec.kind = K::ExAnte;
  } else if (type == "deterministic") {
    spec.kind = K::DeterministicOnly;
    spec.base = std::make_shared<ConstraintSpec>(parse_spec(doc.value("base", json()), inst));
  } else {
    throw InputError("unknown constraint type '" + type + "'");
  }
  return spec;
}

InstanceFile parse_instance(const json& doc) {
  try {
    if (!doc.is_object()) throw InputError("instance must be a JSON object");
    InstanceFile file;
    Instance& inst = file.instance;
    for (const auto& a : doc.at("agents")) inst.agent_ids.push_back(id_string(a));
    for (const auto& o : doc.at("objects")) {
      if (o.is_object()) {
        inst.object_ids.push_back(id_string(o.at("id")));
        inst.supplies.push_back(o.contains("supply") ? parse_rational(o.at("supply")) : Rational(1));
      } else {
        inst.object_ids.push_back(id_string(o));
        inst.supplies.push_back(Rational(1));
      }
    }
    inst.preferences.resize(inst.agent_ids.size());
    for_each_keyed(doc.at("preferences"), inst.agent_ids, "preferences", [&](int i, const json& v) {
      inst.preferences[i] = parse_order_classes(v, inst.object_ids, "object");
    });
    if (doc.contains("priorities") && !doc.at("priorities").is_null()) {
      std::vector<WeakOrder> prio(inst.object_ids.size());
      for_each_keyed(doc.at("priorities"), inst.object_ids, "priorities", [&](int o, const json& v) {
        prio[o] = parse_order_classes(v, inst.agent_ids, "agent");
      });
      inst.priorities = std::move(prio);
    }
    inst.capacities.assign(inst.agent_ids.size(), 1);
    if (doc.contains("capacities")) {
      for_each_keyed(doc.at("capacities"), inst.agent_ids, "capacities", [&](int i, const json& v) {
        if (!v.is_number_integer()) throw InputError("capacities must be integers");
        inst.capacities[i] = v.get<int>();
      });
    }
    inst.complete = doc.value("complete", true);
    inst.validate();
    file.constraints = parse_spec(doc.value("constraints", json()), inst);
    return file;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed instance: ") + e.what());
  }
}

InstanceFile load_instance(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
  return parse_instance(doc);
}

json spec_to_json(const ConstraintSpec& spec, const Instance& inst) {
  json out;
  out["type"] = kind_name(spec.kind);
  switch (spec.kind) {
  case ConstraintSpec::Kind::CustomLinear: {
    json rows = json::array();
    for (const auto& c : spec.linear) {
      json terms = json::array();
      for (const auto& t : c.terms) {
        terms.push_back({inst.agent_ids[t.var / inst.m()], inst.object_ids[t.var % inst.m()], t.coef.str()});
      }
      json row = {{"terms", terms}, {"rel", relation_string(c.rel)}, {"rhs", c.rhs.str()}};
      if (!c.label.empty()) row["label"] = c.label;
      rows.push_back(row);
    }
    out["rows"] = rows;
    break;
  }
  case ConstraintSpec::Kind::Quotas: {
    json items = json::array();
    for (const auto& q : spec.quotas) {
      json agents = json::array(), objects = json::array();
      for (int i : q.agents) agents.push_back(inst.agent_ids[i]);
      for (int o : q.objects) objects.push_back(inst.object_ids[o]);
      items.push_back({{"agents", agents}, {"objects", objects}, {"lower", q.lower.str()}, {"upper", q.upper.str()}});
    }
    out["items"] = items;
    break;
  }
  case ConstraintSpec::Kind::IndividualRationality:
    out["endowment"] = allocation_matrix(spec.endowment);
    break;
  case ConstraintSpec::Kind::DeterministicOnly:
    out["base"] = spec_to_json(spec.base ? *spec.base : ConstraintSpec{}, inst);
    break;
  default:
    break;
  }
  return out;
}

json instance_to_json(const InstanceFile& file) {
  const Instance& inst = file.instance;
  json doc;
  doc["agents"] = inst.agent_ids;
  json objects = json::array();
  for (int o = 0; o < inst.m(); ++o) objects.push_back({{"id", inst.object_ids[o]}, {"supply", inst.supplies[o].str()}});
  doc["objects"] = objects;
  json prefs = json::object();
  for (int i = 0; i < inst.n(); ++i) prefs[inst.agent_ids[i]] = order_to_json(inst.preferences[i], inst.object_ids);
  doc["preferences"] = prefs;
  if (inst.priorities) {
    json prio = json::object();
    for (int o = 0; o < inst.m(); ++o) prio[inst.object_ids[o]] = order_to_json(inst.priority(o), inst.agent_ids);
    doc["priorities"] = prio;
  }
  json caps = json::object();
  for (int i = 0; i < inst.n(); ++i) caps[inst.agent_ids[i]] = inst.capacities[i];
  doc["capacities"] = caps;
  doc["complete"] = inst.complete;
  doc["constraints"] = spec_to_json(file.constraints, inst);
  return doc;
}

Allocation parse_allocation(const std::string& text, const Instance& inst) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<Rational>> rows;
  std::vector<int> columns;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string tok;
    if (!(fields >> tok)) continue;
    if (tok[0] == '#') {
      std::string rest = tok.substr(1);
      std::istringstream ids(rest + " " + std::string(std::istreambuf_iterator<char>(fields), {}));
      std::string id;
      columns.clear();
      while (ids >> id) columns.push_back(index_of(inst.object_ids, id, "object"));
      if (static_cast<int>(columns.size()) != inst.m()) throw InputError("allocation header must list every object once");
      continue;
    }
    std::vector<Rational> row;
    do {
      try {
        row.push_back(Rational::parse(tok));
      } catch (const std::exception& e) {
        throw InputError(std::string("allocation: ") + e.what());
      }
    } while (fields >> tok);
    if (static_cast<int>(row.size()) != inst.m()) throw InputError("allocation row has the wrong number of entries");
    rows.push_back(std::move(row));
  }
  if (static_cast<int>(rows.size()) != inst.n()) throw InputError("allocation needs one row per agent");
  Allocation p(inst.n(), inst.m());
  for (int i = 0; i < inst.n(); ++i) {
    for (int c = 0; c < inst.m(); ++c) p(i, columns.empty() ? c : columns[c]) = rows[i][c];
  }
  return p;
}

Allocation load_allocation(const std::string& path, const Instance& inst) { return parse_allocation(read_file(path), inst); }

std::string format_allocation(const Allocation& p, const Instance& inst) {
  std::vector<std::vector<std::string>> cells(p.n() + 1);
  cells[0].push_back("#");
  for (const auto& id : inst.object_ids) cells[0].push_back(id);
  for (int i = 0; i < p.n(); ++i) {
    for (int o = 0; o < p.m(); ++o) cells[i + 1].push_back(p(i, o).str());
  }
  std::vector<size_t> width(p.m(), 0);
  for (int o = 0; o < p.m(); ++o) {
    width[o] = cells[0][o + 1].size();
    for (int i = 0; i < p.n(); ++i) width[o] = std::max(width[o], cells[i + 1][o].size());
  }
  std::ostringstream out;
  out << "#";
  for (int o = 0; o < p.m(); ++o) out << ' ' << std::string(width[o] - cells[0][o + 1].size(), ' ') << cells[0][o + 1];
  out << '\n';
  for (int i = 0; i < p.n(); ++i) {
    for (int o = 0; o < p.m(); ++o) {
      if (o > 0) out << ' ';
      out << std::string(width[o] - cells[i + 1][o].size() + (o == 0 ? 2 : 0), ' ') << cells[i + 1][o];
    }
    out << '\n';
  }
  return out.str();
}

json allocation_json(const Allocation& p) { return allocation_matrix(p); }

Allocation allocation_from_json(const json& value, const Instance& inst) {
  if (value.is_array() && !value.empty() && value[0].is_array()) {
    if (static_cast<int>(value.size()) != inst.n()) throw InputError("allocation needs one row per agent");
    Allocation p(inst.n(), inst.m());
    for (int i = 0; i < inst.n(); ++i) {
      if (static_cast<int>(value[i].size()) != inst.m()) throw InputError("allocation row has the wrong number of entries");
      for (int o = 0; o < inst.m(); ++o) p(i, o) = parse_rational(value[i][o]);
    }
    return p;
  }
  // Assignment form: agent -> object id (or null / "" for nothing).
  Allocation p(inst.n(), inst.m());
  for_each_keyed(value, inst.agent_ids, "assignment", [&](int i, const json& v) {
    if (v.is_null() || (v.is_string() && v.get<std::string>().empty())) return;
    if (v.is_array()) {
      for (const auto& o : v) p(i, index_of(inst.object_ids, id_string(o), "object")) = Rational(1);
    } else {
      p(i, index_of(inst.object_ids, id_string(v), "object")) = Rational(1);
    }
  });
  return p;
}

std::vector<Allocation> parse_allocation_list(const json& doc, const Instance& inst) {
  if (!doc.is_array()) throw InputError("expected a list of allocations");
  std::vector<Allocation> out;
  for (const auto& item : doc) out.push_back(allocation_from_json(item, inst));
  return out;
}

EatingRates parse_rates(const json& doc, const Instance& inst) {
  EatingRates rates;
  rates.agents.resize(inst.n());
  for_each_keyed(doc, inst.agent_ids, "rates", [&](int i, const json& v) {
    if (!v.is_array()) throw InputError("rate function must be a list of [start, rate] segments");
    for (const auto& seg : v) {
      if (!seg.is_array() || seg.size() != 2) throw InputError("rate segments are [start, rate]");
      rates.agents[i].push_back({parse_rational(seg[0]), parse_rational(seg[1])});
    }
  });
  rates.validate(inst.n());
  return rates;
}

std::vector<int> parse_order(const std::string& text, const Instance& inst) {
  std::vector<int> order;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    order.push_back(index_of(inst.agent_ids, tok.substr(b, e - b + 1), "agent"));
  }
  return order;
}

json trace_json(const VerResult& result, const Instance& inst) {
  json rounds = json::array();
  int number = 0;
  for (const auto& r : result.trace.rounds) {
    json eating = json::object();
    for (size_t a = 0; a < r.active.size(); ++a) {
      const int i = r.active[a];
      json cls = json::array();
      for (int o : inst.preferences[i][r.chosen_class[a]]) cls.push_back(inst.object_ids[o]);
      eating[inst.agent_ids[i]] = cls;
    }
    json active = json::array();
    for (int i : r.active) active.push_back(inst.agent_ids[i]);
    json pi = json::object();
    for (int i = 0; i < inst.n(); ++i) {
      json classes = json::array();
      for (int c = 0; c < inst.preferences[i].num_classes(); ++c) {
        if (r.pi[i][c].is_zero()) continue;
        json ids = json::array();
        for (int o : inst.preferences[i][c]) ids.push_back(inst.object_ids[o]);
        classes.push_back({{"class", ids}, {"value", r.pi[i][c].str()}});
      }
      pi[inst.agent_ids[i]] = classes;
    }
    rounds.push_back({{"round", ++number},
                      {"time", r.time.str()},
                      {"active", active},
                      {"eating", eating},
                      {"delta", r.delta.str()},
                      {"guarantees", pi},
                      {"lp_calls", r.lp_calls}});
  }
  return {{"trace_version", 1},
          {"rounds", rounds},
          {"lp_calls", result.trace.lp_calls},
          {"members", result.trace.members},
          {"objects", inst.object_ids},
          {"allocation", allocation_matrix(result.allocation)}};
}

json lottery_json(const std::vector<LotteryTerm>& terms, const Instance& inst) {
  json out = json::array();
  for (const auto& t : terms) {
    json assignment = json::object();
    for (int i = 0; i < inst.n(); ++i) {
      json objs = json::array();
      for (int o = 0; o < inst.m(); ++o) {
        if (!t.outcome(i, o).is_zero()) objs.push_back(inst.object_ids[o]);
      }
      assignment[inst.agent_ids[i]] = objs;
    }
    out.push_back({{"weight", t.weight.str()}, {"assignment", assignment}, {"matrix", allocation_matrix(t.outcome)}});
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace vigil::io
