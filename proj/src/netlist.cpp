#include "gemmforge/netlist.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gemmforge::netlist {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string dec(i64 v) { return std::to_string(v); }

int addr_width(const Rat64& depth) {
  const i64 entries = std::max<i64>(depth.ceil(), 2);
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(entries - 1)));
}

class Builder {
 public:
  Netlist nl;

  Instance& inst(const std::string& id, const std::string& kind,
                 std::map<std::string, std::string> params) {
    nl.instances.push_back({id, kind, std::move(params)});
    return nl.instances.back();
  }

  Net& net(const std::string& name, int width, Endpoint driver) {
    nl.nets.push_back({name, width, std::move(driver), {}});
    index_[name] = nl.nets.size() - 1;
    return nl.nets.back();
  }

  void sink(const std::string& net_name, Endpoint e) {
    nl.nets[index_.at(net_name)].sinks.push_back(std::move(e));
  }

 private:
  std::map<std::string, std::size_t> index_;
};

}  // namespace

Netlist generate(const stratix::TbParams& params, const GemmDims& native,
                 const PipelineConfig& pipeline) {
  stratix::validate(params);
  if (pipeline.addr_stages < 0 || pipeline.data_stages < 0)
    throw DomainError("pipeline stage counts must be >= 0");
  const stratix::BufferShape shape =
      stratix::buffer_partitioning(params, native, stratix::DimPolicy::strict);

  const i64 l_a = params.l_a, e_k = params.e_k, e_n = params.e_n, e_m = params.e_m;

  Builder b;
  b.nl.name = "tb_" + params.label();
  b.nl.attributes = {
      {"la", dec(l_a)},       {"ek", dec(e_k)},
      {"en", dec(e_n)},       {"em", dec(e_m)},
      {"m", dec(native.m)},   {"k", dec(native.k)},
      {"n", dec(native.n)},   {"addr_stages", dec(pipeline.addr_stages)},
      {"data_stages", dec(pipeline.data_stages)},
  };

  b.inst("ctrl", "control_stub",
         {{"addr_stages", dec(pipeline.addr_stages)},
          {"data_stages", dec(pipeline.data_stages)}});

  auto tb_id = [](i64 nb, i64 g, i64 ar, i64 t) {
    return "tb_b" + dec(nb) + "_g" + dec(g) + "_a" + dec(ar) + "_t" + dec(t);
  };

  for (i64 nb = 0; nb < e_m; ++nb)
    for (i64 g = 0; g < e_n; ++g)
      for (i64 ar = 0; ar < e_k; ++ar)
        for (i64 t = 0; t < l_a; ++t)
          b.inst(tb_id(nb, g, ar, t), "tensor_block",
                 {{"mode", t == 0 ? "load_port" : "compute"},
                  {"nblock", dec(nb)},
                  {"group", dec(g)},
                  {"array", dec(ar)},
                  {"chain", dec(t)}});

  // Cascade wiring: the A-data chain covers the whole array including the
  // loading port; the accumulation chain runs over the compute TBs.
  for (i64 nb = 0; nb < e_m; ++nb) {
    for (i64 g = 0; g < e_n; ++g) {
      for (i64 ar = 0; ar < e_k; ++ar) {
        const std::string suffix = "_b" + dec(nb) + "_g" + dec(g) + "_a" + dec(ar);
        for (i64 t = 0; t + 1 < l_a; ++t) {
          const std::string name = "casc_d" + suffix + "_t" + dec(t);
          b.net(name, 80, {tb_id(nb, g, ar, t), "casc_data_out"});
          b.sink(name, {tb_id(nb, g, ar, t + 1), "casc_data_in"});
        }
        for (i64 t = 1; t + 1 < l_a; ++t) {
          const std::string name = "casc_s" + suffix + "_t" + dec(t);
          b.net(name, 96, {tb_id(nb, g, ar, t), "casc_accum_out"});
          b.sink(name, {tb_id(nb, g, ar, t + 1), "casc_accum_in"});
        }
        for (int r = 0; r < 3; ++r)
          b.net("arr" + suffix + "_l" + dec(r), 32,
                {tb_id(nb, g, ar, l_a - 1), "data_out_" + dec(r)});
      }
    }
  }

  // A buffers: one 80-bit partition per (N-block, array-in-group), banked
  // into 512x40 M20K pairs; read data routes through the control stub, which
  // broadcasts to the load ports of all groups in the N-block.
  const i64 a_banks = stratix::m20k_cost_80(shape.a_depth);
  for (i64 nb = 0; nb < e_m; ++nb) {
    for (i64 ar = 0; ar < e_k; ++ar) {
      const std::string part = "b" + dec(nb) + "_a" + dec(ar);
      for (i64 i = 0; i < a_banks; ++i) {
        const std::string id = "m20k_a_" + part + "_" + dec(i);
        b.inst(id, "m20k", {{"config", "512x40"}, {"buffer", "a"}, {"partition", part}});
        b.net("q_" + id, 40, {id, "q"});
        b.sink("q_" + id, {"ctrl", "q_" + id});
      }
      const std::string wr = "a_wr_" + part;
      b.net(wr, 80, {"ctrl", wr});
      for (i64 i = 0; i < a_banks; ++i)
        b.sink(wr, {"m20k_a_" + part + "_" + dec(i), "din"});
      const std::string feed = "a_data_" + part;
      b.net(feed, 80, {"ctrl", feed});
      for (i64 g = 0; g < e_n; ++g) b.sink(feed, {tb_id(nb, g, ar, 0), "data_in"});
    }
  }

  // B buffers: one 80-bit partition per compute-TB position within an
  // N-block; the feed is broadcast across all N-blocks, optionally through
  // pipeline register stages.
  const i64 b_banks = stratix::m20k_cost_80(shape.b_depth);
  for (i64 g = 0; g < e_n; ++g) {
    for (i64 ar = 0; ar < e_k; ++ar) {
      for (i64 t = 1; t < l_a; ++t) {
        const std::string part = "g" + dec(g) + "_a" + dec(ar) + "_t" + dec(t);
        for (i64 i = 0; i < b_banks; ++i) {
          const std::string id = "m20k_b_" + part + "_" + dec(i);
          b.inst(id, "m20k", {{"config", "512x40"}, {"buffer", "b"}, {"partition", part}});
          b.net("q_" + id, 40, {id, "q"});
          b.sink("q_" + id, {"ctrl", "q_" + id});
        }
        const std::string wr = "b_wr_" + part;
        b.net(wr, 80, {"ctrl", wr});
        for (i64 i = 0; i < b_banks; ++i)
          b.sink(wr, {"m20k_b_" + part + "_" + dec(i), "din"});

        Endpoint driver{"ctrl", "b_data_" + part + "_src"};
        for (i64 s = 1; s <= pipeline.data_stages; ++s) {
          const std::string reg = "preg_d_" + part + "_s" + dec(s);
          b.inst(reg, "pipeline_reg",
                 {{"width", "80"}, {"stage", dec(s)}, {"path", "data"}});
          const std::string stage_net = "b_pipe_" + part + "_s" + dec(s - 1);
          b.net(stage_net, 80, driver);
          b.sink(stage_net, {reg, "d"});
          driver = {reg, "q"};
        }
        const std::string feed = "b_data_" + part;
        b.net(feed, 80, driver);
        for (i64 nb = 0; nb < e_m; ++nb) b.sink(feed, {tb_id(nb, g, ar, t), "data_in"});
      }
    }
  }

  // C buffers: per (N-block, group, lane) two half-partitions (double
  // buffering); the accumulator writes both halves, reads come back through
  // the stub.
  const i64 c_banks = stratix::m20k_cost_32(shape.c_depth);
  for (i64 nb = 0; nb < e_m; ++nb) {
    for (i64 g = 0; g < e_n; ++g) {
      for (int r = 0; r < 3; ++r) {
        for (int h = 0; h < 2; ++h) {
          const std::string part =
              "b" + dec(nb) + "_g" + dec(g) + "_l" + dec(r) + "_h" + dec(h);
          for (i64 i = 0; i < c_banks; ++i) {
            const std::string id = "m20k_c_" + part + "_" + dec(i);
            b.inst(id, "m20k",
                   {{"config", "512x32"}, {"buffer", "c"}, {"partition", part}});
            b.net("q_" + id, 32, {id, "q"});
            b.sink("q_" + id, {"ctrl", "q_" + id});
          }
        }
      }
    }
  }

  // Reduction-group adder trees and C accumulators, one per output lane.
  for (i64 nb = 0; nb < e_m; ++nb) {
    for (i64 g = 0; g < e_n; ++g) {
      const std::string grp = "b" + dec(nb) + "_g" + dec(g);
      for (int r = 0; r < 3; ++r) {
        std::vector<std::string> level;
        for (i64 ar = 0; ar < e_k; ++ar)
          level.push_back("arr_" + grp + "_a" + dec(ar) + "_l" + dec(r));
        i64 node = 0;
        while (level.size() > 1) {
          std::vector<std::string> next;
          for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
            const std::string id = "add_" + grp + "_l" + dec(r) + "_n" + dec(node);
            b.inst(id, "soft_adder", {{"width", "32"}, {"role", "tree"}});
            b.sink(level[i], {id, "in0"});
            b.sink(level[i + 1], {id, "in1"});
            const std::string out = "treen_" + grp + "_l" + dec(r) + "_n" + dec(node);
            b.net(out, 32, {id, "sum"});
            next.push_back(out);
            ++node;
          }
          if (level.size() % 2 == 1) next.push_back(level.back());
          level = std::move(next);
        }
        const std::string acc = "acc_" + grp + "_l" + dec(r);
        b.inst(acc, "soft_adder", {{"width", "32"}, {"role", "accumulator"}});
        b.sink(level.front(), {acc, "in0"});
        const std::string rd = "c_rd_" + grp + "_l" + dec(r);
        b.net(rd, 32, {"ctrl", rd});
        b.sink(rd, {acc, "in1"});
        const std::string wr = "c_wr_" + grp + "_l" + dec(r);
        b.net(wr, 32, {acc, "sum"});
        for (int h = 0; h < 2; ++h)
          for (i64 i = 0; i < c_banks; ++i)
            b.sink(wr, {"m20k_c_" + grp + "_l" + dec(r) + "_h" + dec(h) + "_" + dec(i),
                        "din"});
      }
    }
  }

  // One address net per buffer role, optionally pipelined.
  struct Role {
    const char* name;
    int width;
  };
  const Role roles[3] = {{"a", addr_width(shape.a_depth)},
                         {"b", addr_width(shape.b_depth)},
                         {"c", addr_width(shape.c_depth)}};
  for (const Role& role : roles) {
    Endpoint driver{"ctrl", std::string("addr_") + role.name + "_src"};
    for (i64 s = 1; s <= pipeline.addr_stages; ++s) {
      const std::string reg = "preg_addr_" + std::string(role.name) + "_s" + dec(s);
      b.inst(reg, "pipeline_reg",
             {{"width", dec(role.width)}, {"stage", dec(s)}, {"path", "addr"}});
      const std::string stage_net =
          "addr_" + std::string(role.name) + "_p" + dec(s - 1);
      b.net(stage_net, role.width, driver);
      b.sink(stage_net, {reg, "d"});
      driver = {reg, "q"};
    }
    const std::string addr_net = "addr_" + std::string(role.name);
    b.net(addr_net, role.width, driver);
    for (const Instance& ins : b.nl.instances)
      if (ins.kind == "m20k" && ins.params.at("buffer") == role.name)
        b.sink(addr_net, {ins.id, "addr"});
  }

  return b.nl;
}

std::string emit_json(const Netlist& n) {
  ordered_json j;
  j["name"] = n.name;
  j["attributes"] = ordered_json::object();
  for (const auto& [k, v] : n.attributes) j["attributes"][k] = v;
  j["instances"] = ordered_json::array();
  for (const Instance& ins : n.instances) {
    ordered_json ji;
    ji["id"] = ins.id;
    ji["kind"] = ins.kind;
    ji["params"] = ordered_json::object();
    for (const auto& [k, v] : ins.params) ji["params"][k] = v;
    j["instances"].push_back(std::move(ji));
  }
  j["nets"] = ordered_json::array();
  for (const Net& net : n.nets) {
    ordered_json jn;
    jn["name"] = net.name;
    jn["width"] = net.width;
    jn["driver"] = net.driver.str();
    jn["sinks"] = ordered_json::array();
    for (const Endpoint& e : net.sinks) jn["sinks"].push_back(e.str());
    j["nets"].push_back(std::move(jn));
  }
  return j.dump(2) + "\n";
}

namespace {

Endpoint parse_endpoint(const std::string& text) {
  const std::size_t dot = text.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == text.size())
    throw ParseError("bad endpoint '" + text + "': expected instance.port");
  return {text.substr(0, dot), text.substr(dot + 1)};
}

}  // namespace

Netlist parse_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(std::string("netlist is not valid JSON: ") + e.what());
  }
  Netlist n;
  try {
    n.name = j.at("name").get<std::string>();
    for (const auto& [k, v] : j.at("attributes").items())
      n.attributes[k] = v.get<std::string>();
    for (const auto& ji : j.at("instances")) {
      Instance ins;
      ins.id = ji.at("id").get<std::string>();
      ins.kind = ji.at("kind").get<std::string>();
      for (const auto& [k, v] : ji.at("params").items())
        ins.params[k] = v.get<std::string>();
      n.instances.push_back(std::move(ins));
    }
    for (const auto& jn : j.at("nets")) {
      Net net;
      net.name = jn.at("name").get<std::string>();
      net.width = jn.at("width").get<int>();
      net.driver = parse_endpoint(jn.at("driver").get<std::string>());
      for (const auto& s : jn.at("sinks"))
        net.sinks.push_back(parse_endpoint(s.get<std::string>()));
      n.nets.push_back(std::move(net));
    }
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("bad netlist document: ") + e.what());
  }
  return n;
}

std::string emit_hdl(const Netlist& n) {
  std::ostringstream out;
  out << "// structural netlist: " << n.name << "\n";
  out << "//";
  for (const auto& [k, v] : n.attributes) out << " " << k << "=" << v;
  out << "\n";
  out << "module " << n.name << ";\n";

  for (const Net& net : n.nets) {
    out << "  wire ";
    if (net.width > 1) out << "[" << net.width - 1 << ":0] ";
    out << net.name << ";\n";
  }
  out << "\n";

  // Port connections per instance, in net creation order.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> conns;
  for (const Net& net : n.nets) {
    conns[net.driver.instance].emplace_back(net.driver.port, net.name);
    for (const Endpoint& e : net.sinks) conns[e.instance].emplace_back(e.port, net.name);
  }

  for (const Instance& ins : n.instances) {
    out << "  " << ins.kind << " #(";
    bool first = true;
    for (const auto& [k, v] : ins.params) {
      if (!first) out << ", ";
      out << "." << k << "(\"" << v << "\")";
      first = false;
    }
    out << ") " << ins.id << " (";
    const auto it = conns.find(ins.id);
    if (it != conns.end()) {
      first = true;
      for (const auto& [port, net] : it->second) {
        out << (first ? "\n" : ",\n") << "    ." << port << "(" << net << ")";
        first = false;
      }
      out << "\n  ";
    }
    out << ");\n";
  }
  out << "endmodule\n";
  return out.str();
}

CheckReport check(const Netlist& n, const stratix::TbParams& params,
                  const GemmDims& native) {
  CheckReport report;
  auto fail = [&](const std::string& msg) { report.violations.push_back(msg); };

  const i64 l_a = params.l_a, e_k = params.e_k, e_n = params.e_n, e_m = params.e_m;

  std::map<std::string, const Instance*> by_id;
  for (const Instance& ins : n.instances) {
    if (by_id.count(ins.id)) fail("duplicate instance id: " + ins.id);
    by_id[ins.id] = &ins;
  }

  // Instance-count formulas.
  i64 tb_total = 0, load_ports = 0, m20k_total = 0, tree_adders = 0, accumulators = 0;
  i64 data_regs = 0, addr_regs = 0;
  for (const Instance& ins : n.instances) {
    if (ins.kind == "tensor_block") {
      ++tb_total;
      if (ins.params.count("mode") && ins.params.at("mode") == "load_port") ++load_ports;
    } else if (ins.kind == "m20k") {
      ++m20k_total;
      const std::string buffer =
          ins.params.count("buffer") ? ins.params.at("buffer") : "?";
      const std::string config =
          ins.params.count("config") ? ins.params.at("config") : "?";
      static const std::set<std::string> wide80 = {"512x40", "1024x20", "2048x10"};
      static const std::set<std::string> wide32 = {"512x32", "1024x16", "2048x8"};
      if (buffer == "a" || buffer == "b") {
        if (!wide80.count(config))
          fail("m20k " + ins.id + ": 80-bit buffer on config " + config);
      } else if (buffer == "c") {
        if (!wide32.count(config))
          fail("m20k " + ins.id + ": 32-bit buffer on config " + config);
      } else {
        fail("m20k " + ins.id + ": unknown buffer role '" + buffer + "'");
      }
    } else if (ins.kind == "soft_adder") {
      const std::string role = ins.params.count("role") ? ins.params.at("role") : "?";
      if (role == "tree")
        ++tree_adders;
      else if (role == "accumulator")
        ++accumulators;
      else
        fail("soft_adder " + ins.id + ": unknown role '" + role + "'");
    } else if (ins.kind == "pipeline_reg") {
      const std::string path = ins.params.count("path") ? ins.params.at("path") : "?";
      if (path == "data")
        ++data_regs;
      else if (path == "addr")
        ++addr_regs;
      else
        fail("pipeline_reg " + ins.id + ": unknown path '" + path + "'");
    } else if (ins.kind != "control_stub") {
      fail("unknown instance kind: " + ins.kind);
    }
  }

  if (tb_total != tb_count(params))
    fail("tensor_block count " + std::to_string(tb_total) + " != " +
         std::to_string(tb_count(params)));
  if (load_ports != e_k * e_n * e_m)
    fail("load_port count " + std::to_string(load_ports) + " != " +
         std::to_string(e_k * e_n * e_m));
  const i64 expect_m20k = stratix::total_m20k(params, native, stratix::DimPolicy::relaxed);
  if (m20k_total != expect_m20k)
    fail("m20k count " + std::to_string(m20k_total) + " != " + std::to_string(expect_m20k));
  if (tree_adders != (e_k - 1) * 3 * e_n * e_m)
    fail("tree adder count " + std::to_string(tree_adders) + " != " +
         std::to_string((e_k - 1) * 3 * e_n * e_m));
  if (accumulators != 3 * e_n * e_m)
    fail("accumulator count " + std::to_string(accumulators) + " != " +
         std::to_string(3 * e_n * e_m));
  i64 want_addr_stages = 0, want_data_stages = 0;
  if (n.attributes.count("addr_stages"))
    want_addr_stages = std::stoll(n.attributes.at("addr_stages"));
  if (n.attributes.count("data_stages"))
    want_data_stages = std::stoll(n.attributes.at("data_stages"));
  const i64 b_part = (l_a - 1) * e_k * e_n;
  if (data_regs != want_data_stages * b_part)
    fail("data pipeline_reg count " + std::to_string(data_regs) + " != " +
         std::to_string(want_data_stages * b_part));
  if (addr_regs != want_addr_stages * 3)
    fail("addr pipeline_reg count " + std::to_string(addr_regs) + " != " +
         std::to_string(want_addr_stages * 3));

  // Wiring rules: endpoints resolve, one driver per net, no shared ports.
  std::set<std::string> net_names;
  std::map<std::string, std::string> port_use;  // endpoint -> net
  std::map<std::string, const Net*> by_driver;
  for (const Net& net : n.nets) {
    if (!net_names.insert(net.name).second) fail("duplicate net name: " + net.name);
    if (!by_id.count(net.driver.instance))
      fail("net " + net.name + ": driver instance '" + net.driver.instance +
           "' does not exist");
    if (by_driver.count(net.driver.str()))
      fail("endpoint " + net.driver.str() + " drives more than one net");
    by_driver[net.driver.str()] = &net;
    if (net.sinks.empty()) fail("net " + net.name + " has no sinks");
    for (const Endpoint& e : net.sinks) {
      if (!by_id.count(e.instance))
        fail("net " + net.name + ": sink instance '" + e.instance + "' does not exist");
      if (port_use.count(e.str()))
        fail("endpoint " + e.str() + " is connected to nets " + port_use.at(e.str()) +
             " and " + net.name);
      port_use[e.str()] = net.name;
    }
  }

  // Cascade data chains must cover each array end to end.
  for (i64 nb = 0; nb < e_m; ++nb) {
    for (i64 g = 0; g < e_n; ++g) {
      for (i64 ar = 0; ar < e_k; ++ar) {
        std::string current = "tb_b" + dec(nb) + "_g" + dec(g) + "_a" + dec(ar) + "_t0";
        std::set<std::string> visited{current};
        i64 length = 1;
        while (true) {
          const auto it = by_driver.find(current + ".casc_data_out");
          if (it == by_driver.end()) break;
          const Net* net = it->second;
          if (net->sinks.size() != 1 || net->sinks[0].port != "casc_data_in") {
            fail("net " + net->name + ": cascade net must have one casc_data_in sink");
            break;
          }
          current = net->sinks[0].instance;
          if (!visited.insert(current).second) {
            fail("cascade cycle through " + current);
            break;
          }
          ++length;
        }
        if (length != l_a)
          fail("cascade chain b" + dec(nb) + "/g" + dec(g) + "/a" + dec(ar) +
               " covers " + std::to_string(length) + " blocks, expected " +
               std::to_string(l_a));
      }
    }
  }

  return report;
}

}  // namespace gemmforge::netlist
