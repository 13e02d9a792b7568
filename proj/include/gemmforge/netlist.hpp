#pragma once

#include <map>
#include <string>
#include <vector>

#include "gemmforge/stratix.hpp"

namespace gemmforge::netlist {

struct Endpoint {
  std::string instance;
  std::string port;

  std::string str() const { return instance + "." + port; }
  friend bool operator==(const Endpoint& a, const Endpoint& b) {
    return a.instance == b.instance && a.port == b.port;
  }
};

struct Net {
  std::string name;
  int width = 0;  // bits
  Endpoint driver;
  std::vector<Endpoint> sinks;

  friend bool operator==(const Net& a, const Net& b) {
    return a.name == b.name && a.width == b.width && a.driver == b.driver &&
           a.sinks == b.sinks;
  }
};

// kind is one of: tensor_block, m20k, soft_adder, pipeline_reg, control_stub.
// params carry the kind-specific attributes (mode, config, width, stage, ...).
struct Instance {
  std::string id;
  std::string kind;
  std::map<std::string, std::string> params;

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.id == b.id && a.kind == b.kind && a.params == b.params;
  }
};

struct Netlist {
  std::string name;  // tb_<la>x<ek>x<en>x<em>
  std::map<std::string, std::string> attributes;
  std::vector<Instance> instances;
  std::vector<Net> nets;

  friend bool operator==(const Netlist& a, const Netlist& b) {
    return a.name == b.name && a.attributes == b.attributes && a.instances == b.instances &&
           a.nets == b.nets;
  }
};

struct PipelineConfig {
  i64 addr_stages = 0;
  i64 data_stages = 0;
};

// Structural netlist of the TB layout, memory, adder trees, pipeline
// registers, and a declared control stub for the given parameters.
Netlist generate(const stratix::TbParams& params, const GemmDims& native,
                 const PipelineConfig& pipeline);

std::string emit_json(const Netlist& n);
Netlist parse_json(const std::string& text);

// Minimal structural module/wire/instance rendering; grammar in docs/formats.md.
std::string emit_hdl(const Netlist& n);

struct CheckReport {
  std::vector<std::string> violations;
  bool clean() const { return violations.empty(); }
};

// Re-derives the instance-count formulas from (params, native), and verifies
// single-driver wiring, cascade-chain shape, and m20k config/width pairing.
CheckReport check(const Netlist& n, const stratix::TbParams& params,
                  const GemmDims& native);

}  // namespace gemmforge::netlist
