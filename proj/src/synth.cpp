// Copyright 2026 The exposure-probe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xprobe/synth.hpp"

namespace xprobe::synth {
namespace {

const std::vector<std::string> kNames = {
    "count", "index", "value", "result", "buffer", "size",   "name",  "list",
    "map",   "node",  "item",  "offset", "total",  "config", "state", "limit",
};
const std::vector<std::string> kMethods = {
    "get", "put", "add", "remove", "compute", "update", "read", "write",
    "parse", "flush", "close", "open", "apply", "merge", "reset", "visit",
};
const std::vector<std::string> kTypes = {"int", "long", "String", "double", "Object", "boolean"};
const std::vector<std::string> kOps = {"+", "-", "*", "/", "%"};
const std::vector<std::string> kCmp = {"<", "<=", ">", ">=", "==", "!="};

constexpr std::string_view kIndent = "        ";

std::string number(Rng& rng) { return std::to_string(rng.below(1000)); }

}  // namespace

std::string random_tokens(Rng& rng, std::size_t n) {
  static constexpr std::string_view kAlphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_(){};=+-*/<>.,";
  std::string out(n, 'x');
  for (auto& c : out) c = kAlphabet[rng.below(kAlphabet.size())];
  return out;
}

std::string identifier(Rng& rng) { return rng.pick(kNames) + std::to_string(rng.below(10000)); }

std::string java_lines(Rng& rng, std::size_t lines) {
  std::string out;
  for (std::size_t i = 0; i < lines; ++i) {
    out += kIndent;
    switch (rng.below(5)) {
      case 0:
        out += rng.pick(kTypes) + " " + identifier(rng) + " = " + identifier(rng) + " " +
               rng.pick(kOps) + " " + number(rng) + ";";
        break;
      case 1:
        out += identifier(rng) + "." + rng.pick(kMethods) + "(" + identifier(rng) + ");";
        break;
      case 2:
        out += "if (" + identifier(rng) + " " + rng.pick(kCmp) + " " + number(rng) + ") { " +
               identifier(rng) + "++; }";
        break;
      case 3:
        out += identifier(rng) + " = " + rng.pick(kMethods) + "(" + identifier(rng) + ", " +
               number(rng) + ");";
        break;
      default:
        out += "log.debug(\"" + identifier(rng) + "\", " + identifier(rng) + ");";
        break;
    }
    out += '\n';
  }
  return out;
}

std::string java_file(Rng& rng, std::size_t lines) {
  std::string out = "package org.example." + identifier(rng) + ";\n\npublic class C" +
                    std::to_string(rng.below(100000)) + " {\n    void " + rng.pick(kMethods) +
                    std::to_string(rng.below(1000)) + "() {\n";
  out += java_lines(rng, lines);
  out += "    }\n}\n";
  return out;
}

Mutation statement_pair(Rng& rng) {
  const std::string a = identifier(rng);
  const std::string b = identifier(rng);
  const std::string c = identifier(rng);
  Mutation m;
  switch (rng.below(8)) {
    case 0: {
      const std::string op1 = rng.pick(kOps);
      std::string op2 = rng.pick(kOps);
      while (op2 == op1) op2 = rng.pick(kOps);
      m.bug = "int " + a + " = " + b + " " + op1 + " " + c + ";";
      m.fix = "int " + a + " = " + b + " " + op2 + " " + c + ";";
      m.category = "CHANGE_OPERATOR";
      break;
    }
    case 1: {
      const std::string n1 = number(rng);
      std::string n2 = number(rng);
      while (n2 == n1) n2 = number(rng);
      const std::string method = rng.pick(kMethods);
      m.bug = a + " = " + method + "(" + b + ", " + n1 + ");";
      m.fix = a + " = " + method + "(" + b + ", " + n2 + ");";
      m.category = "CHANGE_NUMERAL";
      break;
    }
    case 2: {
      const std::string m1 = rng.pick(kMethods);
      std::string m2 = rng.pick(kMethods);
      while (m2 == m1) m2 = rng.pick(kMethods);
      m.bug = a + "." + m1 + "(" + b + ", " + c + ");";
      m.fix = a + "." + m2 + "(" + b + ", " + c + ");";
      m.category = "DIFFERENT_METHOD_SAME_ARGS";
      break;
    }
    case 3: {
      const std::string method = rng.pick(kMethods);
      m.bug = method + "(" + a + ", " + b + ");";
      m.fix = method + "(" + b + ", " + a + ");";
      m.category = "SWAP_ARGUMENTS";
      break;
    }
    case 4:
      m.bug = a + ".setEnabled(true);";
      m.fix = a + ".setEnabled(false);";
      m.category = "SWAP_BOOLEAN_LITERAL";
      break;
    case 5:
      m.bug = "return " + a + " + " + b + ";";
      m.fix = "return " + c + " + " + b + ";";
      m.category = "CHANGE_IDENTIFIER";
      break;
    case 6:
      m.bug = "if (" + a + " != null) {";
      m.fix = "if (" + a + " != null && " + b + " > 0) {";
      m.category = "MORE_SPECIFIC_IF";
      break;
    default:
      m.bug = "if (" + a + ".isEmpty()) {";
      m.fix = "if (!" + a + ".isEmpty()) {";
      m.category = "CHANGE_UNARY_OPERATOR";
      break;
  }
  return m;
}

BugFixPair make_pair(Rng& rng, std::string pair_id, std::size_t before, std::size_t after,
                     std::uint64_t commits) {
  const Mutation mut = statement_pair(rng);
  const std::string head = "package org.example." + identifier(rng) + ";\n\npublic class C" +
                           std::to_string(rng.below(100000)) + " {\n    void " +
                           rng.pick(kMethods) + std::to_string(rng.below(1000)) + "() {\n" +
                           java_lines(rng, before) + std::string(kIndent);
  const std::string tail = "\n" + java_lines(rng, after) + "    }\n}\n";
  BugFixPair p;
  p.pair_id = std::move(pair_id);
  p.bug_text = mut.bug;
  p.fix_text = mut.fix;
  p.context_before = head;
  p.bug_category = mut.category;
  p.commits_until_fix = commits;
  p.source_file_bug = head + mut.bug + tail;
  p.source_file_fix = head + mut.fix + tail;
  return p;
}

Document embed(Rng& rng, std::string id, std::string_view text, std::size_t filler) {
  Document d;
  d.id = std::move(id);
  d.text = random_tokens(rng, filler) + "\n" + std::string(text) + java_lines(rng, 4);
  return d;
}

}  // namespace xprobe::synth
