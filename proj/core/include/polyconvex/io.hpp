#pragma once

#include <iosfwd>
#include <string>

#include "polyconvex/analysis.hpp"

namespace pcx {

// Loaded objects keyed by canonical path; complexes are shared so that
// cross-references compare as the same object.
struct Workspace {
  std::map<std::string, Complex::Ptr> complexes;
};

Complex::Ptr load_complex(const std::string& path, Workspace& ws);
Weight load_weight(const std::string& path, Workspace& ws);
PAFunc load_pafunc(const std::string& path, Workspace& ws);
MinAffine load_minaffine(const std::string& path, Workspace& ws);
Combo load_combo(const std::string& path, Workspace& ws);
BalancedWitness load_witness(const std::string& path, Workspace& ws);

std::string serialize_complex(const Complex& c);
std::string serialize_weight(const Weight& w, const std::string& complex_ref);
std::string serialize_pafunc(const PAFunc& f, const std::string& complex_ref);
std::string serialize_combo(const Combo& c, const std::string& complex_ref);

void write_file(const std::string& path, const std::string& content);

// 17 significant digits, round-trip exact
std::string format_double(double x);

}  // namespace pcx
